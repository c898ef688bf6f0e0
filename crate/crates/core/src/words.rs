//! Free groups on a finite basis: freely reduced words and automorphisms
//! given by generator images.
//!
//! A letter is a nonzero `i16`: `+k` is the generator with index `k-1`,
//! `-k` its inverse. Words are kept reduced at all times, so equality of
//! words is equality in the free group.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signed generator index. Positive `k` = generator `k-1`, negative = inverse.
pub type Letter = i16;

#[inline]
pub fn letter_inverse(l: Letter) -> Letter {
    -l
}

/// Order on letters used everywhere a canonical order is needed:
/// generator index first, positive before negative.
#[inline]
pub fn letter_key(l: Letter) -> (u16, u8) {
    (l.unsigned_abs() - 1, u8::from(l < 0))
}

/// An ordered list of distinct generator names; the rank of the free group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    symbols: Vec<String>,
}

impl Basis {
    pub fn new(symbols: Vec<String>) -> Result<Arc<Basis>> {
        if symbols.is_empty() {
            return Err(Error::Input("basis must have rank >= 1".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.contains(char::is_whitespace) || s.ends_with('\'') {
                return Err(Error::Input(format!("bad generator name {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Input(format!("duplicate generator name {s:?}")));
            }
        }
        if symbols.len() > i16::MAX as usize - 1 {
            return Err(Error::Input("basis too large".into()));
        }
        Ok(Arc::new(Basis { symbols }))
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, idx: usize) -> &str {
        &self.symbols[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Letter for a token like `a` or `a'` or `a^-1`.
    pub fn letter_of_token(&self, tok: &str) -> Result<Letter> {
        let (name, inv) = if let Some(stripped) = tok.strip_suffix("^-1") {
            (stripped, true)
        } else if let Some(stripped) = tok.strip_suffix('\'') {
            (stripped, true)
        } else {
            (tok, false)
        };
        let idx = self
            .index_of(name)
            .ok_or_else(|| Error::Input(format!("unknown generator symbol {name:?}")))?;
        let l = (idx + 1) as Letter;
        Ok(if inv { -l } else { l })
    }

    pub fn token_of_letter(&self, l: Letter) -> String {
        let name = self.symbol((l.unsigned_abs() - 1) as usize);
        if l < 0 {
            format!("{name}'")
        } else {
            name.to_string()
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord { letters: Vec::new() }
    }

    pub fn generator(idx: usize) -> Self {
        ReducedWord { letters: vec![(idx + 1) as Letter] }
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn reduce(raw: &[Letter]) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
        for &l in raw {
            debug_assert!(l != 0);
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &ReducedWord) -> Self {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord { letters: out }
    }

    pub fn concat_all(words: &[&ReducedWord]) -> Self {
        let mut out = ReducedWord::identity();
        for w in words {
            out = out.concat(w);
        }
        out
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = ReducedWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Cyclic reduction: returns `(core, conjugator)` with
    /// `self = conjugator * core * conjugator^-1` and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (ReducedWord, ReducedWord) {
        let mut lo = 0usize;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == -self.letters[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        (
            ReducedWord { letters: self.letters[lo..hi].to_vec() },
            ReducedWord { letters: self.letters[..lo].to_vec() },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() < 2 || self.letters[0] != -self.letters[self.len() - 1]
    }

    /// Canonical representative of the conjugacy class: the cyclic rotation
    /// of the cyclic core that is minimal in letter order. Two words are
    /// conjugate iff their keys are equal.
    pub fn conjugacy_key(&self) -> Vec<Letter> {
        let (core, _) = self.cyclic_reduce();
        let n = core.len();
        if n == 0 {
            return Vec::new();
        }
        let mut best: Option<Vec<Letter>> = None;
        for r in 0..n {
            let mut rot: Vec<Letter> = Vec::with_capacity(n);
            rot.extend_from_slice(&core.letters[r..]);
            rot.extend_from_slice(&core.letters[..r]);
            if best.as_ref().map_or(true, |b| cmp_letter_seq(&rot, b) == std::cmp::Ordering::Less) {
                best = Some(rot);
            }
        }
        best.unwrap()
    }

    /// Word-length of the shortest representative in the conjugacy class.
    pub fn conjugacy_length(&self) -> usize {
        self.cyclic_reduce().0.len()
    }

    pub fn parse(basis: &Basis, text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            raw.push(basis.letter_of_token(tok)?);
        }
        Ok(ReducedWord::reduce(&raw))
    }

    pub fn display<'a>(&'a self, basis: &'a Basis) -> WordDisplay<'a> {
        WordDisplay { word: self, basis }
    }

    /// Canonical shortlex-style comparison: length first, then letter order.
    pub fn canonical_cmp(&self, other: &ReducedWord) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| cmp_letter_seq(&self.letters, &other.letters))
    }
}

pub fn cmp_letter_seq(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    let mut ib = b.iter();
    for &la in a {
        match ib.next() {
            None => return std::cmp::Ordering::Greater,
            Some(&lb) => {
                let o = letter_key(la).cmp(&letter_key(lb));
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
        }
    }
    if ib.next().is_some() {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    }
}

pub struct WordDisplay<'a> {
    word: &'a ReducedWord,
    basis: &'a Basis,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &l in self.word.letters() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}", self.basis.token_of_letter(l))?;
        }
        Ok(())
    }
}

/// An automorphism of the free group, given by generator images in both
/// directions. The inverse images are required input; the constructor checks
/// that the two maps compose to the identity on every generator.
#[derive(Debug, Clone)]
pub struct FreeAutomorphism {
    basis: Arc<Basis>,
    forward: Vec<ReducedWord>,
    backward: Vec<ReducedWord>,
}

impl FreeAutomorphism {
    pub fn new(
        basis: Arc<Basis>,
        forward: Vec<ReducedWord>,
        backward: Vec<ReducedWord>,
    ) -> Result<Self> {
        if forward.len() != basis.rank() || backward.len() != basis.rank() {
            return Err(Error::Input(
                "automorphism must give one image per generator".into(),
            ));
        }
        let aut = FreeAutomorphism { basis, forward, backward };
        for i in 0..aut.basis.rank() {
            let g = ReducedWord::generator(i);
            if aut.apply(&aut.apply(&g, 1), -1) != g || aut.apply(&aut.apply(&g, -1), 1) != g {
                return Err(Error::Input(format!(
                    "forward/backward images do not invert each other on generator {}",
                    aut.basis.symbol(i)
                )));
            }
        }
        Ok(aut)
    }

    pub fn identity(basis: Arc<Basis>) -> Self {
        let images: Vec<ReducedWord> = (0..basis.rank()).map(ReducedWord::generator).collect();
        FreeAutomorphism { basis, forward: images.clone(), backward: images }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn forward_images(&self) -> &[ReducedWord] {
        &self.forward
    }

    pub fn backward_images(&self) -> &[ReducedWord] {
        &self.backward
    }

    pub fn is_identity(&self) -> bool {
        (0..self.basis.rank()).all(|i| self.forward[i] == ReducedWord::generator(i))
    }

    fn substitute(&self, w: &ReducedWord, images: &[ReducedWord]) -> ReducedWord {
        let mut raw: Vec<Letter> = Vec::with_capacity(4 * w.len() + 4);
        for &l in w.letters() {
            let img = &images[(l.unsigned_abs() - 1) as usize];
            if l > 0 {
                raw.extend_from_slice(img.letters());
            } else {
                raw.extend(img.letters().iter().rev().map(|&x| -x));
            }
        }
        ReducedWord::reduce(&raw)
    }

    /// Image of `w` under the `power`-th iterate; negative powers use the
    /// backward images.
    pub fn apply(&self, w: &ReducedWord, power: i64) -> ReducedWord {
        let images = if power >= 0 { &self.forward } else { &self.backward };
        let mut out = w.clone();
        for _ in 0..power.unsigned_abs() {
            out = self.substitute(&out, images);
        }
        out
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<FreeAutomorphism> {
        if !Arc::ptr_eq(&self.basis, &other.basis) && self.basis != other.basis {
            return Err(Error::BasisMismatch("compose".into()));
        }
        let forward: Vec<ReducedWord> =
            other.forward.iter().map(|w| self.apply(w, 1)).collect();
        let backward: Vec<ReducedWord> =
            self.backward.iter().map(|w| other.apply(w, -1)).collect();
        FreeAutomorphism::new(self.basis.clone(), forward, backward)
    }

    /// Integer matrix of the induced map on the abelianization; column `j`
    /// is the exponent vector of the image of generator `j`.
    pub fn abelianization(&self) -> Vec<Vec<i64>> {
        let n = self.basis.rank();
        let mut m = vec![vec![0i64; n]; n];
        for (j, img) in self.forward.iter().enumerate() {
            for &l in img.letters() {
                let i = (l.unsigned_abs() - 1) as usize;
                m[i][j] += if l > 0 { 1 } else { -1 };
            }
        }
        m
    }
}

/// Exponent vector of a word in Z^rank.
pub fn abelianize(rank: usize, w: &ReducedWord) -> Vec<i64> {
    let mut v = vec![0i64; rank];
    for &l in w.letters() {
        v[(l.unsigned_abs() - 1) as usize] += if l > 0 { 1 } else { -1 };
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis2() -> Arc<Basis> {
        Basis::new(vec!["a".into(), "b".into()]).unwrap()
    }

    fn w(b: &Basis, s: &str) -> ReducedWord {
        ReducedWord::parse(b, s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let b = basis2();
        assert!(w(&b, "a a'").is_empty());
        assert_eq!(w(&b, "a b b' a"), w(&b, "a a"));
        assert!(w(&b, "a b' b a'").is_empty());
    }

    #[test]
    fn reduce_is_idempotent_and_confluent() {
        // All raw sequences of length <= 5 in rank 2: reducing in any
        // interleaving order agrees with the stack reduction.
        let b = basis2();
        let letters: Vec<Letter> = vec![1, -1, 2, -2];
        let mut stack: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..5 {
            let mut next = Vec::new();
            for s in &stack {
                for &l in &letters {
                    let mut t = s.clone();
                    t.push(l);
                    next.push(t);
                }
            }
            for raw in &next {
                let reduced = ReducedWord::reduce(raw);
                let again = ReducedWord::reduce(reduced.letters());
                assert_eq!(reduced, again);
                // alternative order: cancel the first removable pair repeatedly
                let mut alt = raw.clone();
                loop {
                    let mut removed = false;
                    for i in 0..alt.len().saturating_sub(1) {
                        if alt[i] == -alt[i + 1] {
                            alt.drain(i..=i + 1);
                            removed = true;
                            break;
                        }
                    }
                    if !removed {
                        break;
                    }
                }
                assert_eq!(reduced.letters(), &alt[..]);
            }
            stack = next;
        }
        let _ = b;
    }

    #[test]
    fn concat_examples_and_associativity() {
        let b = basis2();
        assert!(w(&b, "a").concat(&w(&b, "a'")).is_empty());
        assert_eq!(w(&b, "a b").concat(&w(&b, "b' b")), w(&b, "a b"));
        assert_eq!(w(&b, "a b").concat(&w(&b, "b'")), w(&b, "a"));
        // exhaustive associativity over all reduced words of length <= 3 in rank 2
        let mut words = vec![ReducedWord::identity()];
        let letters: Vec<Letter> = vec![1, -1, 2, -2];
        let mut frontier = vec![ReducedWord::identity()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for u in &frontier {
                for &l in &letters {
                    if u.letters().last() != Some(&-l) {
                        let mut ls = u.letters().to_vec();
                        ls.push(l);
                        next.push(ReducedWord::reduce(&ls));
                    }
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        for u in &words {
            for v in &words {
                for x in &words {
                    assert_eq!(u.concat(v).concat(x), u.concat(&v.concat(x)));
                }
            }
            assert_eq!(u.concat(&ReducedWord::identity()), *u);
            assert_eq!(ReducedWord::identity().concat(u), *u);
        }
    }

    #[test]
    fn apply_examples() {
        let b = basis2();
        let id = FreeAutomorphism::identity(b.clone());
        assert_eq!(id.apply(&w(&b, "a b"), 5), w(&b, "a b"));

        // a -> a, b -> b a
        let phi = FreeAutomorphism::new(
            b.clone(),
            vec![w(&b, "a"), w(&b, "b a")],
            vec![w(&b, "a"), w(&b, "b a'")],
        )
        .unwrap();
        // independent oracle: iterate the substitution by hand
        let mut expect = w(&b, "b");
        for _ in 0..3 {
            let mut raw = Vec::new();
            for &l in expect.letters() {
                match l {
                    1 => raw.push(1),
                    -1 => raw.push(-1),
                    2 => raw.extend([2, 1]),
                    -2 => raw.extend([-1, -2]),
                    _ => unreachable!(),
                }
            }
            expect = ReducedWord::reduce(&raw);
        }
        assert_eq!(phi.apply(&w(&b, "b"), 3), expect);
        assert_eq!(expect, w(&b, "b a a a"));

        let back = phi.apply(&w(&b, "b"), -1);
        assert_eq!(back, w(&b, "b a'"));
        assert_eq!(phi.apply(&back, 1), w(&b, "b"));
    }

    #[test]
    fn apply_power_additivity_sampled() {
        let b = basis2();
        let phi = FreeAutomorphism::new(
            b.clone(),
            vec![w(&b, "a"), w(&b, "b a")],
            vec![w(&b, "a"), w(&b, "b a'")],
        )
        .unwrap();
        let samples = [w(&b, "a b"), w(&b, "b' a b b"), w(&b, "a a b'")];
        for u in &samples {
            for m in -3i64..=3 {
                for n in -3i64..=3 {
                    assert_eq!(phi.apply(u, m + n), phi.apply(&phi.apply(u, n), m));
                }
            }
        }
    }

    #[test]
    fn cyclic_reduce_examples() {
        let b = basis2();
        let (core, conj) = w(&b, "a b a'").cyclic_reduce();
        assert_eq!(core, w(&b, "b"));
        assert_eq!(conj, w(&b, "a"));
        let (core, conj) = w(&b, "b").cyclic_reduce();
        assert_eq!(core, w(&b, "b"));
        assert!(conj.is_empty());

        // strip-loop oracle on a batch of words
        let samples = ["a b a b' a'", "a b a'", "a a b a' a'", "b a b'"];
        for s in samples {
            let word = w(&b, s);
            let (core, conj) = word.cyclic_reduce();
            // oracle: strip matching first/last letters
            let mut ls = word.letters().to_vec();
            let mut pre: Vec<Letter> = Vec::new();
            while ls.len() >= 2 && ls[0] == -ls[ls.len() - 1] {
                pre.push(ls[0]);
                ls = ls[1..ls.len() - 1].to_vec();
            }
            assert_eq!(core.letters(), &ls[..]);
            assert_eq!(conj.letters(), &pre[..]);
            assert_eq!(conj.concat(&core).concat(&conj.inverse()), word);
            assert!(core.is_cyclically_reduced());
            assert_eq!(word.conjugacy_length(), core.len());
        }
    }

    #[test]
    fn bad_symbols_rejected() {
        let b = basis2();
        assert!(ReducedWord::parse(&b, "a c").is_err());
        assert!(Basis::new(vec!["a".into(), "a".into()]).is_err());
        assert!(Basis::new(vec![]).is_err());
    }

    #[test]
    fn non_inverse_pair_rejected() {
        let b = basis2();
        let bad = FreeAutomorphism::new(
            b.clone(),
            vec![w(&b, "a"), w(&b, "b a")],
            vec![w(&b, "a"), w(&b, "b")],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn conjugacy_key_groups_conjugates() {
        let b = basis2();
        let u = w(&b, "a b");
        let v = w(&b, "b a");
        let x = w(&b, "a' b a a");
        assert_eq!(u.conjugacy_key(), v.conjugacy_key());
        assert_eq!(u.conjugacy_key(), x.conjugacy_key());
        assert_ne!(u.conjugacy_key(), w(&b, "a b'").conjugacy_key());
    }
}
