//! The group G = F x| Z determined by a free-group automorphism, in the
//! normal form t^k.w with w a reduced word in the fiber.
//!
//! Multiplication convention, fixed once for the whole workbench:
//! t w t^-1 = phi(w). Consequently
//!     t^k w . t^m u = t^(k+m) . reduce(phi^-m(w) u).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Basis, FreeAutomorphism, ReducedWord};

/// An element of the mapping torus in normal form `t^k . w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FbcElement {
    pub t_exp: i32,
    pub fiber: ReducedWord,
}

impl FbcElement {
    pub fn identity() -> Self {
        FbcElement { t_exp: 0, fiber: ReducedWord::identity() }
    }

    pub fn from_fiber(w: ReducedWord) -> Self {
        FbcElement { t_exp: 0, fiber: w }
    }

    pub fn stable_letter() -> Self {
        FbcElement { t_exp: 1, fiber: ReducedWord::identity() }
    }

    pub fn is_identity(&self) -> bool {
        self.t_exp == 0 && self.fiber.is_empty()
    }

    /// Canonical order: t-exponent, then fiber shortlex. Deterministic across runs.
    pub fn canonical_cmp(&self, other: &FbcElement) -> Ordering {
        self.t_exp
            .cmp(&other.t_exp)
            .then_with(|| self.fiber.canonical_cmp(&other.fiber))
    }
}

/// A named, inverse-closed generating set entry.
#[derive(Debug, Clone)]
pub struct GroupGenerator {
    pub label: String,
    pub element: FbcElement,
    /// index of the inverse generator in the generating set
    pub inverse: usize,
}

/// The group `F x| <t>` together with a fixed finite generating set.
#[derive(Debug, Clone)]
pub struct FbcGroup {
    basis: Arc<Basis>,
    monodromy: Arc<FreeAutomorphism>,
    stable_symbol: String,
    generators: Vec<GroupGenerator>,
}

impl FbcGroup {
    /// Build with the default generating set: every basis generator and the
    /// stable letter, inverse-closed.
    pub fn new(
        basis: Arc<Basis>,
        monodromy: FreeAutomorphism,
        stable_symbol: impl Into<String>,
    ) -> Result<Self> {
        let stable_symbol = stable_symbol.into();
        if basis.index_of(&stable_symbol).is_some() {
            return Err(Error::Input(format!(
                "stable letter {stable_symbol:?} collides with a basis symbol"
            )));
        }
        let mut generators = Vec::new();
        for i in 0..basis.rank() {
            let g = FbcElement::from_fiber(ReducedWord::generator(i));
            let n = generators.len();
            generators.push(GroupGenerator {
                label: basis.symbol(i).to_string(),
                element: g.clone(),
                inverse: n + 1,
            });
            generators.push(GroupGenerator {
                label: format!("{}'", basis.symbol(i)),
                element: invert_raw(&monodromy, &g),
                inverse: n,
            });
        }
        let n = generators.len();
        generators.push(GroupGenerator {
            label: stable_symbol.clone(),
            element: FbcElement::stable_letter(),
            inverse: n + 1,
        });
        generators.push(GroupGenerator {
            label: format!("{stable_symbol}'"),
            element: FbcElement { t_exp: -1, fiber: ReducedWord::identity() },
            inverse: n,
        });
        Ok(FbcGroup {
            basis,
            monodromy: Arc::new(monodromy),
            stable_symbol,
            generators,
        })
    }

    /// Extend the generating set with extra elements (inverse-closed).
    pub fn with_extra_generators(mut self, extra: Vec<(String, FbcElement)>) -> Self {
        for (label, g) in extra {
            let n = self.generators.len();
            let inv = self.invert(&g);
            self.generators.push(GroupGenerator { label: label.clone(), element: g, inverse: n + 1 });
            self.generators.push(GroupGenerator {
                label: format!("{label}'"),
                element: inv,
                inverse: n,
            });
        }
        self
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn monodromy(&self) -> &FreeAutomorphism {
        &self.monodromy
    }

    pub fn stable_symbol(&self) -> &str {
        &self.stable_symbol
    }

    pub fn generators(&self) -> &[GroupGenerator] {
        &self.generators
    }

    pub fn multiply(&self, g: &FbcElement, h: &FbcElement) -> FbcElement {
        FbcElement {
            t_exp: g.t_exp + h.t_exp,
            fiber: self
                .monodromy
                .apply(&g.fiber, -(h.t_exp as i64))
                .concat(&h.fiber),
        }
    }

    pub fn multiply_all(&self, gs: &[&FbcElement]) -> FbcElement {
        let mut out = FbcElement::identity();
        for g in gs {
            out = self.multiply(&out, g);
        }
        out
    }

    pub fn invert(&self, g: &FbcElement) -> FbcElement {
        invert_raw(&self.monodromy, g)
    }

    pub fn power(&self, g: &FbcElement, n: i64) -> FbcElement {
        let base = if n >= 0 { g.clone() } else { self.invert(g) };
        let mut out = FbcElement::identity();
        for _ in 0..n.unsigned_abs() {
            out = self.multiply(&out, &base);
        }
        out
    }

    pub fn conjugate(&self, g: &FbcElement, by: &FbcElement) -> FbcElement {
        let inv = self.invert(by);
        self.multiply(&self.multiply(by, g), &inv)
    }

    /// Does `g` equal `p^n` for some integer n? Returns the exponent.
    pub fn cyclic_power_of(&self, g: &FbcElement, p: &FbcElement) -> Option<i64> {
        if g.is_identity() {
            return Some(0);
        }
        if p.is_identity() {
            return None;
        }
        if p.t_exp != 0 {
            if g.t_exp % p.t_exp != 0 {
                return None;
            }
            let n = (g.t_exp / p.t_exp) as i64;
            if self.power(p, n) == *g {
                return Some(n);
            }
            return None;
        }
        if g.t_exp != 0 {
            return None;
        }
        // both in the fiber: bounded scan, |p^n| grows at least by the cyclic core
        let core = p.fiber.conjugacy_length().max(1);
        let cap = (g.fiber.len() / core + 2) as i64;
        for n in 1..=cap {
            for s in [n, -n] {
                if self.power(p, s) == *g {
                    return Some(s);
                }
            }
        }
        None
    }

    pub fn parse_element(&self, t_exp: i32, fiber: &str) -> Result<FbcElement> {
        Ok(FbcElement { t_exp, fiber: ReducedWord::parse(&self.basis, fiber)? })
    }

    pub fn display<'a>(&'a self, g: &'a FbcElement) -> ElementDisplay<'a> {
        ElementDisplay { group: self, element: g }
    }
}

fn invert_raw(phi: &FreeAutomorphism, g: &FbcElement) -> FbcElement {
    // (t^k w)^-1 = t^-k . phi^k(w^-1)
    FbcElement {
        t_exp: -g.t_exp,
        fiber: phi.apply(&g.fiber.inverse(), g.t_exp as i64),
    }
}

pub struct ElementDisplay<'a> {
    group: &'a FbcGroup,
    element: &'a FbcElement,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.group.stable_symbol();
        match (self.element.t_exp, self.element.fiber.is_empty()) {
            (0, true) => write!(f, "1"),
            (0, false) => write!(f, "{}", self.element.fiber.display(self.group.basis())),
            (k, true) => write!(f, "{t}^{k}"),
            (k, false) => write!(
                f,
                "{t}^{k} . {}",
                self.element.fiber.display(self.group.basis())
            ),
        }
    }
}

/// A finite ball of the Cayley graph with exact distance labels.
///
/// Vertices are sorted in canonical element order; adjacency is a CSR table
/// with one slot per (vertex, generator).
#[derive(Debug)]
pub struct CayleyBall {
    pub radius: u32,
    verts: Vec<FbcElement>,
    dist: Vec<u16>,
    /// adj[v * gen_count + i] = target index or NONE
    adj: Vec<u32>,
    gen_count: usize,
}

pub const NO_VERTEX: u32 = u32::MAX;

impl CayleyBall {
    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn vertices(&self) -> &[FbcElement] {
        &self.verts
    }

    pub fn distance_label(&self, idx: usize) -> u32 {
        self.dist[idx] as u32
    }

    pub fn gen_count(&self) -> usize {
        self.gen_count
    }

    pub fn neighbor(&self, v: usize, gen: usize) -> Option<usize> {
        let t = self.adj[v * self.gen_count + gen];
        (t != NO_VERTEX).then_some(t as usize)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.gen_count).filter_map(move |i| self.neighbor(v, i))
    }

    pub fn index_of(&self, g: &FbcElement) -> Option<usize> {
        self.verts
            .binary_search_by(|probe| probe.canonical_cmp(g))
            .ok()
    }

    /// Exact distance between two ball elements, when the normal form of
    /// g^-1 h lies in the ball; None means the distance exceeds the radius.
    pub fn distance(&self, group: &FbcGroup, g: &FbcElement, h: &FbcElement) -> Option<u32> {
        let d = group.multiply(&group.invert(g), h);
        self.index_of(&d).map(|i| self.distance_label(i))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.verts.len()).flat_map(move |v| {
            (0..self.gen_count)
                .filter_map(move |i| self.neighbor(v, i).map(|t| (v, i, t)))
        })
    }
}

/// Exact ball of radius `r` around the identity; errors out (with the partial
/// count) when the vertex cap is exceeded.
pub fn ball(group: &FbcGroup, r: u32, cap: usize) -> Result<CayleyBall> {
    let mut index: HashMap<FbcElement, u32> = HashMap::new();
    let mut elems: Vec<FbcElement> = Vec::new();
    let mut dist: Vec<u16> = Vec::new();
    index.insert(FbcElement::identity(), 0);
    elems.push(FbcElement::identity());
    dist.push(0);
    let mut frontier: Vec<u32> = vec![0];
    for layer in 1..=r {
        let mut next: Vec<u32> = Vec::new();
        for &v in &frontier {
            let gv = elems[v as usize].clone();
            for gen in group.generators() {
                let h = group.multiply(&gv, &gen.element);
                if !index.contains_key(&h) {
                    if elems.len() >= cap {
                        return Err(Error::Resource(format!(
                            "ball cap {cap} exceeded at radius {layer} ({} vertices so far)",
                            elems.len()
                        )));
                    }
                    let id = elems.len() as u32;
                    index.insert(h.clone(), id);
                    elems.push(h);
                    dist.push(layer as u16);
                    next.push(id);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    drop(index);
    // canonical reorder
    let mut order: Vec<u32> = (0..elems.len() as u32).collect();
    order.sort_by(|&x, &y| elems[x as usize].canonical_cmp(&elems[y as usize]));
    let verts: Vec<FbcElement> = order.iter().map(|&i| elems[i as usize].clone()).collect();
    let new_dist: Vec<u16> = order.iter().map(|&i| dist[i as usize]).collect();
    drop(elems);
    let gen_count = group.generators().len();
    let mut adj = vec![NO_VERTEX; verts.len() * gen_count];
    for (v, gv) in verts.iter().enumerate() {
        for (i, gen) in group.generators().iter().enumerate() {
            let h = group.multiply(gv, &gen.element);
            if let Ok(t) = verts.binary_search_by(|probe| probe.canonical_cmp(&h)) {
                adj[v * gen_count + i] = t as u32;
            }
        }
    }
    Ok(CayleyBall { radius: r, verts, dist: new_dist, adj, gen_count })
}

/// Up to `limit` geodesic edge paths from g to h (as vertex index sequences),
/// plus the exact total count when it does not exceed the limit.
///
/// Precondition: d(1,g) + d(g,h) <= radius, which forces every geodesic
/// between them to stay in the ball.
pub fn geodesics_between(
    ball: &CayleyBall,
    group: &FbcGroup,
    g: &FbcElement,
    h: &FbcElement,
    limit: usize,
) -> Result<(Vec<Vec<usize>>, usize, bool)> {
    let gi = ball
        .index_of(g)
        .ok_or_else(|| Error::Range("start vertex outside ball".into()))?;
    let _hi = ball
        .index_of(h)
        .ok_or_else(|| Error::Range("end vertex outside ball".into()))?;
    let d = ball
        .distance(group, g, h)
        .ok_or_else(|| Error::Range("distance between endpoints exceeds radius".into()))?;
    if ball.distance_label(gi) + d > ball.radius {
        return Err(Error::Range(
            "geodesics between the endpoints may exit the ball".into(),
        ));
    }
    // DFS over distance-decreasing moves; remaining distance via normal forms
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut count = 0usize;
    let mut truncated = false;
    let mut stack: Vec<usize> = vec![gi];
    fn dfs(
        ball: &CayleyBall,
        group: &FbcGroup,
        h: &FbcElement,
        cur: usize,
        rem: u32,
        stack: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
        count: &mut usize,
        truncated: &mut bool,
        limit: usize,
    ) {
        if rem == 0 {
            *count += 1;
            if paths.len() < limit {
                paths.push(stack.clone());
            } else {
                *truncated = true;
            }
            return;
        }
        for w in ball.neighbors(cur) {
            if let Some(dw) = ball.distance(group, &ball.vertices()[w], h) {
                if dw + 1 == rem {
                    stack.push(w);
                    dfs(ball, group, h, w, dw, stack, paths, count, truncated, limit);
                    stack.pop();
                }
            }
        }
    }
    dfs(
        ball, group, h, gi, d, &mut stack, &mut paths, &mut count, &mut truncated, limit,
    );
    Ok((paths, count, truncated))
}
