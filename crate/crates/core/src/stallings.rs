//! Stallings automata for finitely generated subgroups of a free group.
//!
//! The automaton is the folded core graph of the subgroup wedge: states with a
//! basepoint, deterministic inverse-closed transitions labelled by signed
//! generators. After folding, a reduced word labels a basepoint loop iff it
//! lies in the subgroup.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Basis, Letter, ReducedWord};

#[derive(Debug, Clone)]
pub struct StallingsAutomaton {
    basis: Arc<Basis>,
    /// transitions[state][slot] with slot = 2*gen for positive, 2*gen+1 for inverse
    transitions: Vec<Vec<Option<u32>>>,
    basepoint: u32,
    folded: bool,
}

#[inline]
fn slot(l: Letter) -> usize {
    let g = (l.unsigned_abs() - 1) as usize;
    2 * g + usize::from(l < 0)
}

/// Identify states of a multigraph until transitions are deterministic.
/// Returns the compacted deterministic table and the image of `base`.
fn fold(mut multi: Vec<Vec<Vec<u32>>>, slots: usize, base: u32) -> (Vec<Vec<Option<u32>>>, u32) {
    let n = multi.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let p = parent[x as usize];
            parent[x as usize] = parent[p as usize];
            x = p;
        }
        x
    }
    loop {
        let mut work: Vec<(u32, u32)> = Vec::new();
        for s in 0..n as u32 {
            if find(&mut parent, s) != s {
                continue;
            }
            for sl in 0..slots {
                let mut reps: Vec<u32> = multi[s as usize][sl]
                    .iter()
                    .map(|&t| find(&mut parent, t))
                    .collect();
                reps.sort_unstable();
                reps.dedup();
                for pair in reps.windows(2) {
                    work.push((pair[0], pair[1]));
                }
            }
        }
        if work.is_empty() {
            break;
        }
        while let Some((a, b)) = work.pop() {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra == rb {
                continue;
            }
            let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[drop as usize] = keep;
            for sl in 0..slots {
                let moved = std::mem::take(&mut multi[drop as usize][sl]);
                multi[keep as usize][sl].extend(moved);
            }
        }
        for s in 0..n as u32 {
            if find(&mut parent, s) != s {
                continue;
            }
            for sl in 0..slots {
                let mut v: Vec<u32> = multi[s as usize][sl]
                    .iter()
                    .map(|&t| find(&mut parent, t))
                    .collect();
                v.sort_unstable();
                v.dedup();
                multi[s as usize][sl] = v;
            }
        }
    }
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut order: Vec<u32> = (0..n as u32).filter(|&s| find(&mut parent, s) == s).collect();
    order.sort_unstable();
    for (i, &s) in order.iter().enumerate() {
        remap.insert(s, i as u32);
    }
    let mut table: Vec<Vec<Option<u32>>> = vec![vec![None; slots]; order.len()];
    for &s in &order {
        let i = remap[&s] as usize;
        for sl in 0..slots {
            debug_assert!(multi[s as usize][sl].len() <= 1);
            if let Some(&t) = multi[s as usize][sl].first() {
                table[i][sl] = Some(remap[&find(&mut parent, t)]);
            }
        }
    }
    let bp = remap[&find(&mut parent, base)];
    (table, bp)
}

impl StallingsAutomaton {
    /// Build the folded automaton of the subgroup generated by `generators`.
    pub fn build(basis: Arc<Basis>, generators: &[ReducedWord]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Input("empty generator list".into()));
        }
        let slots = 2 * basis.rank();
        // wedge of subdivided petals, as a multigraph
        let mut multi: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); slots]];
        for g in generators {
            let mut cur = 0u32;
            let n = g.len();
            for (i, &l) in g.letters().iter().enumerate() {
                let next = if i + 1 == n {
                    0
                } else {
                    multi.push(vec![Vec::new(); slots]);
                    (multi.len() - 1) as u32
                };
                multi[cur as usize][slot(l)].push(next);
                multi[next as usize][slot(-l)].push(cur);
                cur = next;
            }
        }
        let (transitions, basepoint) = fold(multi, slots, 0);
        let mut auto = StallingsAutomaton { basis, transitions, basepoint, folded: true };
        auto.trim();
        Ok(auto)
    }

    /// Remove valence-one states other than the basepoint (core graph).
    fn trim(&mut self) {
        let slots = 2 * self.basis.rank();
        loop {
            let mut leaf: Option<u32> = None;
            for s in 0..self.transitions.len() as u32 {
                if s == self.basepoint {
                    continue;
                }
                let deg = (0..slots).filter(|&sl| self.transitions[s as usize][sl].is_some()).count();
                if deg <= 1 {
                    leaf = Some(s);
                    break;
                }
            }
            let Some(s) = leaf else { break };
            for t in 0..self.transitions.len() {
                for sl in 0..slots {
                    if self.transitions[t][sl] == Some(s) {
                        self.transitions[t][sl] = None;
                    }
                }
            }
            let last = (self.transitions.len() - 1) as u32;
            self.transitions.swap_remove(s as usize);
            if s != last {
                for t in 0..self.transitions.len() {
                    for sl in 0..slots {
                        if self.transitions[t][sl] == Some(last) {
                            self.transitions[t][sl] = Some(s);
                        }
                    }
                }
                if self.basepoint == last {
                    self.basepoint = s;
                }
            }
        }
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Rank of the subgroup (cycle rank of the core graph).
    pub fn subgroup_rank(&self) -> usize {
        let slots = 2 * self.basis.rank();
        let mut half_edges = 0usize;
        for s in &self.transitions {
            half_edges += (0..slots).filter(|&sl| s[sl].is_some()).count();
        }
        let edges = half_edges / 2;
        edges + 1 - self.transitions.len()
    }

    /// Membership: does the reduced word label a basepoint loop?
    pub fn member(&self, w: &ReducedWord) -> Result<bool> {
        if !self.folded {
            return Err(Error::State("automaton not folded".into()));
        }
        let mut cur = self.basepoint;
        for &l in w.letters() {
            match self.transitions[cur as usize][slot(l)] {
                Some(next) => cur = next,
                None => return Ok(false),
            }
        }
        Ok(cur == self.basepoint)
    }

    /// Canonical (shortlex-minimal) representative of the right coset u.H.
    ///
    /// Any h with shorter u.h must cancel a suffix of u against a word read
    /// from the basepoint, so it suffices to scan suffix lengths and close up
    /// with a geodesic back to the basepoint inside the core graph.
    pub fn coset_canonical(&self, u: &ReducedWord) -> ReducedWord {
        let dist = self.bfs_from_basepoint();
        let n = u.len();
        let mut candidates: Vec<ReducedWord> = Vec::new();
        let mut state = self.basepoint;
        for j in 0..=n {
            // state = trace of the inverse of the length-j suffix of u
            if j > 0 {
                let l = u.letters()[n - j];
                match self.transitions[state as usize][slot(-l)] {
                    Some(next) => state = next,
                    None => break,
                }
            }
            let prefix = ReducedWord::reduce(&u.letters()[..n - j]);
            let tail = self.geodesic_to_basepoint(state, &dist);
            candidates.push(prefix.concat(&tail));
        }
        candidates
            .into_iter()
            .min_by(|a, b| a.canonical_cmp(b))
            .unwrap_or_else(|| u.clone())
    }

    fn bfs_from_basepoint(&self) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.transitions.len()];
        dist[self.basepoint as usize] = 0;
        let mut queue = std::collections::VecDeque::from([self.basepoint]);
        let slots = 2 * self.basis.rank();
        while let Some(s) = queue.pop_front() {
            for sl in 0..slots {
                if let Some(t) = self.transitions[s as usize][sl] {
                    if dist[t as usize] == u32::MAX {
                        dist[t as usize] = dist[s as usize] + 1;
                        queue.push_back(t);
                    }
                }
            }
        }
        dist
    }

    /// Letter-order-minimal geodesic word from `state` to the basepoint.
    fn geodesic_to_basepoint(&self, state: u32, dist: &[u32]) -> ReducedWord {
        let mut letters: Vec<Letter> = Vec::new();
        let mut cur = state;
        let rank = self.basis.rank() as Letter;
        while cur != self.basepoint {
            let d = dist[cur as usize];
            let mut advanced = false;
            // positive letters sort before negative within a generator
            for g in 1..=rank {
                for l in [g, -g] {
                    if let Some(t) = self.transitions[cur as usize][slot(l)] {
                        if dist[t as usize] + 1 == d {
                            letters.push(l);
                            cur = t;
                            advanced = true;
                            break;
                        }
                    }
                }
                if advanced {
                    break;
                }
            }
            debug_assert!(advanced, "bfs distances inconsistent");
            if !advanced {
                break;
            }
        }
        ReducedWord::reduce(&letters)
    }
}
