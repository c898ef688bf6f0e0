//! Finite windows of the Cayley graph with the maximal product subgroups
//! coned off: every two ball elements in a common coset of a listed subgroup
//! are joined by an extra unit edge.
//!
//! Distances are computed by breadth-first search with whole-coset expansion;
//! every reported number is recomputable from the ball, the subgroup list and
//! the seed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{CayleyBall, FbcElement, FbcGroup};
use crate::hierarchy::{GraphOfGroups, ProductSubgroup};
use crate::tree::{translation_length_tree, TreeBall, TreeClassification};

pub const UNREACHED: u32 = u32::MAX;

/// A Cayley ball together with the coset structure of the coned subgroups.
pub struct ConedBall {
    pub group: FbcGroup,
    pub base: CayleyBall,
    pub products: Vec<ProductSubgroup>,
    /// coset id of every vertex, per subgroup
    pub coset_ids: Vec<Vec<u32>>,
    /// members of every coset, per subgroup
    pub coset_members: Vec<Vec<Vec<u32>>>,
}

/// Cone the listed subgroups off in the ball. Coset identity is decided by
/// the subgroup membership procedures through canonical coset keys.
pub fn cone(group: &FbcGroup, base: CayleyBall, products: &[ProductSubgroup]) -> Result<ConedBall> {
    let n = base.vertex_count();
    let mut coset_ids = Vec::with_capacity(products.len());
    let mut coset_members = Vec::with_capacity(products.len());
    for p in products {
        let mut keys: Vec<(FbcElement, u32)> = Vec::with_capacity(n);
        for (i, g) in base.vertices().iter().enumerate() {
            keys.push((p.subgroup.coset_canonical(group, g), i as u32));
        }
        keys.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut ids = vec![0u32; n];
        let mut members: Vec<Vec<u32>> = Vec::new();
        let mut cur: Option<&FbcElement> = None;
        for (key, idx) in &keys {
            let fresh = cur.map_or(true, |c| c != key);
            if fresh {
                members.push(Vec::new());
            }
            let cid = members.len() - 1;
            ids[*idx as usize] = cid as u32;
            members[cid].push(*idx);
            cur = Some(key);
        }
        for m in &mut members {
            m.sort_unstable();
        }
        coset_ids.push(ids);
        coset_members.push(members);
    }
    Ok(ConedBall {
        group: group.clone(),
        base,
        products: products.to_vec(),
        coset_ids,
        coset_members,
    })
}

impl ConedBall {
    pub fn radius(&self) -> u32 {
        self.base.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    /// Base-metric distance via normal forms; exact when within the radius.
    pub fn base_distance(&self, x: usize, y: usize) -> Option<u32> {
        self.base.distance(
            &self.group,
            &self.base.vertices()[x],
            &self.base.vertices()[y],
        )
    }

    /// Coned distances from one source to every ball vertex, with optional
    /// deletions (vertices at `blocked[i] = true` are impassable).
    pub fn coned_dists_blocked(&self, src: usize, blocked: Option<&[bool]>) -> Vec<u32> {
        let n = self.vertex_count();
        let mut dist = vec![UNREACHED; n];
        if let Some(b) = blocked {
            if b[src] {
                return dist;
            }
        }
        let mut spent: Vec<Vec<bool>> = self
            .coset_members
            .iter()
            .map(|m| vec![false; m.len()])
            .collect();
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v];
            let push = |w: usize, dist: &mut Vec<u32>, queue: &mut std::collections::VecDeque<usize>| {
                if dist[w] == UNREACHED && blocked.map_or(true, |b| !b[w]) {
                    dist[w] = dv + 1;
                    queue.push_back(w);
                }
            };
            for w in self.base.neighbors(v) {
                push(w, &mut dist, &mut queue);
            }
            for (p, ids) in self.coset_ids.iter().enumerate() {
                let cid = ids[v] as usize;
                if !spent[p][cid] {
                    spent[p][cid] = true;
                    for &w in &self.coset_members[p][cid] {
                        push(w as usize, &mut dist, &mut queue);
                    }
                }
            }
        }
        dist
    }

    pub fn coned_dists(&self, src: usize) -> Vec<u32> {
        self.coned_dists_blocked(src, None)
    }

    pub fn coned_distance(&self, x: usize, y: usize) -> Option<u32> {
        let d = self.coned_dists(x)[y];
        (d != UNREACHED).then_some(d)
    }

    /// Diameter of the coned ball (exact, by BFS from every vertex of a
    /// spanning set; cheap because coned balls are small in diameter).
    pub fn coned_diameter(&self) -> u32 {
        let mut best = 0;
        for v in 0..self.vertex_count() {
            let d = self.coned_dists(v);
            for x in d {
                if x != UNREACHED {
                    best = best.max(x);
                }
            }
            // the coned graph is vertex-transitive only at the identity;
            // scanning every source keeps this exact
        }
        best
    }

    /// The margin rule for a pair: both endpoints must sit deep enough that
    /// every geodesic between them stays inside the ball.
    pub fn margin_ok(&self, x: usize, y: usize) -> bool {
        match self.base_distance(x, y) {
            None => false,
            Some(d) => {
                self.base.distance_label(x) + d <= self.base.radius
                    && self.base.distance_label(y) + d <= self.base.radius
            }
        }
    }

    /// Same-coset test through the membership procedure.
    pub fn same_coset(&self, p: usize, x: usize, y: usize) -> bool {
        self.coset_ids[p][x] == self.coset_ids[p][y]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    pub checked_edges: usize,
    pub max_ratio: u32,
    pub unassigned: usize,
    pub cone_edge_max_spread: u32,
}

/// Assign to every ball element the tree vertex whose coset contains it,
/// propagating along edges so the one-Lipschitz bound is verified edge by
/// edge. Elements whose coset is outside the tree ball are reported.
pub fn project_to_tree(
    cb: &ConedBall,
    tb: &TreeBall,
    gog: &GraphOfGroups,
) -> Result<(Vec<u32>, LipschitzReport)> {
    let n = cb.vertex_count();
    let group = &cb.group;
    let mut proj = vec![u32::MAX; n];
    let id = cb
        .base
        .index_of(&FbcElement::identity())
        .ok_or_else(|| Error::Internal("ball lacks the identity".into()))?;
    let assign = |g: &FbcElement| -> Option<u32> {
        let key = gog.vertices[gog.base_vertex].group.coset_canonical(group, g);
        tb.find_vertex(gog.base_vertex, &key).map(|v| v as u32)
    };
    proj[id] = assign(&FbcElement::identity())
        .ok_or_else(|| Error::Range("tree ball misses the base coset".into()))?;
    let mut checked = 0usize;
    let mut max_ratio = 0u32;
    // BFS over the base graph; every vertex of the ball is reachable
    let mut queue = std::collections::VecDeque::from([id]);
    let mut seen = vec![false; n];
    seen[id] = true;
    while let Some(v) = queue.pop_front() {
        for w in cb.base.neighbors(v) {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            queue.push_back(w);
        }
    }
    // assignment pass: direct, per vertex (the coset key is canonical), then
    // the Lipschitz audit runs over every edge
    let mut unassigned = 0usize;
    for (v, g) in cb.base.vertices().iter().enumerate() {
        match assign(g) {
            Some(t) => proj[v] = t,
            None => {
                unassigned += 1;
            }
        }
    }
    if unassigned > 0 {
        return Err(Error::Range(format!(
            "{unassigned} ball elements project outside the tree ball; increase the tree radius"
        )));
    }
    for (v, _, w) in cb.base.edges() {
        if v < w {
            checked += 1;
            let d = tb
                .dist(proj[v] as usize, proj[w] as usize)
                .ok_or_else(|| Error::Internal("tree ball disconnected".into()))?;
            max_ratio = max_ratio.max(d);
            if d > 1 {
                return Err(Error::Internal(format!(
                    "projection fails the one-Lipschitz bound on a base edge ({d})"
                )));
            }
        }
    }
    // cone edges: whole cosets must land in sets of tree diameter <= 1
    let mut cone_spread = 0u32;
    for members in cb.coset_members.iter().flatten() {
        let mut targets: Vec<u32> = members.iter().map(|&m| proj[m as usize]).collect();
        targets.sort_unstable();
        targets.dedup();
        for i in 0..targets.len() {
            for j in (i + 1)..targets.len() {
                let d = tb
                    .dist(targets[i] as usize, targets[j] as usize)
                    .unwrap_or(u32::MAX);
                cone_spread = cone_spread.max(d);
            }
        }
    }
    Ok((
        proj,
        LipschitzReport {
            checked_edges: checked,
            max_ratio,
            unassigned,
            cone_edge_max_spread: cone_spread,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    /// ball indices of the points g^n . y0 visible in the ball, n ascending
    pub points: Vec<u32>,
    /// index of y0 within `points`
    pub base_position: usize,
    /// displacement of y0 in the coned metric
    pub lambda: u32,
    pub elliptic: bool,
}

/// How many min-set candidates the axis base-point search examines; each
/// candidate costs one breadth-first search.
pub const AXIS_CANDIDATE_CAP: usize = 200;

/// Orbit segment A(g) = { g^n . y0 } with y0 chosen in the preimage of the
/// tree min-set, minimizing the coned displacement over the first candidates
/// in canonical order (ties broken canonically).
pub fn build_axis(
    cb: &ConedBall,
    tb: &TreeBall,
    gog: &GraphOfGroups,
    g: &FbcElement,
    n_range: i64,
) -> Result<Axis> {
    let group = &cb.group;
    let data = translation_length_tree(tb, group, gog, g)?;
    let min_set: std::collections::HashSet<usize> = data.min_set.iter().copied().collect();
    // candidates: ball vertices projecting into the min-set, in canonical order
    let mut best: Option<(u32, usize)> = None;
    let mut examined = 0usize;
    for (v, x) in cb.base.vertices().iter().enumerate() {
        if examined >= AXIS_CANDIDATE_CAP {
            break;
        }
        let key = gog.vertices[gog.base_vertex]
            .group
            .coset_canonical(group, x);
        let Some(tv) = tb.find_vertex(gog.base_vertex, &key) else {
            continue;
        };
        if !min_set.contains(&tv) {
            continue;
        }
        let moved = group.multiply(g, x);
        let Some(w) = cb.base.index_of(&moved) else {
            continue;
        };
        examined += 1;
        let d = cb.coned_dists(v)[w];
        if d == UNREACHED {
            continue;
        }
        if best.map_or(true, |(bd, bv)| d < bd || (d == bd && v < bv)) {
            best = Some((d, v));
        }
    }
    let Some((lambda, y0)) = best else {
        return Err(Error::Range(
            "no visible base point over the tree min-set".into(),
        ));
    };
    let mut points = Vec::new();
    let mut base_position = 0;
    for n in -n_range..=n_range {
        let moved = group.multiply(&group.power(g, n), &cb.base.vertices()[y0]);
        if let Some(idx) = cb.base.index_of(&moved) {
            if n == 0 {
                base_position = points.len();
            }
            points.push(idx as u32);
        } else if n < 0 {
            points.clear();
        } else {
            break;
        }
    }
    Ok(Axis {
        points,
        base_position,
        lambda,
        elliptic: data.classification == TreeClassification::Elliptic,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoarseIntersectionReport {
    pub epsilon: u32,
    pub diameter: u32,
    /// K computed from the measured displacements when supplied
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
}

/// Diameter of N_eps(A) intersected with B in the coned metric, optionally
/// compared against K = (lambda_X(g)/lambda_T(g)) (kappa + lambda_T(g)
/// lambda_T(h) + 2 eps), the bound shaped by the tree data.
pub fn coarse_intersection(
    cb: &ConedBall,
    a: &Axis,
    b: &Axis,
    epsilon: u32,
    bound_data: Option<(u32, u32, u32, u32)>, // (lambda_T(g), lambda_T(h), lambda_X(g), kappa)
) -> CoarseIntersectionReport {
    // coned distances from each A-point
    let mut near: Vec<usize> = Vec::new();
    for &bp in &b.points {
        let mut ok = false;
        for &ap in &a.points {
            let d = cb.coned_dists(ap as usize)[bp as usize];
            if d != UNREACHED && d <= epsilon {
                ok = true;
                break;
            }
        }
        if ok {
            near.push(bp as usize);
        }
    }
    let mut diameter = 0u32;
    for i in 0..near.len() {
        let d = cb.coned_dists(near[i]);
        for &other in near.iter().skip(i + 1) {
            if d[other] != UNREACHED {
                diameter = diameter.max(d[other]);
            }
        }
    }
    let bound = bound_data.map(|(lt_g, lt_h, lx_g, kappa)| {
        lx_g as f64 / lt_g as f64 * (kappa as f64 + lt_g as f64 * lt_h as f64 + 2.0 * epsilon as f64)
    });
    CoarseIntersectionReport {
        epsilon,
        diameter,
        bound,
        within_bound: bound.map(|k| diameter as f64 <= k),
    }
}

/// Deterministic sample pool: all vertices when small, otherwise a seeded
/// choice without replacement.
pub fn sample_pool(cb: &ConedBall, cap: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let n = cb.vertex_count();
    if n <= cap {
        return (0..n).collect();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    let mut pool: Vec<usize> = all.into_iter().take(cap).collect();
    pool.sort_unstable();
    pool
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub quadruples: usize,
    pub pool: usize,
    pub seed: u64,
}

/// Four-point hyperbolicity defect over seeded quadruples from a sampled
/// pool: half the gap between the two largest of the three pair sums.
pub fn measure_delta(cb: &ConedBall, samples: usize, seed: u64, pool_cap: usize) -> DeltaReport {
    use rand::Rng;
    use rand::SeedableRng;
    let pool = sample_pool(cb, pool_cap, seed);
    let dists: Vec<Vec<u32>> = pool.iter().map(|&v| cb.coned_dists(v)).collect();
    let d = |i: usize, j: usize| dists[i][pool[j]] as i64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut delta = 0i64;
    let mut used = 0usize;
    let n = pool.len();
    if n >= 4 {
        for _ in 0..samples {
            let pick: Vec<usize> = (0..4).map(|_| rng.gen_range(0..n)).collect();
            if pick.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let (w, x, y, z) = (pick[0], pick[1], pick[2], pick[3]);
            let mut sums = [
                d(w, x) + d(y, z),
                d(w, y) + d(x, z),
                d(w, z) + d(x, y),
            ];
            sums.sort_unstable();
            delta = delta.max(sums[2] - sums[1]);
            used += 1;
        }
    }
    DeltaReport {
        delta: delta as f64 / 2.0,
        quadruples: used,
        pool: n,
        seed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BottleneckPair {
    pub x: u32,
    pub y: u32,
    pub distance: u32,
    pub midpoint: u32,
    /// smallest width whose open midpoint ball separates the pair, when it
    /// exists below the endpoint cap
    pub width: Option<u32>,
    pub cap: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct BottleneckReport {
    pub pairs: Vec<BottleneckPair>,
    /// max over pairs of the separating width (pairs that never separate
    /// count as cap+1)
    pub width: u32,
    pub skipped_margin: usize,
}

/// Exact bottleneck scan: for each margin-valid pair, find the smallest width
/// whose open ball around a canonical geodesic midpoint disconnects the pair.
pub fn measure_bottleneck(cb: &ConedBall, pairs: &[(usize, usize)]) -> BottleneckReport {
    let mut out = Vec::new();
    let mut skipped = 0usize;
    let mut width = 0u32;
    for &(x, y) in pairs {
        if x == y || !cb.margin_ok(x, y) {
            skipped += 1;
            continue;
        }
        let from_x = cb.coned_dists(x);
        let d = from_x[y];
        if d == UNREACHED || d == 0 {
            skipped += 1;
            continue;
        }
        // canonical geodesic from y back to x: smallest-index predecessor
        let mut path = vec![y];
        let mut cur = y;
        while from_x[cur] != 0 {
            let want = from_x[cur] - 1;
            let mut next: Option<usize> = None;
            // base neighbors first, then coset mates, smallest index wins
            let consider = |w: usize, next: &mut Option<usize>| {
                if from_x[w] == want && next.map_or(true, |n| w < n) {
                    *next = Some(w);
                }
            };
            for w in cb.base.neighbors(cur) {
                consider(w, &mut next);
            }
            for (p, ids) in cb.coset_ids.iter().enumerate() {
                for &w in &cb.coset_members[p][ids[cur] as usize] {
                    consider(w as usize, &mut next);
                }
            }
            cur = next.expect("geodesic predecessor exists");
            path.push(cur);
        }
        path.reverse();
        let mid = path[(d as usize) / 2];
        let from_mid = cb.coned_dists(mid);
        let cap = from_mid[x].min(from_mid[y]);
        let mut found: Option<u32> = None;
        for w in 1..=cap {
            let blocked: Vec<bool> = (0..cb.vertex_count())
                .map(|v| from_mid[v] < w)
                .collect();
            let reach = cb.coned_dists_blocked(x, Some(&blocked));
            if reach[y] == UNREACHED {
                found = Some(w);
                break;
            }
        }
        width = width.max(found.unwrap_or(cap + 1));
        out.push(BottleneckPair {
            x: x as u32,
            y: y as u32,
            distance: d,
            midpoint: mid as u32,
            width: found,
            cap,
        });
    }
    BottleneckReport { pairs: out, width, skipped_margin: skipped }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcylRow {
    pub epsilon: u32,
    pub d: u32,
    /// max over sampled pairs of the coarse-stabilizer count; None when no
    /// sampled pair realizes the distance
    pub count: Option<usize>,
    pub pairs_used: usize,
}

/// Coarse-stabilizer table: for each (eps, D) the maximal number of candidate
/// elements moving both endpoints of a distance->=D pair by at most eps.
pub fn acylindricity_table(
    cb: &ConedBall,
    eps_list: &[u32],
    d_list: &[u32],
    candidates: &[FbcElement],
    pairs: &[(usize, usize)],
) -> Vec<AcylRow> {
    let group = cb.group.clone();
    // precompute distances from every pair endpoint
    let mut rows = Vec::new();
    let max_eps = eps_list.iter().copied().max().unwrap_or(0);
    // cache: for each pair, for each candidate: (d(x,gx), d(y,gy))
    let mut pair_data: Vec<(u32, Vec<(u32, u32)>)> = Vec::new();
    for &(x, y) in pairs {
        let from_x = cb.coned_dists(x);
        let from_y = cb.coned_dists(y);
        let dxy = from_x[y];
        if dxy == UNREACHED {
            continue;
        }
        let mut per_cand = Vec::with_capacity(candidates.len());
        for g in candidates {
            let gx = group.multiply(g, &cb.base.vertices()[x]);
            let gy = group.multiply(g, &cb.base.vertices()[y]);
            let dx = cb
                .base
                .index_of(&gx)
                .map(|i| from_x[i])
                .unwrap_or(UNREACHED);
            let dy = cb
                .base
                .index_of(&gy)
                .map(|i| from_y[i])
                .unwrap_or(UNREACHED);
            per_cand.push((dx, dy));
        }
        pair_data.push((dxy, per_cand));
    }
    let _ = max_eps;
    for &eps in eps_list {
        for &dd in d_list {
            let mut best: Option<usize> = None;
            let mut used = 0usize;
            for (dxy, per_cand) in &pair_data {
                if *dxy < dd {
                    continue;
                }
                used += 1;
                let count = per_cand
                    .iter()
                    .filter(|(dx, dy)| *dx <= eps && *dy <= eps)
                    .count();
                best = Some(best.map_or(count, |b: usize| b.max(count)));
            }
            rows.push(AcylRow { epsilon: eps, d: dd, count: best, pairs_used: used });
        }
    }
    rows
}

/// Axis variant for degree-zero levels, where the tree degenerates to a
/// point and the min-set is everything: minimize the coned displacement over
/// the first candidates in canonical order.
pub fn build_axis_plain(cb: &ConedBall, g: &FbcElement, n_range: i64) -> Result<Axis> {
    let group = &cb.group;
    let mut best: Option<(u32, usize)> = None;
    let mut examined = 0usize;
    for (v, x) in cb.base.vertices().iter().enumerate() {
        if examined >= AXIS_CANDIDATE_CAP {
            break;
        }
        let moved = group.multiply(g, x);
        let Some(w) = cb.base.index_of(&moved) else {
            continue;
        };
        examined += 1;
        let d = cb.coned_dists(v)[w];
        if d == UNREACHED {
            continue;
        }
        if best.map_or(true, |(bd, bv)| d < bd || (d == bd && v < bv)) {
            best = Some((d, v));
        }
    }
    let Some((lambda, y0)) = best else {
        return Err(Error::Range("the element moves everything out of the ball".into()));
    };
    let mut points = Vec::new();
    let mut base_position = 0;
    for n in -n_range..=n_range {
        let moved = group.multiply(&group.power(g, n), &cb.base.vertices()[y0]);
        if let Some(idx) = cb.base.index_of(&moved) {
            if n == 0 {
                base_position = points.len();
            }
            points.push(idx as u32);
        } else if n < 0 {
            points.clear();
        } else {
            break;
        }
    }
    Ok(Axis { points, base_position, lambda, elliptic: lambda == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g2_rep, g3_rep, p1_rep, z2_rep};
    use crate::group::ball;
    use crate::hierarchy::{build_hierarchy, enumerate_products, topmost_splitting};
    use crate::words::ReducedWord;
    use crate::rep::{validate_filtration, DEFAULT_CONJUGATOR_BOUND};
    use crate::tree::tree_ball;

    fn prep(
        pair: &(FbcGroup, crate::rep::TopRep),
    ) -> (FbcGroup, crate::rep::ValidatedRep) {
        let (report, v) = validate_filtration(&pair.1, &pair.0, DEFAULT_CONJUGATOR_BOUND);
        assert!(report.passed, "{report:?}");
        (pair.0.clone(), v.unwrap())
    }

    fn coned(pair: &(FbcGroup, crate::rep::TopRep), radius: u32) -> ConedBall {
        let (g, v) = prep(pair);
        let node = build_hierarchy(&g, &v).unwrap();
        let products = enumerate_products(&g, &node, 3, 2_000_000).unwrap();
        let b = ball(&g, radius, 8_000_000).unwrap();
        cone(&g, b, &products).unwrap()
    }

    #[test]
    fn whole_group_cone_has_diameter_one() {
        let pair = p1_rep();
        for r in [2u32, 4] {
            let cb = coned(&pair, r);
            assert_eq!(cb.products.len(), 1);
            // a single coset covering the ball forces diameter one
            assert_eq!(cb.coset_members[0].len(), 1);
            assert_eq!(cb.coned_diameter(), 1, "radius {r}");
        }
    }

    #[test]
    fn empty_cone_is_the_base_ball() {
        let pair = g2_rep();
        let (g, _) = prep(&pair);
        let b = ball(&g, 4, 1_000_000).unwrap();
        let id = b.index_of(&FbcElement::identity()).unwrap();
        let cb = cone(&g, b, &[]).unwrap();
        let d = cb.coned_dists(id);
        for v in 0..cb.vertex_count() {
            assert_eq!(d[v], cb.base.distance_label(v));
        }
    }

    #[test]
    fn g2_identity_coset_is_a_clique() {
        let pair = g2_rep();
        let cb = coned(&pair, 5);
        let id = cb.base.index_of(&FbcElement::identity()).unwrap();
        let p = 0usize;
        let cid = cb.coset_ids[p][id] as usize;
        let members = &cb.coset_members[p][cid];
        // the identity coset of <a, b a b'; t> contains all t^k a^m and more
        let g = &cb.group;
        for k in -2i32..=2 {
            for m in -2i32..=2 {
                let x = g
                    .multiply(
                        &g.power(&FbcElement::stable_letter(), k as i64),
                        &FbcElement::from_fiber(
                            ReducedWord::parse(g.basis(), "a").unwrap().pow(m as i64),
                        ),
                    );
                if let Some(i) = cb.base.index_of(&x) {
                    assert_eq!(cb.coset_ids[p][i] as usize, cid, "{}", g.display(&x));
                }
            }
        }
        let d = cb.coned_dists(id);
        for &m in members {
            if m as usize != id {
                assert_eq!(d[m as usize], 1);
            }
        }
        // same-coset relation is an equivalence compatible with membership
        for &m in members.iter().take(20) {
            let diff = g.multiply(
                &g.invert(&cb.base.vertices()[id]),
                &cb.base.vertices()[m as usize],
            );
            assert!(cb.products[p].contains(g, &diff));
        }
    }

    #[test]
    fn coning_only_shrinks_distances() {
        let pair = g2_rep();
        let cb = coned(&pair, 5);
        let id = cb.base.index_of(&FbcElement::identity()).unwrap();
        let d = cb.coned_dists(id);
        for v in 0..cb.vertex_count() {
            assert!(d[v] <= cb.base.distance_label(v));
        }
    }

    #[test]
    fn delta_zero_when_fully_coned_and_growing_on_the_lattice() {
        // fully coned lattice: diameter one, defect zero
        let pair = z2_rep();
        let cb = coned(&pair, 4);
        let r = measure_delta(&cb, 500, 0, 200);
        assert_eq!(r.delta, 0.0);
        // the flat lattice without coning is the non-hyperbolic control:
        // the defect grows with the radius
        let (g, _) = prep(&pair);
        let mut prev = -1.0f64;
        for radius in [3u32, 6] {
            let b = ball(&g, radius, 1_000_000).unwrap();
            let cb = cone(&g, b, &[]).unwrap();
            let r = measure_delta(&cb, 4000, 1, 300);
            assert!(r.delta > prev, "radius {radius}: {} <= {prev}", r.delta);
            prev = r.delta;
        }
        assert!(prev >= 2.0);
    }

    #[test]
    fn bottleneck_on_lattice_grows_with_flat_pairs() {
        // control: the uncond lattice has wide bottlenecks at flat pairs
        let pair = z2_rep();
        let (g, _) = prep(&pair);
        let mut widths = Vec::new();
        for radius in [4u32, 6, 8] {
            let b = ball(&g, radius, 1_000_000).unwrap();
            let cb = cone(&g, b, &[]).unwrap();
            let k = (radius / 3) as i64;
            let x = cb
                .base
                .index_of(&g.power(&FbcElement::stable_letter(), -k))
                .unwrap();
            let y = cb
                .base
                .index_of(&g.power(&FbcElement::stable_letter(), k))
                .unwrap();
            let rep = measure_bottleneck(&cb, &[(x, y)]);
            assert_eq!(rep.pairs.len(), 1);
            widths.push(rep.width);
        }
        assert!(widths[0] < widths[2], "{widths:?}");
    }

    #[test]
    fn bottleneck_on_coned_linear_group_is_narrow() {
        let pair = g2_rep();
        let cb = coned(&pair, 6);
        // sampled margin-valid pairs
        let pool = sample_pool(&cb, 200, 0);
        let mut pairs = Vec::new();
        for (i, &x) in pool.iter().enumerate() {
            for &y in pool.iter().skip(i + 1) {
                if pairs.len() >= 12 {
                    break;
                }
                if cb.margin_ok(x, y) && cb.base_distance(x, y).unwrap_or(0) >= 2 {
                    pairs.push((x, y));
                }
            }
        }
        assert!(!pairs.is_empty());
        let rep = measure_bottleneck(&cb, &pairs);
        assert!(rep.width <= 3, "width {} too wide for a quasitree window", rep.width);
    }

    #[test]
    fn projection_is_one_lipschitz() {
        let pair = g3_rep();
        let (g, v) = prep(&pair);
        let top = topmost_splitting(&g, &v).unwrap();
        let node = build_hierarchy(&g, &v).unwrap();
        let products = enumerate_products(&g, &node, 3, 2_000_000).unwrap();
        let b5 = ball(&g, 5, 2_000_000).unwrap();
        let big = ball(&g, 5, 2_000_000).unwrap();
        let tb = tree_ball(&g, &top.gog, 6, &big, 2_000_000).unwrap();
        let cb = cone(&g, b5, &products).unwrap();
        let (proj, report) = project_to_tree(&cb, &tb, &top.gog).unwrap();
        assert_eq!(report.max_ratio, 1);
        assert_eq!(report.unassigned, 0);
        // vertex-group elements sit at the base vertex
        let id = cb.base.index_of(&FbcElement::identity()).unwrap();
        let t = cb.base.index_of(&FbcElement::stable_letter()).unwrap();
        assert_eq!(proj[id], proj[t]);
        // a crossing-letter translate sits one step away
        let c = cb.base.index_of(&g.parse_element(0, "c").unwrap()).unwrap();
        assert_eq!(
            tb.dist(proj[id] as usize, proj[c] as usize),
            Some(1)
        );
        // cone edges land on single vertices here
        assert_eq!(report.cone_edge_max_spread, 0);
    }

    #[test]
    fn axes_and_coarse_intersections() {
        let pair = g3_rep();
        let (g, v) = prep(&pair);
        let top = topmost_splitting(&g, &v).unwrap();
        let node = build_hierarchy(&g, &v).unwrap();
        let products = enumerate_products(&g, &node, 3, 2_000_000).unwrap();
        let b = ball(&g, 6, 4_000_000).unwrap();
        let tb = tree_ball(&g, &top.gog, 6, &b, 2_000_000).unwrap();
        let cb = cone(&g, ball(&g, 6, 4_000_000).unwrap(), &products).unwrap();
        let c = g.parse_element(0, "c").unwrap();
        let axis = build_axis(&cb, &tb, &top.gog, &c, 5).unwrap();
        assert!(!axis.elliptic);
        assert!(axis.lambda >= 1);
        assert!(axis.points.len() >= 3);
        // conjugate axis: coarse intersection bounded by the lemma constant
        let x = g.parse_element(0, "a b").unwrap();
        let h = g.conjugate(&c, &x);
        let axis_h = build_axis(&cb, &tb, &top.gog, &h, 5).unwrap();
        let tl_g = crate::tree::translation_length_tree(&tb, &g, &top.gog, &c).unwrap();
        let tl_h = crate::tree::translation_length_tree(&tb, &g, &top.gog, &h).unwrap();
        let rep = coarse_intersection(
            &cb,
            &axis,
            &axis_h,
            1,
            Some((tl_g.length, tl_h.length, axis.lambda, 2)),
        );
        assert_eq!(rep.within_bound, Some(true), "{rep:?}");
        // disjoint axes: zero diameter
        let far = g.conjugate(&c, &g.parse_element(0, "b b a").unwrap());
        if let Ok(axis_far) = build_axis(&cb, &tb, &top.gog, &far, 5) {
            let rep = coarse_intersection(&cb, &axis, &axis_far, 0, None);
            assert!(rep.diameter <= 2);
        }
    }

    #[test]
    fn plain_axis_on_the_lattice() {
        let pair = z2_rep();
        let (g, _) = prep(&pair);
        let b = ball(&g, 4, 100_000).unwrap();
        let cb = cone(&g, b, &[]).unwrap();
        let t = FbcElement::stable_letter();
        let axis = build_axis_plain(&cb, &t, 4).unwrap();
        assert_eq!(axis.lambda, 1);
        assert!(axis.points.len() >= 5);
        // an honest fiber generator is also loxodromic on the lattice
        let a = g.parse_element(0, "a").unwrap();
        let axis_a = build_axis_plain(&cb, &a, 4).unwrap();
        assert_eq!(axis_a.lambda, 1);
    }

    #[test]
    fn acylindricity_table_shapes() {
        let pair = g2_rep();
        let cb = coned(&pair, 6);
        let g = cb.group.clone();
        let cand_ball = ball(&g, 3, 100_000).unwrap();
        let candidates: Vec<FbcElement> = cand_ball.vertices().to_vec();
        let pool = sample_pool(&cb, 150, 0);
        let mut pairs = Vec::new();
        for (i, &x) in pool.iter().enumerate() {
            for &y in pool.iter().skip(i + 1) {
                pairs.push((x, y));
            }
        }
        pairs.truncate(400);
        let rows = acylindricity_table(&cb, &[1], &[2, 3, 4], &candidates, &pairs);
        assert_eq!(rows.len(), 3);
        // counts shrink (weakly) as the distance threshold grows
        let counts: Vec<usize> = rows.iter().map(|r| r.count.unwrap_or(0)).collect();
        for w in counts.windows(2) {
            assert!(w[0] >= w[1], "{counts:?}");
        }
        // the identity always qualifies when pairs exist
        if let Some(c) = rows[0].count {
            assert!(c >= 1);
        }
    }
}
