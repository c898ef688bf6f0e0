//! Finite balls of the tree dual to a graph of groups: vertices and edges
//! are cosets of the vertex and edge groups, adjacency is coset inclusion.
//!
//! Coset representatives are exact canonical forms (shortlex-minimal fiber
//! coset representatives after sliding the stable exponent away), so vertex
//! and edge identity is decided without search. The visible complex is built
//! in one pass over a group ball: an edge coset is enumerated exactly when it
//! has a representative in the ball.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{CayleyBall, FbcElement, FbcGroup};
use crate::hierarchy::GraphOfGroups;
use crate::subgroups::AmbientSubgroup;

#[derive(Debug, Clone)]
pub struct TreeVertex {
    pub orbit: usize,
    pub rep: FbcElement,
    pub dist: u32,
}

#[derive(Debug, Clone)]
pub struct TreeEdge {
    pub orbit: usize,
    /// canonical representative of the coset rep . <minus edge group>
    pub rep: FbcElement,
    /// tree vertex on the `from` side
    pub a: usize,
    /// tree vertex on the `to` side
    pub b: usize,
}

#[derive(Debug)]
pub struct TreeBall {
    pub radius: u32,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    adj: Vec<Vec<(usize, usize)>>, // vertex -> (edge, other endpoint)
    vertex_index: HashMap<(usize, FbcElement), usize>,
}

impl TreeBall {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn find_vertex(&self, orbit: usize, key: &FbcElement) -> Option<usize> {
        self.vertex_index.get(&(orbit, key.clone())).copied()
    }

    /// Tree distance (BFS within the ball).
    pub fn dist(&self, from: usize, to: usize) -> Option<u32> {
        if from == to {
            return Some(0);
        }
        let mut dist = vec![u32::MAX; self.vertices.len()];
        dist[from] = 0;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    if w == to {
                        return Some(dist[w]);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// The unique tree path between two vertices, as vertex indices.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.vertices.len()];
        let mut dist = vec![u32::MAX; self.vertices.len()];
        dist[from] = 0;
        let mut queue = std::collections::VecDeque::from([from]);
        'outer: while let Some(v) = queue.pop_front() {
            for &(_, w) in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    prev[w] = v;
                    if w == to {
                        break 'outer;
                    }
                    queue.push_back(w);
                }
            }
        }
        if to != from && prev[to] == usize::MAX {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Edge index joining two adjacent vertices.
    pub fn edge_between(&self, v: usize, w: usize) -> Option<usize> {
        self.adj[v].iter().find(|&&(_, o)| o == w).map(|&(e, _)| e)
    }

    /// Image of a tree vertex under left translation by `g`, when the image
    /// coset is present in the ball.
    pub fn translate_vertex(
        &self,
        group: &FbcGroup,
        gog: &GraphOfGroups,
        g: &FbcElement,
        v: usize,
    ) -> Option<usize> {
        let tv = &self.vertices[v];
        let moved = group.multiply(g, &tv.rep);
        let key = gog.vertices[tv.orbit].group.coset_canonical(group, &moved);
        self.find_vertex(tv.orbit, &key)
    }
}

/// All ball elements lying in the subgroup.
pub fn subgroup_members(
    ball: &CayleyBall,
    group: &FbcGroup,
    subgroup: &AmbientSubgroup,
) -> Vec<usize> {
    (0..ball.vertex_count())
        .filter(|&i| subgroup.contains(group, &ball.vertices()[i]))
        .collect()
}

/// Ball of the tree around the base vertex: all cosets with a representative
/// in the group ball, truncated to the given tree radius.
pub fn tree_ball(
    group: &FbcGroup,
    gog: &GraphOfGroups,
    radius: u32,
    ball: &CayleyBall,
    cap: usize,
) -> Result<TreeBall> {
    // visible edge cosets, one pass over the ball
    let mut vert_index: HashMap<(usize, FbcElement), usize> = HashMap::new();
    let mut verts: Vec<(usize, FbcElement)> = Vec::new();
    let mut adj: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut edge_index: HashMap<(usize, FbcElement), usize> = HashMap::new();
    let mut edges: Vec<TreeEdge> = Vec::new();
    let intern = |orbit: usize,
                      key: FbcElement,
                      verts: &mut Vec<(usize, FbcElement)>,
                      adj: &mut Vec<Vec<(usize, usize)>>,
                      vert_index: &mut HashMap<(usize, FbcElement), usize>|
     -> usize {
        *vert_index.entry((orbit, key.clone())).or_insert_with(|| {
            verts.push((orbit, key));
            adj.push(Vec::new());
            verts.len() - 1
        })
    };
    let base_key = gog.vertices[gog.base_vertex]
        .group
        .coset_canonical(group, &FbcElement::identity());
    intern(
        gog.base_vertex,
        base_key.clone(),
        &mut verts,
        &mut adj,
        &mut vert_index,
    );
    for (eidx, ge) in gog.edges.iter().enumerate() {
        for h in ball.vertices() {
            let ekey = ge.minus_group.coset_canonical(group, h);
            if edge_index.contains_key(&(eidx, ekey.clone())) {
                continue;
            }
            if verts.len() >= cap || edges.len() >= cap {
                return Err(Error::Resource(format!(
                    "tree ball cap {cap} exceeded ({} vertices, {} edges)",
                    verts.len(),
                    edges.len()
                )));
            }
            let akey = gog.vertices[ge.from].group.coset_canonical(group, &ekey);
            let bkey = gog.vertices[ge.to]
                .group
                .coset_canonical(group, &group.multiply(&ekey, &ge.bass));
            let a = intern(ge.from, akey, &mut verts, &mut adj, &mut vert_index);
            let b = intern(ge.to, bkey, &mut verts, &mut adj, &mut vert_index);
            if a == b {
                return Err(Error::Construction(
                    "tree edge closes a loop at one vertex; the dual graph is not a tree".into(),
                ));
            }
            let eid = edges.len();
            edge_index.insert((eidx, ekey.clone()), eid);
            edges.push(TreeEdge { orbit: eidx, rep: ekey, a, b });
            adj[a].push((eid, b));
            adj[b].push((eid, a));
        }
    }
    // truncate to the tree radius around the base by BFS
    let mut dist = vec![u32::MAX; verts.len()];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == radius {
            continue;
        }
        for &(_, w) in &adj[v] {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let keep: Vec<usize> = (0..verts.len()).filter(|&v| dist[v] != u32::MAX).collect();
    // canonical vertex order: distance, orbit, representative
    let mut keep_sorted = keep;
    keep_sorted.sort_by(|&x, &y| {
        dist[x]
            .cmp(&dist[y])
            .then_with(|| verts[x].0.cmp(&verts[y].0))
            .then_with(|| verts[x].1.canonical_cmp(&verts[y].1))
    });
    let mut vmap = vec![usize::MAX; verts.len()];
    for (new, &old) in keep_sorted.iter().enumerate() {
        vmap[old] = new;
    }
    let mut vertices = Vec::with_capacity(keep_sorted.len());
    let mut vertex_index = HashMap::new();
    for &old in &keep_sorted {
        let (orbit, key) = verts[old].clone();
        vertex_index.insert((orbit, key.clone()), vertices.len());
        vertices.push(TreeVertex { orbit, rep: key, dist: dist[old] });
    }
    // keep edges with both endpoints retained, in canonical order
    let mut kept_edges: Vec<TreeEdge> = edges
        .into_iter()
        .filter(|e| vmap[e.a] != usize::MAX && vmap[e.b] != usize::MAX)
        .map(|e| TreeEdge { orbit: e.orbit, rep: e.rep, a: vmap[e.a], b: vmap[e.b] })
        .collect();
    kept_edges.sort_by(|x, y| {
        x.orbit
            .cmp(&y.orbit)
            .then_with(|| x.rep.canonical_cmp(&y.rep))
    });
    let mut new_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices.len()];
    for (eid, e) in kept_edges.iter().enumerate() {
        new_adj[e.a].push((eid, e.b));
        new_adj[e.b].push((eid, e.a));
    }
    for a in &mut new_adj {
        a.sort_unstable();
    }
    Ok(TreeBall {
        radius,
        vertices,
        edges: kept_edges,
        adj: new_adj,
        vertex_index,
    })
}

/// Outcome of the pointwise-stabilizer scan over all edge paths of length
/// kappa+1 inside a tree ball.
#[derive(Debug)]
pub struct AcylindricityReport {
    pub kappa: u32,
    /// distinct nontrivial candidate stabilizer elements examined
    pub candidates: usize,
    /// maximal number of edges of a path fixed pointwise by a single element
    pub max_fixed_path: u32,
    pub witnesses: Vec<(Vec<usize>, FbcElement)>,
    pub passed: bool,
}

/// Pointwise stabilizers of paths, via convexity of fixed sets in trees: an
/// element fixing the two end edges of a path fixes it pointwise, so the
/// check reduces to the diameters of the fixed edge sets of the candidate
/// elements. Candidates are the ball members of all edge stabilizers.
pub fn check_acylindricity(
    tb: &TreeBall,
    group: &FbcGroup,
    gog: &GraphOfGroups,
    kappa: u32,
    ball: &CayleyBall,
) -> AcylindricityReport {
    // candidate -> edges it stabilizes
    let mut fixed: HashMap<FbcElement, Vec<usize>> = HashMap::new();
    let t_cap = ball.radius as i64;
    let fiber_cap = (4 * ball.radius + 8) as i64;
    for (eid, e) in tb.edges.iter().enumerate() {
        let sub = &gog.edges[e.orbit].minus_group;
        let rep_inv = group.invert(&e.rep);
        for x in sub.elements_for_stabilizer(group, t_cap, fiber_cap) {
            let cand = group.multiply(&group.multiply(&e.rep, &x), &rep_inv);
            if cand.is_identity() || ball.index_of(&cand).is_none() {
                continue;
            }
            fixed.entry(cand).or_default().push(eid);
        }
    }
    let mut keys: Vec<FbcElement> = fixed.keys().cloned().collect();
    keys.sort_by(|a, b| a.canonical_cmp(b));
    let mut witnesses = Vec::new();
    let mut max_fixed_path = 0u32;
    for cand in &keys {
        let edge_set = &fixed[cand];
        // longest fixed path = diameter of the fixed subtree; double BFS
        let Some((len, a, b)) = fixed_subtree_diameter(tb, edge_set) else {
            continue;
        };
        max_fixed_path = max_fixed_path.max(len);
        if len >= kappa + 1 {
            let path = tb.path(a, b).unwrap();
            witnesses.push((path, cand.clone()));
        }
    }
    AcylindricityReport {
        kappa,
        candidates: keys.len(),
        max_fixed_path,
        passed: witnesses.is_empty(),
        witnesses,
    }
}

/// Diameter (in edges) of the subtree spanned by the given edge set, with a
/// realizing vertex pair. The set is connected for a genuine fixed set; for
/// safety the scan runs per connected component.
fn fixed_subtree_diameter(tb: &TreeBall, edge_set: &[usize]) -> Option<(u32, usize, usize)> {
    if edge_set.is_empty() {
        return None;
    }
    let allowed: std::collections::HashSet<usize> = edge_set.iter().copied().collect();
    let mut seen_vertices: std::collections::HashSet<usize> = std::collections::HashSet::new();
    for &e in edge_set {
        seen_vertices.insert(tb.edges[e].a);
        seen_vertices.insert(tb.edges[e].b);
    }
    let bfs = |start: usize| -> (usize, u32, HashMap<usize, u32>) {
        let mut dist: HashMap<usize, u32> = HashMap::new();
        dist.insert(start, 0);
        let mut queue = std::collections::VecDeque::from([start]);
        let mut far = (start, 0u32);
        while let Some(v) = queue.pop_front() {
            let dv = dist[&v];
            for &(e, w) in tb.neighbors(v) {
                if allowed.contains(&e) && !dist.contains_key(&w) {
                    dist.insert(w, dv + 1);
                    if dv + 1 > far.1 {
                        far = (w, dv + 1);
                    }
                    queue.push_back(w);
                }
            }
        }
        (far.0, far.1, dist)
    };
    let mut best: Option<(u32, usize, usize)> = None;
    let mut covered: std::collections::HashSet<usize> = std::collections::HashSet::new();
    for &v in &seen_vertices {
        if covered.contains(&v) {
            continue;
        }
        let (far, _, dist0) = bfs(v);
        covered.extend(dist0.keys());
        let (far2, d2, _) = bfs(far);
        if best.map_or(true, |(b, _, _)| d2 > b) {
            best = Some((d2, far, far2));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeClassification {
    Elliptic,
    Loxodromic,
    Unknown,
}

#[derive(Debug)]
pub struct TranslationData {
    pub length: u32,
    pub classification: TreeClassification,
    /// vertices realizing the minimal displacement (the visible min-set)
    pub min_set: Vec<usize>,
}

/// Minimal displacement of `g` over the visible tree ball, with the
/// elliptic/loxodromic classification when the ball is large enough.
pub fn translation_length_tree(
    tb: &TreeBall,
    group: &FbcGroup,
    gog: &GraphOfGroups,
    g: &FbcElement,
) -> Result<TranslationData> {
    let mut best: Option<u32> = None;
    let mut displacement: Vec<Option<u32>> = vec![None; tb.vertex_count()];
    for v in 0..tb.vertex_count() {
        if let Some(w) = tb.translate_vertex(group, gog, g, v) {
            let d = tb.dist(v, w).unwrap();
            displacement[v] = Some(d);
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    let Some(lambda) = best else {
        return Err(Error::Range(
            "the element moves every visible vertex outside the tree ball".into(),
        ));
    };
    let min_set: Vec<usize> = (0..tb.vertex_count())
        .filter(|&v| displacement[v] == Some(lambda))
        .collect();
    let classification = if lambda == 0 {
        TreeClassification::Elliptic
    } else {
        // loxodromic iff some minimal vertex moves twice as far under g^2
        let g2 = group.multiply(g, g);
        let mut class = TreeClassification::Unknown;
        for &v in &min_set {
            if let Some(w) = tb.translate_vertex(group, gog, &g2, v) {
                if tb.dist(v, w) == Some(2 * lambda) {
                    class = TreeClassification::Loxodromic;
                    break;
                }
            }
        }
        class
    };
    Ok(TranslationData { length: lambda, classification, min_set })
}

#[derive(Debug)]
pub struct AxisIntersection {
    pub diameter: u32,
    pub bound: u64,
    pub lambda_g: u32,
    pub lambda_h: u32,
    pub within_bound: bool,
}

/// Diameter of the intersection of the two visible min-sets, compared against
/// kappa + lambda(g) lambda(h). Requires both elements loxodromic in the ball
/// and free of common powers.
pub fn axis_intersection_check(
    tb: &TreeBall,
    group: &FbcGroup,
    gog: &GraphOfGroups,
    g: &FbcElement,
    h: &FbcElement,
    kappa: u32,
    max_power: i64,
) -> Result<AxisIntersection> {
    if g == h {
        return Err(Error::Input("the two elements coincide".into()));
    }
    for n in 1..=max_power {
        if group.power(g, n) == group.power(h, n) {
            return Err(Error::Input(format!("common power at exponent {n}")));
        }
    }
    let dg = translation_length_tree(tb, group, gog, g)?;
    let dh = translation_length_tree(tb, group, gog, h)?;
    if dg.classification != TreeClassification::Loxodromic
        || dh.classification != TreeClassification::Loxodromic
    {
        return Err(Error::Range(
            "classification inconclusive inside this ball".into(),
        ));
    }
    let in_h: std::collections::HashSet<usize> = dh.min_set.iter().copied().collect();
    let common: Vec<usize> = dg
        .min_set
        .iter()
        .copied()
        .filter(|v| in_h.contains(v))
        .collect();
    let mut diameter = 0u32;
    for i in 0..common.len() {
        for j in (i + 1)..common.len() {
            if let Some(d) = tb.dist(common[i], common[j]) {
                diameter = diameter.max(d);
            }
        }
    }
    let bound = kappa as u64 + dg.length as u64 * dh.length as u64;
    Ok(AxisIntersection {
        diameter,
        bound,
        lambda_g: dg.length,
        lambda_h: dh.length,
        within_bound: (diameter as u64) <= bound,
    })
}
