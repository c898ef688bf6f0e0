//! Topological representatives: a marked graph together with a filtered
//! graph map f fixing every vertex, with f(e) = e . rho_e for a suffix loop
//! rho_e supported on strictly earlier edges.
//!
//! The marking identifies the fundamental group of the graph with the fiber
//! free group: spanning-tree edges read as the identity, each non-tree edge
//! reads as a basis generator.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FbcElement, FbcGroup};
use crate::words::{Basis, FreeAutomorphism, ReducedWord};

/// Oriented edge `from -> to` with a stable name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeInfo {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

/// A signed edge in a path: `+k` is edge `k-1` forward, `-k` backwards.
pub type SignedEdge = i32;

/// An edge path; continuity is checked against a graph, not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EdgePath(pub Vec<SignedEdge>);

impl EdgePath {
    pub fn empty() -> Self {
        EdgePath(Vec::new())
    }

    pub fn single(edge: usize) -> Self {
        EdgePath(vec![edge as SignedEdge + 1])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        EdgePath(self.0.iter().rev().map(|&s| -s).collect())
    }

    pub fn concat(&self, other: &EdgePath) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        EdgePath(v)
    }

    pub fn is_immersed(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != -w[1])
    }

    /// Cancel adjacent inverse pairs (free tightening of the path).
    pub fn tighten(&self) -> Self {
        let mut out: Vec<SignedEdge> = Vec::with_capacity(self.0.len());
        for &s in &self.0 {
            if out.last() == Some(&-s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        EdgePath(out)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|s| (s.unsigned_abs() - 1) as usize)
    }
}

/// Connected oriented graph with spanning tree, marking and basepoint.
#[derive(Debug, Clone)]
pub struct MarkedGraph {
    pub vertex_names: Vec<String>,
    pub edges: Vec<EdgeInfo>,
    pub tree: Vec<bool>,
    /// basis generator index for each non-tree edge
    pub marking: Vec<Option<usize>>,
    pub basis: Arc<Basis>,
    pub basepoint: usize,
    /// tree path from the basepoint to each vertex
    tree_paths: Vec<EdgePath>,
}

impl MarkedGraph {
    pub fn new(
        vertex_names: Vec<String>,
        edges: Vec<EdgeInfo>,
        tree_edges: &[String],
        marking_pairs: &[(String, String)],
        basis: Arc<Basis>,
        basepoint: usize,
    ) -> Result<Self> {
        let nv = vertex_names.len();
        if nv == 0 {
            return Err(Error::Input("graph needs at least one vertex".into()));
        }
        for e in &edges {
            if e.from >= nv || e.to >= nv {
                return Err(Error::Input(format!("edge {} has a bad endpoint", e.name)));
            }
        }
        let edge_index = |name: &str| -> Result<usize> {
            edges
                .iter()
                .position(|e| e.name == name)
                .ok_or_else(|| Error::Input(format!("unknown edge name {name:?}")))
        };
        let mut tree = vec![false; edges.len()];
        for name in tree_edges {
            tree[edge_index(name)?] = true;
        }
        let mut marking = vec![None; edges.len()];
        for (edge_name, gen_name) in marking_pairs {
            let e = edge_index(edge_name)?;
            if tree[e] {
                return Err(Error::Input(format!(
                    "marking assigned to spanning-tree edge {edge_name:?}"
                )));
            }
            let g = basis
                .index_of(gen_name)
                .ok_or_else(|| Error::Input(format!("unknown generator {gen_name:?}")))?;
            if marking[e].is_some() {
                return Err(Error::Input(format!("edge {edge_name:?} marked twice")));
            }
            if marking.iter().any(|m| *m == Some(g)) {
                return Err(Error::Input(format!("generator {gen_name:?} marked twice")));
            }
            marking[e] = Some(g);
        }
        let mut graph = MarkedGraph {
            vertex_names,
            edges,
            tree,
            marking,
            basis,
            basepoint,
            tree_paths: Vec::new(),
        };
        graph.tree_paths = graph.compute_tree_paths()?;
        Ok(graph)
    }

    fn compute_tree_paths(&self) -> Result<Vec<EdgePath>> {
        let nv = self.vertex_names.len();
        let tree_count = self.tree.iter().filter(|&&t| t).count();
        if tree_count != nv - 1 {
            return Err(Error::Input(format!(
                "spanning tree must have {} edges, found {tree_count}",
                nv - 1
            )));
        }
        let mut paths: Vec<Option<EdgePath>> = vec![None; nv];
        paths[self.basepoint] = Some(EdgePath::empty());
        let mut queue = VecDeque::new();
        queue.push_back(self.basepoint);
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                if !self.tree[i] {
                    continue;
                }
                for (src, dst, sign) in [(e.from, e.to, 1i32), (e.to, e.from, -1i32)] {
                    if src == v && paths[dst].is_none() {
                        let mut p = paths[v].clone().unwrap();
                        p.0.push(sign * (i as i32 + 1));
                        paths[dst] = Some(p);
                        queue.push_back(dst);
                    }
                }
            }
        }
        paths
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Input("spanning tree does not reach every vertex".into()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn endpoints(&self, s: SignedEdge) -> (usize, usize) {
        let e = &self.edges[(s.unsigned_abs() - 1) as usize];
        if s > 0 {
            (e.from, e.to)
        } else {
            (e.to, e.from)
        }
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.vertex_count();
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Check that consecutive edges of the path match endpoint-to-endpoint;
    /// returns (start, end) vertices.
    pub fn path_endpoints(&self, p: &EdgePath) -> Result<(usize, usize)> {
        if p.is_empty() {
            return Err(Error::Input("empty path has no endpoints".into()));
        }
        let (start, mut cur) = self.endpoints(p.0[0]);
        for &s in &p.0[1..] {
            let (a, b) = self.endpoints(s);
            if a != cur {
                return Err(Error::Input("edge path is not continuous".into()));
            }
            cur = b;
        }
        Ok((start, cur))
    }

    /// The word read by a path: tree edges are silent, a non-tree edge reads
    /// its marking generator.
    pub fn word_of_path(&self, p: &EdgePath) -> ReducedWord {
        let mut raw = Vec::new();
        for &s in &p.0 {
            let e = (s.unsigned_abs() - 1) as usize;
            if let Some(g) = self.marking[e] {
                let l = (g + 1) as i16;
                raw.push(if s > 0 { l } else { -l });
            }
        }
        ReducedWord::reduce(&raw)
    }

    pub fn tree_path(&self, v: usize) -> &EdgePath {
        &self.tree_paths[v]
    }

    /// The based loop representing a basis generator through its marked edge.
    pub fn generator_loop(&self, gen: usize) -> Result<EdgePath> {
        let e = self
            .marking
            .iter()
            .position(|m| *m == Some(gen))
            .ok_or_else(|| Error::Input("generator not marked on any edge".into()))?;
        let (from, to) = (self.edges[e].from, self.edges[e].to);
        Ok(self
            .tree_path(from)
            .concat(&EdgePath::single(e))
            .concat(&self.tree_path(to).reversed())
            .tighten())
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn path_to_names(&self, p: &EdgePath) -> String {
        if p.is_empty() {
            return "1".into();
        }
        p.0.iter()
            .map(|&s| {
                let name = &self.edges[(s.unsigned_abs() - 1) as usize].name;
                if s > 0 {
                    name.clone()
                } else {
                    format!("{name}'")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_path(&self, text: &str) -> Result<EdgePath> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (name, rev) = if let Some(st) = tok.strip_suffix('\'') {
                (st, true)
            } else {
                (tok, false)
            };
            let e = self
                .edge_index(name)
                .ok_or_else(|| Error::Input(format!("unknown edge {name:?}")))?;
            out.push(if rev { -(e as i32 + 1) } else { e as i32 + 1 });
        }
        Ok(EdgePath(out))
    }
}

/// Raw topological representative input: edge images plus a filtration order.
#[derive(Debug, Clone)]
pub struct TopRep {
    pub graph: MarkedGraph,
    pub images: Vec<EdgePath>,
    /// filtration order: order[i] is the edge added at stage i+1
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
    pub passed: bool,
    pub degrees: BTreeMap<String, u32>,
    pub top_degree: u32,
    pub substituted_controls: String,
}

impl ValidationReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.conditions.push(ConditionResult { name: name.into(), passed, detail });
        self.passed &= passed;
    }
}

/// A representative that passed validation, with the derived data the
/// splitting machinery needs.
#[derive(Debug, Clone)]
pub struct ValidatedRep {
    pub rep: TopRep,
    /// suffix path of each edge (empty when the edge is fixed)
    pub suffixes: Vec<EdgePath>,
    pub degrees: Vec<u32>,
    /// the map induced on the fiber by f through the marking
    pub induced: FreeAutomorphism,
    /// c with induced = conj(c) . monodromy
    pub conjugator: ReducedWord,
    /// position of each edge in the filtration order
    pub stage: Vec<usize>,
}

impl ValidatedRep {
    pub fn top_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Stable letter twisted so that conjugation by it acts as `induced`:
    /// t' = c t, in normal form.
    pub fn stable_letter(&self, group: &FbcGroup) -> FbcElement {
        group.multiply(
            &FbcElement::from_fiber(self.conjugator.clone()),
            &FbcElement::stable_letter(),
        )
    }

    /// Image of a path under f, edge by edge. No tightening is performed;
    /// errors out if the result backtracks.
    pub fn map_path(&self, p: &EdgePath) -> Result<EdgePath> {
        let mut out = EdgePath::empty();
        for &s in &p.0 {
            let e = (s.unsigned_abs() - 1) as usize;
            let img = if s > 0 {
                self.rep.images[e].clone()
            } else {
                self.rep.images[e].reversed()
            };
            out = out.concat(&img);
        }
        if !out.is_immersed() {
            return Err(Error::Representative(
                "image path backtracks; representative rejected".into(),
            ));
        }
        Ok(out)
    }

    /// The path f^n(e); exact growth data, immersion enforced.
    pub fn iterate_edge(&self, edge: usize, n: u32) -> Result<EdgePath> {
        let mut p = EdgePath::single(edge);
        for _ in 0..n {
            p = self.map_path(&p)?;
        }
        Ok(p)
    }

    /// Growth degree via the suffix recursion: 0 for a fixed edge, otherwise
    /// one more than the maximal degree of an edge occurring in the suffix.
    pub fn growth_degree(&self, edge: usize) -> u32 {
        self.degrees[edge]
    }

    /// The fiber element carried by the suffix loop of `edge`, translated to
    /// the basepoint along the spanning tree.
    pub fn suffix_loop_element(&self, edge: usize) -> Result<ReducedWord> {
        let rho = &self.suffixes[edge];
        if rho.is_empty() {
            return Err(Error::Domain(format!(
                "edge {} has a trivial suffix",
                self.rep.graph.edges[edge].name
            )));
        }
        let (base, _) = self.rep.graph.path_endpoints(rho)?;
        let tau = self.rep.graph.tree_path(base);
        Ok(self
            .rep
            .graph
            .word_of_path(tau)
            .concat(&self.rep.graph.word_of_path(rho))
            .concat(&self.rep.graph.word_of_path(tau).inverse()))
    }

    /// Word read by the f-image of the tree path to `v`; the vertical twist
    /// used by the splitting construction.
    pub fn vertical_twist(&self, v: usize) -> Result<ReducedWord> {
        let tau = self.rep.graph.tree_path(v);
        if tau.is_empty() {
            return Ok(ReducedWord::identity());
        }
        let img = self.map_path(tau)?;
        Ok(self.rep.graph.word_of_path(&img))
    }
}

/// How far to search for the inner-automorphism conjugator when matching the
/// induced map against the declared monodromy.
pub const DEFAULT_CONJUGATOR_BOUND: usize = 6;

/// Number of iterates whose immersion is enforced, and the range of the
/// exact growth sequences used by the degree cross-check.
pub const ITERATE_CHECK_RANGE: u32 = 12;

pub fn validate_filtration(
    rep: &TopRep,
    group: &FbcGroup,
    conjugator_bound: usize,
) -> (ValidationReport, Option<ValidatedRep>) {
    let mut report = ValidationReport {
        conditions: Vec::new(),
        passed: true,
        degrees: BTreeMap::new(),
        top_degree: 0,
        substituted_controls: "iterate-immersion enforced up to n=12 in place of \
         train-track Nielsen-path control"
            .into(),
    };
    let g = &rep.graph;
    let ne = g.edge_count();

    // structure
    let connected = g.is_connected();
    report.push(
        "graph-structure",
        connected && g.rank() == g.basis.rank(),
        format!(
            "connected={connected}, rank={} vs basis rank {}",
            g.rank(),
            g.basis.rank()
        ),
    );
    let marking_ok = g.marking.iter().filter(|m| m.is_some()).count() == g.basis.rank()
        && g.tree.iter().filter(|&&t| !t).count() == g.basis.rank();
    report.push(
        "marking-bijection",
        marking_ok,
        "non-tree edges correspond to basis generators".into(),
    );

    // image endpoints and vertex fixing
    let mut endpoints_ok = true;
    let mut endpoint_detail = String::from("all images run between the edge endpoints");
    for (e, img) in rep.images.iter().enumerate() {
        let want = (g.edges[e].from, g.edges[e].to);
        let got = if img.is_empty() {
            None
        } else {
            g.path_endpoints(img).ok()
        };
        if got != Some(want) {
            endpoints_ok = false;
            endpoint_detail = format!("edge {} image has wrong endpoints", g.edges[e].name);
            break;
        }
    }
    report.push("image-endpoints", endpoints_ok, endpoint_detail);
    if !endpoints_ok {
        return (report, None);
    }

    // filtration order is a permutation
    let mut seen = vec![false; ne];
    let order_ok = rep.order.len() == ne
        && rep.order.iter().all(|&e| {
            if e < ne && !seen[e] {
                seen[e] = true;
                true
            } else {
                false
            }
        });
    report.push(
        "filtration-order",
        order_ok,
        "order lists every edge exactly once".into(),
    );
    if !order_ok {
        return (report, None);
    }
    let mut stage = vec![0usize; ne];
    for (i, &e) in rep.order.iter().enumerate() {
        stage[e] = i;
    }

    // condition (3): f(e) = e . rho with rho an immersed loop in the lower stratum
    let mut suffixes: Vec<EdgePath> = vec![EdgePath::empty(); ne];
    let mut cond3_ok = true;
    let mut cond3_detail = String::from("every image is the edge followed by a lower suffix loop");
    for &e in &rep.order {
        let img = &rep.images[e];
        if img.0.first() != Some(&(e as i32 + 1)) {
            cond3_ok = false;
            cond3_detail = format!("edge {}: image does not start with the edge", g.edges[e].name);
            break;
        }
        let rho = EdgePath(img.0[1..].to_vec());
        if !img.is_immersed() {
            cond3_ok = false;
            cond3_detail = format!("edge {}: image backtracks", g.edges[e].name);
            break;
        }
        if !rho.is_empty() {
            let (a, b) = g.path_endpoints(&rho).unwrap_or((usize::MAX, usize::MAX - 1));
            if a != b || a != g.edges[e].to {
                cond3_ok = false;
                cond3_detail =
                    format!("edge {}: suffix is not a loop at the terminal vertex", g.edges[e].name);
                break;
            }
            if rho.edge_ids().any(|d| stage[d] >= stage[e]) {
                cond3_ok = false;
                cond3_detail = format!(
                    "edge {}: suffix uses an edge at or above its own stage",
                    g.edges[e].name
                );
                break;
            }
        }
        suffixes[e] = rho;
    }
    report.push("suffix-form", cond3_ok, cond3_detail);

    // condition (1), checked directly
    let cond1_ok = (0..ne).all(|e| rep.images[e].edge_ids().all(|d| stage[d] <= stage[e]));
    report.push(
        "stratum-invariance",
        cond1_ok,
        "each image stays in its own stratum".into(),
    );

    // condition (4)
    let mut cond4_ok = true;
    let mut cond4_detail = String::from("non-trivial suffixes are pairwise distinct");
    for i in 0..ne {
        for j in (i + 1)..ne {
            if !suffixes[i].is_empty() && suffixes[i] == suffixes[j] {
                cond4_ok = false;
                cond4_detail = format!(
                    "edges {} and {} share the suffix",
                    g.edges[i].name, g.edges[j].name
                );
            }
        }
    }
    report.push("distinct-suffixes", cond4_ok, cond4_detail);

    // induced map on the fiber
    let mut fwd_images = Vec::with_capacity(g.basis.rank());
    let mut ok_maps = true;
    {
        // provisional ValidatedRep to reuse map_path
        let prov = ValidatedRep {
            rep: rep.clone(),
            suffixes: suffixes.clone(),
            degrees: vec![0; ne],
            induced: FreeAutomorphism::identity(g.basis.clone()),
            conjugator: ReducedWord::identity(),
            stage: stage.clone(),
        };
        for gen in 0..g.basis.rank() {
            let loop_path = match g.generator_loop(gen) {
                Ok(p) => p,
                Err(_) => {
                    ok_maps = false;
                    break;
                }
            };
            match prov.map_path(&loop_path.tighten()) {
                Ok(img) => fwd_images.push(g.word_of_path(&img)),
                Err(_) => {
                    ok_maps = false;
                    break;
                }
            }
        }
    }
    if !ok_maps {
        report.push(
            "induced-map",
            false,
            "could not compute the induced fiber map".into(),
        );
        return (report, None);
    }

    // abelianization: automorphism and unipotence
    let det_ok;
    let unipotent_ok;
    {
        let n = g.basis.rank();
        let mut m = vec![vec![0i64; n]; n];
        for (j, img) in fwd_images.iter().enumerate() {
            for &l in img.letters() {
                let i = (l.unsigned_abs() - 1) as usize;
                m[i][j] += if l > 0 { 1 } else { -1 };
            }
        }
        let d = det(&m);
        det_ok = d == 1 || d == -1;
        let mut nilp = m.clone();
        for i in 0..n {
            nilp[i][i] -= 1;
        }
        let mut acc = nilp.clone();
        for _ in 1..n {
            acc = mat_mul(&acc, &nilp);
        }
        unipotent_ok = acc.iter().all(|row| row.iter().all(|&x| x == 0));
        report.push(
            "marking-automorphism",
            det_ok,
            format!("abelianized determinant = {d}"),
        );
        report.push(
            "unipotent",
            unipotent_ok,
            "(M - I)^rank vanishes on the abelianization".into(),
        );
    }
    if !det_ok {
        return (report, None);
    }

    // match against the declared monodromy up to a bounded inner twist
    let phi = group.monodromy();
    let mut conjugator: Option<ReducedWord> = None;
    'search: for c in enumerate_words(&g.basis, conjugator_bound) {
        for gen in 0..g.basis.rank() {
            let want = c
                .concat(&phi.apply(&ReducedWord::generator(gen), 1))
                .concat(&c.inverse());
            if want != fwd_images[gen] {
                continue 'search;
            }
        }
        conjugator = Some(c);
        break;
    }
    report.push(
        "monodromy-match",
        conjugator.is_some(),
        match &conjugator {
            Some(c) if c.is_empty() => "induced map equals the monodromy".to_string(),
            Some(c) => format!(
                "induced map is the monodromy twisted by {}",
                c.display(&g.basis)
            ),
            None => format!(
                "no conjugator of length <= {conjugator_bound} matches the monodromy"
            ),
        },
    );
    if !cond3_ok || !report.passed {
        return (report, None);
    }
    let Some(conjugator) = conjugator else {
        return (report, None);
    };

    // degrees by the suffix recursion (well-founded by suffix-form)
    let mut degrees = vec![0u32; ne];
    for &e in &rep.order {
        degrees[e] = if suffixes[e].is_empty() {
            0
        } else {
            1 + suffixes[e].edge_ids().map(|d| degrees[d]).max().unwrap()
        };
    }
    for (e, info) in g.edges.iter().enumerate() {
        report.degrees.insert(info.name.clone(), degrees[e]);
    }
    report.top_degree = degrees.iter().copied().max().unwrap_or(0);

    let backward = {
        // induced^-1 = conj(phi^-1(c^-1)) . phi^-1
        let ci = phi.apply(&conjugator.inverse(), -1);
        (0..g.basis.rank())
            .map(|gen| {
                ci.concat(&phi.apply(&ReducedWord::generator(gen), -1))
                    .concat(&ci.inverse())
            })
            .collect::<Vec<_>>()
    };
    let induced = match FreeAutomorphism::new(g.basis.clone(), fwd_images, backward) {
        Ok(a) => a,
        Err(e) => {
            report.push("induced-map", false, format!("{e}"));
            return (report, None);
        }
    };

    let validated = ValidatedRep {
        rep: rep.clone(),
        suffixes,
        degrees,
        induced,
        conjugator,
        stage,
    };

    // iterate immersion up to the check range
    let mut immersion_ok = true;
    let mut immersion_detail = format!("f^n(e) immersed for n <= {ITERATE_CHECK_RANGE}");
    'outer: for e in 0..ne {
        for n in 1..=ITERATE_CHECK_RANGE {
            if validated.iterate_edge(e, n).is_err() {
                immersion_ok = false;
                immersion_detail =
                    format!("f^{n}({}) backtracks", g.edges[e].name);
                break 'outer;
            }
        }
    }
    report.push("iterate-immersion", immersion_ok, immersion_detail);
    if !immersion_ok {
        return (report, None);
    }

    (report, Some(validated))
}

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i64;
    for j in 0..n {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += sign * m[0][j] * det(&minor);
    }
    acc
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// All reduced words of length at most `max_len`, in canonical order.
pub fn enumerate_words(basis: &Basis, max_len: usize) -> Vec<ReducedWord> {
    let letters: Vec<i16> = (1..=basis.rank() as i16).flat_map(|g| [g, -g]).collect();
    let mut out = vec![ReducedWord::identity()];
    let mut frontier = vec![ReducedWord::identity()];
    for _ in 0..max_len {
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
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Degree of the exact integer polynomial through `seq` (values at 0..len-1),
/// via finite differences; None if the sequence is not polynomial.
pub fn polynomial_degree(seq: &[i64]) -> Option<u32> {
    let mut row: Vec<i64> = seq.to_vec();
    let mut degree = 0u32;
    while row.len() > 1 {
        if row.iter().all(|&x| x == row[0]) {
            return Some(degree);
        }
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
        degree += 1;
    }
    None
}
