//! Reference groups used across unit tests.

use crate::group::FbcGroup;
use crate::rep::{EdgeInfo, EdgePath, MarkedGraph, TopRep};
use crate::words::{Basis, FreeAutomorphism, ReducedWord};

/// Rose representative: images given as words in the petal names.
pub(crate) fn rose_group(images: &[(&str, &str, &str)], stable: &str) -> (FbcGroup, TopRep) {
    let names: Vec<String> = images.iter().map(|(g, _, _)| g.to_string()).collect();
    let basis = Basis::new(names.clone()).unwrap();
    let fwd: Vec<ReducedWord> = images
        .iter()
        .map(|(_, f, _)| ReducedWord::parse(&basis, f).unwrap())
        .collect();
    let bwd: Vec<ReducedWord> = images
        .iter()
        .map(|(_, _, b)| ReducedWord::parse(&basis, b).unwrap())
        .collect();
    let phi = FreeAutomorphism::new(basis.clone(), fwd, bwd).unwrap();
    let group = FbcGroup::new(basis.clone(), phi, stable).unwrap();
    let edges: Vec<EdgeInfo> = names
        .iter()
        .map(|n| EdgeInfo { name: n.clone(), from: 0, to: 0 })
        .collect();
    let marking: Vec<(String, String)> = names.iter().map(|n| (n.clone(), n.clone())).collect();
    let graph = MarkedGraph::new(vec!["x0".into()], edges, &[], &marking, basis.clone(), 0).unwrap();
    let image_paths: Vec<EdgePath> = images
        .iter()
        .map(|(_, f, _)| graph.parse_path(f).unwrap())
        .collect();
    let order: Vec<usize> = (0..names.len()).collect();
    (group, TopRep { graph, images: image_paths, order })
}

/// Linear growth: a fixed, b -> b a.
pub(crate) fn g2_rep() -> (FbcGroup, TopRep) {
    rose_group(&[("a", "a", "a"), ("b", "b a", "b a'")], "t")
}

/// Quadratic growth: a fixed, b -> b a, c -> c b.
pub(crate) fn g3_rep() -> (FbcGroup, TopRep) {
    rose_group(
        &[("a", "a", "a"), ("b", "b a", "b a'"), ("c", "c b", "c a b'")],
        "t",
    )
}

/// Trivial monodromy on rank two: the whole group is a product.
pub(crate) fn p1_rep() -> (FbcGroup, TopRep) {
    rose_group(&[("a", "a", "a"), ("b", "b", "b")], "t")
}

/// Trivial monodromy on rank one: the square lattice.
pub(crate) fn z2_rep() -> (FbcGroup, TopRep) {
    rose_group(&[("a", "a", "a")], "t")
}

/// Subdivided variant of the linear rose: b split into b1.b2 through a second
/// vertex, with b2 carrying the suffix.
pub(crate) fn g2_subdivided() -> (FbcGroup, TopRep) {
    let basis = Basis::new(vec!["a".into(), "b".into()]).unwrap();
    let phi = FreeAutomorphism::new(
        basis.clone(),
        vec![
            ReducedWord::parse(&basis, "a").unwrap(),
            ReducedWord::parse(&basis, "b a").unwrap(),
        ],
        vec![
            ReducedWord::parse(&basis, "a").unwrap(),
            ReducedWord::parse(&basis, "b a'").unwrap(),
        ],
    )
    .unwrap();
    let group = FbcGroup::new(basis.clone(), phi, "t").unwrap();
    let edges = vec![
        EdgeInfo { name: "a".into(), from: 0, to: 0 },
        EdgeInfo { name: "b1".into(), from: 0, to: 1 },
        EdgeInfo { name: "b2".into(), from: 1, to: 0 },
    ];
    let graph = MarkedGraph::new(
        vec!["x0".into(), "x1".into()],
        edges,
        &["b1".to_string()],
        &[("a".to_string(), "a".to_string()), ("b2".to_string(), "b".to_string())],
        basis.clone(),
        0,
    )
    .unwrap();
    let images = vec![
        graph.parse_path("a").unwrap(),
        graph.parse_path("b1").unwrap(),
        graph.parse_path("b2 a").unwrap(),
    ];
    let rep = TopRep { graph, images, order: vec![0, 1, 2] };
    (group, rep)
}
