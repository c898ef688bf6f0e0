use fbc_core::*;
use fbc_core::hierarchy::*;
use fbc_core::tree::*;
use fbc_core::rep::*;
use std::time::Instant;

fn main() {
    let b = Basis::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
    let w = |s: &str| ReducedWord::parse(&b, s).unwrap();
    let phi = FreeAutomorphism::new(
        b.clone(),
        vec![w("a"), w("b a"), w("c b")],
        vec![w("a"), w("b a'"), w("c a b'")],
    ).unwrap();
    let g3 = FbcGroup::new(b.clone(), phi, "t").unwrap();
    // rose representative
    let edges: Vec<EdgeInfo> = ["a","b","c"].iter().map(|n| EdgeInfo{name:n.to_string(),from:0,to:0}).collect();
    let marking: Vec<(String,String)> = ["a","b","c"].iter().map(|n|(n.to_string(),n.to_string())).collect();
    let graph = MarkedGraph::new(vec!["x0".into()], edges, &[], &marking, b.clone(), 0).unwrap();
    let images = vec![graph.parse_path("a").unwrap(), graph.parse_path("b a").unwrap(), graph.parse_path("c b").unwrap()];
    let rep = TopRep { graph, images, order: vec![0,1,2] };
    let (r, v) = validate_filtration(&rep, &g3, 6);
    assert!(r.passed);
    let v = v.unwrap();
    let top = topmost_splitting(&g3, &v).unwrap();
    for (br, tr) in [(3u32,1u32),(4,1),(5,2),(6,3)] {
        let bl = ball(&g3, br, 20_000_000).unwrap();
        let t0 = Instant::now();
        match tree_ball(&g3, &top.gog, tr, &bl, 2_000_000) {
            Ok(tb) => println!("ball({br}) tree({tr}): {} tverts {} tedges in {:?}", tb.vertex_count(), tb.edges.len(), t0.elapsed()),
            Err(e) => println!("ball({br}) tree({tr}): {e} after {:?}", t0.elapsed()),
        }
    }
}
