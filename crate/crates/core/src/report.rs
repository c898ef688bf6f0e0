//! Artifact emission: DOT pictures and versioned JSON records.

use serde_json::{json, Value};

use crate::coned::ConedBall;
use crate::group::{CayleyBall, FbcGroup};
use crate::hierarchy::{GraphOfGroups, NodeKind, SplittingNode, VertexKind};
use crate::tree::TreeBall;

pub const SCHEMA_VERSION: u32 = 1;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Cayley ball as DOT, vertices labelled by normal form.
pub fn dot_ball(group: &FbcGroup, ball: &CayleyBall) -> String {
    let mut out = String::from("graph cayley_ball {\n  node [shape=circle, fontsize=8];\n");
    for (i, v) in ball.vertices().iter().enumerate() {
        out.push_str(&format!(
            "  v{i} [label=\"{}\"];\n",
            esc(&format!("{}", group.display(v)))
        ));
    }
    for (v, g, w) in ball.edges() {
        if v < w {
            out.push_str(&format!(
                "  v{v} -- v{w} [label=\"{}\"];\n",
                esc(&group.generators()[g].label)
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// Compact adjacency record of a ball.
pub fn ball_json(group: &FbcGroup, ball: &CayleyBall) -> Value {
    let vertices: Vec<Value> = ball
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            json!({
                "form": format!("{}", group.display(v)),
                "dist": ball.distance_label(i),
            })
        })
        .collect();
    let edges: Vec<Value> = ball
        .edges()
        .filter(|(v, _, w)| v < w)
        .map(|(v, g, w)| json!([v, group.generators()[g].label, w]))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "radius": ball.radius,
        "vertices": vertices,
        "edges": edges,
    })
}

/// Graph of groups as DOT with vertex kinds and attachment words.
pub fn dot_gog(group: &FbcGroup, gog: &GraphOfGroups) -> String {
    let mut out = String::from("digraph graph_of_groups {\n  node [fontsize=10];\n");
    for (i, v) in gog.vertices.iter().enumerate() {
        let (shape, kind) = match v.kind {
            VertexKind::Piece { fiber_rank } => ("box", format!("piece rank {fiber_rank}")),
            VertexKind::Torus => ("ellipse", "torus".into()),
        };
        out.push_str(&format!(
            "  v{i} [shape={shape}, label=\"{}\\n{}\\n{}\"];\n",
            esc(&v.name),
            kind,
            esc(&v.group.describe(group))
        ));
    }
    for e in &gog.edges {
        let minus = e
            .minus
            .iter()
            .map(|m| format!("{}", group.display(m)))
            .collect::<Vec<_>>()
            .join(", ");
        let plus = e
            .plus
            .iter()
            .map(|p| format!("{}", group.display(p)))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!(
            "  v{} -> v{} [label=\"{}: {} | {}\"];\n",
            e.from,
            e.to,
            esc(&e.name),
            esc(&minus),
            esc(&plus)
        ));
    }
    out.push_str("}\n");
    out
}

/// Tree ball as DOT, vertices labelled by orbit and coset representative.
pub fn dot_tree(group: &FbcGroup, gog: &GraphOfGroups, tb: &TreeBall) -> String {
    let mut out = String::from("graph tree_ball {\n  node [fontsize=8];\n");
    for (i, v) in tb.vertices.iter().enumerate() {
        let shape = match gog.vertices[v.orbit].kind {
            VertexKind::Piece { .. } => "box",
            VertexKind::Torus => "ellipse",
        };
        out.push_str(&format!(
            "  v{i} [shape={shape}, label=\"{}.{}\"];\n",
            esc(&gog.vertices[v.orbit].name),
            esc(&format!("{}", group.display(&v.rep)))
        ));
    }
    for e in &tb.edges {
        out.push_str(&format!("  v{} -- v{};\n", e.a, e.b));
    }
    out.push_str("}\n");
    out
}

/// Coned ball as DOT: base edges solid, one dashed star per coned coset.
pub fn dot_coned(cb: &ConedBall) -> String {
    let mut out = String::from("graph coned_ball {\n  node [shape=point];\n");
    for (v, _, w) in cb.base.edges() {
        if v < w {
            out.push_str(&format!("  v{v} -- v{w};\n"));
        }
    }
    for (p, per) in cb.coset_members.iter().enumerate() {
        for members in per {
            if members.len() < 2 {
                continue;
            }
            let hub = members[0];
            for &m in &members[1..] {
                out.push_str(&format!(
                    "  v{hub} -- v{m} [style=dashed, color=red, label=\"P{p}\"];\n"
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Nested hierarchy record.
pub fn hierarchy_json(group: &FbcGroup, node: &SplittingNode) -> Value {
    let kind = match &node.kind {
        NodeKind::ProductLeaf { fiber_gens, vertical } => json!({
            "type": "product-leaf",
            "fiber": fiber_gens
                .iter()
                .map(|w| format!("{}", w.display(group.basis())))
                .collect::<Vec<_>>(),
            "vertical": format!("{}", group.display(vertical)),
        }),
        NodeKind::CyclicLeaf { gen } => json!({
            "type": "cyclic-leaf",
            "generator": format!("{}", group.display(gen)),
        }),
        NodeKind::Split { gog, linear, children } => {
            let edges: Vec<Value> = gog
                .edges
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "from": gog.vertices[e.from].name,
                        "to": gog.vertices[e.to].name,
                        "minus": e.minus.iter().map(|m| format!("{}", group.display(m))).collect::<Vec<_>>(),
                        "plus": e.plus.iter().map(|p| format!("{}", group.display(p))).collect::<Vec<_>>(),
                        "bass": format!("{}", group.display(&e.bass)),
                        "suffix": e.suffix.as_ref().map(|s| format!("{}", s.display(group.basis()))),
                    })
                })
                .collect();
            json!({
                "type": if linear.is_some() { "linear-splitting" } else { "topmost-splitting" },
                "vertices": gog
                    .vertices
                    .iter()
                    .map(|v| json!({"name": v.name, "group": v.group.describe(group)}))
                    .collect::<Vec<_>>(),
                "edges": edges,
                "tori": linear.as_ref().map(|lin| lin
                    .tori
                    .iter()
                    .map(|t| json!({
                        "suffix": format!("{}", t.z.display(group.basis())),
                        "attachment": format!("{}", group.display(&t.attachment)),
                    }))
                    .collect::<Vec<_>>()),
                "onto_note": linear.as_ref().map(|lin| lin.onto_note.clone()),
                "children": children.iter().map(|c| hierarchy_json(group, c)).collect::<Vec<_>>(),
            })
        }
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "name": node.name,
        "degree": node.degree,
        "fiber_rank": node.fiber_rank,
        "kind": kind,
    })
}
