//! The group definition file: a sectioned key-value format describing the
//! basis, the monodromy with its inverse, the marked graph representative,
//! resource limits and the seed.
//!
//! Parsing and emission round-trip: emitting a parsed definition yields a
//! canonical form that re-parses to the same definition byte for byte.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::FbcGroup;
use crate::rep::{EdgeInfo, MarkedGraph, TopRep};
use crate::words::{Basis, FreeAutomorphism, ReducedWord};

#[derive(Debug, Clone, PartialEq)]
pub struct Limits {
    pub ball_cap: usize,
    pub conjugator_bound: usize,
    pub prune_bound: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { ball_cap: 5_000_000, conjugator_bound: 6, prune_bound: 6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupDefinition {
    pub basis: Vec<String>,
    pub stable: String,
    pub monodromy: Vec<(String, String)>,
    pub monodromy_inverse: Vec<(String, String)>,
    pub vertices: Vec<String>,
    pub basepoint: String,
    /// name, from, to
    pub edges: Vec<(String, String, String)>,
    pub tree_edges: Vec<String>,
    pub marking: Vec<(String, String)>,
    pub edge_images: Vec<(String, String)>,
    pub filtration: Vec<String>,
    pub limits: Limits,
    pub seed: u64,
}

struct Section<'a> {
    name: String,
    line: usize,
    entries: Vec<(usize, &'a str, &'a str)>,
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(Error::Parse { line, msg: "unterminated section header".into() })?;
            sections.push(Section { name: name.trim().to_string(), line, entries: Vec::new() });
            continue;
        }
        if sections.is_empty() {
            return Err(Error::Parse { line, msg: "entry before any section".into() });
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(Error::Parse { line, msg: format!("expected key = value, got {content:?}") });
        };
        sections
            .last_mut()
            .unwrap()
            .entries
            .push((line, k.trim(), v.trim()));
    }
    Ok(sections)
}

pub fn parse(text: &str) -> Result<GroupDefinition> {
    let sections = split_sections(text)?;
    let find = |name: &str| -> Result<&Section> {
        sections
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing section [{name}]") })
    };
    let get = |sec: &Section, key: &str| -> Result<String> {
        sec.entries
            .iter()
            .find(|(_, k, _)| *k == key)
            .map(|(_, _, v)| v.to_string())
            .ok_or_else(|| Error::Parse {
                line: sec.line,
                msg: format!("section [{}] misses the key {key:?}", sec.name),
            })
    };
    let pairs = |sec: &Section| -> Vec<(String, String)> {
        sec.entries
            .iter()
            .map(|(_, k, v)| (k.to_string(), v.to_string()))
            .collect()
    };

    let group = find("group")?;
    let basis: Vec<String> = get(group, "basis")?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let stable = get(group, "stable")?;

    let monodromy = pairs(find("monodromy")?);
    let mono_sec = find("monodromy_inverse")?;
    let monodromy_inverse = pairs(mono_sec);
    for g in &basis {
        if !monodromy.iter().any(|(k, _)| k == g) {
            return Err(Error::Parse {
                line: find("monodromy")?.line,
                msg: format!("monodromy misses the image of {g:?}"),
            });
        }
        if !monodromy_inverse.iter().any(|(k, _)| k == g) {
            return Err(Error::Parse {
                line: mono_sec.line,
                msg: format!("monodromy_inverse misses the backward image of {g:?}"),
            });
        }
    }

    let graph = find("graph")?;
    let vertices: Vec<String> = get(graph, "vertices")?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let basepoint = get(graph, "basepoint")?;
    let mut edges = Vec::new();
    for part in get(graph, "edges")?.split_whitespace() {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: graph.line,
                msg: format!("edge {part:?} must be name:from:to"),
            });
        }
        edges.push((fields[0].to_string(), fields[1].to_string(), fields[2].to_string()));
    }

    let tree = find("spanning_tree")?;
    let tree_edges: Vec<String> = get(tree, "edges")?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let marking = pairs(find("marking")?);
    let edge_images = pairs(find("edge_images")?);
    let filtration: Vec<String> = get(find("filtration")?, "order")?
        .split_whitespace()
        .map(str::to_string)
        .collect();

    let mut limits = Limits::default();
    if let Ok(sec) = find("limits") {
        for (line, k, v) in &sec.entries {
            let parsed: u64 = v.parse().map_err(|_| Error::Parse {
                line: *line,
                msg: format!("bad number {v:?}"),
            })?;
            match *k {
                "ball_cap" => limits.ball_cap = parsed as usize,
                "conjugator_bound" => limits.conjugator_bound = parsed as usize,
                "prune_bound" => limits.prune_bound = parsed as u32,
                other => {
                    return Err(Error::Parse {
                        line: *line,
                        msg: format!("unknown limit {other:?}"),
                    })
                }
            }
        }
    }
    let seed = if let Ok(sec) = find("seed") {
        get(sec, "value")?
            .parse()
            .map_err(|_| Error::Parse { line: sec.line, msg: "bad seed".into() })?
    } else {
        0
    };

    Ok(GroupDefinition {
        basis,
        stable,
        monodromy,
        monodromy_inverse,
        vertices,
        basepoint,
        edges,
        tree_edges,
        marking,
        edge_images,
        filtration,
        limits,
        seed,
    })
}

/// Canonical emission; `emit(parse(emit(parse(text))))` is byte-identical to
/// `emit(parse(text))`.
pub fn emit(def: &GroupDefinition) -> String {
    let mut out = String::new();
    let kv = |out: &mut String, pairs: &[(String, String)], order: &[String]| {
        // canonical order: the basis/edge order given
        let map: BTreeMap<&str, &str> =
            pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        for key in order {
            if let Some(v) = map.get(key.as_str()) {
                out.push_str(&format!("{key} = {v}\n"));
            }
        }
    };
    out.push_str("[group]\n");
    out.push_str(&format!("basis = {}\n", def.basis.join(" ")));
    out.push_str(&format!("stable = {}\n", def.stable));
    out.push_str("\n[monodromy]\n");
    kv(&mut out, &def.monodromy, &def.basis);
    out.push_str("\n[monodromy_inverse]\n");
    kv(&mut out, &def.monodromy_inverse, &def.basis);
    out.push_str("\n[graph]\n");
    out.push_str(&format!("vertices = {}\n", def.vertices.join(" ")));
    out.push_str(&format!("basepoint = {}\n", def.basepoint));
    let edge_strs: Vec<String> = def
        .edges
        .iter()
        .map(|(n, f, t)| format!("{n}:{f}:{t}"))
        .collect();
    out.push_str(&format!("edges = {}\n", edge_strs.join(" ")));
    out.push_str("\n[spanning_tree]\n");
    out.push_str(&format!("edges = {}\n", def.tree_edges.join(" ")));
    out.push_str("\n[marking]\n");
    let edge_names: Vec<String> = def.edges.iter().map(|(n, _, _)| n.clone()).collect();
    kv(&mut out, &def.marking, &edge_names);
    out.push_str("\n[edge_images]\n");
    kv(&mut out, &def.edge_images, &edge_names);
    out.push_str("\n[filtration]\n");
    out.push_str(&format!("order = {}\n", def.filtration.join(" ")));
    out.push_str("\n[limits]\n");
    out.push_str(&format!("ball_cap = {}\n", def.limits.ball_cap));
    out.push_str(&format!("conjugator_bound = {}\n", def.limits.conjugator_bound));
    out.push_str(&format!("prune_bound = {}\n", def.limits.prune_bound));
    out.push_str("\n[seed]\n");
    out.push_str(&format!("value = {}\n", def.seed));
    out
}

/// Realize the definition as a group and a representative.
pub fn build(def: &GroupDefinition) -> Result<(FbcGroup, TopRep)> {
    let basis = Basis::new(def.basis.clone())?;
    let image = |pairs: &[(String, String)], g: &str| -> Result<ReducedWord> {
        let text = pairs
            .iter()
            .find(|(k, _)| k == g)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Input(format!("missing image of {g:?}")))?;
        ReducedWord::parse(&basis, &text)
    };
    let fwd: Vec<ReducedWord> = def
        .basis
        .iter()
        .map(|g| image(&def.monodromy, g))
        .collect::<Result<_>>()?;
    let bwd: Vec<ReducedWord> = def
        .basis
        .iter()
        .map(|g| image(&def.monodromy_inverse, g))
        .collect::<Result<_>>()?;
    let phi = FreeAutomorphism::new(basis.clone(), fwd, bwd)?;
    let group = FbcGroup::new(basis.clone(), phi, def.stable.clone())?;

    let vidx = |name: &str| -> Result<usize> {
        def.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Input(format!("unknown vertex {name:?}")))
    };
    let edge_infos: Vec<EdgeInfo> = def
        .edges
        .iter()
        .map(|(n, f, t)| {
            Ok(EdgeInfo { name: n.clone(), from: vidx(f)?, to: vidx(t)? })
        })
        .collect::<Result<_>>()?;
    let graph = MarkedGraph::new(
        def.vertices.clone(),
        edge_infos,
        &def.tree_edges,
        &def.marking,
        basis,
        vidx(&def.basepoint)?,
    )?;
    let images = def
        .edges
        .iter()
        .map(|(n, _, _)| {
            let text = def
                .edge_images
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Input(format!("missing image of edge {n:?}")))?;
            graph.parse_path(&text)
        })
        .collect::<Result<Vec<_>>>()?;
    let order = def
        .filtration
        .iter()
        .map(|n| {
            graph
                .edge_index(n)
                .ok_or_else(|| Error::Input(format!("unknown edge {n:?} in the filtration")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((group, TopRep { graph, images, order }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const G2: &str = "\
# linear monodromy on rank two
[group]
basis = a b
stable = t

[monodromy]
a = a
b = b a

[monodromy_inverse]
a = a
b = b a'

[graph]
vertices = x0
basepoint = x0
edges = a:x0:x0 b:x0:x0

[spanning_tree]
edges =

[marking]
a = a
b = b

[edge_images]
a = a
b = b a

[filtration]
order = a b
";

    #[test]
    fn parse_build_roundtrip() {
        let def = parse(G2).unwrap();
        assert_eq!(def.basis, vec!["a", "b"]);
        assert_eq!(def.limits.ball_cap, 5_000_000);
        let canon = emit(&def);
        let def2 = parse(&canon).unwrap();
        assert_eq!(def, def2);
        assert_eq!(canon, emit(&def2));
        let (group, rep) = build(&def).unwrap();
        assert_eq!(group.basis().rank(), 2);
        assert_eq!(rep.order, vec![0, 1]);
        let (report, v) = crate::rep::validate_filtration(&rep, &group, 6);
        assert!(report.passed);
        assert!(v.is_some());
    }

    #[test]
    fn missing_backward_images_named() {
        let broken = G2.replace("\n[monodromy_inverse]\na = a\nb = b a'\n", "\n[monodromy_inverse]\na = a\n");
        match parse(&broken) {
            Err(Error::Parse { msg, .. }) => {
                assert!(msg.contains("backward image"), "{msg}");
                assert!(msg.contains('b'), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        match parse("[group\nbasis = a") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse("x = 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse(&format!("{G2}\n[limits]\nball_cap = many")) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("bad number")),
            other => panic!("{other:?}"),
        }
    }
}
