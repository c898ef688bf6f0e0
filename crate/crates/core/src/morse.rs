//! Morse detection for paths and stability checks for finitely generated
//! subgroups, at finite scale: a path is Morse-consistent when it meets every
//! coned coset in a set of small base diameter, equivalently (measured, not
//! assumed) when its projection to the coned ball is a quasigeodesic with
//! small constants.

use serde::Serialize;

use crate::coned::{ConedBall, UNREACHED};
use crate::error::{Error, Result};
use crate::group::{geodesics_between, CayleyBall, FbcElement, FbcGroup};

/// A path in the base Cayley graph, stored as ball vertex indices with
/// consecutive vertices joined by a generator.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub vertices: Vec<usize>,
    pub label: String,
}

impl PathSample {
    pub fn from_indices(ball: &CayleyBall, vertices: Vec<usize>, label: String) -> Result<Self> {
        for w in vertices.windows(2) {
            if !ball.neighbors(w[0]).any(|x| x == w[1]) {
                return Err(Error::Input(format!(
                    "path {label}: consecutive vertices are not adjacent"
                )));
            }
        }
        Ok(PathSample { vertices, label })
    }

    /// Parse a whitespace-separated list of generator labels as the steps of
    /// a path starting at the identity.
    pub fn from_steps(
        group: &FbcGroup,
        ball: &CayleyBall,
        text: &str,
        label: String,
    ) -> Result<Self> {
        let mut cur = FbcElement::identity();
        let mut vertices = vec![ball
            .index_of(&cur)
            .ok_or_else(|| Error::Input("ball lacks the identity".into()))?];
        for tok in text.split_whitespace() {
            let gen = group
                .generators()
                .iter()
                .find(|g| g.label == tok)
                .ok_or_else(|| Error::Input(format!("unknown generator label {tok:?}")))?;
            cur = group.multiply(&cur, &gen.element);
            vertices.push(ball.index_of(&cur).ok_or_else(|| {
                Error::Range(format!("path step {tok:?} leaves the ball"))
            })?);
        }
        PathSample::from_indices(ball, vertices, label)
    }

    pub fn reversed(&self) -> PathSample {
        PathSample {
            vertices: self.vertices.iter().rev().copied().collect(),
            label: format!("{}-reversed", self.label),
        }
    }

    pub fn translated(
        &self,
        group: &FbcGroup,
        ball: &CayleyBall,
        g: &FbcElement,
    ) -> Result<PathSample> {
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for &v in &self.vertices {
            let moved = group.multiply(g, &ball.vertices()[v]);
            vertices.push(ball.index_of(&moved).ok_or_else(|| {
                Error::Range("translated path leaves the ball".into())
            })?);
        }
        PathSample::from_indices(ball, vertices, format!("{}-translated", self.label))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MorseClass {
    MorseConsistent,
    NonMorseWitness,
}

#[derive(Debug, Clone, Serialize)]
pub struct MorseVerdict {
    pub label: String,
    pub max_coset_intersection: u32,
    /// (subgroup index, coset id) of a widest intersection
    pub witness_coset: Option<(usize, u32)>,
    /// tight affine envelope |i-j| <= K d + C over all index pairs
    pub qg_k: f64,
    pub qg_c: f64,
    pub classification: MorseClass,
    pub threshold: u32,
}

/// Tight two-sided envelope: C is the largest index gap at coned distance
/// zero, K the largest (gap - C) / distance over the rest.
fn qg_envelope(dists: &[Vec<u32>], n: usize) -> (f64, f64) {
    let mut c = 0u32;
    for i in 0..n {
        for j in (i + 1)..n {
            if dists[i][j] == 0 {
                c = c.max((j - i) as u32);
            }
        }
    }
    let mut k = 0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dists[i][j];
            if d > 0 && d != UNREACHED {
                let gap = (j - i) as f64 - c as f64;
                if gap > 0.0 {
                    k = k.max(gap / d as f64);
                }
            }
        }
    }
    (k, c as f64)
}

/// Coset-intersection diameters and the projected quasigeodesic envelope of
/// one path, classified against the coset threshold.
pub fn morse_check(cb: &ConedBall, path: &PathSample, threshold: u32) -> Result<MorseVerdict> {
    let n = path.vertices.len();
    if n == 0 {
        return Err(Error::Input("empty path".into()));
    }
    let (x, y) = (path.vertices[0], path.vertices[n - 1]);
    if !cb.margin_ok(x, y) {
        return Err(Error::Range(
            "path endpoints violate the boundary margin rule".into(),
        ));
    }
    let mut max_int = 0u32;
    let mut witness = None;
    for (p, ids) in cb.coset_ids.iter().enumerate() {
        // group path vertices by coset
        let mut by_coset: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
        for &v in &path.vertices {
            by_coset.entry(ids[v]).or_default().push(v);
        }
        for (cid, members) in by_coset {
            if members.len() < 2 {
                continue;
            }
            for i in 0..members.len() {
                for j in (i + 1)..members.len() {
                    if members[i] == members[j] {
                        continue;
                    }
                    if let Some(d) = cb.base_distance(members[i], members[j]) {
                        if d > max_int {
                            max_int = d;
                            witness = Some((p, cid));
                        }
                    }
                }
            }
        }
    }
    // coned distances between the path points; indexed by path position
    let per_vertex: Vec<Vec<u32>> = path
        .vertices
        .iter()
        .map(|&v| cb.coned_dists(v))
        .collect();
    let dists: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| per_vertex[i][path.vertices[j]])
                .collect()
        })
        .collect();
    let (k, c) = qg_envelope(&dists, n);
    let classification = if max_int > threshold {
        MorseClass::NonMorseWitness
    } else {
        MorseClass::MorseConsistent
    };
    Ok(MorseVerdict {
        label: path.label.clone(),
        max_coset_intersection: max_int,
        witness_coset: witness,
        qg_k: k,
        qg_c: c,
        classification,
        threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub tau: u32,
    pub k0: f64,
    pub c0: f64,
    /// [coset-pass][qg-pass] counts
    pub matrix: [[usize; 2]; 2],
    pub agreement: f64,
    pub verdicts: Vec<MorseVerdict>,
}

/// Partition the samples by the coset criterion (intersection <= tau) and by
/// the projected-quasigeodesic criterion (K <= k0, C <= c0); report the
/// agreement matrix.
pub fn detectability_crosscheck(
    cb: &ConedBall,
    samples: &[PathSample],
    tau: u32,
    k0: f64,
    c0: f64,
) -> Result<CrosscheckReport> {
    let mut matrix = [[0usize; 2]; 2];
    let mut verdicts = Vec::new();
    for s in samples {
        let v = morse_check(cb, s, tau)?;
        let coset_pass = v.max_coset_intersection <= tau;
        let qg_pass = v.qg_k <= k0 && v.qg_c <= c0;
        matrix[usize::from(coset_pass)][usize::from(qg_pass)] += 1;
        verdicts.push(v);
    }
    let agree = matrix[0][0] + matrix[1][1];
    let total = agree + matrix[0][1] + matrix[1][0];
    Ok(CrosscheckReport {
        tau,
        k0,
        c0,
        matrix,
        agreement: if total == 0 { 1.0 } else { agree as f64 / total as f64 },
        verdicts,
    })
}

/// A finitely generated subgroup given by generators, with the intrinsic ball
/// enumerated against an ambient ball.
#[derive(Debug, Clone)]
pub struct SubgroupSpec {
    pub name: String,
    pub generators: Vec<FbcElement>,
}

#[derive(Debug)]
pub struct SubgroupBall {
    /// distinct subgroup elements visible in the ambient ball
    pub elements: Vec<FbcElement>,
    /// intrinsic word length of each element
    pub intrinsic: Vec<u32>,
    /// whether the intrinsic enumeration saturated inside the ambient ball
    pub saturated: bool,
}

/// Intrinsic breadth-first enumeration of the subgroup, kept inside the
/// ambient ball.
pub fn subgroup_ball(
    group: &FbcGroup,
    ball: &CayleyBall,
    spec: &SubgroupSpec,
    max_intrinsic: u32,
) -> SubgroupBall {
    let mut gens: Vec<FbcElement> = spec.generators.clone();
    gens.extend(spec.generators.iter().map(|g| group.invert(g)));
    let mut index: std::collections::HashMap<FbcElement, u32> = Default::default();
    index.insert(FbcElement::identity(), 0);
    let mut elements = vec![FbcElement::identity()];
    let mut intrinsic = vec![0u32];
    let mut frontier = vec![FbcElement::identity()];
    let mut saturated = true;
    for depth in 1..=max_intrinsic {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = group.multiply(x, s);
                if index.contains_key(&y) {
                    continue;
                }
                if ball.index_of(&y).is_none() {
                    // the intrinsic ball pokes outside the window
                    saturated = false;
                    continue;
                }
                index.insert(y.clone(), elements.len() as u32);
                elements.push(y.clone());
                intrinsic.push(depth);
                next.push(y);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    SubgroupBall { elements, intrinsic, saturated }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub subgroup: String,
    /// nontrivial intersections with visible cosets: (subgroup element shown,
    /// coned subgroup index)
    pub coset_witnesses: Vec<(String, usize)>,
    pub intersections_trivial: bool,
    /// max intrinsic/ambient distortion ratio observed
    pub distortion: f64,
    /// affine envelope of the orbit map into the coned ball
    pub orbit_k: f64,
    pub orbit_c: f64,
    pub stable_consistent: bool,
    pub pairs_used: usize,
}

/// The three finite-scale stability verdicts: coset intersections, distortion
/// of the intrinsic metric, and the quasiisometric-embedding envelope of the
/// orbit map into the coned ball.
pub fn stability_check(
    cb: &ConedBall,
    spec: &SubgroupSpec,
    max_intrinsic: u32,
    orbit_k_threshold: f64,
) -> Result<StabilityReport> {
    let group = &cb.group;
    let hball = subgroup_ball(group, &cb.base, spec, max_intrinsic);
    // (i) intersections with every visible coset of every coned subgroup:
    // h in g P g^-1 iff h fixes the coset g P, i.e. g^-1 h g in P
    let mut witnesses = Vec::new();
    'outer: for (p, product) in cb.products.iter().enumerate() {
        for h in &hball.elements {
            if h.is_identity() {
                continue;
            }
            // conjugated membership over coset representatives: it is enough
            // to test the coset of each ball element once
            for members in &cb.coset_members[p] {
                let rep = &cb.base.vertices()[members[0] as usize];
                let moved = group.multiply(&group.multiply(&group.invert(rep), h), rep);
                if product.contains(group, &moved) {
                    witnesses.push((format!("{}", group.display(h)), p));
                    continue 'outer;
                }
            }
        }
    }
    // (ii) distortion table
    let mut distortion = 1.0f64;
    for (i, h) in hball.elements.iter().enumerate() {
        if h.is_identity() {
            continue;
        }
        if let Some(idx) = cb.base.index_of(h) {
            let ambient = cb.base.distance_label(idx).max(1);
            distortion = distortion.max(hball.intrinsic[i] as f64 / ambient as f64);
        }
    }
    // (iii) orbit-map envelope into the coned ball: intrinsic distance vs
    // coned distance over all pairs (via intrinsic lookup of h1^-1 h2)
    let index: std::collections::HashMap<&FbcElement, usize> = hball
        .elements
        .iter()
        .enumerate()
        .map(|(i, h)| (h, i))
        .collect();
    let mut c0 = 0u32;
    let mut k0 = 0f64;
    let mut pairs_used = 0usize;
    for (i, h1) in hball.elements.iter().enumerate() {
        let Some(b1) = cb.base.index_of(h1) else { continue };
        let coned = cb.coned_dists(b1);
        for h2 in hball.elements.iter().skip(i + 1) {
            let diff = group.multiply(&group.invert(h1), h2);
            let Some(&k) = index.get(&diff) else { continue };
            let intrinsic = hball.intrinsic[k];
            let Some(b2) = cb.base.index_of(h2) else { continue };
            let d = coned[b2];
            if d == UNREACHED {
                continue;
            }
            pairs_used += 1;
            if d == 0 {
                c0 = c0.max(intrinsic);
            }
        }
        for h2 in hball.elements.iter().skip(i + 1) {
            let diff = group.multiply(&group.invert(h1), h2);
            let Some(&k) = index.get(&diff) else { continue };
            let intrinsic = hball.intrinsic[k];
            let Some(b2) = cb.base.index_of(h2) else { continue };
            let d = coned[b2];
            if d == UNREACHED || d == 0 {
                continue;
            }
            let gap = intrinsic as f64 - c0 as f64;
            if gap > 0.0 {
                k0 = k0.max(gap / d as f64);
            }
        }
    }
    let trivial = witnesses.is_empty();
    Ok(StabilityReport {
        subgroup: spec.name.clone(),
        coset_witnesses: witnesses,
        intersections_trivial: trivial,
        distortion,
        orbit_k: k0,
        orbit_c: c0 as f64,
        stable_consistent: trivial && k0 <= orbit_k_threshold,
        pairs_used,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongQcReport {
    pub subgroup: String,
    /// smallest neighbourhood radius containing every tested geodesic
    pub minimal_m: u32,
    /// geodesics escaping every tested neighbourhood: (pair, escape distance)
    pub witnesses: Vec<(String, u32)>,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
    pub geodesics_checked: usize,
}

/// For sampled pairs of subgroup elements, walk every geodesic between them
/// and measure the distance from each geodesic vertex back to the subgroup.
pub fn strong_qc_check(
    ball: &CayleyBall,
    group: &FbcGroup,
    spec: &SubgroupSpec,
    max_intrinsic: u32,
    max_pairs: usize,
    geodesic_cap: usize,
) -> Result<StrongQcReport> {
    let hball = subgroup_ball(group, ball, spec, max_intrinsic);
    let mut pairs_used = 0usize;
    let mut pairs_skipped = 0usize;
    let mut geodesics_checked = 0usize;
    let mut minimal_m = 0u32;
    let mut witnesses = Vec::new();
    let margin_ok = |x: &FbcElement, y: &FbcElement| -> bool {
        let (Some(ix), Some(iy)) = (ball.index_of(x), ball.index_of(y)) else {
            return false;
        };
        match ball.distance(group, x, y) {
            None => false,
            Some(d) => {
                ball.distance_label(ix) + d <= ball.radius
                    && ball.distance_label(iy) + d <= ball.radius
            }
        }
    };
    'pairs: for (i, h1) in hball.elements.iter().enumerate() {
        for h2 in hball.elements.iter().skip(i + 1) {
            if pairs_used >= max_pairs {
                break 'pairs;
            }
            if !margin_ok(h1, h2) {
                pairs_skipped += 1;
                continue;
            }
            let (paths, _, truncated) = geodesics_between(ball, group, h1, h2, geodesic_cap)?;
            pairs_used += 1;
            for path in &paths {
                geodesics_checked += 1;
                let mut worst = 0u32;
                for &v in path {
                    let x = &ball.vertices()[v];
                    let mut best: Option<u32> = None;
                    for h in &hball.elements {
                        if let Some(d) = ball.distance(group, x, h) {
                            best = Some(best.map_or(d, |b| b.min(d)));
                            if d == 0 {
                                break;
                            }
                        }
                    }
                    // a vertex beyond reach of every visible subgroup element
                    // sits deeper than the radius from the subgroup
                    worst = worst.max(best.unwrap_or(ball.radius + 1));
                }
                minimal_m = minimal_m.max(worst);
                if worst > 0 {
                    witnesses.push((
                        format!(
                            "{} .. {}",
                            group.display(h1),
                            group.display(h2)
                        ),
                        worst,
                    ));
                }
            }
            let _ = truncated;
        }
    }
    // keep only genuine escapes (distance exceeding zero is already an
    // excursion; report the deepest per pair, deduplicated)
    witnesses.sort();
    witnesses.dedup();
    Ok(StrongQcReport {
        subgroup: spec.name.clone(),
        minimal_m,
        witnesses,
        pairs_used,
        pairs_skipped,
        geodesics_checked,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UniqueRootsReport {
    pub trials: usize,
    pub max_power: i64,
    pub violations: Vec<(String, String, i64)>,
    pub seed: u64,
}

/// Sample distinct pairs in the coset F.t and verify that no pair shares a
/// nontrivial power.
pub fn unique_roots_test(
    group: &FbcGroup,
    trials: usize,
    max_power: i64,
    seed: u64,
) -> UniqueRootsReport {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rank = group.basis().rank() as i16;
    let mut violations = Vec::new();
    let mut done = 0usize;
    while done < trials {
        let sample_fiber = |rng: &mut rand_chacha::ChaCha8Rng| {
            let len = rng.gen_range(0..6);
            let mut raw = Vec::new();
            for _ in 0..len {
                let g = rng.gen_range(1..=rank);
                raw.push(if rng.gen_bool(0.5) { g } else { -g });
            }
            crate::words::ReducedWord::reduce(&raw)
        };
        let u = sample_fiber(&mut rng);
        let v = sample_fiber(&mut rng);
        if u == v {
            continue;
        }
        let g = FbcElement { t_exp: 1, fiber: u };
        let h = FbcElement { t_exp: 1, fiber: v };
        done += 1;
        for n in 1..=max_power {
            if group.power(&g, n) == group.power(&h, n) {
                violations.push((
                    format!("{}", group.display(&g)),
                    format!("{}", group.display(&h)),
                    n,
                ));
                break;
            }
        }
    }
    UniqueRootsReport { trials: done, max_power, violations, seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coned::cone;
    use crate::fixtures::{g2_rep, p1_rep};
    use crate::group::ball;
    use crate::hierarchy::{build_hierarchy, enumerate_products};
    use crate::rep::{validate_filtration, DEFAULT_CONJUGATOR_BOUND};

    fn coned_g2(radius: u32) -> ConedBall {
        let pair = g2_rep();
        let (report, v) = validate_filtration(&pair.1, &pair.0, DEFAULT_CONJUGATOR_BOUND);
        assert!(report.passed);
        let node = build_hierarchy(&pair.0, &v.unwrap()).unwrap();
        let products = enumerate_products(&pair.0, &node, 3, 2_000_000).unwrap();
        let b = ball(&pair.0, radius, 4_000_000).unwrap();
        cone(&pair.0, b, &products).unwrap()
    }

    #[test]
    fn vertical_path_in_a_product_is_flagged() {
        let pair = p1_rep();
        let (report, v) = validate_filtration(&pair.1, &pair.0, DEFAULT_CONJUGATOR_BOUND);
        assert!(report.passed);
        let node = build_hierarchy(&pair.0, &v.unwrap()).unwrap();
        let products = enumerate_products(&pair.0, &node, 2, 1_000_000).unwrap();
        let b = ball(&pair.0, 6, 1_000_000).unwrap();
        let cb = cone(&pair.0, b, &products).unwrap();
        let path = PathSample::from_steps(&cb.group, &cb.base, "t t t", "vertical".into()).unwrap();
        let verdict = morse_check(&cb, &path, 2).unwrap();
        assert_eq!(verdict.classification, MorseClass::NonMorseWitness);
        assert_eq!(verdict.max_coset_intersection, 3);
    }

    #[test]
    fn fast_direction_is_morse_consistent_and_flat_path_is_not() {
        let cb = coned_g2(8);
        let b_path =
            PathSample::from_steps(&cb.group, &cb.base, "b b b b", "b-power".into()).unwrap();
        let vb = morse_check(&cb, &b_path, 3).unwrap();
        assert_eq!(vb.classification, MorseClass::MorseConsistent);
        assert!(vb.max_coset_intersection <= 1, "{vb:?}");
        assert!(vb.qg_k <= 1.5, "{vb:?}");

        let a_path =
            PathSample::from_steps(&cb.group, &cb.base, "a a a a", "a-power".into()).unwrap();
        let va = morse_check(&cb, &a_path, 3).unwrap();
        assert_eq!(va.classification, MorseClass::NonMorseWitness);
        assert_eq!(va.max_coset_intersection, 4);
        assert!(va.qg_k >= 4.0, "{va:?}");

        // a geodesic hugging the thickened flat: id to a^2 t^2
        let flat =
            PathSample::from_steps(&cb.group, &cb.base, "a a t t", "flat-diag".into()).unwrap();
        let vf = morse_check(&cb, &flat, 3).unwrap();
        assert_eq!(vf.classification, MorseClass::NonMorseWitness);
        assert_eq!(vf.max_coset_intersection, 4);
    }

    #[test]
    fn morse_check_is_direction_invariant() {
        let cb = coned_g2(8);
        for steps in ["b b b a", "a a b b", "b a b a"] {
            let p = PathSample::from_steps(&cb.group, &cb.base, steps, steps.into()).unwrap();
            let v1 = morse_check(&cb, &p, 3).unwrap();
            let v2 = morse_check(&cb, &p.reversed(), 3).unwrap();
            assert_eq!(v1.max_coset_intersection, v2.max_coset_intersection);
            assert_eq!(v1.qg_k, v2.qg_k);
            assert_eq!(v1.qg_c, v2.qg_c);
        }
    }

    #[test]
    fn crosscheck_agreement_and_translation_invariance() {
        let cb = coned_g2(8);
        let mk = |s: &str| PathSample::from_steps(&cb.group, &cb.base, s, s.into()).unwrap();
        let samples = vec![mk("b b b"), mk("a a a"), mk("b b a"), mk("t t b")];
        let r = detectability_crosscheck(&cb, &samples, 2, 2.0, 1.0).unwrap();
        assert_eq!(r.agreement, 1.0, "{:?}", r.matrix);
        // opposite classes are present
        assert!(r.matrix[1][1] >= 1);
        assert!(r.matrix[0][0] >= 1);
        // left translation by a short element preserves the matrix
        let g = cb.group.parse_element(0, "b'").unwrap();
        let translated: Vec<PathSample> = samples
            .iter()
            .map(|p| p.translated(&cb.group, &cb.base, &g).unwrap())
            .collect();
        let rt = detectability_crosscheck(&cb, &translated, 2, 2.0, 1.0).unwrap();
        assert_eq!(r.matrix, rt.matrix);
        // empty sample list: empty report
        let re = detectability_crosscheck(&cb, &[], 2, 2.0, 1.0).unwrap();
        assert_eq!(re.verdicts.len(), 0);
        assert_eq!(re.agreement, 1.0);
    }

    #[test]
    fn stability_of_reference_subgroups() {
        let cb = coned_g2(8);
        let g = cb.group.clone();
        // <a> meets the thickened flat: not stable, witness a
        let spec_a = SubgroupSpec {
            name: "<a>".into(),
            generators: vec![g.parse_element(0, "a").unwrap()],
        };
        let ra = stability_check(&cb, &spec_a, 6, 3.0).unwrap();
        assert!(!ra.intersections_trivial);
        assert!(!ra.stable_consistent);
        // <b> misses every coset: stable-consistent with small constants
        let spec_b = SubgroupSpec {
            name: "<b>".into(),
            generators: vec![g.parse_element(0, "b").unwrap()],
        };
        let rb = stability_check(&cb, &spec_b, 6, 3.0).unwrap();
        assert!(rb.intersections_trivial, "{:?}", rb.coset_witnesses);
        assert!(rb.stable_consistent);
        assert!(rb.orbit_k <= 2.0, "{rb:?}");
        assert!(rb.distortion <= 1.0 + 1e-9);
        // the whole group intersects the products: not stable
        let spec_g = SubgroupSpec {
            name: "G".into(),
            generators: vec![
                g.parse_element(0, "a").unwrap(),
                g.parse_element(0, "b").unwrap(),
                g.parse_element(1, "").unwrap(),
            ],
        };
        let rg = stability_check(&cb, &spec_g, 4, 3.0).unwrap();
        assert!(!rg.intersections_trivial);
    }

    #[test]
    fn stability_is_conjugation_covariant() {
        let cb = coned_g2(8);
        let g = cb.group.clone();
        let x = g.parse_element(0, "b").unwrap();
        // H = <a> conjugated by b still meets a conjugate coset
        let spec = SubgroupSpec {
            name: "<a>^b".into(),
            generators: vec![g.conjugate(&g.parse_element(0, "a").unwrap(), &x)],
        };
        let r = stability_check(&cb, &spec, 5, 3.0).unwrap();
        assert!(!r.intersections_trivial);
    }

    #[test]
    fn strong_qc_scans() {
        let pair = g2_rep();
        let g = pair.0.clone();
        let b = ball(&g, 8, 4_000_000).unwrap();
        // the whole group: trivially within distance zero of itself
        let spec_g = SubgroupSpec {
            name: "G".into(),
            generators: vec![
                g.parse_element(0, "a").unwrap(),
                g.parse_element(0, "b").unwrap(),
                g.parse_element(1, "").unwrap(),
            ],
        };
        let rg = strong_qc_check(&b, &g, &spec_g, 3, 30, 50).unwrap();
        assert_eq!(rg.minimal_m, 0);
        // <b>: geodesics between b-powers stay on the subgroup
        let spec_b = SubgroupSpec {
            name: "<b>".into(),
            generators: vec![g.parse_element(0, "b").unwrap()],
        };
        let rb = strong_qc_check(&b, &g, &spec_b, 6, 40, 50).unwrap();
        assert_eq!(rb.minimal_m, 0, "{:?}", rb.witnesses);
        assert!(rb.pairs_used > 0);
        // <a>: measured exactly; the unique geodesics lie on the subgroup,
        // so the scan reports no escaping geodesics at this scale
        let spec_a = SubgroupSpec {
            name: "<a>".into(),
            generators: vec![g.parse_element(0, "a").unwrap()],
        };
        let ra = strong_qc_check(&b, &g, &spec_a, 6, 40, 50).unwrap();
        assert_eq!(ra.minimal_m, 0);
        assert!(ra.witnesses.is_empty());
    }

    #[test]
    fn unique_roots_on_reference_groups() {
        let pair = g2_rep();
        let r = unique_roots_test(&pair.0, 100, 10, 0);
        assert!(r.violations.is_empty());
        assert_eq!(r.trials, 100);
    }
}
