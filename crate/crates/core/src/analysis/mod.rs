//! Slack quantities of a current solution `A` against a reference `R`.
//!
//! Each `o ∈ R` is mapped to its heaviest neighbor `π(o)` in `A`; the claw
//! of `a` is `C_a = π⁻¹(a)` and its closed neighborhood
//! `N_a^+ = {a} ∪ ⋃_{o∈C_a} N(o, A−a)`. On top of these sit
//!
//! * `Δ_a = w²(N_a^+) − w²(C_a)`,
//! * `ψ_{a,o} = (w_o − w_a)² + w_a·w(N(o,A−a)) − w²(N(o,A−a))`, `Ψ_a = Σ_o ψ_{a,o}`,
//!
//! and the exchange graph, classification and decompositions in
//! [`exchange`]; the inequalities built from them are checked in [`lemmas`].

pub mod exchange;
pub mod lemmas;
mod report;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::instance::{ConflictGraph, Solution, VertexId, VertexSet};

pub use exchange::{
    build_exchange_graph, classify_vertices, min2_tree_decomposition, star_decomposition,
    verify_tree_weight_bound, Classification, Decomposition, DecompositionMode, ExchangeGraph,
    Tree, TreeBoundCheck, VertexClass,
};
pub use lemmas::{
    verify_corollary_bound, verify_slack_lower_bounds, verify_theorem_bound, BoundMode,
    LemmaCheck, LemmaKind, LemmaReport, TheoremCheck,
};
pub use report::{analysis_tsv, Analysis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("reference vertex {0} has no neighbor in A; A is not maximal")]
    NotMaximal(VertexId),
    #[error("vertex {0} has weight 0 but a non-empty claw")]
    ZeroWeightClaw(VertexId),
    #[error("vertex {0} of the decomposition input is isolated in the exchange graph")]
    IsolatedInput(VertexId),
    #[error("component containing {0} has fewer than 3 vertices")]
    SmallComponent(VertexId),
    #[error("arc ({0}, {1}) violates (1-eps)*w_b <= w_a <= w_b")]
    NotInExchangeGraph(VertexId, VertexId),
    #[error("tree has fewer than 2 vertices")]
    TrivialTree,
    #[error("exchange graph vertex {vertex} has degree {degree} > k(k-1) = {bound}")]
    DegreeBound {
        vertex: VertexId,
        degree: usize,
        bound: usize,
    },
    #[error("this check needs local optimality under s-exchanges with s >= {required}; got s = {got}")]
    InsufficientExchange { required: usize, got: usize },
    #[error("parameters need 0 <= delta <= epsilon <= 1/2 (epsilon = {epsilon}, delta = {delta})")]
    BadParameters { epsilon: f64, delta: f64 },
    #[error("A admits an improving exchange at s = {0}; the bound's hypothesis fails")]
    NotLocallyOptimal(usize),
    #[error("B and the tree are joined by an exchange-graph arc at ({0}, {1})")]
    TreeTouchesB(VertexId, VertexId),
    #[error("tree has {size} vertices but s = {s}")]
    TreeTooLarge { size: usize, s: usize },
    #[error("{0} is not a vertex of A")]
    NotInA(VertexId),
}

/// π, the claws `C_a` and the closed neighborhoods `N_a^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClawFamily {
    pub a: VertexSet,
    /// the reference set actually mapped (zero-weight members dropped)
    pub r: VertexSet,
    pub pi: BTreeMap<VertexId, VertexId>,
    pub claws: BTreeMap<VertexId, VertexSet>,
    pub closed_nbhd: BTreeMap<VertexId, VertexSet>,
}

impl ClawFamily {
    pub fn claw(&self, a: VertexId) -> &VertexSet {
        &self.claws[&a]
    }

    pub fn closed(&self, a: VertexId) -> &VertexSet {
        &self.closed_nbhd[&a]
    }
}

/// Zero-weight reference vertices are dropped; π breaks weight ties toward
/// the lowest id.
pub fn build_claw_family(
    g: &ConflictGraph,
    a: &Solution,
    r: &Solution,
) -> Result<ClawFamily, AnalysisError> {
    let aset = a.vertices().clone();
    let rset: VertexSet = r
        .vertices()
        .iter()
        .copied()
        .filter(|&o| g.weight(o) > 0.0)
        .collect();
    let mut pi = BTreeMap::new();
    let mut claws: BTreeMap<VertexId, VertexSet> =
        aset.iter().map(|&x| (x, VertexSet::new())).collect();
    for &o in &rset {
        let nbrs = g.vertex_neighborhood(o, &aset);
        let mut best: Option<VertexId> = None;
        for &x in &nbrs {
            if best.is_none_or(|b| g.weight(x) > g.weight(b)) {
                best = Some(x);
            }
        }
        let target = best.ok_or(AnalysisError::NotMaximal(o))?;
        pi.insert(o, target);
        claws.get_mut(&target).expect("target in A").insert(o);
    }
    let mut closed_nbhd = BTreeMap::new();
    for &x in &aset {
        let mut rest = aset.clone();
        rest.remove(&x);
        let mut nb = g.neighborhood(&claws[&x], &rest);
        nb.insert(x);
        closed_nbhd.insert(x, nb);
    }
    Ok(ClawFamily {
        a: aset,
        r: rset,
        pi,
        claws,
        closed_nbhd,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexSlack {
    pub delta: f64,
    pub psi: BTreeMap<VertexId, f64>,
    pub psi_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackReport {
    pub per_vertex: BTreeMap<VertexId, VertexSlack>,
}

impl SlackReport {
    pub fn delta(&self, a: VertexId) -> f64 {
        self.per_vertex[&a].delta
    }

    pub fn psi_total(&self, a: VertexId) -> f64 {
        self.per_vertex[&a].psi_total
    }
}

/// `w(N(o, A − a))` and `w²(N(o, A − a))`.
fn side_weights(g: &ConflictGraph, o: VertexId, a: VertexId, aset: &VertexSet) -> (f64, f64) {
    let nb = g.vertex_neighborhood(o, aset);
    let others = nb.iter().filter(|&&x| x != a);
    let w: f64 = others.clone().map(|&x| g.weight(x)).sum();
    let w2: f64 = others.map(|&x| g.weight(x) * g.weight(x)).sum();
    (w, w2)
}

pub fn compute_slack(g: &ConflictGraph, family: &ClawFamily) -> SlackReport {
    let mut per_vertex = BTreeMap::new();
    for &a in &family.a {
        let claw = family.claw(a);
        let delta = g.squared_weight_sum(family.closed(a)) - g.squared_weight_sum(claw);
        let wa = g.weight(a);
        let mut psi = BTreeMap::new();
        for &o in claw {
            let (w, w2) = side_weights(g, o, a, &family.a);
            let d = g.weight(o) - wa;
            psi.insert(o, d * d + wa * w - w2);
        }
        let psi_total = psi.values().sum();
        per_vertex.insert(
            a,
            VertexSlack {
                delta,
                psi,
                psi_total,
            },
        );
    }
    SlackReport { per_vertex }
}

/// `(Δ_a + Ψ_a) / w_a`, taken as 0 for a weightless vertex with an empty
/// claw.
pub fn normalized_slack(
    g: &ConflictGraph,
    family: &ClawFamily,
    report: &SlackReport,
    a: VertexId,
) -> Result<f64, AnalysisError> {
    let wa = g.weight(a);
    if wa == 0.0 {
        if family.claw(a).is_empty() {
            return Ok(0.0);
        }
        return Err(AnalysisError::ZeroWeightClaw(a));
    }
    Ok((report.delta(a) + report.psi_total(a)) / wa)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BermanCheck {
    /// 2·w(R)
    pub lhs: f64,
    /// w(A) + Σ_o w(N(o,A)) − Σ_a (Δ_a + Ψ_a)/w_a
    pub rhs: f64,
    pub residual: f64,
}

pub fn check_berman_inequality(
    g: &ConflictGraph,
    family: &ClawFamily,
    report: &SlackReport,
) -> Result<BermanCheck, AnalysisError> {
    let lhs = 2.0 * g.weight_sum(&family.r);
    let mut rhs = g.weight_sum(&family.a);
    for &o in &family.r {
        rhs += g.weight_sum(&g.vertex_neighborhood(o, &family.a));
    }
    for &a in &family.a {
        rhs -= normalized_slack(g, family, report, a)?;
    }
    Ok(BermanCheck {
        lhs,
        rhs,
        residual: rhs - lhs,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::generators::gen_fig2;

    pub(crate) fn vs(ids: &[usize]) -> VertexSet {
        ids.iter().copied().collect()
    }

    /// A = {a,b,c,d,e} = 0..5 with weights 1,1,1,4/5,1/2; ten reference
    /// vertices 5..15 of weight 1/2. Needs k = 4: c sees four of them.
    pub(crate) fn four_claws() -> (ConflictGraph, Solution, Solution) {
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        // reference vertices in drawing order
        let o: Vec<usize> = (5..15).collect();
        let edges = vec![
            (o[0], a),
            (o[0], b),
            (o[0], c),
            (o[1], a),
            (o[2], a),
            (o[3], b),
            (o[4], b),
            (o[4], c),
            (o[5], c),
            (o[5], d),
            (o[6], c),
            (o[6], d),
            (o[6], e),
            (o[7], d),
            (o[8], d),
            (o[8], e),
            (o[9], e),
        ];
        let mut weights = vec![1.0, 1.0, 1.0, 0.8, 0.5];
        weights.extend(std::iter::repeat_n(0.5, 10));
        let g = ConflictGraph::new(4, weights, edges).unwrap();
        let asol = Solution::new(&g, (0..5).collect()).unwrap();
        let rsol = Solution::new(&g, (5..15).collect()).unwrap();
        (g, asol, rsol)
    }

    fn fig2() -> (ConflictGraph, Solution, Solution) {
        let g = gen_fig2().conflict_graph();
        let a = Solution::new(&g, vs(&[0])).unwrap();
        let r = Solution::new(&g, vs(&[1, 2, 3])).unwrap();
        (g, a, r)
    }

    #[test]
    fn fig2_family_and_slack() {
        let (g, a, r) = fig2();
        let fam = build_claw_family(&g, &a, &r).unwrap();
        assert_eq!(fam.claw(0), &vs(&[1, 2, 3]));
        assert_eq!(fam.closed(0), &vs(&[0]));
        let rep = compute_slack(&g, &fam);
        assert!(rep.delta(0).abs() < 1e-12);
        let s3 = 3f64.sqrt();
        for o in 1..4 {
            assert!((rep.per_vertex[&0].psi[&o] - (1.0 - s3).powi(2)).abs() < 1e-12);
        }
        assert!((rep.psi_total(0) - (12.0 - 6.0 * s3)).abs() < 1e-12);
        assert!((rep.psi_total(0) - 1.6077).abs() < 1e-4);
        let b = check_berman_inequality(&g, &fam, &rep).unwrap();
        assert!((b.lhs - 6.0).abs() < 1e-12);
        assert!(b.residual.abs() < 1e-9);
    }

    #[test]
    fn claws_pi_follows_heaviest() {
        let (g, a, r) = four_claws();
        let fam = build_claw_family(&g, &a, &r).unwrap();
        let expect = [0, 0, 0, 1, 1, 2, 2, 3, 3, 4];
        for (i, &t) in expect.iter().enumerate() {
            assert_eq!(fam.pi[&(5 + i)], t, "reference vertex {i}");
        }
        assert_eq!(fam.closed(0), &vs(&[0, 1, 2]));
        assert_eq!(fam.closed(1), &vs(&[1, 2]));
        assert_eq!(fam.closed(2), &vs(&[2, 3, 4]));
        assert_eq!(fam.closed(3), &vs(&[3, 4]));
        assert_eq!(fam.closed(4), &vs(&[4]));
        for x in 0..5 {
            assert!(fam.claw(x).len() <= g.k());
        }
    }

    #[test]
    fn identical_solutions_have_no_slack() {
        let (g, a, _) = four_claws();
        let fam = build_claw_family(&g, &a, &a).unwrap();
        for x in 0..5 {
            assert_eq!(fam.pi[&x], x);
            assert_eq!(fam.claw(x), &vs(&[x]));
            assert_eq!(fam.closed(x), &vs(&[x]));
        }
        let rep = compute_slack(&g, &fam);
        for x in 0..5 {
            assert_eq!(rep.delta(x), 0.0);
            assert_eq!(rep.psi_total(x), 0.0);
        }
        let b = check_berman_inequality(&g, &fam, &rep).unwrap();
        assert!(b.residual.abs() < 1e-12);
    }

    #[test]
    fn empty_reference() {
        let (g, a, _) = four_claws();
        let fam = build_claw_family(&g, &a, &Solution::empty()).unwrap();
        let rep = compute_slack(&g, &fam);
        for x in 0..5 {
            assert!((rep.delta(x) - g.weight(x).powi(2)).abs() < 1e-15);
            assert_eq!(rep.psi_total(x), 0.0);
        }
    }

    #[test]
    fn unmapped_reference_vertex() {
        let g = ConflictGraph::new(1, vec![1.0, 1.0], []).unwrap();
        let a = Solution::new(&g, vs(&[0])).unwrap();
        let r = Solution::new(&g, vs(&[1])).unwrap();
        assert_eq!(
            build_claw_family(&g, &a, &r),
            Err(AnalysisError::NotMaximal(1))
        );
    }
}
