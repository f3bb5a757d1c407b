//! Numerical checks of the slack lower bounds and the final ratio bounds.

use std::fmt;

use super::exchange::{
    min2_tree_decomposition, star_decomposition, verify_tree_weight_bound, Classification,
    Decomposition, ExchangeGraph, Tree,
};
use super::{normalized_slack, AnalysisError, ClawFamily, SlackReport};
use crate::instance::{ConflictGraph, Solution, VertexId, VertexSet};
use crate::ratio::{rho, theorem_factor, Preset};
use crate::solver::{find_improving_exchange, EnumerationMode, SearchConfig};
use crate::tsv;

/// Which family of bounds to evaluate; each needs local optimality under
/// s-exchanges for some minimum s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// isolated vertices only
    OneExchange,
    /// isolated vertices and isolated edges
    TwoExchange,
    /// isolated vertices plus stars over the rest
    Small,
    /// isolated vertices, isolated edges, and trees with ≥ 2 edges
    Large,
}

impl BoundMode {
    pub fn required_s(self, k: usize) -> usize {
        match self {
            BoundMode::OneExchange => 1,
            BoundMode::TwoExchange => 2,
            BoundMode::Small => Preset::Small.s(k),
            BoundMode::Large => Preset::Large.s(k),
        }
    }

    /// True when isolated edges get their own bound.
    fn splits_edges(self) -> bool {
        matches!(self, BoundMode::TwoExchange | BoundMode::Large)
    }
}

impl From<Preset> for BoundMode {
    fn from(p: Preset) -> Self {
        match p {
            Preset::Small => BoundMode::Small,
            Preset::Large => BoundMode::Large,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaKind {
    IsolatedHard,
    IFinal,
    IsoEdge,
    TreeEdgeCharge,
    TreeBound,
    DFinal,
    DFinal2,
}

impl LemmaKind {
    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::IsolatedHard => "isolated-hard",
            LemmaKind::IFinal => "i-final",
            LemmaKind::IsoEdge => "iso-edge",
            LemmaKind::TreeEdgeCharge => "tree-edge-charge",
            LemmaKind::TreeBound => "tree-bound",
            LemmaKind::DFinal => "d-final",
            LemmaKind::DFinal2 => "d-final-2",
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub kind: LemmaKind,
    /// what the inequality is about, e.g. `a=3`, `edge=2>0`, `tree=1`, `all`
    pub subject: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub mode: BoundMode,
    pub epsilon: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub checks: Vec<LemmaCheck>,
    pub decomposition: Option<Decomposition>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn of_kind(&self, kind: LemmaKind) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(move |c| c.kind == kind)
    }

    /// `lemma subject lhs rhs holds` per check.
    pub fn to_tsv(&self) -> String {
        let mut out = tsv::row(["lemma", "subject", "lhs", "rhs", "holds"]);
        for c in &self.checks {
            out.push_str(&tsv::row([
                c.kind.name().to_string(),
                c.subject.clone(),
                tsv::num(c.lhs),
                tsv::num(c.rhs),
                if c.holds { "PASS" } else { "FAIL" }.to_string(),
            ]));
        }
        out
    }
}

struct Ctx<'a> {
    g: &'a ConflictGraph,
    family: &'a ClawFamily,
    report: &'a SlackReport,
    tol: f64,
    checks: Vec<LemmaCheck>,
}

impl Ctx<'_> {
    fn slack(&self, a: VertexId) -> Result<f64, AnalysisError> {
        normalized_slack(self.g, self.family, self.report, a)
    }

    fn slack_sum<'b>(&self, set: impl IntoIterator<Item = &'b VertexId>) -> Result<f64, AnalysisError> {
        let mut total = 0.0;
        for &a in set {
            total += self.slack(a)?;
        }
        Ok(total)
    }

    /// Σ_{a∈set} Σ_{o∈C_a} w(N(o, b)).
    fn claw_reach<'b>(&self, set: impl IntoIterator<Item = &'b VertexId>, b: &VertexSet) -> f64 {
        let mut total = 0.0;
        for &a in set {
            for &o in self.family.claw(a) {
                total += self.g.weight_sum(&self.g.vertex_neighborhood(o, b));
            }
        }
        total
    }

    fn push(&mut self, kind: LemmaKind, subject: String, lhs: f64, rhs: f64) {
        let holds = lhs - rhs >= -self.tol;
        self.checks.push(LemmaCheck {
            kind,
            subject,
            lhs,
            rhs,
            holds,
        });
    }
}

/// Evaluates both sides of every bound `mode` covers. `certified_s` is the
/// exchange size under which the caller vouches `A` is locally optimal; it
/// must reach `mode.required_s(k)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_slack_lower_bounds(
    g: &ConflictGraph,
    family: &ClawFamily,
    report: &SlackReport,
    h: &ExchangeGraph,
    classes: &Classification,
    delta: f64,
    mode: BoundMode,
    certified_s: usize,
) -> Result<LemmaReport, AnalysisError> {
    let epsilon = h.epsilon;
    if !(0.0 <= delta && delta <= epsilon && epsilon <= 0.5) {
        return Err(AnalysisError::BadParameters { epsilon, delta });
    }
    let k = g.k();
    let required = mode.required_s(k);
    if certified_s < required {
        return Err(AnalysisError::InsufficientExchange {
            required,
            got: certified_s,
        });
    }
    let tol = 1e-9 * g.weight_sum(&family.a).max(1.0);
    let mut cx = Ctx {
        g,
        family,
        report,
        tol,
        checks: Vec::new(),
    };
    let rho_t = |t: usize| rho(t as f64, epsilon, delta);

    let all_a = &family.a;
    let i1 = &classes.i1;
    for &a in i1 {
        if g.weight(a) == 0.0 {
            continue;
        }
        let mut rest = all_a.clone();
        rest.remove(&a);
        let claw = family.claw(a);
        let lhs = report.psi_total(a) / g.weight(a);
        let rhs = rho_t(claw.len()) * g.weight(a) + delta * cx.claw_reach([&a], &rest);
        cx.push(LemmaKind::IsolatedHard, format!("a={a}"), lhs, rhs);
    }

    let b_set = if mode.splits_edges() {
        classes.isolated_or_edge()
    } else {
        i1.clone()
    };
    {
        let lhs = cx.slack_sum(i1)?;
        let mut rhs = 0.0;
        for &a in i1 {
            let t = family.claw(a).len();
            rhs += (rho_t(t) - delta * t as f64) * g.weight(a);
        }
        rhs += delta * cx.claw_reach(i1, &b_set);
        cx.push(LemmaKind::IFinal, "all".into(), lhs, rhs);
    }

    if mode.splits_edges() {
        let shrink = 1.0 - (epsilon - delta) / (1.0 - epsilon) - k as f64 * delta;
        for &(a, b) in &classes.isolated_edges {
            let lhs = cx.slack(a)? + cx.slack(b)?;
            let cb = family.claw(b).len();
            let rhs = shrink * g.weight(a)
                + (rho_t(cb) - cb as f64 * delta) * g.weight(b)
                + delta * cx.claw_reach([&a, &b], all_a);
            cx.push(LemmaKind::IsoEdge, format!("edge={a}>{b}"), lhs, rhs);
        }
    }

    let decomposition = match mode {
        BoundMode::OneExchange | BoundMode::TwoExchange => None,
        BoundMode::Small | BoundMode::Large => {
            let (input, dec, gain, final_kind, reach_coeff) = if mode == BoundMode::Small {
                let input = classes.non_isolated();
                let dec = star_decomposition(g, h, &input)?;
                let gain = (1.0 - epsilon) / (2.0 - epsilon);
                (input, dec, gain, LemmaKind::DFinal, epsilon)
            } else {
                let input = classes.d.clone();
                let dec = if input.is_empty() {
                    Decomposition {
                        mode: super::DecompositionMode::Min2Trees,
                        trees: Vec::new(),
                    }
                } else {
                    min2_tree_decomposition(g, h, &input)?
                };
                let gain = 2.0 * (1.0 - epsilon) / (3.0 - epsilon);
                (input, dec, gain, LemmaKind::DFinal2, delta)
            };
            for (i, tree) in dec.trees.iter().enumerate() {
                tree_edge_charge(&mut cx, h, tree, &b_set, epsilon, certified_s, i)?;
                let tb = verify_tree_weight_bound(tree, g.weights(), epsilon)?;
                cx.checks.push(LemmaCheck {
                    kind: LemmaKind::TreeBound,
                    subject: format!("tree={i}"),
                    lhs: tb.lhs,
                    rhs: tb.rhs,
                    holds: tb.holds,
                });
            }
            let lhs = cx.slack_sum(&input)?;
            let rhs = gain * g.weight_sum(&input) + reach_coeff * cx.claw_reach(&input, &b_set);
            cx.push(final_kind, "all".into(), lhs, rhs);
            Some(dec)
        }
    };

    Ok(LemmaReport {
        mode,
        epsilon,
        delta,
        tolerance: tol,
        checks: cx.checks,
        decomposition,
    })
}

/// `Σ_{v∈T} (Δ_v+Ψ_v)/w_v ≥ Σ_{(a,b)∈E(T)} w_a + ε Σ_{v∈T} Σ_{o∈C_v} w(N(o,B))`
/// for a tree of at most `s` vertices with no arc to the disjoint set `B`.
fn tree_edge_charge(
    cx: &mut Ctx<'_>,
    h: &ExchangeGraph,
    tree: &Tree,
    b_set: &VertexSet,
    epsilon: f64,
    s: usize,
    index: usize,
) -> Result<(), AnalysisError> {
    if tree.vertices.len() > s {
        return Err(AnalysisError::TreeTooLarge {
            size: tree.vertices.len(),
            s,
        });
    }
    for &v in &tree.vertices {
        if b_set.contains(&v) {
            return Err(AnalysisError::TreeTouchesB(v, v));
        }
        if let Some(&u) = h.neighbors(v).iter().find(|u| b_set.contains(u)) {
            return Err(AnalysisError::TreeTouchesB(v, u));
        }
    }
    let lhs = cx.slack_sum(&tree.vertices)?;
    let tails: f64 = tree.edges.iter().map(|&(a, _)| cx.g.weight(a)).sum();
    let rhs = tails + epsilon * cx.claw_reach(&tree.vertices, b_set);
    cx.push(LemmaKind::TreeEdgeCharge, format!("tree={index}"), lhs, rhs);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    pub s: usize,
    /// w(O) ≤ factor · w(A)
    pub factor: f64,
    /// w(O) / w(A); 1 when both are 0
    pub achieved: f64,
    pub holds: bool,
}

fn ratio_check(
    g: &ConflictGraph,
    a: &Solution,
    o: &Solution,
    s: usize,
    mode: EnumerationMode,
    factor: f64,
) -> Result<TheoremCheck, AnalysisError> {
    let cfg = SearchConfig {
        enumeration_mode: mode,
        ..SearchConfig::with_s(s)
    };
    if find_improving_exchange(g, a, &cfg).is_some() {
        return Err(AnalysisError::NotLocallyOptimal(s));
    }
    let (wa, wo) = (a.weight(), o.weight());
    let achieved = if wa > 0.0 {
        wo / wa
    } else if wo > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let holds = wo <= factor * wa + 1e-9 * wa.max(1.0);
    Ok(TheoremCheck {
        s,
        factor,
        achieved,
        holds,
    })
}

/// Re-checks that `A` has no improving exchange at the preset's s, then
/// tests `w(O) ≤ [(k+1)/2 − min(bracket)/2]·w(A)`.
pub fn verify_theorem_bound(
    g: &ConflictGraph,
    a: &Solution,
    o: &Solution,
    epsilon: f64,
    preset: Preset,
    mode: EnumerationMode,
) -> Result<TheoremCheck, AnalysisError> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(AnalysisError::BadParameters {
            epsilon,
            delta: f64::NAN,
        });
    }
    let k = g.k();
    ratio_check(g, a, o, preset.s(k), mode, theorem_factor(k, epsilon, preset))
}

/// `w(O) ≤ (k+1)/2 · w(A)` for `A` locally optimal under 1-exchanges.
pub fn verify_corollary_bound(
    g: &ConflictGraph,
    a: &Solution,
    o: &Solution,
) -> Result<TheoremCheck, AnalysisError> {
    ratio_check(
        g,
        a,
        o,
        1,
        EnumerationMode::Connected,
        (g.k() as f64 + 1.0) / 2.0,
    )
}
