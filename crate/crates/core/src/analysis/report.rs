use super::exchange::{build_exchange_graph, classify_vertices, Classification, ExchangeGraph};
use super::{
    build_claw_family, check_berman_inequality, compute_slack, AnalysisError, BermanCheck,
    ClawFamily, SlackReport,
};
use crate::instance::{ConflictGraph, Solution};
use crate::tsv;

/// Everything derived from one `(A, R, ε)` triple.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub family: ClawFamily,
    pub slack: SlackReport,
    pub exchange: ExchangeGraph,
    pub classes: Classification,
    pub berman: BermanCheck,
}

impl Analysis {
    pub fn new(
        g: &ConflictGraph,
        a: &Solution,
        r: &Solution,
        epsilon: f64,
    ) -> Result<Self, AnalysisError> {
        let family = build_claw_family(g, a, r)?;
        let slack = compute_slack(g, &family);
        let exchange = build_exchange_graph(g, &family, epsilon)?;
        let classes = classify_vertices(&exchange);
        let berman = check_berman_inequality(g, &family, &slack)?;
        Ok(Self {
            family,
            slack,
            exchange,
            classes,
            berman,
        })
    }
}

/// `a  w_a  |C_a|  Delta_a  Psi_a  class` per vertex of A, then a
/// `berman_residual` row.
pub fn analysis_tsv(g: &ConflictGraph, an: &Analysis) -> String {
    let mut out = tsv::row(["a", "w_a", "|C_a|", "Delta_a", "Psi_a", "class"]);
    for &a in &an.family.a {
        let class = an.classes.class_of(a).map_or("?", |c| c.name());
        out.push_str(&tsv::row([
            a.to_string(),
            tsv::num(g.weight(a)),
            an.family.claw(a).len().to_string(),
            tsv::num(an.slack.delta(a)),
            tsv::num(an.slack.psi_total(a)),
            class.to_string(),
        ]));
    }
    out.push_str(&tsv::row(["berman_residual".to_string(), tsv::num(an.berman.residual)]));
    out
}
