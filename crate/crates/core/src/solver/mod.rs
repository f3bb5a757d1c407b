//! Greedy start and squared-weight local search with s-exchanges.
//!
//! An s-exchange adds an independent set `C` of at most `s*k` vertices
//! outside the solution `S` and removes `N(C,S)`. It is applied when
//! `w²(C) > w²(N(C,S))` (or `w(C) > w(N(C,S))` with exponent 1). Moves are
//! taken first-improvement, scanning candidate sets in lexicographic order
//! of their sorted ids.

mod engine;
mod scaling;

use thiserror::Error;

pub use engine::{
    exchange_sums, EnumerationMode, ExchangeMove, Magnitude, Trace, TraceStep,
    FLOAT_GAIN_TOLERANCE,
};
pub use scaling::{
    partial_enumeration_solve, scale_weights, solve_with_scaling, PartialEnumeration,
    ScaledRun, ScaledWeights,
};

use crate::instance::{ConflictGraph, InstanceError, Solution, VertexSet};
use crate::ratio::Preset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("s must be at least 1")]
    ZeroS,
    #[error("scaling epsilon {0} is outside (0, 1)")]
    BadEpsilon(f64),
    #[error("alpha {0} must exceed 1")]
    BadAlpha(f64),
    #[error("the move does not match the current solution")]
    StaleMove,
    #[error("scaling is undefined: the greedy solution has weight 0")]
    DegenerateScaling,
    #[error("weight {0} cannot be converted to an exact decimal")]
    NonDecimalWeight(f64),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    One,
    Two,
}

impl Exponent {
    pub fn from_int(e: u32) -> Option<Self> {
        match e {
            1 => Some(Exponent::One),
            2 => Some(Exponent::Two),
            _ => None,
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Exponent::One => 1,
            Exponent::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub s: usize,
    pub weight_exponent: Exponent,
    pub scaling_epsilon: Option<f64>,
    pub enumeration_mode: EnumerationMode,
    pub max_improvements: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            s: 1,
            weight_exponent: Exponent::Two,
            scaling_epsilon: None,
            enumeration_mode: EnumerationMode::Connected,
            max_improvements: None,
        }
    }
}

impl SearchConfig {
    pub fn with_s(s: usize) -> Self {
        Self {
            s,
            ..Self::default()
        }
    }

    pub fn from_preset(preset: Preset, k: usize) -> Self {
        Self::with_s(preset.s(k))
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.s == 0 {
            return Err(SolverError::ZeroS);
        }
        if let Some(e) = self.scaling_epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(SolverError::BadEpsilon(e));
            }
        }
        Ok(())
    }

    /// Largest incoming set, `s*k`.
    pub fn budget(&self, g: &ConflictGraph) -> usize {
        self.s.saturating_mul(g.k())
    }
}

/// Per-vertex guided weight: `w` or `w²`.
pub fn guide_weights(g: &ConflictGraph, exponent: Exponent) -> Vec<f64> {
    g.weights()
        .iter()
        .map(|&w| match exponent {
            Exponent::One => w,
            Exponent::Two => w * w,
        })
        .collect()
}

/// Repeatedly takes the heaviest vertex compatible with the current set,
/// lowest id first on ties. Zero-weight vertices are never taken.
pub fn greedy(g: &ConflictGraph) -> Solution {
    greedy_by(g, g.weights())
}

pub(crate) fn greedy_by<T: PartialOrd + Magnitude>(g: &ConflictGraph, w: &[T]) -> Solution {
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| w[v].is_positive()).collect();
    order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).expect("weights are ordered").then(a.cmp(&b)));
    let mut blocked = vec![false; g.n()];
    let mut chosen = VertexSet::new();
    for v in order {
        if !blocked[v] {
            chosen.insert(v);
            for &u in g.neighbors(v) {
                blocked[u] = true;
            }
        }
    }
    Solution::new(g, chosen).expect("greedy output is independent")
}

/// Lexicographically smallest improving exchange under `cfg`, if any.
pub fn find_improving_exchange(
    g: &ConflictGraph,
    s: &Solution,
    cfg: &SearchConfig,
) -> Option<ExchangeMove<f64>> {
    let guide = guide_weights(g, cfg.weight_exponent);
    engine::find_move(g, &guide, s.vertices(), cfg.budget(g), cfg.enumeration_mode)
}

/// The exchange bringing in exactly `incoming`, if it is a valid improving
/// move for `s`.
pub fn evaluate_exchange(
    g: &ConflictGraph,
    s: &Solution,
    incoming: &VertexSet,
    exponent: Exponent,
) -> Option<ExchangeMove<f64>> {
    engine::evaluate(g, &guide_weights(g, exponent), s.vertices(), incoming)
}

pub fn apply_exchange(
    g: &ConflictGraph,
    s: &Solution,
    m: &ExchangeMove<f64>,
) -> Result<Solution, SolverError> {
    let next = engine::apply(g, s.vertices(), m).ok_or(SolverError::StaleMove)?;
    Ok(Solution::new(g, next)?)
}

#[derive(Debug, Clone)]
pub struct SearchResult<T> {
    pub solution: Solution,
    pub trace: Trace<T>,
    /// false only when `max_improvements` stopped the search early
    pub locally_optimal: bool,
}

pub fn local_search(
    g: &ConflictGraph,
    start: &Solution,
    cfg: &SearchConfig,
) -> Result<SearchResult<f64>, SolverError> {
    cfg.validate()?;
    let w = g.weights().to_vec();
    let w2 = guide_weights(g, Exponent::Two);
    let guide = match cfg.weight_exponent {
        Exponent::One => &w,
        Exponent::Two => &w2,
    };
    let out = engine::run(
        g,
        guide,
        &w,
        &w2,
        start.vertices().clone(),
        cfg.budget(g),
        cfg.enumeration_mode,
        cfg.max_improvements,
    );
    Ok(SearchResult {
        solution: Solution::new(g, out.vertices)?,
        trace: out.trace,
        locally_optimal: out.locally_optimal,
    })
}

/// Greedy followed by local search, or the scaled pipeline when
/// `cfg.scaling_epsilon` is set. Scaled runs report their trace in
/// floating point.
pub fn solve(g: &ConflictGraph, cfg: &SearchConfig) -> Result<SearchResult<f64>, SolverError> {
    cfg.validate()?;
    if cfg.scaling_epsilon.is_some() {
        let run = solve_with_scaling(g, cfg)?;
        let steps = run
            .trace
            .steps
            .iter()
            .map(|s| TraceStep {
                step: s.step,
                gain: s.gain as f64,
                incoming: s.incoming,
                outgoing: s.outgoing,
                weight: s.weight as f64,
                weight2: s.weight2 as f64,
            })
            .collect();
        return Ok(SearchResult {
            solution: run.solution,
            trace: Trace { steps },
            locally_optimal: run.locally_optimal,
        });
    }
    local_search(g, &greedy(g), cfg)
}
