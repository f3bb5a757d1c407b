//! Integer weight scaling and the partial-enumeration wrapper.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::engine::{self, Trace};
use super::{greedy, SearchConfig, SolverError};
use crate::instance::{ConflictGraph, Solution, VertexSet};

/// The exact rational denoted by the shortest decimal that round-trips `x`.
fn exact_decimal(x: f64) -> Result<BigRational, SolverError> {
    if !x.is_finite() {
        return Err(SolverError::NonDecimalWeight(x));
    }
    let text = format!("{x}");
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits
        .parse()
        .map_err(|_| SolverError::NonDecimalWeight(x))?;
    if negative {
        numer = -numer;
    }
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

#[derive(Debug, Clone)]
pub struct ScaledWeights {
    /// d = n / (ε·w(S0)), exact
    pub d: BigRational,
    /// ⌊d·w_v⌋ per vertex
    pub weights: Vec<u64>,
    /// the input graph carrying the scaled weights
    pub graph: ConflictGraph,
}

impl ScaledWeights {
    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn d_f64(&self) -> f64 {
        self.d.to_f64().unwrap_or(f64::NAN)
    }
}

/// Scales by `d = n / (ε·w(S0))` and rounds down. Weights, ε and w(S0) are
/// read as the exact decimals they print as, so `d` and the floors carry no
/// binary rounding.
pub fn scale_weights(
    g: &ConflictGraph,
    epsilon: f64,
    baseline: &Solution,
) -> Result<ScaledWeights, SolverError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SolverError::BadEpsilon(epsilon));
    }
    let exact: Vec<BigRational> = g
        .weights()
        .iter()
        .map(|&w| exact_decimal(w))
        .collect::<Result<_, _>>()?;
    let base: BigRational = baseline
        .vertices()
        .iter()
        .fold(BigRational::zero(), |acc, &v| acc + &exact[v]);
    if base.is_zero() {
        return Err(SolverError::DegenerateScaling);
    }
    let n = BigRational::from_integer(BigInt::from(g.n()));
    let d = n / (exact_decimal(epsilon)? * base);
    let weights: Vec<u64> = exact
        .iter()
        .map(|w| {
            (&d * w)
                .floor()
                .to_integer()
                .to_u64()
                .expect("scaled weight fits in 64 bits")
        })
        .collect();
    let graph = g.with_weights(weights.iter().map(|&w| w as f64).collect())?;
    Ok(ScaledWeights { d, weights, graph })
}

#[derive(Debug, Clone)]
pub struct ScaledRun {
    /// evaluated under the original weights
    pub solution: Solution,
    pub greedy: Solution,
    /// absent for all-zero instances, which return ∅ without scaling
    pub scaled: Option<ScaledWeights>,
    pub trace: Trace<u128>,
    pub locally_optimal: bool,
    /// k·n²·ε⁻²
    pub improvement_bound: f64,
}

/// Greedy, scale, then local search on the integer weights from the greedy
/// start.
pub fn solve_with_scaling(g: &ConflictGraph, cfg: &SearchConfig) -> Result<ScaledRun, SolverError> {
    cfg.validate()?;
    let epsilon = cfg.scaling_epsilon.ok_or(SolverError::BadEpsilon(f64::NAN))?;
    let n = g.n() as f64;
    let improvement_bound = g.k() as f64 * n * n / (epsilon * epsilon);
    let s0 = greedy(g);
    if s0.weight() == 0.0 {
        return Ok(ScaledRun {
            solution: Solution::empty(),
            greedy: s0,
            scaled: None,
            trace: Trace::default(),
            locally_optimal: true,
            improvement_bound,
        });
    }
    let scaled = scale_weights(g, epsilon, &s0)?;
    let w: Vec<u128> = scaled.weights.iter().map(|&x| x as u128).collect();
    let w2: Vec<u128> = w.iter().map(|&x| x * x).collect();
    let guide = match cfg.weight_exponent {
        super::Exponent::One => &w,
        super::Exponent::Two => &w2,
    };
    let out = engine::run(
        g,
        guide,
        &w,
        &w2,
        s0.vertices().clone(),
        cfg.budget(g),
        cfg.enumeration_mode,
        cfg.max_improvements,
    );
    Ok(ScaledRun {
        solution: Solution::new(g, out.vertices)?,
        greedy: s0,
        scaled: Some(scaled),
        trace: out.trace,
        locally_optimal: out.locally_optimal,
        improvement_bound,
    })
}

#[derive(Debug, Clone)]
pub struct PartialEnumeration {
    pub solution: Solution,
    /// the vertex whose residual produced the winner
    pub pivot: Option<usize>,
    /// ε used for every residual solve
    pub epsilon: f64,
    pub total_improvements: usize,
}

/// For every v, solves `G[V ∖ N(v,V)]` with scaling at ε = (α−1)/n and
/// keeps the heaviest `{v} ∪ A'`. ε is capped at 1/2 when α−1 is large
/// relative to n.
pub fn partial_enumeration_solve(
    g: &ConflictGraph,
    cfg: &SearchConfig,
    alpha: f64,
) -> Result<PartialEnumeration, SolverError> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(SolverError::BadAlpha(alpha));
    }
    let n = g.n();
    let epsilon = if n == 0 {
        0.5
    } else {
        ((alpha - 1.0) / n as f64).min(0.5)
    };
    let residual_cfg = SearchConfig {
        scaling_epsilon: Some(epsilon),
        ..cfg.clone()
    };
    residual_cfg.validate()?;
    let mut best = Solution::empty();
    let mut pivot = None;
    let mut total_improvements = 0;
    let all: VertexSet = (0..n).collect();
    for v in 0..n {
        let removed = g.vertex_neighborhood(v, &all);
        let keep: VertexSet = all.difference(&removed).copied().collect();
        let (sub, map) = g.induced_subgraph(&keep);
        let run = solve_with_scaling(&sub, &residual_cfg)?;
        total_improvements += run.trace.improvements();
        let mut candidate: VertexSet = run.solution.vertices().iter().map(|&u| map[u]).collect();
        candidate.insert(v);
        let candidate = Solution::new(g, candidate)?;
        if pivot.is_none() || candidate.weight() > best.weight() {
            best = candidate;
            pivot = Some(v);
        }
    }
    Ok(PartialEnumeration {
        solution: best,
        pivot,
        epsilon,
        total_improvements,
    })
}
