//! Approximation-factor formulas for the squared-weight local search.

use std::fmt;

use crate::tsv;

/// Swap-size presets: `s = k(k-1)+1` (small) or `s = 2k(k-1)+1` (large).
/// An s-exchange adds at most `s*k` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Small,
    Large,
}

impl Preset {
    pub fn s(self, k: usize) -> usize {
        match self {
            Preset::Small => k * (k - 1) + 1,
            Preset::Large => 2 * k * (k - 1) + 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Small => "small",
            Preset::Large => "large",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small" => Ok(Preset::Small),
            "large" => Ok(Preset::Large),
            other => Err(format!("unknown preset `{other}` (small|large)")),
        }
    }
}

/// δ = 1 − √(1−ε).
pub fn delta_of(epsilon: f64) -> f64 {
    let r = (1.0 - epsilon).sqrt();
    // (1 - r) loses digits for small ε; ε / (1 + r) is the same quantity
    epsilon / (1.0 + r)
}

/// ρ_t = t(ε−δ)/(1−δ) − (ε−δ)/(1−ε).
pub fn rho(t: f64, epsilon: f64, delta: f64) -> f64 {
    let gap = epsilon - delta;
    t * gap / (1.0 - delta) - gap / (1.0 - epsilon)
}

/// ρ_k evaluated at δ = δ(ε), in the form (k − 1/√(1−ε))·δ.
pub fn rho_k(k: usize, epsilon: f64) -> f64 {
    (k as f64 - 1.0 / (1.0 - epsilon).sqrt()) * delta_of(epsilon)
}

/// Terms whose minimum is the improvement over (k+1)/2 at a given ε.
pub fn bracket_terms(k: usize, epsilon: f64, preset: Preset) -> Vec<f64> {
    let rk = rho_k(k, epsilon);
    match preset {
        Preset::Small => vec![(1.0 - epsilon) / (2.0 - epsilon), rk],
        Preset::Large => vec![
            2.0 * (1.0 - epsilon) / (3.0 - epsilon),
            rk,
            2.0 - 1.0 / (1.0 - epsilon).sqrt(),
        ],
    }
}

pub fn bracket_min(k: usize, epsilon: f64, preset: Preset) -> f64 {
    bracket_terms(k, epsilon, preset)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// w(O) ≤ factor·w(A) at a fixed ε.
pub fn theorem_factor(k: usize, epsilon: f64, preset: Preset) -> f64 {
    (k as f64 + 1.0 - bracket_min(k, epsilon, preset)) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioParams {
    pub k: usize,
    pub preset: Preset,
    pub s: usize,
    pub epsilon_star: f64,
    pub tau: f64,
    pub approx_factor: f64,
}

pub const GRID_STEP: f64 = 1e-6;
pub const REFINE_WIDTH: f64 = 1e-10;
const EPS_MAX: f64 = 0.5;

/// Maximizes the bracket minimum over ε ∈ [0, 1/2]: a full grid scan, then
/// golden-section search on the grid cell around the best point.
pub fn optimize_tau(k: usize, preset: Preset) -> RatioParams {
    let f = |e: f64| bracket_min(k, e, preset);
    let steps = (EPS_MAX / GRID_STEP).round() as usize;
    let (mut best_i, mut best) = (0usize, f(0.0));
    for i in 1..=steps {
        let v = f(i as f64 * GRID_STEP);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = (best_i as f64 - 1.0).max(0.0) * GRID_STEP;
    let mut hi = ((best_i + 1) as f64 * GRID_STEP).min(EPS_MAX);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo >= REFINE_WIDTH {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut eps = (lo + hi) / 2.0;
    let mut tau = f(eps);
    let grid_eps = best_i as f64 * GRID_STEP;
    if best > tau {
        eps = grid_eps;
        tau = best;
    }
    RatioParams {
        k,
        preset,
        s: preset.s(k),
        epsilon_star: eps,
        tau,
        approx_factor: (k as f64 + 1.0 - tau) / 2.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauRow {
    pub k: usize,
    pub small: RatioParams,
    pub large: RatioParams,
}

pub fn tau_table(k_min: usize, k_max: usize) -> Vec<TauRow> {
    assert!(3 <= k_min && k_min <= k_max, "need 3 <= k_min <= k_max");
    (k_min..=k_max)
        .map(|k| TauRow {
            k,
            small: optimize_tau(k, Preset::Small),
            large: optimize_tau(k, Preset::Large),
        })
        .collect()
}

pub const TAU_TABLE_HEADER: [&str; 7] = [
    "k",
    "tau_small/2",
    "apx_small",
    "eps_small",
    "tau_large/2",
    "apx_large",
    "eps_large",
];

pub fn tau_table_tsv(rows: &[TauRow]) -> String {
    let mut out = tsv::row(TAU_TABLE_HEADER);
    for r in rows {
        out.push_str(&tsv::row([
            r.k.to_string(),
            tsv::num(r.small.tau / 2.0),
            tsv::num(r.small.approx_factor),
            tsv::num(r.small.epsilon_star),
            tsv::num(r.large.tau / 2.0),
            tsv::num(r.large.approx_factor),
            tsv::num(r.large.epsilon_star),
        ]));
    }
    out
}

/// w(A)/w(O) of the two-armed chain with arms of length `ell`.
pub fn chain_ratio(epsilon: f64, ell: usize) -> f64 {
    let q = 1.0 - epsilon;
    let geo = |m: usize| (1..=m).map(|i| q.powi(i as i32)).sum::<f64>();
    let num = 1.0 + 2.0 * geo(ell);
    let den = 3.0 * ((1.0 + 2.0 * q * q) / 3.0).sqrt()
        + 4.0 * ((1.0 + q * q) / 2.0).sqrt() * geo(ell.saturating_sub(1))
        + 4.0 * q.powi(ell as i32) / std::f64::consts::SQRT_2;
    num / den
}

/// Limit of [`chain_ratio`] as `ell` grows.
pub fn chain_ratio_limit(epsilon: f64) -> f64 {
    let q = 1.0 - epsilon;
    (2.0 / epsilon - 1.0)
        / (3.0 * ((1.0 + 2.0 * q * q) / 3.0).sqrt()
            + 4.0 * ((1.0 + q * q) / 2.0).sqrt() * (1.0 / epsilon - 1.0))
}
