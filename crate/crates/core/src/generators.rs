//! Deterministic instance generators.
//!
//! Random families draw from [`SplitMix64`]; the draw order is part of the
//! contract and is documented on each generator.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::format::ParsedInstance;
use crate::instance::{ConflictGraph, InstanceError, SetPackInstance, VertexSet, WeightedSet};
use crate::rng::SplitMix64;

/// √3 to 15 significant digits.
pub const SQRT3_LITERAL: f64 = 1.732_050_807_568_88;

/// Attempts per set before a random family is declared infeasible.
pub const RESAMPLE_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("epsilon {0} is outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("ell must be at least 1")]
    ZeroEll,
    #[error("weight bounds [{0}, {1}] are not an ordered non-negative range")]
    BadWeightBounds(f64, f64),
    #[error("could not draw {requested} distinct sets after {RESAMPLE_CAP} attempts for set {index}")]
    ResampleCapExceeded { requested: usize, index: usize },
    #[error("edge count {requested} exceeds part_size^k = {available}")]
    TooManyEdges { requested: u64, available: u64 },
    #[error("part_size^k overflows 64 bits")]
    Overflow,
    #[error("universe_size must be positive")]
    EmptyUniverse,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSetPackParams {
    pub k: usize,
    pub universe_size: usize,
    pub set_count: usize,
    pub weight_lo: f64,
    pub weight_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdmParams {
    pub k: usize,
    pub part_size: usize,
    pub edge_count: u64,
    pub weight_lo: f64,
    pub weight_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Fig2,
    Chain { epsilon: f64, ell: usize },
    RandomSetPack { params: RandomSetPackParams, seed: u64 },
    Kdm { params: KdmParams, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<ParsedInstance, GeneratorError> {
        Ok(match self {
            GeneratorSpec::Fig2 => ParsedInstance::SetPack(gen_fig2()),
            GeneratorSpec::Chain { epsilon, ell } => {
                ParsedInstance::Graph(gen_chain(*epsilon, *ell)?.graph)
            }
            GeneratorSpec::RandomSetPack { params, seed } => {
                ParsedInstance::SetPack(gen_random_setpack(params, *seed)?)
            }
            GeneratorSpec::Kdm { params, seed } => ParsedInstance::SetPack(gen_kdm(params, *seed)?),
        })
    }
}

/// One set {0,1,2} of weight √3 and the three singletons of weight 1.
pub fn gen_fig2() -> SetPackInstance {
    let set = |weight, elements: &[u32]| WeightedSet {
        weight,
        elements: elements.to_vec(),
    };
    SetPackInstance::new(
        3,
        3,
        vec![
            set(SQRT3_LITERAL, &[0, 1, 2]),
            set(1.0, &[0]),
            set(1.0, &[1]),
            set(1.0, &[2]),
        ],
    )
    .expect("fixed instance is valid")
}

/// The two-armed chain together with its designated current solution `a`
/// and reference solution `o`.
#[derive(Debug, Clone)]
pub struct ChainInstance {
    pub graph: ConflictGraph,
    pub a: VertexSet,
    pub o: VertexSet,
    pub epsilon: f64,
    pub ell: usize,
}

/// Vertex layout, with q = 1 − ε:
///
/// * `0` is the center (weight 1); `1..=ell` the right arm, `ell+1..=2ell`
///   the left arm, arm vertex i having weight q^i.
/// * From `base = 2ell+1`: three talons of the center, the first shared with
///   the first right arm vertex, the third with the first left one.
/// * Then per side (right, then left) and per position i: a private talon
///   and a talon that also touches position i+1 when i < ell.
pub fn gen_chain(epsilon: f64, ell: usize) -> Result<ChainInstance, GeneratorError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GeneratorError::EpsilonOutOfRange(epsilon));
    }
    if ell == 0 {
        return Err(GeneratorError::ZeroEll);
    }
    let q = 1.0 - epsilon;
    let arm = |side: usize, i: usize| side * ell + i; // i in 1..=ell
    let base = 2 * ell + 1;
    let n = base + 3 + 4 * ell;

    let mut weights = vec![0.0; n];
    weights[0] = 1.0;
    for side in 0..2 {
        for i in 1..=ell {
            weights[arm(side, i)] = q.powi(i as i32);
        }
    }
    let mut edges = Vec::new();
    let center_talon = ((1.0 + 2.0 * q * q) / 3.0).sqrt();
    for t in 0..3 {
        weights[base + t] = center_talon;
        edges.push((0, base + t));
    }
    edges.push((arm(0, 1), base));
    edges.push((arm(1, 1), base + 2));

    let pair = ((1.0 + q * q) / 2.0).sqrt();
    for side in 0..2 {
        let first = base + 3 + side * 2 * ell;
        for i in 1..=ell {
            let p = first + 2 * (i - 1);
            let w = if i < ell {
                q.powi(i as i32) * pair
            } else {
                q.powi(i as i32) / std::f64::consts::SQRT_2
            };
            weights[p] = w;
            weights[p + 1] = w;
            edges.push((arm(side, i), p));
            edges.push((arm(side, i), p + 1));
            if i < ell {
                edges.push((arm(side, i + 1), p + 1));
            }
        }
    }
    let graph = ConflictGraph::new(3, weights, edges)?;
    Ok(ChainInstance {
        graph,
        a: (0..base).collect(),
        o: (base..n).collect(),
        epsilon,
        ell,
    })
}

fn check_bounds(lo: f64, hi: f64) -> Result<(), GeneratorError> {
    if lo >= 0.0 && hi >= lo && hi.is_finite() {
        Ok(())
    } else {
        Err(GeneratorError::BadWeightBounds(lo, hi))
    }
}

/// Per set: up to [`RESAMPLE_CAP`] attempts of
/// `size = 1 + below(min(k, universe))`, then `size` element draws
/// `below(universe)` (a repeated element is redrawn); an attempt whose sorted
/// element list equals an earlier set is discarded. The weight
/// `uniform_in(lo, hi)` is drawn once the elements are accepted.
pub fn gen_random_setpack(
    params: &RandomSetPackParams,
    seed: u64,
) -> Result<SetPackInstance, GeneratorError> {
    check_bounds(params.weight_lo, params.weight_hi)?;
    if params.k == 0 {
        return Err(InstanceError::ZeroK.into());
    }
    if params.universe_size == 0 {
        if params.set_count == 0 {
            return Ok(SetPackInstance::new(params.k, 0, Vec::new())?);
        }
        return Err(GeneratorError::EmptyUniverse);
    }
    let mut rng = SplitMix64::new(seed);
    let universe = params.universe_size as u64;
    let max_size = params.k.min(params.universe_size) as u64;
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut sets = Vec::with_capacity(params.set_count);
    for index in 0..params.set_count {
        let mut accepted = None;
        for _ in 0..RESAMPLE_CAP {
            let size = 1 + rng.below(max_size) as usize;
            let mut elements: Vec<u32> = Vec::with_capacity(size);
            while elements.len() < size {
                let e = rng.below(universe) as u32;
                if !elements.contains(&e) {
                    elements.push(e);
                }
            }
            elements.sort_unstable();
            if seen.insert(elements.clone()) {
                accepted = Some(elements);
                break;
            }
        }
        let elements = accepted.ok_or(GeneratorError::ResampleCapExceeded {
            requested: params.set_count,
            index,
        })?;
        let weight = rng.uniform_in(params.weight_lo, params.weight_hi);
        sets.push(WeightedSet { weight, elements });
    }
    Ok(SetPackInstance::new(params.k, params.universe_size, sets)?)
}

/// k-partite k-uniform sets over parts of `part_size` elements; part j owns
/// elements `j*part_size .. (j+1)*part_size`. Edge i is chosen by a sparse
/// Fisher–Yates step `j = i + below(total - i)` over the `part_size^k`
/// index space, decoded little-endian in base `part_size`; its weight
/// `uniform_in(lo, hi)` follows immediately.
pub fn gen_kdm(params: &KdmParams, seed: u64) -> Result<SetPackInstance, GeneratorError> {
    check_bounds(params.weight_lo, params.weight_hi)?;
    if params.k == 0 {
        return Err(InstanceError::ZeroK.into());
    }
    let mut total: u64 = 1;
    for _ in 0..params.k {
        total = total
            .checked_mul(params.part_size as u64)
            .ok_or(GeneratorError::Overflow)?;
    }
    if params.edge_count > total {
        return Err(GeneratorError::TooManyEdges {
            requested: params.edge_count,
            available: total,
        });
    }
    let universe_size = params.k * params.part_size;
    let mut rng = SplitMix64::new(seed);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut sets = Vec::with_capacity(params.edge_count as usize);
    for i in 0..params.edge_count {
        let j = i + rng.below(total - i);
        let vi = *swapped.get(&i).unwrap_or(&i);
        let vj = *swapped.get(&j).unwrap_or(&j);
        swapped.insert(j, vi);
        swapped.insert(i, vj);
        let mut code = vj;
        let mut elements = Vec::with_capacity(params.k);
        for part in 0..params.k {
            let digit = code % params.part_size as u64;
            code /= params.part_size as u64;
            elements.push((part * params.part_size) as u32 + digit as u32);
        }
        let weight = rng.uniform_in(params.weight_lo, params.weight_hi);
        sets.push(WeightedSet { weight, elements });
    }
    Ok(SetPackInstance::new(params.k, universe_size, sets)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::verify_claw_free;

    fn random(seed: u64) -> SetPackInstance {
        gen_random_setpack(
            &RandomSetPackParams {
                k: 3,
                universe_size: 9,
                set_count: 12,
                weight_lo: 1.0,
                weight_hi: 2.0,
            },
            seed,
        )
        .unwrap()
    }

    #[test]
    fn fig2_shape() {
        let inst = gen_fig2();
        assert_eq!(inst.len(), 4);
        let g = inst.conflict_graph();
        assert_eq!(g.neighbors(0), &[1, 2, 3]);
        assert!((SQRT3_LITERAL - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn random_is_deterministic_and_claw_free() {
        assert_eq!(random(1), random(1));
        assert_ne!(random(1), random(2));
        let g = random(1).conflict_graph();
        assert_eq!(g.n(), 12);
        assert!(verify_claw_free(&g, 3).0);
        for seed in 0..100 {
            let g = random(seed).conflict_graph();
            assert!(verify_claw_free(&g, 3).0, "seed {seed}");
        }
    }

    #[test]
    fn unit_weights() {
        let inst = gen_random_setpack(
            &RandomSetPackParams {
                k: 2,
                universe_size: 6,
                set_count: 8,
                weight_lo: 1.0,
                weight_hi: 1.0,
            },
            5,
        )
        .unwrap();
        assert!(inst.sets().iter().all(|s| s.weight == 1.0));
    }

    #[test]
    fn infeasible_random_family() {
        // only 3 distinct non-empty subsets of a 2-element universe with k = 2
        let res = gen_random_setpack(
            &RandomSetPackParams {
                k: 2,
                universe_size: 2,
                set_count: 4,
                weight_lo: 1.0,
                weight_hi: 2.0,
            },
            0,
        );
        assert!(matches!(
            res,
            Err(GeneratorError::ResampleCapExceeded { index: 3, .. })
        ));
    }

    fn kdm(k: usize, part_size: usize, edge_count: u64, seed: u64) -> Result<SetPackInstance, GeneratorError> {
        gen_kdm(
            &KdmParams {
                k,
                part_size,
                edge_count,
                weight_lo: 1.0,
                weight_hi: 2.0,
            },
            seed,
        )
    }

    #[test]
    fn kdm_sets_are_partite() {
        let inst = kdm(3, 3, 9, 7).unwrap();
        assert_eq!(inst.len(), 9);
        for s in inst.sets() {
            assert_eq!(s.elements.len(), 3);
            for (part, &e) in s.elements.iter().enumerate() {
                assert_eq!(e as usize / 3, part);
            }
        }
        let distinct: BTreeSet<_> = inst.sets().iter().map(|s| s.elements.clone()).collect();
        assert_eq!(distinct.len(), 9);
        assert!(verify_claw_free(&inst.conflict_graph(), 3).0);
    }

    #[test]
    fn kdm_complete_and_too_large() {
        let inst = kdm(2, 3, 9, 1).unwrap();
        let distinct: BTreeSet<_> = inst.sets().iter().map(|s| s.elements.clone()).collect();
        assert_eq!(distinct.len(), 9);
        assert!(matches!(
            kdm(2, 3, 10, 1),
            Err(GeneratorError::TooManyEdges { .. })
        ));
    }

    #[test]
    fn chain_structure() {
        let c = gen_chain(0.3918, 3).unwrap();
        assert_eq!(c.graph.n(), 6 * 3 + 4);
        assert_eq!(c.a.len(), 7);
        assert!(c.graph.is_independent(&c.a));
        assert!(c.graph.is_independent(&c.o));
        assert!(verify_claw_free(&c.graph, 3).0);
        assert!(gen_chain(1.0, 3).is_err());
        assert!(gen_chain(0.5, 0).is_err());
    }
}
