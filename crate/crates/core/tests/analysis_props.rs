//! Analysis quantities against a from-scratch evaluation of their formulas,
//! plus the structural invariants on seeded instances.

use setpack_core::analysis::{
    build_claw_family, check_berman_inequality, compute_slack, star_decomposition,
    min2_tree_decomposition, verify_slack_lower_bounds, verify_tree_weight_bound, Analysis,
    BoundMode, Tree,
};
use setpack_core::generators::{gen_chain, gen_random_setpack, RandomSetPackParams};
use setpack_core::ratio::{delta_of, rho, rho_k};
use setpack_core::solver::{greedy, local_search, SearchConfig};
use setpack_core::rng::SplitMix64;
use setpack_core::{exact_mwis, ConflictGraph, Solution, VertexSet};

fn random_graph(seed: u64) -> ConflictGraph {
    let p = RandomSetPackParams {
        k: 3,
        universe_size: 9,
        set_count: 12,
        weight_lo: 1.0,
        weight_hi: 2.0,
    };
    gen_random_setpack(&p, seed).unwrap().conflict_graph()
}

fn closed_nbr(g: &ConflictGraph, o: usize, a: &VertexSet) -> Vec<usize> {
    a.iter().copied().filter(|&x| x == o || g.adjacent(x, o)).collect()
}

/// Δ_a and Ψ_a straight from the definitions, no shared helpers.
fn slack_oracle(g: &ConflictGraph, a: &VertexSet, r: &VertexSet) -> Vec<(usize, f64, f64)> {
    let w = |v: usize| g.weight(v);
    let mut out = Vec::new();
    for &x in a {
        let claw: Vec<usize> = r
            .iter()
            .copied()
            .filter(|&o| {
                let nb = closed_nbr(g, o, a);
                let mut best = nb[0];
                for &y in &nb {
                    if w(y) > w(best) {
                        best = y;
                    }
                }
                best == x
            })
            .collect();
        let mut plus: VertexSet = VertexSet::from([x]);
        let mut psi = 0.0;
        for &o in &claw {
            let others: Vec<usize> = closed_nbr(g, o, a).into_iter().filter(|&y| y != x).collect();
            plus.extend(others.iter().copied());
            let s1: f64 = others.iter().map(|&y| w(y)).sum();
            let s2: f64 = others.iter().map(|&y| w(y) * w(y)).sum();
            psi += (w(o) - w(x)).powi(2) + w(x) * s1 - s2;
        }
        let delta = plus.iter().map(|&y| w(y) * w(y)).sum::<f64>()
            - claw.iter().map(|&o| w(o) * w(o)).sum::<f64>();
        out.push((x, delta, psi));
    }
    out
}

#[test]
fn slack_matches_definitions() {
    for seed in 0..60 {
        let g = random_graph(seed);
        let a = local_search(&g, &greedy(&g), &SearchConfig::with_s(1)).unwrap().solution;
        let r = exact_mwis(&g, None).solution;
        let fam = build_claw_family(&g, &a, &r).unwrap();
        let rep = compute_slack(&g, &fam);
        for (x, d, p) in slack_oracle(&g, a.vertices(), r.vertices()) {
            assert!((rep.delta(x) - d).abs() < 1e-9, "seed {seed} a={x}");
            assert!((rep.psi_total(x) - p).abs() < 1e-9, "seed {seed} a={x}");
        }
        let total: usize = fam.claws.values().map(|c| c.len()).sum();
        assert_eq!(total, r.len());
    }
}

#[test]
fn berman_and_structure_on_seeded_runs() {
    for seed in 0..200 {
        let g = random_graph(seed);
        let a = local_search(&g, &greedy(&g), &SearchConfig::with_s(1)).unwrap().solution;
        let r = exact_mwis(&g, None).solution;
        let an = Analysis::new(&g, &a, &r, 0.3918).unwrap();
        assert!(an.berman.residual >= -1e-9, "seed {seed}: {}", an.berman.residual);
        for (&x, s) in &an.slack.per_vertex {
            assert!(s.delta >= -1e-9, "seed {seed} a={x}");
            assert!(s.psi.values().all(|&p| p >= -1e-9));
            assert!(an.family.claw(x).len() <= 3);
        }
        assert!(an.exchange.max_total_degree() <= 6);
        let c = &an.classes;
        let mut union: VertexSet = c.i1.clone();
        union.extend(c.i2.iter().copied());
        union.extend(c.d.iter().copied());
        assert_eq!(union, an.family.a);
        assert_eq!(c.i1.len() + c.i2.len() + c.d.len(), an.family.a.len());
        assert_eq!(c.isolated_edges.len() * 2, c.i2.len());

        let stars = star_decomposition(&g, &an.exchange, &c.non_isolated()).unwrap();
        assert_eq!(stars.covered(), c.non_isolated());
        for t in &stars.trees {
            assert!(t.vertices.len() <= 7);
        }
        if !c.d.is_empty() {
            let trees = min2_tree_decomposition(&g, &an.exchange, &c.d).unwrap();
            assert_eq!(trees.covered(), c.d);
            for t in &trees.trees {
                assert!(t.edges.len() >= 2 && t.vertices.len() <= 13);
            }
        }
    }
}

#[test]
fn lemma_sweeps_small_and_large() {
    for (s, eps, mode) in [(7, 0.3918, BoundMode::Small), (13, 0.4533, BoundMode::Large)] {
        for seed in 0..40 {
            let g = random_graph(seed);
            let a = local_search(&g, &greedy(&g), &SearchConfig::with_s(s)).unwrap().solution;
            let r = exact_mwis(&g, None).solution;
            let an = Analysis::new(&g, &a, &r, eps).unwrap();
            let rep = verify_slack_lower_bounds(
                &g,
                &an.family,
                &an.slack,
                &an.exchange,
                &an.classes,
                delta_of(eps),
                mode,
                s,
            )
            .unwrap();
            assert!(rep.all_hold(), "seed {seed}\n{}", rep.to_tsv());
        }
    }
}

#[test]
fn chain_has_tight_claws_and_isolated_solution() {
    for &eps in &[0.1, 0.25, 0.3918, 0.5, 0.7] {
        for ell in [1, 2, 5, 12] {
            let ch = gen_chain(eps, ell).unwrap();
            let g = &ch.graph;
            let a = Solution::new(g, ch.a.clone()).unwrap();
            let o = Solution::new(g, ch.o.clone()).unwrap();
            let an = Analysis::new(g, &a, &o, eps - 1e-9).unwrap();
            assert_eq!(an.classes.i1, ch.a, "eps {eps} ell {ell}");
            for &x in &ch.a {
                assert!(an.slack.delta(x).abs() < 1e-9, "eps {eps} ell {ell} a={x}");
            }
        }
    }
}

#[test]
fn rho_identity_grid() {
    for i in 0..=99 {
        let eps = 0.99 * i as f64 / 99.0;
        let d = delta_of(eps);
        assert!(d <= eps + 1e-15);
        // 1 − √(1−ε) evaluated the plain way
        assert!((d - (1.0 - (1.0 - eps).sqrt())).abs() < 1e-12);
        for k in 3..=7 {
            for t in 0..=k {
                let lhs = rho(t as f64, eps, d);
                let rhs = rho_k(k, eps) - (k - t) as f64 * d;
                assert!((lhs - rhs).abs() < 1e-12, "eps {eps} k {k} t {t}");
            }
        }
    }
}

#[test]
fn tree_bound_on_random_valid_trees() {
    let mut rng = SplitMix64::new(2024);
    for _ in 0..1000 {
        let eps = rng.uniform_in(0.0, 0.5);
        let t = 2 + rng.below(12) as usize;
        // random labelled tree; the parent of i is some j < i with a
        // weight in [w_i, w_i/(1-eps)] so each arc i→parent is valid
        let mut w = vec![rng.uniform_in(0.5, 2.0)];
        let mut edges = Vec::new();
        for i in 1..t {
            let p = rng.below(i as u64) as usize;
            let wp: f64 = w[p];
            let wi = rng.uniform_in((1.0 - eps) * wp, wp);
            w.push(wi);
            edges.push((i, p));
        }
        let tree = Tree {
            vertices: (0..t).collect(),
            edges,
        };
        let chk = verify_tree_weight_bound(&tree, &w, eps).unwrap();
        assert!(chk.holds, "{chk:?}");
    }
}

#[test]
fn berman_on_identical_pair() {
    let g = random_graph(5);
    let a = exact_mwis(&g, None).solution;
    let fam = build_claw_family(&g, &a, &a).unwrap();
    let rep = compute_slack(&g, &fam);
    assert!(check_berman_inequality(&g, &fam, &rep).unwrap().residual.abs() < 1e-12);
}
