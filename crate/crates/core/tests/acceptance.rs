//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances and runtime limits are fixed below.

use std::time::{Duration, Instant};

use setpack_core::analysis::{
    min2_tree_decomposition, star_decomposition, verify_slack_lower_bounds,
    verify_theorem_bound, verify_tree_weight_bound, Analysis, BoundMode, LemmaKind, Tree,
};
use setpack_core::generators::{gen_chain, gen_fig2, gen_random_setpack, RandomSetPackParams};
use setpack_core::ratio::{
    chain_ratio_limit, delta_of, optimize_tau, rho, rho_k, tau_table, Preset,
};
use setpack_core::rng::SplitMix64;
use setpack_core::solver::{
    find_improving_exchange, greedy, local_search, partial_enumeration_solve,
    solve_with_scaling, EnumerationMode, SearchConfig,
};
use setpack_core::{exact_mwis, ConflictGraph, Solution, VertexSet};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn random_k3(seed: u64, universe: usize, sets: usize) -> ConflictGraph {
    let p = RandomSetPackParams {
        k: 3,
        universe_size: universe,
        set_count: sets,
        weight_lo: 1.0,
        weight_hi: 2.0,
    };
    gen_random_setpack(&p, seed).unwrap().conflict_graph()
}

fn ratio(o: &Solution, a: &Solution) -> f64 {
    if a.weight() > 0.0 {
        o.weight() / a.weight()
    } else if o.weight() > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

const TABLE3: [(usize, f64, f64, f64, f64, f64, f64); 8] = [
    (3, 0.189, 1.811, 0.3918, 0.214, 1.786, 0.4533),
    (4, 0.210, 2.290, 0.2753, 0.251, 2.249, 0.3281),
    (5, 0.219, 2.781, 0.2144, 0.269, 2.731, 0.2614),
    (6, 0.225, 3.275, 0.1759, 0.281, 3.219, 0.2176),
    (7, 0.229, 3.771, 0.1494, 0.289, 3.711, 0.1866),
    (8, 0.232, 4.268, 0.1298, 0.294, 4.206, 0.1635),
    (9, 0.234, 4.766, 0.1148, 0.299, 4.701, 0.1455),
    (10, 0.236, 5.264, 0.1029, 0.302, 5.198, 0.1311),
];

fn c1_table() -> Outcome {
    let rows = tau_table(3, 10);
    let mut worst_val = 0.0f64;
    let mut worst_eps = 0.0f64;
    for (row, &(k, ts, as_, es, tl, al, el)) in rows.iter().zip(&TABLE3) {
        assert_eq!(row.k, k);
        for (got, want) in [
            (row.small.tau / 2.0, ts),
            (row.small.approx_factor, as_),
            (row.large.tau / 2.0, tl),
            (row.large.approx_factor, al),
        ] {
            worst_val = worst_val.max((got - want).abs());
        }
        for (got, want) in [(row.small.epsilon_star, es), (row.large.epsilon_star, el)] {
            worst_eps = worst_eps.max((got - want).abs());
        }
    }
    let detail = format!("max |dev| values {worst_val:.6} (tol 0.001), eps {worst_eps:.6} (tol 0.003)");
    if worst_val <= 1e-3 && worst_eps <= 3e-3 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c2_asymptotics() -> Outcome {
    let s = optimize_tau(10_000, Preset::Small).tau / 2.0;
    let l = optimize_tau(10_000, Preset::Large).tau / 2.0;
    let detail = format!("k=1e4: tau_small/2 = {s:.6}, tau_large/2 = {l:.6}");
    if (s - 0.25).abs() <= 0.01 && (l - 1.0 / 3.0).abs() <= 0.01 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c3_fig2() -> Outcome {
    let g = gen_fig2().conflict_graph();
    let cfg = SearchConfig::with_s(1);
    let a = local_search(&g, &greedy(&g), &cfg).unwrap().solution;
    let o = exact_mwis(&g, None);
    let r = ratio(&o.solution, &a);
    let lo = find_improving_exchange(&g, &a, &cfg).is_none();
    let s3 = 3f64.sqrt();
    let detail = format!("w(A) = {:.12}, w(O) = {}, ratio = {r:.12}, locally optimal = {lo}", a.weight(), o.solution.weight());
    if (a.weight() - s3).abs() <= 1e-9
        && (o.solution.weight() - 3.0).abs() <= 1e-9
        && (r - s3).abs() <= 1e-9
        && lo
        && o.proven_optimal
    {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c4_chain() -> Outcome {
    let eps = 0.3918;
    let lim = chain_ratio_limit(eps);
    let ch = gen_chain(eps, 30).unwrap();
    let g = &ch.graph;
    let a = Solution::new(g, ch.a.clone()).unwrap();
    let o = Solution::new(g, ch.o.clone()).unwrap();
    let achieved = a.weight() / o.weight();
    let an = Analysis::new(g, &a, &o, eps - 1e-9).unwrap();
    let all_i1 = an.classes.i1 == ch.a;
    let max_delta = ch
        .a
        .iter()
        .map(|&x| an.slack.delta(x).abs())
        .fold(0.0, f64::max);
    let cfg = SearchConfig {
        enumeration_mode: EnumerationMode::Connected,
        ..SearchConfig::with_s(2)
    };
    let two = find_improving_exchange(g, &a, &cfg);
    let detail = format!(
        "limit {lim:.7} vs 1/1.80857 = {:.7}; w(A)/w(O) = {achieved:.7}; all I1 = {all_i1}; max|Delta| = {max_delta:.1e}; improving 2-exchange = {:?}",
        1.0 / 1.80857,
        two.as_ref().map(|m| &m.incoming)
    );
    if (lim - 1.0 / 1.80857).abs() <= 1e-4
        && (achieved - lim).abs() <= 1e-4
        && all_i1
        && max_delta <= 1e-9
        && two.is_some()
    {
        pass(detail)
    } else {
        fail(detail)
    }
}

/// Checks the structural invariants on one analysis; returns a message on
/// the first violation.
fn structure(g: &ConflictGraph, an: &Analysis) -> Result<(), String> {
    let k = g.k();
    let deg = k * (k - 1);
    if an.exchange.max_total_degree() > deg {
        return Err(format!("H degree {} > {deg}", an.exchange.max_total_degree()));
    }
    let c = &an.classes;
    let non_iso = c.non_isolated();
    let stars = star_decomposition(g, &an.exchange, &non_iso).map_err(|e| e.to_string())?;
    let mut seen = VertexSet::new();
    for t in &stars.trees {
        if t.vertices.len() < 2 || t.vertices.len() > 1 + deg {
            return Err(format!("star size {}", t.vertices.len()));
        }
        for &v in &t.vertices {
            if !seen.insert(v) {
                return Err(format!("vertex {v} in two stars"));
            }
        }
    }
    if seen != non_iso {
        return Err("stars miss a non-isolated vertex".into());
    }
    if !c.d.is_empty() {
        let trees = min2_tree_decomposition(g, &an.exchange, &c.d).map_err(|e| e.to_string())?;
        let mut seen = VertexSet::new();
        for t in &trees.trees {
            if t.edges.len() < 2 || t.vertices.len() > 1 + 2 * deg {
                return Err(format!("min2 tree |E| = {} |V| = {}", t.edges.len(), t.vertices.len()));
            }
            seen.extend(t.vertices.iter().copied());
        }
        if seen != c.d {
            return Err("min2 trees miss a vertex of D".into());
        }
    }
    Ok(())
}

#[derive(Default)]
struct StructureTally {
    runs: usize,
    violations: Vec<String>,
}

fn c5_corollary(tally: &mut StructureTally) -> Outcome {
    let mut worst = 0.0f64;
    let mut min_residual = f64::INFINITY;
    let mut bad = Vec::new();
    for seed in 0..200 {
        let g = random_k3(seed, 9, 12);
        let a = local_search(&g, &greedy(&g), &SearchConfig::with_s(1)).unwrap().solution;
        let o = exact_mwis(&g, None).solution;
        let r = ratio(&o, &a);
        worst = worst.max(r);
        let an = Analysis::new(&g, &a, &o, 0.3918).unwrap();
        min_residual = min_residual.min(an.berman.residual);
        if r > 2.0 + 1e-9 || an.berman.residual < -1e-9 {
            bad.push(seed);
        }
        tally.runs += 1;
        if let Err(e) = structure(&g, &an) {
            tally.violations.push(format!("c5 seed {seed}: {e}"));
        }
    }
    let detail = format!("200 runs: max ratio {worst:.6} (<= 2), min berman residual {min_residual:.3e}");
    if bad.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}; failing seeds {bad:?}"))
    }
}

fn c6_theorems(tally: &mut StructureTally) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (preset, eps, cap, mode, kinds) in [
        (
            Preset::Small,
            0.3918,
            1.811,
            BoundMode::Small,
            [LemmaKind::DFinal, LemmaKind::IFinal],
        ),
        (
            Preset::Large,
            0.4533,
            1.786,
            BoundMode::Large,
            [LemmaKind::IsoEdge, LemmaKind::DFinal2],
        ),
    ] {
        let s = preset.s(3);
        let cfg = SearchConfig {
            enumeration_mode: EnumerationMode::Connected,
            ..SearchConfig::with_s(s)
        };
        let mut worst = 0.0f64;
        let mut failures = Vec::new();
        let (mut with_d, mut with_edges, mut checks) = (0, 0, 0);
        for seed in 0..100 {
            let g = random_k3(seed, 9, 12);
            let a = local_search(&g, &greedy(&g), &cfg).unwrap().solution;
            let o = exact_mwis(&g, None).solution;
            let r = ratio(&o, &a);
            worst = worst.max(r);
            if r > cap + 1e-9 {
                failures.push(format!("seed {seed}: ratio {r}"));
            }
            match verify_theorem_bound(&g, &a, &o, eps, preset, EnumerationMode::Connected) {
                Ok(t) if t.holds => {}
                Ok(t) => failures.push(format!("seed {seed}: theorem {t:?}")),
                Err(e) => failures.push(format!("seed {seed}: {e}")),
            }
            let an = Analysis::new(&g, &a, &o, eps).unwrap();
            let rep = verify_slack_lower_bounds(
                &g,
                &an.family,
                &an.slack,
                &an.exchange,
                &an.classes,
                delta_of(eps),
                mode,
                s,
            );
            match rep {
                Ok(rep) => {
                    for c in &rep.checks {
                        if !c.holds {
                            failures.push(format!("seed {seed}: {} {} lhs {} rhs {}", c.kind, c.subject, c.lhs, c.rhs));
                        }
                    }
                    checks += rep.checks.iter().filter(|c| kinds.contains(&c.kind)).count();
                }
                Err(e) => failures.push(format!("seed {seed}: {e}")),
            }
            with_d += usize::from(!an.classes.d.is_empty());
            with_edges += usize::from(!an.classes.isolated_edges.is_empty());
            tally.runs += 1;
            if let Err(e) = structure(&g, &an) {
                tally.violations.push(format!("c6 seed {seed}: {e}"));
            }
        }
        ok &= failures.is_empty();
        parts.push(format!(
            "{preset} s={s} eps={eps}: max ratio {worst:.6} (<= {cap}), {checks} {}/{} checks, {with_d} runs with D, {with_edges} with isolated edges{}",
            kinds[0],
            kinds[1],
            if failures.is_empty() { String::new() } else { format!(", failures: {}", failures.join("; ")) }
        ));
    }
    let detail = parts.join(" | ");
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c7_scaling() -> Outcome {
    let eps = 0.25;
    let cfg = SearchConfig {
        scaling_epsilon: Some(eps),
        ..SearchConfig::with_s(1)
    };
    let mut problems = Vec::new();
    let mut max_used = 0.0f64;
    for seed in 0..200 {
        let g = random_k3(seed, 9, 12);
        let run = solve_with_scaling(&g, &cfg).unwrap();
        let used = run.trace.improvements() as f64;
        max_used = max_used.max(used / run.improvement_bound);
        if used > run.improvement_bound {
            problems.push(format!("seed {seed}: {used} > {}", run.improvement_bound));
        }
        if let Some(sc) = &run.scaled {
            for v in 0..g.n() {
                // the scaled weight must sit in (d·w − 1, d·w]
                let dw = sc.d_f64() * g.weight(v);
                let x = sc.weight(v) as f64;
                if sc.graph.weight(v) != x || x > dw + 1e-6 || x <= dw - 1.0 - 1e-6 {
                    problems.push(format!("seed {seed}: vertex {v} scaled to {x}, d*w = {dw}"));
                }
            }
        }
        let mut prev: Option<u128> = None;
        for st in &run.trace.steps {
            if st.gain < 1 {
                problems.push(format!("seed {seed}: step {} gain {}", st.step, st.gain));
            }
            if let Some(p) = prev {
                if st.weight2 < p + 1 {
                    problems.push(format!("seed {seed}: w2 {} after {p}", st.weight2));
                }
            }
            prev = Some(st.weight2);
        }
    }
    let detail = format!("200 runs at eps=0.25: max improvements/bound {max_used:.2e}, integer weights and unit w2 steps checked");
    if problems.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}; {}", problems.join("; ")))
    }
}

fn c8_partial_enumeration() -> Outcome {
    let alpha = optimize_tau(3, Preset::Small).approx_factor;
    let cfg = SearchConfig::from_preset(Preset::Small, 3);
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let g = random_k3(seed, 10, 14);
        let pe = partial_enumeration_solve(&g, &cfg, alpha).unwrap();
        let o = exact_mwis(&g, None).solution;
        worst = worst.max(ratio(&o, &pe.solution));
        if alpha * pe.solution.weight() < o.weight() {
            bad.push(seed);
        }
    }
    let detail = format!("100 runs, n = 14, alpha = {alpha:.6}: max w(O)/w(PE) {worst:.6}");
    if bad.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}; failing seeds {bad:?}"))
    }
}

fn c9_identities() -> Outcome {
    let mut points = 0;
    let mut worst = 0.0f64;
    let mut delta_ok = true;
    for i in 0..100 {
        let eps = 0.999 * i as f64 / 99.0;
        let d = delta_of(eps);
        delta_ok &= d <= eps + 1e-12;
        for k in 3..=12 {
            let t = (i * 7 + k) % (k + 1);
            let diff = (rho(t as f64, eps, d) - (rho_k(k, eps) - (k - t) as f64 * d)).abs();
            worst = worst.max(diff);
            points += 1;
        }
    }
    let mut rng = SplitMix64::new(9);
    let mut tree_failures = 0;
    for _ in 0..1000 {
        let eps = rng.uniform_in(0.0, 0.5);
        let t = 2 + rng.below(15) as usize;
        let mut w = vec![rng.uniform_in(0.1, 3.0)];
        let mut edges = Vec::new();
        for v in 1..t {
            let p = rng.below(v as u64) as usize;
            // orient so the lighter endpoint is the tail of a valid arc
            if rng.below(2) == 0 {
                let wp = w[p];
                w.push(rng.uniform_in((1.0 - eps) * wp, wp));
                edges.push((v, p));
            } else {
                let wp = w[p];
                w.push(rng.uniform_in(wp, wp / (1.0 - eps)).min(wp / (1.0 - eps)));
                edges.push((p, v));
            }
        }
        let tree = Tree {
            vertices: (0..t).collect(),
            edges,
        };
        match verify_tree_weight_bound(&tree, &w, eps) {
            Ok(c) if c.holds => {}
            _ => tree_failures += 1,
        }
    }
    let detail = format!(
        "{points} grid points, max |rho_t - (rho_k - (k-t) delta)| = {worst:.1e}, delta <= eps: {delta_ok}; tree-bound failures {tree_failures}/1000"
    );
    if points >= 1000 && worst <= 1e-12 && delta_ok && tree_failures == 0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c10_structure(tally: &StructureTally) -> Outcome {
    let mut disagreements = Vec::new();
    let mut compared = 0;
    let mut rng = SplitMix64::new(10);
    for seed in 0..150 {
        let g = random_k3(seed, 9, 12);
        let mut starts = vec![greedy(&g), Solution::empty()];
        // a random maximal independent set, built in shuffled order
        let mut order: Vec<usize> = (0..g.n()).collect();
        for i in (1..order.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            order.swap(i, j);
        }
        let mut set = VertexSet::new();
        for v in order {
            if g.neighbors(v).iter().all(|u| !set.contains(u)) {
                set.insert(v);
            }
        }
        starts.push(Solution::new(&g, set).unwrap());
        for start in &starts {
            for s in 1..=2 {
                let full = SearchConfig {
                    enumeration_mode: EnumerationMode::Full,
                    ..SearchConfig::with_s(s)
                };
                let conn = SearchConfig {
                    enumeration_mode: EnumerationMode::Connected,
                    ..SearchConfig::with_s(s)
                };
                let a = find_improving_exchange(&g, start, &full).is_some();
                let b = find_improving_exchange(&g, start, &conn).is_some();
                compared += 1;
                if a != b {
                    disagreements.push(format!("seed {seed} s {s}"));
                }
            }
        }
    }
    let detail = format!(
        "{} analysis runs, {} structural violations; {compared} full/connected comparisons, {} disagreements",
        tally.runs,
        tally.violations.len(),
        disagreements.len()
    );
    if tally.violations.is_empty() && disagreements.is_empty() && tally.runs > 0 {
        pass(detail)
    } else {
        fail(format!(
            "{detail}; {}",
            tally
                .violations
                .iter()
                .chain(&disagreements)
                .cloned()
                .collect::<Vec<_>>()
                .join("; ")
        ))
    }
}

fn main() {
    let mut tally = StructureTally::default();
    let mut all_ok = true;
    let mut report = |id: u32, name: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let out = f();
        let took = started.elapsed();
        let in_time = took <= limit;
        let ok = out.ok && in_time;
        all_ok &= ok;
        println!(
            "{} {id:>2} {name}: {} [{:.2}s, limit {}s{}]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    };
    report(1, "table", Duration::from_secs(5), &mut c1_table);
    report(2, "asymptotics", Duration::from_secs(10), &mut c2_asymptotics);
    report(3, "fig2-locality-gap", Duration::from_secs(1), &mut c3_fig2);
    report(4, "chain", Duration::from_secs(5), &mut c4_chain);
    report(5, "corollary-suite", Duration::from_secs(120), &mut || c5_corollary(&mut tally));
    report(6, "theorem-suites", Duration::from_secs(600), &mut || c6_theorems(&mut tally));
    report(7, "scaling-bound", Duration::from_secs(120), &mut c7_scaling);
    report(8, "partial-enumeration", Duration::from_secs(600), &mut c8_partial_enumeration);
    report(9, "identities", Duration::from_secs(10), &mut c9_identities);
    report(10, "structure", Duration::from_secs(300), &mut || c10_structure(&tally));
    if !all_ok {
        std::process::exit(1);
    }
}
