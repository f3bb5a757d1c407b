use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use setpack_core::analysis::{
    analysis_tsv, verify_slack_lower_bounds, Analysis, BoundMode,
};
use setpack_core::generators::{
    gen_chain, gen_kdm, gen_random_setpack, GeneratorSpec, KdmParams, RandomSetPackParams,
};
use setpack_core::ratio::{delta_of, optimize_tau, tau_table, tau_table_tsv, theorem_factor, Preset};
use setpack_core::solver::{
    find_improving_exchange, partial_enumeration_solve, solve, solve_with_scaling,
    EnumerationMode, Exponent, SearchConfig,
};
use setpack_core::{
    exact_mwis, parse_instance, parse_solution, tsv, verify_claw_free, ConflictGraph,
    SetPackInstance, Solution,
};

use crate::report::{digest, RunReport};
use crate::{
    AnalyzeArgs, CliError, Command, Family, GenerateArgs, InstanceArgs, RandomParams,
    RatioTableArgs, SolveArgs, SweepArgs, SweepFamily, VerifyArgs,
};

/// Slack allowed when comparing a measured ratio with a bound.
const RATIO_TOLERANCE: f64 = 1e-9;

pub fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let mut report = match cmd {
        Command::Solve(a) => cmd_solve(&a, out)?,
        Command::Analyze(a) => cmd_analyze(&a, out)?,
        Command::RatioTable(a) => return cmd_ratio_table(&a, out),
        Command::Generate(a) => cmd_generate(&a, out)?,
        Command::Sweep(a) => cmd_sweep(&a, out)?,
        Command::Verify(a) => cmd_verify(&a, out)?,
    };
    report.wall_time = started.elapsed();
    err.write_all(report.timing_line().as_bytes())?;
    match report.get("failure") {
        Some(msg) => Err(CliError::Verification(msg.to_string())),
        None => Ok(()),
    }
}

struct Loaded {
    graph: ConflictGraph,
    digest: String,
}

fn load(args: &InstanceArgs) -> Result<Loaded, CliError> {
    let bytes = fs::read(&args.input)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Data(format!("{}: not UTF-8", args.input.display())))?;
    let parsed = parse_instance(text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let mut graph = parsed.to_graph();
    if let Some(k) = args.k {
        graph = ConflictGraph::new(k, graph.weights().to_vec(), graph.edges())
            .map_err(|e| CliError::Usage(format!("--k: {e}")))?;
    }
    Ok(Loaded {
        graph,
        digest: digest(&bytes),
    })
}

fn load_solution(g: &ConflictGraph, path: &Path) -> Result<Solution, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let ids = parse_solution(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Solution::new(g, ids).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn ids(sol: &Solution) -> String {
    let t = sol.to_text();
    if t.trim().is_empty() {
        "-".into()
    } else {
        t.trim().to_string()
    }
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or("none".into(), |x| x.to_string())
}

fn ratio(wo: f64, wa: f64) -> f64 {
    if wa > 0.0 {
        wo / wa
    } else if wo > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<RunReport, CliError> {
    let loaded = load(&a.instance)?;
    let g = &loaded.graph;
    let k = g.k();
    let s = match (a.s, a.preset) {
        (Some(s), _) => s,
        (None, Some(p)) => Preset::from(p).s(k),
        (None, None) => 1,
    };
    let cfg = SearchConfig {
        s,
        weight_exponent: Exponent::from_int(a.exponent).expect("clap restricts the range"),
        scaling_epsilon: a.scale_eps,
        enumeration_mode: a.mode.into(),
        max_improvements: a.max_improvements,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let alpha = a
        .alpha
        .unwrap_or_else(|| optimize_tau(k.max(2), Preset::Small).approx_factor);

    let mut r = RunReport::new("solve");
    r.digest = Some(loaded.digest.clone());
    r.config("input", a.instance.input.display())
        .config("n", g.n())
        .config("k", k)
        .config("s", s)
        .config("preset", opt(&a.preset.map(|p| Preset::from(p).name())))
        .config("budget", cfg.budget(g))
        .config("exponent", a.exponent)
        .config("scale_eps", opt(&a.scale_eps))
        .config("partial_enum", a.partial_enum)
        .config("alpha", if a.partial_enum { tsv::num(alpha) } else { "none".into() })
        .config("mode", cfg.enumeration_mode)
        .config("max_improvements", opt(&a.max_improvements))
        .config("exact", a.exact)
        .config("exact_budget", opt(&a.exact_budget))
        .config("seed", opt(&a.seed));

    let data = |e: setpack_core::solver::SolverError| CliError::Data(e.to_string());
    let mut trace_text = None;
    let solution = if a.partial_enum {
        let pe = partial_enumeration_solve(g, &cfg, alpha).map_err(data)?;
        r.num("residual_epsilon", pe.epsilon)
            .result("pivot", opt(&pe.pivot))
            .result("improvements", pe.total_improvements);
        pe.solution
    } else if a.scale_eps.is_some() {
        let run = solve_with_scaling(g, &cfg).map_err(data)?;
        r.result("improvements", run.trace.improvements())
            .num("improvement_bound", run.improvement_bound)
            .result("locally_optimal", run.locally_optimal);
        if let Some(sc) = &run.scaled {
            r.result("scale_d", sc.d.to_string());
        }
        trace_text = Some(run.trace.to_tsv());
        run.solution
    } else {
        let run = solve(g, &cfg).map_err(data)?;
        r.result("improvements", run.trace.improvements())
            .result("locally_optimal", run.locally_optimal);
        trace_text = Some(run.trace.to_tsv());
        run.solution
    };
    r.num("weight_a", solution.weight())
        .result("size_a", solution.len())
        .result("solution_a", ids(&solution));
    if a.exact {
        let ex = exact_mwis(g, a.exact_budget);
        let wo = ex.solution.weight();
        r.num("weight_o", wo)
            .result("solution_o", ids(&ex.solution))
            .result("exact_nodes", ex.nodes_explored)
            .num("ratio", ratio(wo, solution.weight()))
            .result(
                "ratio_status",
                if ex.proven_optimal { "exact" } else { "lower-bound-only" },
            );
    }
    if let Some(path) = &a.emit_solution {
        fs::write(path, solution.to_text())?;
    }
    out.write_all(r.to_tsv().as_bytes())?;
    if a.trace {
        if let Some(t) = trace_text {
            writeln!(out, "# trace")?;
            out.write_all(t.as_bytes())?;
        }
    }
    Ok(r)
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<RunReport, CliError> {
    let loaded = load(&a.instance)?;
    let g = &loaded.graph;
    let k = g.k();
    if !(0.0..=1.0).contains(&a.epsilon) {
        return Err(CliError::Usage(format!("--epsilon {} is outside [0, 1]", a.epsilon)));
    }
    let delta = if a.delta == "auto" {
        delta_of(a.epsilon)
    } else {
        a.delta
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("--delta `{}` is neither auto nor a number", a.delta)))?
    };
    let mode: BoundMode = a.bounds.into();
    let s = a.s.unwrap_or_else(|| mode.required_s(k));
    let sol_a = load_solution(g, &a.a)?;
    let sol_r = match &a.r {
        Some(p) => load_solution(g, p)?,
        None => exact_mwis(g, None).solution,
    };

    let mut r = RunReport::new("analyze");
    r.digest = Some(loaded.digest.clone());
    r.config("input", a.instance.input.display())
        .config("n", g.n())
        .config("k", k)
        .config("a", a.a.display())
        .config("r", a.r.as_ref().map_or("exact".into(), |p| p.display().to_string()))
        .config("epsilon", tsv::num(a.epsilon))
        .config("delta", tsv::num(delta))
        .config("bounds", format!("{:?}", a.bounds).to_lowercase())
        .config("s", s)
        .config("mode", EnumerationMode::from(a.mode));

    let an = Analysis::new(g, &sol_a, &sol_r, a.epsilon).map_err(|e| CliError::Data(e.to_string()))?;
    let cfg = SearchConfig {
        enumeration_mode: a.mode.into(),
        ..SearchConfig::with_s(s)
    };
    let locally_optimal = find_improving_exchange(g, &sol_a, &cfg).is_none();
    r.num("weight_a", sol_a.weight())
        .num("weight_r", sol_r.weight())
        .num("ratio", ratio(sol_r.weight(), sol_a.weight()))
        .result("locally_optimal", locally_optimal)
        .num("berman_residual", an.berman.residual)
        .result("h_arcs", an.exchange.arcs.len())
        .result("h_max_degree", an.exchange.max_total_degree())
        .result("i1", an.classes.i1.len())
        .result("i2", an.classes.i2.len())
        .result("d", an.classes.d.len());

    let mut lemma_text = None;
    let mut failures = Vec::new();
    if locally_optimal {
        if an.berman.residual < -1e-9 {
            failures.push("berman".to_string());
        }
        let lr = verify_slack_lower_bounds(
            g,
            &an.family,
            &an.slack,
            &an.exchange,
            &an.classes,
            delta,
            mode,
            s,
        )
        .map_err(|e| CliError::Data(e.to_string()))?;
        if let Some(dec) = &lr.decomposition {
            r.result("trees", dec.trees.len());
        }
        r.result("lemma_checks", lr.checks.len());
        for c in lr.checks.iter().filter(|c| !c.holds) {
            failures.push(format!("{}[{}]", c.kind, c.subject));
        }
        lemma_text = Some(lr.to_tsv());
    } else {
        r.result("lemma_checks", "skipped: A is not locally optimal at s");
    }
    r.result("lemma_failures", failures.len());
    if !failures.is_empty() {
        r.result("failure", format!("failed checks: {}", failures.join(", ")));
    }
    out.write_all(r.to_tsv().as_bytes())?;
    writeln!(out, "# slack")?;
    out.write_all(analysis_tsv(g, &an).as_bytes())?;
    if let Some(t) = lemma_text {
        writeln!(out, "# lemmas")?;
        out.write_all(t.as_bytes())?;
    }
    Ok(r)
}

fn cmd_ratio_table(a: &RatioTableArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(3 <= a.k_min && a.k_min <= a.k_max && a.k_max <= 1000) {
        return Err(CliError::Usage(format!(
            "need 3 <= k-min <= k-max <= 1000 (got {}..{})",
            a.k_min, a.k_max
        )));
    }
    out.write_all(tau_table_tsv(&tau_table(a.k_min, a.k_max)).as_bytes())?;
    Ok(())
}

fn random_params(p: &RandomParams) -> RandomSetPackParams {
    RandomSetPackParams {
        k: p.k,
        universe_size: p.universe,
        set_count: p.sets,
        weight_lo: p.weight_lo,
        weight_hi: p.weight_hi,
    }
}

fn kdm_params(p: &RandomParams) -> KdmParams {
    KdmParams {
        k: p.k,
        part_size: p.part_size,
        edge_count: p.edges,
        weight_lo: p.weight_lo,
        weight_hi: p.weight_hi,
    }
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<RunReport, CliError> {
    if a.family != Family::Chain && (a.emit_a.is_some() || a.emit_r.is_some()) {
        return Err(CliError::Usage("--emit-a/--emit-r apply to the chain family only".into()));
    }
    let gen_err = |e: setpack_core::generators::GeneratorError| CliError::Data(e.to_string());
    let mut r = RunReport::new("generate");
    r.config("family", format!("{:?}", a.family).to_lowercase());
    let spec = match a.family {
        Family::Fig2 => GeneratorSpec::Fig2,
        Family::Chain => {
            r.config("epsilon", tsv::num(a.epsilon)).config("ell", a.ell);
            GeneratorSpec::Chain {
                epsilon: a.epsilon,
                ell: a.ell,
            }
        }
        Family::Random => {
            let p = &a.params;
            r.config("k", p.k)
                .config("universe", p.universe)
                .config("sets", p.sets)
                .config("weight_lo", tsv::num(p.weight_lo))
                .config("weight_hi", tsv::num(p.weight_hi))
                .config("seed", a.seed);
            GeneratorSpec::RandomSetPack {
                params: random_params(p),
                seed: a.seed,
            }
        }
        Family::Kdm => {
            let p = &a.params;
            r.config("k", p.k)
                .config("part_size", p.part_size)
                .config("edges", p.edges)
                .config("weight_lo", tsv::num(p.weight_lo))
                .config("weight_hi", tsv::num(p.weight_hi))
                .config("seed", a.seed);
            GeneratorSpec::Kdm {
                params: kdm_params(p),
                seed: a.seed,
            }
        }
    };
    let text = spec.generate().map_err(gen_err)?.to_text();
    if a.family == Family::Chain {
        let ch = gen_chain(a.epsilon, a.ell).map_err(gen_err)?;
        let write_ids = |path: &Path, set: &setpack_core::VertexSet| -> Result<(), CliError> {
            let body: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            fs::write(path, body.join(" ") + "\n")?;
            Ok(())
        };
        if let Some(p) = &a.emit_a {
            write_ids(p, &ch.a)?;
        }
        if let Some(p) = &a.emit_r {
            write_ids(p, &ch.o)?;
        }
    }
    match &a.output {
        Some(path) => {
            fs::write(path, &text)?;
            r.digest = Some(digest(text.as_bytes()));
            r.result("output", path.display());
            out.write_all(r.to_tsv().as_bytes())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(r)
}

fn sweep_instance(a: &SweepArgs, seed: u64) -> Result<SetPackInstance, CliError> {
    let r = match a.family {
        SweepFamily::Random => gen_random_setpack(&random_params(&a.params), seed),
        SweepFamily::Kdm => gen_kdm(&kdm_params(&a.params), seed),
    };
    r.map_err(|e| CliError::Data(e.to_string()))
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<RunReport, CliError> {
    let k = a.params.k;
    let preset = a.preset.map(Preset::from);
    let s = match (a.s, preset) {
        (Some(s), _) => s,
        (None, Some(p)) => p.s(k),
        (None, None) => 1,
    };
    let (bound, bound_name, epsilon) = match preset {
        Some(p) => match a.epsilon {
            Some(e) => (theorem_factor(k, e, p), p.name(), Some(e)),
            None => {
                let t = optimize_tau(k, p);
                (t.approx_factor, p.name(), Some(t.epsilon_star))
            }
        },
        None => ((k as f64 + 1.0) / 2.0, "corollary", None),
    };
    let cfg = SearchConfig {
        enumeration_mode: a.mode.into(),
        ..SearchConfig::with_s(s)
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let mut r = RunReport::new("sweep");
    r.config("family", format!("{:?}", a.family).to_lowercase())
        .config("runs", a.runs)
        .config("seed0", a.seed0)
        .config("k", k)
        .config("s", s)
        .config("preset", opt(&preset.map(|p| p.name())))
        .config("epsilon", opt(&epsilon.map(tsv::num)))
        .config("mode", cfg.enumeration_mode);
    match a.family {
        SweepFamily::Random => r
            .config("universe", a.params.universe)
            .config("sets", a.params.sets),
        SweepFamily::Kdm => r
            .config("part_size", a.params.part_size)
            .config("edges", a.params.edges),
    };
    r.config("weight_lo", tsv::num(a.params.weight_lo))
        .config("weight_hi", tsv::num(a.params.weight_hi));

    let mut rows = tsv::row(["seed", "n", "weight_a", "weight_o", "ratio"]);
    let mut worst = f64::NEG_INFINITY;
    let mut total = 0.0;
    for i in 0..a.runs {
        let seed = a.seed0 + i as u64;
        let g = sweep_instance(a, seed)?.conflict_graph();
        let sol = solve(&g, &cfg).map_err(|e| CliError::Data(e.to_string()))?.solution;
        let ex = exact_mwis(&g, None);
        let q = ratio(ex.solution.weight(), sol.weight());
        worst = worst.max(q);
        total += q;
        rows.push_str(&tsv::row([
            seed.to_string(),
            g.n().to_string(),
            tsv::num(sol.weight()),
            tsv::num(ex.solution.weight()),
            tsv::num(q),
        ]));
    }
    let holds = a.runs == 0 || worst <= bound + RATIO_TOLERANCE;
    let (max_s, mean_s) = if a.runs == 0 {
        ("-".to_string(), "-".to_string())
    } else {
        (tsv::num(worst), tsv::num(total / a.runs as f64))
    };
    r.result("max_ratio", &max_s)
        .result("mean_ratio", &mean_s)
        .num("bound", bound)
        .result("bound_kind", bound_name)
        .result("holds", holds);
    if !holds {
        r.result("failure", format!("max ratio {max_s} exceeds bound {}", tsv::num(bound)));
    }
    out.write_all(r.to_tsv().as_bytes())?;
    writeln!(out, "# runs")?;
    out.write_all(rows.as_bytes())?;
    writeln!(out, "# aggregate")?;
    out.write_all(tsv::row(["runs", "max_ratio", "mean_ratio", "bound", "holds"]).as_bytes())?;
    out.write_all(
        tsv::row([
            a.runs.to_string(),
            max_s,
            mean_s,
            tsv::num(bound),
            if holds { "PASS" } else { "FAIL" }.to_string(),
        ])
        .as_bytes(),
    )?;
    Ok(r)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<RunReport, CliError> {
    let loaded = load(&a.instance)?;
    let g = &loaded.graph;
    let k = g.k();
    let mut r = RunReport::new("verify");
    r.digest = Some(loaded.digest.clone());
    r.config("input", a.instance.input.display())
        .config("n", g.n())
        .config("k", k)
        .config("solution", opt(&a.solution.as_ref().map(|p| p.display().to_string())))
        .config("s", opt(&a.s))
        .config("mode", EnumerationMode::from(a.mode));
    let mut failures = Vec::new();
    let (claw_free, claw) = verify_claw_free(g, k);
    r.result("claw_free", claw_free);
    if let Some(c) = claw {
        let talons: Vec<String> = c.talons.iter().map(|t| t.to_string()).collect();
        r.result("claw", format!("center {} talons {}", c.center, talons.join(" ")));
        failures.push(format!("graph contains a {}-claw", k + 1));
    }
    if let Some(path) = &a.solution {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let set = parse_solution(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        match Solution::new(g, set) {
            Ok(sol) => {
                r.result("independent", true).num("weight", sol.weight());
                if let Some(s) = a.s {
                    let cfg = SearchConfig {
                        enumeration_mode: a.mode.into(),
                        ..SearchConfig::with_s(s)
                    };
                    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                    match find_improving_exchange(g, &sol, &cfg) {
                        None => {
                            r.result("locally_optimal", true);
                        }
                        Some(m) => {
                            let inc: Vec<String> = m.incoming.iter().map(|v| v.to_string()).collect();
                            r.result("locally_optimal", false)
                                .result("improving_exchange", inc.join(" "));
                            failures.push(format!("improving exchange exists at s = {s}"));
                        }
                    }
                }
            }
            Err(e) => {
                r.result("independent", false).result("conflict", &e);
                failures.push(e.to_string());
            }
        }
    }
    if !failures.is_empty() {
        r.result("failure", failures.join("; "));
    }
    out.write_all(r.to_tsv().as_bytes())?;
    Ok(r)
}
