//! Subcommand implementations.

use crate::args::{Args, UsageError};
use boxlite::analytic::{
    audit_faithfulness, d_min, faithful_embedding, pad_dimensions, DimBoundMode,
};
use boxlite::data::{make_bundle, NamedAssertion, SampleConfig};
use boxlite::dump::{read_embedding, write_embedding};
use boxlite::eval::{compute_metrics, rank_filtered, EvalReport, RoleTriple, TiePolicy};
use boxlite::geometry::{BoxInterpretation, WorldConfig};
use boxlite::ontology::{parse_axiom_line, parse_kb, Axiom, AxiomDisplay, KnowledgeBase};
use boxlite::problem::{compile, CompiledProblem, NegativeMode};
use boxlite::reasoner::{Reasoner, WitnessDomain};
use boxlite::solver::{export_socp, solve, SolveOptions};
use serde_json::json;
use std::collections::BTreeSet;
use std::time::Instant;

/// Exit code 2 for usage/IO problems, 1 for logical failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Logic(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Logic(_) => 1,
        }
    }
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Logic(m) => m,
        }
    }
}

fn io_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{context}: {e}"))
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(&format!("cannot read `{path}`"), e))
}

fn write_file(path: &str, content: &str) -> Result<(), CliError> {
    if let Some(parent) = std::path::Path::new(path).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| io_err(&format!("cannot create `{}`", parent.display()), e))?;
        }
    }
    std::fs::write(path, content).map_err(|e| io_err(&format!("cannot write `{path}`"), e))
}

fn load_kb(args: &Args) -> Result<KnowledgeBase, CliError> {
    let path = args.require("kb")?;
    parse_kb(&read_file(path)?).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn world_config(args: &Args) -> Result<WorldConfig, CliError> {
    let d = args.get_usize("d", 32)?;
    WorldConfig::new(d, args.get_f64("s-world", 1.0)?, args.get_f64("eps", 1e-2)?)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn load_problem(args: &Args) -> Result<CompiledProblem, CliError> {
    let path = args.require("problem")?;
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Usage(format!("{path}: bad problem file: {e}")))
}

fn negative_mode(args: &Args) -> Result<NegativeMode, CliError> {
    match args.get("negatives").unwrap_or("asserted") {
        "asserted" => Ok(NegativeMode::AssertedOnly),
        "entailment-aware" => Ok(NegativeMode::EntailmentAware),
        other => Err(CliError::Usage(format!(
            "--negatives must be asserted or entailment-aware, got `{other}`"
        ))),
    }
}

fn compile_from_args(
    kb: &KnowledgeBase,
    args: &Args,
    lambdas: (f64, f64, f64),
) -> Result<CompiledProblem, CliError> {
    let cfg = world_config(args)?;
    compile(kb, cfg, lambdas, negative_mode(args)?).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cmd_compile(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    let lambdas = (
        args.get_f64("l1", 0.0)?,
        args.get_f64("l2", 0.0)?,
        args.get_f64("l3", 0.0)?,
    );
    let started = Instant::now();
    let problem = compile_from_args(&kb, args, lambdas)?;
    let seconds = started.elapsed().as_secs_f64();
    let out = args.require("out")?;
    write_file(out, &serde_json::to_string(&problem).expect("serializable"))?;
    println!(
        "compiled n={} constraints={} assertion_terms={} negative_terms={} in {:.2}s",
        problem.n(),
        problem.constraints.len(),
        problem.objective.assertion_terms.len(),
        problem.objective.negative_terms.len(),
        seconds
    );
    Ok(())
}

fn solve_options(args: &Args, problem: &CompiledProblem) -> Result<SolveOptions, CliError> {
    let mut opts = SolveOptions {
        step_c: problem.layout.cfg.s_world / 10.0,
        ..Default::default()
    };
    opts.max_iters = args.get_usize("max-iters", opts.max_iters)?;
    opts.tol_feas = args.get_f64("tol-feas", opts.tol_feas)?;
    opts.tol_obj = args.get_f64("tol-obj", opts.tol_obj)?;
    opts.step_c = args.get_f64("step-c", opts.step_c)?;
    opts.projection_passes = args.get_usize("passes", opts.projection_passes)?;
    opts.seed = args.get_seed("seed", 0)?;
    opts.certified_nonempty = args.has("certified");
    if let Some(ws) = args.get("warm-start") {
        let z0 = if ws == "analytic" {
            let kb = load_kb(args)?;
            let witness = witness_of(args)?;
            let eta = faithful_embedding(&kb, witness, problem.layout.cfg.eps.min(0.25))
                .map_err(|e| CliError::Logic(e.to_string()))?;
            if eta.config.s_world != problem.layout.cfg.s_world {
                return Err(CliError::Usage(format!(
                    "analytic warm start uses s_world = {}, but the problem was compiled at {}",
                    eta.config.s_world, problem.layout.cfg.s_world
                )));
            }
            let eta = pad_dimensions(&eta, problem.d())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            problem.layout.pack(&eta)
        } else {
            let eta = read_embedding(&read_file(ws)?, &problem.signature)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            problem.layout.pack(&eta)
        };
        opts.warm_start = Some(z0);
    }
    Ok(opts)
}

pub fn cmd_solve(args: &Args) -> Result<(), CliError> {
    let problem = load_problem(args)?;
    let opts = solve_options(args, &problem)?;
    let started = Instant::now();
    let (z, diag) = solve(&problem, &opts).map_err(|e| CliError::Logic(e.to_string()))?;
    let seconds = started.elapsed().as_secs_f64();
    let eta = problem
        .extract_interpretation(&z, opts.tol_feas.max(1e-9))
        .map_err(|e| CliError::Logic(e.to_string()))?;
    write_file(args.require("out")?, &write_embedding(&eta))?;
    println!(
        "solved iters={} objective={:.6} residual={:.2e} stop={:?} in {:.2}s",
        diag.iterations, diag.best_objective, diag.final_residual, diag.stop, seconds
    );
    Ok(())
}

pub fn cmd_export_socp(args: &Args) -> Result<(), CliError> {
    let problem = load_problem(args)?;
    let socp = export_socp(&problem);
    write_file(args.require("out")?, &socp.to_text())?;
    println!(
        "exported socp vars={} lin={} cones={}",
        socp.n_total,
        socp.lin.len(),
        socp.cones.len()
    );
    Ok(())
}

fn witness_of(args: &Args) -> Result<WitnessDomain, CliError> {
    match args.get("witness").unwrap_or("full") {
        "full" => Ok(WitnessDomain::Full),
        "reduced" => Ok(WitnessDomain::Reduced),
        other => Err(CliError::Usage(format!("--witness must be full or reduced, got `{other}`"))),
    }
}

pub fn cmd_embed_analytic(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    let witness = witness_of(args)?;
    let eps = args.get_f64("eps", 1e-2)?;
    let mut eta =
        faithful_embedding(&kb, witness, eps).map_err(|e| CliError::Logic(e.to_string()))?;
    if let Some(pad) = args.get("pad") {
        let target: usize =
            pad.parse().map_err(|_| CliError::Usage(format!("--pad: bad integer `{pad}`")))?;
        eta = pad_dimensions(&eta, target).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    write_file(args.require("out")?, &write_embedding(&eta))?;
    println!("embedded d={} s_world={}", eta.config.d, eta.config.s_world);
    Ok(())
}

pub fn cmd_check_faithfulness(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    let eta = read_embedding(&read_file(args.require("embedding")?)?, &kb.signature)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let report = audit_faithfulness(&eta, &kb).map_err(|e| CliError::Logic(e.to_string()))?;
    let as_json = json!({
        "kb_model": report.kb_model,
        "box_consistent": report.box_consistent,
        "kb_entailed": report.kb_entailed,
        "weakly_faithful": report.weakly_faithful,
        "violations": report.violations,
    });
    match args.get("report").unwrap_or("text") {
        "json" => println!("{}", serde_json::to_string_pretty(&as_json).unwrap()),
        _ => {
            println!("kb_model: {}", report.kb_model);
            println!("box_consistent: {}", report.box_consistent);
            println!("kb_entailed: {}", report.kb_entailed);
            println!("weakly_faithful: {}", report.weakly_faithful);
            for v in &report.violations {
                println!("violation: {v}");
            }
        }
    }
    if let Some(out) = args.get("out") {
        write_file(out, &serde_json::to_string_pretty(&as_json).unwrap())?;
    }
    if report.all_good() {
        Ok(())
    } else {
        Err(CliError::Logic("faithfulness check failed".into()))
    }
}

pub fn cmd_reason(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    let reasoner = Reasoner::new(&kb);
    if args.has("satisfiable") {
        println!("{}", if reasoner.is_satisfiable() { "sat" } else { "unsat" });
        return Ok(());
    }
    if let Some(query) = args.get("query") {
        let ax = parse_axiom_line(query, &kb.signature)
            .map_err(|e| CliError::Usage(format!("--query: {e}")))?;
        match reasoner.entails(&ax) {
            Ok(true) => println!("entailed"),
            Ok(false) => println!("not-entailed"),
            Err(_) => println!("unsat-kb"),
        }
        return Ok(());
    }
    if args.has("canonical") {
        let witness =
            if args.has("reduced") { WitnessDomain::Reduced } else { WitnessDomain::Full };
        let model = reasoner
            .canonical_model(witness)
            .map_err(|e| CliError::Logic(e.to_string()))?;
        println!("domain {}", model.n_elements());
        for e in 0..model.n_elements() {
            println!("element {}", model.element_label(e));
        }
        for (c, name) in kb.signature.concept_names().iter().enumerate() {
            let members: Vec<String> = model.concept_ext[c]
                .iter()
                .enumerate()
                .filter(|(_, v)| **v)
                .map(|(e, _)| model.element_label(e))
                .collect();
            println!("concept {name} {}", members.join(" "));
        }
        for (r, name) in kb.signature.role_names().iter().enumerate() {
            let pairs: Vec<String> = model.role_ext[r]
                .iter()
                .map(|(x, y)| {
                    format!("({},{})", model.element_label(*x as usize), model.element_label(*y as usize))
                })
                .collect();
            println!("role {name} {}", pairs.join(" "));
        }
        return Ok(());
    }
    Err(CliError::Usage("reason needs one of --query, --satisfiable, --canonical".into()))
}

fn parse_assertion_file(path: &str, kb: &KnowledgeBase) -> Result<Vec<Axiom>, CliError> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(
            parse_axiom_line(body, &kb.signature)
                .map_err(|e| CliError::Usage(format!("{path}: {e}")))?,
        );
    }
    Ok(out)
}

fn role_triples(axioms: &[Axiom]) -> Vec<RoleTriple> {
    axioms
        .iter()
        .filter_map(|ax| match ax {
            Axiom::RoleAssert { role, subject, object } => Some((*role, *subject, *object)),
            _ => None,
        })
        .collect()
}

fn eval_embedding(
    kb: &KnowledgeBase,
    eta: &BoxInterpretation,
    test: &[Axiom],
    extra_known: &[Vec<Axiom>],
    filter: &str,
    ks: &[usize],
    ties: TiePolicy,
) -> Result<EvalReport, CliError> {
    let mut known: BTreeSet<RoleTriple> = BTreeSet::new();
    let sources: Vec<&str> = filter.split(',').map(|s| s.trim()).collect();
    if sources.contains(&"train") {
        known.extend(role_triples(&kb.abox));
    }
    if sources.contains(&"test") {
        known.extend(role_triples(test));
    }
    if sources.contains(&"valid") {
        for extra in extra_known {
            known.extend(role_triples(extra));
        }
    }
    let individuals: Vec<u32> = (0..kb.signature.n_individuals() as u32).collect();
    let records = rank_filtered(eta, &role_triples(test), &known, &individuals, ties)
        .map_err(|e| CliError::Logic(e.to_string()))?;
    compute_metrics(records, ks).map_err(|e| CliError::Logic(e.to_string()))
}

fn report_json(report: &EvalReport, kb: &KnowledgeBase) -> serde_json::Value {
    json!({
        "mrr": report.mrr,
        "hits": report.hits.iter().map(|(k, v)| json!({"k": k, "value": v})).collect::<Vec<_>>(),
        "records": report.records.iter().map(|r| json!({
            "assertion": format!(
                "ra {} {} {}",
                kb.signature.role_name(r.role),
                kb.signature.individual_name(r.subject),
                kb.signature.individual_name(r.object)
            ),
            "direction": match r.direction {
                boxlite::eval::Direction::HeadCorrupted => "head",
                boxlite::eval::Direction::TailCorrupted => "tail",
            },
            "rank": r.filtered_rank,
            "score": r.score,
        })).collect::<Vec<_>>(),
    })
}

fn report_csv(report: &EvalReport, kb: &KnowledgeBase) -> String {
    let mut out = String::from("assertion,direction,rank,score\n");
    for r in &report.records {
        out.push_str(&format!(
            "ra {} {} {},{},{},{}\n",
            kb.signature.role_name(r.role),
            kb.signature.individual_name(r.subject),
            kb.signature.individual_name(r.object),
            match r.direction {
                boxlite::eval::Direction::HeadCorrupted => "head",
                boxlite::eval::Direction::TailCorrupted => "tail",
            },
            r.filtered_rank,
            r.score
        ));
    }
    out
}

fn tie_policy(args: &Args) -> Result<TiePolicy, CliError> {
    match args.get("ties").unwrap_or("optimistic") {
        "optimistic" => Ok(TiePolicy::Optimistic),
        "pessimistic" => Ok(TiePolicy::Pessimistic),
        other => Err(CliError::Usage(format!(
            "--ties must be optimistic or pessimistic, got `{other}`"
        ))),
    }
}

pub fn cmd_eval(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    let eta = read_embedding(&read_file(args.require("embedding")?)?, &kb.signature)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let test = parse_assertion_file(args.require("test")?, &kb)?;
    let mut extra = Vec::new();
    if let Some(valid) = args.get("valid") {
        extra.push(parse_assertion_file(valid, &kb)?);
    }
    let filter = args.get("filter").unwrap_or("train,valid,test").to_string();
    let ks = args.get_usize_list("ks", &[1, 3, 10])?;
    let report = eval_embedding(&kb, &eta, &test, &extra, &filter, &ks, tie_policy(args)?)?;
    let out = args.require("out")?;
    if out.ends_with(".csv") {
        write_file(out, &report_csv(&report, &kb))?;
    } else {
        write_file(out, &serde_json::to_string_pretty(&report_json(&report, &kb)).unwrap())?;
    }
    let hits: Vec<String> =
        report.hits.iter().map(|(k, v)| format!("h@{k}={v:.3}")).collect();
    println!("mrr={:.4} {}", report.mrr, hits.join(" "));
    Ok(())
}

pub fn cmd_sample(args: &Args) -> Result<(), CliError> {
    let abox_path = args.require("abox")?;
    let tbox_path = args.require("tbox")?;
    let abox_kb = parse_kb(&read_file(abox_path)?)
        .map_err(|e| CliError::Usage(format!("{abox_path}: {e}")))?;
    let tbox_dsl = read_file(tbox_path)?;
    let assertions: Vec<NamedAssertion> = abox_kb
        .abox
        .iter()
        .filter_map(|ax| match ax {
            Axiom::RoleAssert { role, subject, object } => Some((
                abox_kb.signature.role_name(*role).to_string(),
                abox_kb.signature.individual_name(*subject).to_string(),
                abox_kb.signature.individual_name(*object).to_string(),
            )),
            _ => None,
        })
        .collect();
    let cfg = SampleConfig {
        target_size: args.get_usize("k", 300)?,
        pf: args.get_f64("pf", 0.7)?,
        bf: args.get_f64("bf", 0.0)?,
        seed: args.get_seed("seed", 0)?,
    };
    let split_seed = args.get_seed("split-seed", 1)?;
    let retry = args.get_usize("retry", 10)?;
    let bundle = make_bundle(&assertions, &tbox_dsl, &cfg, split_seed, retry)
        .map_err(|e| CliError::Logic(e.to_string()))?;
    let dir = args.require("out-dir")?;
    let sig = &bundle.train_kb.signature;
    let lines = |axs: &[Axiom]| {
        axs.iter().map(|ax| AxiomDisplay(ax, sig).to_string() + "\n").collect::<String>()
    };
    write_file(&format!("{dir}/train.kb"), &bundle.train_kb.to_dsl())?;
    write_file(&format!("{dir}/valid.assertions"), &lines(&bundle.valid))?;
    write_file(&format!("{dir}/test.assertions"), &lines(&bundle.test))?;
    println!(
        "sampled train={} valid={} test={}",
        bundle.train_kb.abox.len(),
        bundle.valid.len(),
        bundle.test.len()
    );
    Ok(())
}

struct SweepPoint {
    lambdas: (f64, f64, f64),
    mrr: f64,
    h10: f64,
    solve_seconds: f64,
    dump: String,
}

pub fn cmd_sweep(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    let l1s = args.get_f64_list("l1-grid", &[args.get_f64("l1", 0.0)?])?;
    let l2s = args.get_f64_list("l2-grid", &[args.get_f64("l2", 0.0)?])?;
    let l3s = args.get_f64_list("l3-grid", &[args.get_f64("l3", 0.0)?])?;
    if l1s.is_empty() || l2s.is_empty() || l3s.is_empty() {
        return Err(CliError::Usage("lambda grids must be nonempty".into()));
    }
    let valid = match args.get("valid") {
        Some(path) => parse_assertion_file(path, &kb)?,
        None => Vec::new(),
    };
    let test = match args.get("test") {
        Some(path) => Some(parse_assertion_file(path, &kb)?),
        None => None,
    };
    let ks = args.get_usize_list("ks", &[1, 3, 10])?;
    let ties = tie_policy(args)?;
    let dir = args.require("out-dir")?.to_string();

    // Compile once; only objective weights change between points.
    let compile_started = Instant::now();
    let base = compile_from_args(&kb, args, (0.0, 0.0, 0.0))?;
    let compile_seconds = compile_started.elapsed().as_secs_f64();

    let mut triples = Vec::new();
    for &l1 in &l1s {
        for &l2 in &l2s {
            for &l3 in &l3s {
                triples.push((l1, l2, l3));
            }
        }
    }
    let opts = solve_options(args, &base)?;
    let jobs = args.get_usize("jobs", 1)?.max(1);

    let run_point = |lambdas: (f64, f64, f64)| -> Result<SweepPoint, CliError> {
        let mut problem = base.clone();
        problem.objective.lambda1 = lambdas.0;
        problem.objective.lambda2 = lambdas.1;
        problem.objective.lambda3 = lambdas.2;
        let started = Instant::now();
        let (z, _diag) = solve(&problem, &opts).map_err(|e| CliError::Logic(e.to_string()))?;
        let solve_seconds = started.elapsed().as_secs_f64();
        let eta = problem
            .extract_interpretation(&z, opts.tol_feas.max(1e-9))
            .map_err(|e| CliError::Logic(e.to_string()))?;
        let (mrr, h10) = if valid.is_empty() {
            (0.0, 0.0)
        } else {
            let report =
                eval_embedding(&kb, &eta, &valid, &[], "train,valid", &ks, ties)?;
            let h10 = report
                .hits
                .iter()
                .find(|(k, _)| *k == 10)
                .map(|(_, v)| *v)
                .unwrap_or(0.0);
            (report.mrr, h10)
        };
        Ok(SweepPoint { lambdas, mrr, h10, solve_seconds, dump: write_embedding(&eta) })
    };

    let mut points: Vec<SweepPoint> = Vec::with_capacity(triples.len());
    if jobs == 1 {
        for t in &triples {
            points.push(run_point(*t)?);
        }
    } else {
        let results: Vec<Result<SweepPoint, CliError>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in triples.chunks(triples.len().div_ceil(jobs)) {
                let run_point = &run_point;
                handles.push(scope.spawn(move || {
                    chunk.iter().map(|t| run_point(*t)).collect::<Vec<_>>()
                }));
            }
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        });
        for r in results {
            points.push(r?);
        }
    }

    // Selection: validation MRR, ties by H@10, then lexicographic λ.
    let mut best = 0usize;
    for i in 1..points.len() {
        let (a, b) = (&points[i], &points[best]);
        let better = (a.mrr, a.h10) > (b.mrr, b.h10)
            || ((a.mrr, a.h10) == (b.mrr, b.h10)
                && triple_key(a.lambdas) < triple_key(b.lambdas));
        if better {
            best = i;
        }
    }

    write_file(&format!("{dir}/best.embedding"), &points[best].dump)?;
    let mut test_report_json = serde_json::Value::Null;
    if let Some(test) = &test {
        let eta = read_embedding(&points[best].dump, &kb.signature)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let mut extra = Vec::new();
        if !valid.is_empty() {
            extra.push(valid.clone());
        }
        let report =
            eval_embedding(&kb, &eta, test, &extra, "train,valid,test", &ks, ties)?;
        test_report_json = report_json(&report, &kb);
        write_file(
            &format!("{dir}/report.json"),
            &serde_json::to_string_pretty(&test_report_json).unwrap(),
        )?;
    }
    let summary = json!({
        "compile_seconds": round2(compile_seconds),
        "solves": points.len(),
        "points": points.iter().map(|p| json!({
            "lambda1": p.lambdas.0,
            "lambda2": p.lambdas.1,
            "lambda3": p.lambdas.2,
            "valid_mrr": p.mrr,
            "valid_h10": p.h10,
            "solve_seconds": round2(p.solve_seconds),
        })).collect::<Vec<_>>(),
        "best": {
            "lambda1": points[best].lambdas.0,
            "lambda2": points[best].lambdas.1,
            "lambda3": points[best].lambdas.2,
        },
        "test_report": test_report_json,
    });
    write_file(&format!("{dir}/sweep.json"), &serde_json::to_string_pretty(&summary).unwrap())?;
    println!(
        "sweep points={} best=({}, {}, {}) compile={:.2}s",
        points.len(),
        points[best].lambdas.0,
        points[best].lambdas.1,
        points[best].lambdas.2,
        compile_seconds
    );
    Ok(())
}

fn triple_key(t: (f64, f64, f64)) -> (u64, u64, u64) {
    (t.0.to_bits(), t.1.to_bits(), t.2.to_bits())
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Report d_min values for a KB, mirroring the dimension corollaries.
pub fn cmd_dmin(args: &Args) -> Result<(), CliError> {
    let kb = load_kb(args)?;
    println!(
        "tbox {} kb {}",
        d_min(&kb.signature, DimBoundMode::Tbox),
        d_min(&kb.signature, DimBoundMode::Kb)
    );
    Ok(())
}
