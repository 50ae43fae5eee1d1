//! End-to-end tests of the command-line surface: exit codes, output
//! formats, and the sweep's compile-once behavior.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boxlite"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> TempDir {
        let dir = std::env::temp_dir().join(format!("boxlite-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }
    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
    fn write(&self, name: &str, content: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, content).unwrap();
        p
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

const FAMILY: &str = "\
ri inv(relative) relative
ri hasSibling relative
ri hasChild relative
ri hasParent relative
ri hasFather hasParent
ri hasMother hasParent
ri inv(spouse) spouse
ri inv(hasSibling) hasSibling
ri spouse relative
ci exists(inv(hasFather)) not(exists(inv(hasMother)))
";

#[test]
fn missing_kb_file_is_usage_error() {
    let out = run(&["reason", "--kb", "/nonexistent/path.kb", "--satisfiable"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_command_is_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reason_queries_and_satisfiability() {
    let tmp = TempDir::new("reason");
    let kb = tmp.write("family.kb", FAMILY);
    let out = run(&["reason", "--kb", &kb, "--satisfiable"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "sat");

    let out = run(&["reason", "--kb", &kb, "--query", "ri hasFather relative"]);
    assert_eq!(stdout(&out).trim(), "entailed");
    let out = run(&["reason", "--kb", &kb, "--query", "ri spouse hasParent"]);
    assert_eq!(stdout(&out).trim(), "not-entailed");

    let unsat = tmp.write("unsat.kb", "ci A not(B)\nca A a\nca B a\n");
    let out = run(&["reason", "--kb", &unsat, "--query", "ci A B"]);
    assert_eq!(stdout(&out).trim(), "unsat-kb");

    let out = run(&["reason", "--kb", &kb, "--canonical", "--reduced"]);
    let text = stdout(&out);
    assert!(text.starts_with("domain 14"), "{text}");
}

#[test]
fn analytic_embedding_round_trip_through_files() {
    let tmp = TempDir::new("embed");
    let kb = tmp.write("family.kb", FAMILY);
    let emb = tmp.path("family.embedding");
    let out = run(&[
        "embed-analytic", "--kb", &kb, "--witness", "reduced", "--eps", "0.01", "--out", &emb,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("d=112"));

    let out = run(&["check-faithfulness", "--kb", &kb, "--embedding", &emb, "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for flag in ["kb_model", "box_consistent", "kb_entailed", "weakly_faithful"] {
        assert_eq!(report[flag], serde_json::json!(true), "{flag}");
    }
}

#[test]
fn compile_solve_eval_pipeline() {
    let tmp = TempDir::new("pipeline");
    let kb = tmp.write(
        "tiny.kb",
        "concept A\nrole R\nindividual a\nindividual b\nindividual c\nci A exists(R)\nra R a b\nra R b c\nca A a\n",
    );
    let problem = tmp.path("problem.json");
    let out = run(&[
        "compile", "--kb", &kb, "--d", "7", "--s-world", "4", "--eps", "0.01", "--out", &problem,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let emb = tmp.path("solved.embedding");
    let out = run(&[
        "solve", "--problem", &problem, "--max-iters", "5000", "--tol-obj", "-0.0001",
        "--certified", "--seed", "3", "--out", &emb,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(Path::new(&emb).exists());

    let test = tmp.write("test.assertions", "ra R a c\n");
    let report = tmp.path("report.json");
    let out = run(&[
        "eval", "--kb", &kb, "--embedding", &emb, "--test", &test, "--ks", "1,3,10",
        "--out", &report,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(parsed["mrr"].as_f64().unwrap() > 0.0);

    let csv = tmp.path("report.csv");
    let out = run(&["eval", "--kb", &kb, "--embedding", &emb, "--test", &test, "--out", &csv]);
    assert_eq!(out.status.code(), Some(0));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("assertion,direction,rank,score"));

    let socp = tmp.path("out.socp");
    let out = run(&["export-socp", "--problem", &problem, "--out", &socp]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&socp).unwrap().starts_with("boxlite-socp v1"));
}

#[test]
fn solve_with_analytic_warm_start_converges_immediately() {
    let tmp = TempDir::new("warm");
    let kb = tmp.write("family.kb", FAMILY);
    let problem = tmp.path("problem.json");
    let out = run(&[
        "compile", "--kb", &kb, "--d", "112", "--s-world", "4", "--eps", "0.01", "--out", &problem,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let emb = tmp.path("warm.embedding");
    let out = run(&[
        "solve", "--problem", &problem, "--warm-start", "analytic", "--kb", &kb,
        "--witness", "reduced", "--max-iters", "10", "--certified", "--out", &emb,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("residual=0.00e0"), "{text}");
}

fn family_abox_text() -> String {
    let mut lines = String::new();
    for fam in 0..14 {
        let (f, m) = (format!("f{fam}"), format!("m{fam}"));
        lines.push_str(&format!("ra spouse {f} {m}\n"));
        for j in 0..2 {
            let k = format!("k{fam}x{j}");
            lines.push_str(&format!("ra hasFather {k} {f}\n"));
            lines.push_str(&format!("ra hasMother {k} {m}\n"));
            lines.push_str(&format!("ra hasChild {f} {k}\n"));
        }
        lines.push_str(&format!("ra hasSibling k{fam}x0 k{fam}x1\n"));
        if fam > 0 {
            lines.push_str(&format!("ra spouse k{fam}x0 k{}x1\n", fam - 1));
        }
    }
    lines
}

#[test]
fn sample_then_sweep_compiles_once() {
    let tmp = TempDir::new("sweep");
    let abox = tmp.write("family.abox", &family_abox_text());
    let tbox = tmp.write("family.tbox", FAMILY);
    let bundle = tmp.path("bundle");
    let out = run(&[
        "sample", "--abox", &abox, "--tbox", &tbox, "--k", "40", "--seed", "9",
        "--split-seed", "10", "--out-dir", &bundle,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["train.kb", "valid.assertions", "test.assertions"] {
        assert!(Path::new(&format!("{bundle}/{f}")).exists(), "{f}");
    }

    let sweep = tmp.path("sweeprun");
    let out = run(&[
        "sweep", "--kb", &format!("{bundle}/train.kb"), "--d", "16", "--s-world", "1",
        "--eps", "0.01", "--l1-grid", "0,0.001", "--l2-grid", "0.1,0.3", "--l3-grid", "0.001",
        "--valid", &format!("{bundle}/valid.assertions"),
        "--test", &format!("{bundle}/test.assertions"),
        "--max-iters", "150", "--seed", "4", "--out-dir", &sweep,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{sweep}/sweep.json")).unwrap())
            .unwrap();
    // One compile, four solves, timing columns present.
    assert_eq!(summary["solves"], serde_json::json!(4));
    assert!(summary["compile_seconds"].is_number());
    assert_eq!(summary["points"].as_array().unwrap().len(), 4);
    for p in summary["points"].as_array().unwrap() {
        assert!(p["solve_seconds"].is_number());
    }
    assert!(summary["test_report"]["mrr"].as_f64().unwrap() >= 0.0);
    assert!(Path::new(&format!("{sweep}/best.embedding")).exists());
    assert!(Path::new(&format!("{sweep}/report.json")).exists());

    // Determinism: repeating the sweep with parallel workers reproduces
    // the selection and the chosen embedding bitwise.
    let sweep2 = tmp.path("sweeprun2");
    let out2 = run(&[
        "sweep", "--kb", &format!("{bundle}/train.kb"), "--d", "16", "--s-world", "1",
        "--eps", "0.01", "--l1-grid", "0,0.001", "--l2-grid", "0.1,0.3", "--l3-grid", "0.001",
        "--valid", &format!("{bundle}/valid.assertions"),
        "--test", &format!("{bundle}/test.assertions"),
        "--max-iters", "150", "--seed", "4", "--jobs", "2", "--out-dir", &sweep2,
    ]);
    assert_eq!(out2.status.code(), Some(0));
    let summary2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{sweep2}/sweep.json")).unwrap())
            .unwrap();
    assert_eq!(summary["best"], summary2["best"]);
    assert_eq!(
        std::fs::read_to_string(format!("{sweep}/best.embedding")).unwrap(),
        std::fs::read_to_string(format!("{sweep2}/best.embedding")).unwrap()
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = TempDir::new("config");
    let kb = tmp.write("family.kb", FAMILY);
    let cfg = tmp.write("run.conf", &format!("kb {kb}\nwitness full\neps 0.01\n"));
    let emb = tmp.path("from-config.embedding");
    // --witness reduced overrides the config's full.
    let out = run(&[
        "embed-analytic", "--config", &cfg, "--witness", "reduced", "--out", &emb,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("d=112"));
}

#[test]
fn unsat_kb_is_logical_failure() {
    let tmp = TempDir::new("unsat");
    let kb = tmp.write("unsat.kb", "ci A not(B)\nca A a\nca B a\n");
    let emb = tmp.path("x.embedding");
    let out = run(&["embed-analytic", "--kb", &kb, "--out", &emb]);
    assert_eq!(out.status.code(), Some(1));
}
