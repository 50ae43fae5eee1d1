mod args;
mod commands;

use args::Args;
use commands::CliError;

const USAGE: &str = "\
boxlite <command> [--flags]

Commands:
  compile             --kb FILE [--d N --s-world X --eps X --l1 X --l2 X --l3 X
                      --negatives asserted|entailment-aware] --out problem.json
  solve               --problem FILE [--max-iters N --tol-feas X --tol-obj X
                      --step-c X --passes N --seed S --certified
                      --warm-start FILE|analytic [--kb FILE --witness full|reduced]]
                      --out embedding.dump
  export-socp         --problem FILE --out socp.txt
  embed-analytic      --kb FILE [--witness full|reduced --eps X --pad D] --out FILE
  check-faithfulness  --kb FILE --embedding FILE [--report text|json --out FILE]
  reason              --kb FILE (--query \"axiom\" | --satisfiable | --canonical [--reduced])
  eval                --kb FILE --embedding FILE --test FILE [--valid FILE
                      --filter train,valid,test --ks 1,3,10
                      --ties optimistic|pessimistic] --out report.json|.csv
  sample              --abox FILE --tbox FILE --k N [--pf X --bf X --seed S
                      --split-seed S --retry N] --out-dir DIR
  sweep               --kb FILE [--d N --l1-grid a,b --l2-grid .. --l3-grid ..
                      --valid FILE --test FILE --jobs N + solve flags] --out-dir DIR
  d-min               --kb FILE

Common: --config FILE loads `key value` lines; explicit flags override.
Env: BOXLITE_SEED is the seed fallback.";

const SWITCHES: &[&str] = &["satisfiable", "canonical", "reduced", "certified"];

fn run() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = argv.first() else {
        eprintln!("{USAGE}");
        return Err(CliError::Usage("missing command".into()));
    };
    let args = Args::parse(&argv[1..], SWITCHES)?;
    match command.as_str() {
        "compile" => commands::cmd_compile(&args),
        "solve" => commands::cmd_solve(&args),
        "export-socp" => commands::cmd_export_socp(&args),
        "embed-analytic" => commands::cmd_embed_analytic(&args),
        "check-faithfulness" => commands::cmd_check_faithfulness(&args),
        "reason" => commands::cmd_reason(&args),
        "eval" => commands::cmd_eval(&args),
        "sample" => commands::cmd_sample(&args),
        "sweep" => commands::cmd_sweep(&args),
        "d-min" => commands::cmd_dmin(&args),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => {
            eprintln!("{USAGE}");
            Err(CliError::Usage(format!("unknown command `{other}`")))
        }
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    }
}
