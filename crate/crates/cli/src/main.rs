use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use wmm_core::laws::{all_laws, LawReport};
use wmm_core::litmus::{load_litmus, run_corpus, run_test, CorpusSummary, Report, RunOptions};
use wmm_core::model::{check_hierarchy, well_behaved_check, EffOracle, Universe};
use wmm_core::semantics::{DEFAULT_CAP, DEFAULT_UNROLL};
use wmm_core::{Backend, Error, MemoryModel};

#[derive(Parser)]
#[command(name = "wmm", version, about = "Weak memory model explorer and litmus-test runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the model named in each test, or restrict a check to one model.
    #[arg(long, global = true)]
    model: Option<MemoryModel>,

    /// pseq, pipeline or sb.
    #[arg(long, global = true, default_value = "pseq")]
    backend: Backend,

    /// Loop unrolling bound.
    #[arg(long, global = true, default_value_t = DEFAULT_UNROLL)]
    unroll: usize,

    /// Maximum number of configurations to explore per test.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,

    /// Values 0..N for the effect oracle.
    #[arg(long, global = true, default_value_t = 2)]
    domain: u32,

    #[arg(long, global = true)]
    json: bool,

    /// Seed for sampled law checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Report 0 ms for every test so output is reproducible.
    #[arg(long, global = true)]
    no_timing: bool,

    /// Random instances per sampled law.
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,

    /// Action universe for relation-level checks.
    #[arg(long, global = true, value_enum, default_value_t = UniverseKind::Common)]
    universe: UniverseKind,
}

#[derive(Subcommand)]
enum Command {
    /// Run one litmus test.
    Run { file: PathBuf },
    /// Run every `.litmus` file in a directory.
    Corpus { dir: PathBuf },
    /// Check the algebraic laws.
    Laws,
    /// Check refinement along the model hierarchy.
    Hierarchy,
    /// Check that each model's reordering relation is well behaved.
    Wellbehaved,
}

#[derive(Clone, Copy, ValueEnum)]
enum UniverseKind {
    Common,
    Extended,
}

impl Cli {
    fn run_options(&self) -> RunOptions {
        RunOptions {
            backend: self.backend,
            model: self.model,
            unroll: self.unroll,
            cap: self.cap,
            timing: !self.no_timing,
        }
    }

    fn universe(&self) -> Universe {
        match self.universe {
            UniverseKind::Common => Universe::common(),
            UniverseKind::Extended => Universe::extended(),
        }
    }
}

fn report_line(r: &Report) -> String {
    let status = match (&r.error, r.matches) {
        (Some(_), _) => "ERROR",
        (None, true) => "PASS",
        (None, false) => "FAIL",
    };
    let mut line = format!("{status:<5} {} [{}/{}]", r.name, r.model, r.backend);
    match (&r.error, r.verdict) {
        (Some(e), _) => line.push_str(&format!(": {e}")),
        (None, Some(v)) => line.push_str(&format!(
            ": {v}, expected {} ({} states, {} ms)",
            r.expect, r.states, r.millis
        )),
        (None, None) => {}
    }
    if let Some(w) = &r.witness {
        let shown: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
        line.push_str(&format!("\n      witness: {}", shown.join(" ")));
    }
    line
}

fn report_code(r: &Report) -> u8 {
    if r.cap_exceeded() {
        3
    } else if r.matches {
        0
    } else {
        1
    }
}

fn json_out(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn cmd_run(cli: &Cli, file: &PathBuf) -> u8 {
    let test = match load_litmus(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return 2;
        }
    };
    let r = run_test(&test, &cli.run_options());
    if cli.json {
        println!("{}", json_out(&r));
    } else {
        println!("{}", report_line(&r));
    }
    report_code(&r)
}

fn cmd_corpus(cli: &Cli, dir: &PathBuf) -> u8 {
    let summary: CorpusSummary = match run_corpus(dir, &cli.run_options(), cli.jobs) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    for fe in &summary.file_errors {
        eprintln!("{}: {}", fe.path.display(), fe.error);
    }
    if cli.json {
        println!("{}", json_out(&summary.reports));
    } else {
        for r in &summary.reports {
            println!("{}", report_line(r));
        }
        println!(
            "{} tests: {} passed, {} failed, {} unreadable",
            summary.reports.len(),
            summary.passed(),
            summary.failed(),
            summary.file_errors.len()
        );
    }
    summary.exit_code() as u8
}

fn law_json(r: &LawReport) -> serde_json::Value {
    json!({
        "law": r.law,
        "model": r.model.map(|m| m.keyword()),
        "checked": r.checked,
        "failures": r.failures,
        "examples": r.examples,
    })
}

fn cmd_laws(cli: &Cli) -> Result<u8, Error> {
    let universe = cli.universe();
    let mut reports = all_laws(&universe.actions, cli.samples, cli.seed)?;
    if let Some(m) = cli.model {
        reports.retain(|r| r.model.is_none_or(|rm| rm == m));
    }
    if cli.json {
        let v: Vec<_> = reports.iter().map(law_json).collect();
        println!("{}", json_out(&v));
    } else {
        for r in &reports {
            println!("{} {r}", if r.ok() { "ok  " } else { "FAIL" });
            for e in &r.examples {
                println!("      {e}");
            }
        }
    }
    Ok(if reports.iter().all(LawReport::ok) { 0 } else { 1 })
}

/// Violations printed per failing step.
const SHOW: usize = 5;

fn cmd_hierarchy(cli: &Cli) -> u8 {
    let universe = cli.universe();
    let steps = check_hierarchy(&universe.actions, EffOracle { domain: cli.domain });
    if cli.json {
        let v: Vec<_> = steps
            .iter()
            .map(|s| {
                json!({
                    "weaker": s.weaker,
                    "stronger": s.stronger,
                    "violations": s.violations.len(),
                    "examples": s.violations.iter().take(SHOW).map(|v| v.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", json_out(&v));
    } else {
        println!("{} actions", universe.actions.len());
        for s in &steps {
            let status = if s.violations.is_empty() { "ok  " } else { "FAIL" };
            println!("{status} {} refines to {}: {} violations", s.weaker, s.stronger, s.violations.len());
            for v in s.violations.iter().take(SHOW) {
                println!("      {v}");
            }
        }
    }
    u8::from(steps.iter().any(|s| !s.violations.is_empty()))
}

fn cmd_wellbehaved(cli: &Cli) -> u8 {
    let universe = cli.universe();
    let models: Vec<MemoryModel> = match cli.model {
        Some(m) => vec![m],
        None => MemoryModel::WELL_BEHAVED.to_vec(),
    };
    let mut bad = false;
    let mut out = Vec::new();
    for m in models {
        let rep = well_behaved_check(&m, &universe.actions);
        bad |= !rep.ok();
        if cli.json {
            out.push(json!({
                "model": m.keyword(),
                "checked": rep.checked_pairs,
                "violations": rep.violations.len(),
                "examples": rep.violations.iter().take(SHOW).map(|v| v.to_string()).collect::<Vec<_>>(),
            }));
        } else {
            let status = if rep.ok() { "ok  " } else { "FAIL" };
            println!("{status} {m}: {} pairs, {} violations", rep.checked_pairs, rep.violations.len());
            for v in rep.violations.iter().take(SHOW) {
                println!("      {v}");
            }
        }
    }
    if cli.json {
        println!("{}", json_out(&out));
    }
    u8::from(bad)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Sizes the global worker pool used by the relation-level checks.
        std::env::set_var("RAYON_NUM_THREADS", cli.jobs.to_string());
    }
    let code = match &cli.command {
        Command::Run { file } => cmd_run(&cli, file),
        Command::Corpus { dir } => cmd_corpus(&cli, dir),
        Command::Laws => cmd_laws(&cli).unwrap_or_else(|e| {
            eprintln!("{e}");
            2
        }),
        Command::Hierarchy => cmd_hierarchy(&cli),
        Command::Wellbehaved => cmd_wellbehaved(&cli),
    };
    ExitCode::from(code)
}
