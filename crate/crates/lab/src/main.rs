use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blowup_core::field::Grid1D;
use blowup_core::inequality::{
    constant_chain, counterexample_ratio, phi_negative_power_integral,
    randomized_weighted_poincare_test,
};
use blowup_lab::registry::REGISTRY;
use blowup_lab::{list_experiments, parse_config, reproduce, run, write_outputs, LabError, RunOutput, Verdict};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "blowup-lab", version, about = "Run blow-up experiments and the inequality lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments from config files.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Output root; each run writes into `<DIR>/<id>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run registered experiments by id, or `all`.
    Reproduce {
        id: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List registered experiments.
    List,
    /// Inequality-lab computations, printed as JSON.
    Ineq {
        #[command(subcommand)]
        what: Ineq,
        #[arg(long, global = true, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Ineq {
    /// Integral of sin^(-alpha) over (0, pi).
    Alpha {
        alpha: f64,
        #[arg(long, default_value_t = 12)]
        levels: usize,
    },
    /// Counterexample ratio for each epsilon.
    Ratio {
        #[arg(default_values_t = [1e-2, 1e-3, 1e-4])]
        eps: Vec<f64>,
    },
    /// Constant chain and threshold K on (0, length).
    Chain {
        p: f64,
        #[arg(long, default_value_t = PI)]
        length: f64,
    },
    /// Randomized weighted Poincare test.
    Fuzz {
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = PI)]
        length: f64,
    },
}

const USAGE: u8 = 2;
const SOLVER: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (id, expect, description) in list_experiments() {
                let expect = format!("{expect:?}").to_lowercase();
                println!("{id:<4} {expect:<10} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { configs, out, jobs } => {
            let mut parsed = Vec::new();
            for path in &configs {
                let text = match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
                };
                match parse_config(&text) {
                    Ok(cfg) => parsed.push(cfg),
                    Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
                }
            }
            let results = in_pool(jobs, || {
                parsed
                    .par_iter()
                    .map(|cfg| {
                        let dir = match &out {
                            Some(root) => root.join(&cfg.id),
                            None => PathBuf::from(cfg.out_dir()),
                        };
                        run(cfg).map(|o| vec![(o, dir)])
                    })
                    .collect()
            });
            finish(results)
        }
        Command::Reproduce { id, out, jobs } => {
            let ids: Vec<&str> = if id.eq_ignore_ascii_case("all") {
                REGISTRY.iter().map(|e| e.id).collect()
            } else {
                match blowup_lab::registry::entry(&id) {
                    Ok(e) => vec![e.id],
                    Err(e) => return fail(USAGE, e.to_string()),
                }
            };
            let results = in_pool(jobs, || {
                ids.par_iter()
                    .map(|id| {
                        reproduce(id).map(|outs| {
                            outs.into_iter()
                                .map(|o| {
                                    let dir = out.join(&o.report.id);
                                    (o, dir)
                                })
                                .collect()
                        })
                    })
                    .collect()
            });
            finish(results)
        }
        Command::Ineq { what, seed } => ineq(what, seed),
    }
}

fn fail(code: u8, message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

type Batch = Vec<Result<Vec<(RunOutput, PathBuf)>, LabError>>;

fn in_pool(jobs: usize, f: impl FnOnce() -> Batch + Send) -> Batch {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

fn finish(results: Batch) -> ExitCode {
    let mut code = 0u8;
    for r in results {
        match r {
            Err(e) => {
                let c = if matches!(e, LabError::Config(_) | LabError::UnknownExperiment(_)) { USAGE } else { SOLVER };
                eprintln!("error: {e}");
                code = code.max(c);
            }
            Ok(outs) => {
                for (o, dir) in outs {
                    if let Err(e) = write_outputs(&o, &dir) {
                        eprintln!("error: {e}");
                        code = code.max(SOLVER);
                        continue;
                    }
                    summarize(&o, &dir);
                    code = code.max(o.report.exit_code() as u8);
                }
            }
        }
    }
    ExitCode::from(code)
}

fn summarize(o: &RunOutput, dir: &Path) {
    let r = &o.report;
    let verdict = match &r.verdict {
        Verdict::Completed => format!("completed at t = {}", r.final_t),
        Verdict::Blowup { t_star, trigger, .. } => format!("blowup at t* = {t_star:.6} ({trigger})"),
        Verdict::Failed { reason } => format!("failed: {reason}"),
    };
    let held = r.check_results.iter().filter(|c| c.holds).count();
    println!(
        "{:<13} {verdict}; checks {held}/{}; expectation {}; {}",
        r.id,
        r.check_results.len(),
        if r.expectation_met { "met" } else { "NOT met" },
        dir.display()
    );
    for c in r.check_results.iter().filter(|c| !c.holds) {
        println!("  check {} violated (margin {:?} at t = {:?})", c.name, c.worst_margin, c.worst_t);
    }
}

fn ineq(what: Ineq, seed: u64) -> ExitCode {
    let bounded = |length: f64| Grid1D::bounded(0.0, length, 64);
    let json = match what {
        Ineq::Alpha { alpha, levels } => phi_negative_power_integral(alpha, levels).map(|r| serde_json::to_string_pretty(&r)),
        Ineq::Ratio { eps } => eps
            .iter()
            .map(|&e| counterexample_ratio(e))
            .collect::<Result<Vec<_>, _>>()
            .map(|r| serde_json::to_string_pretty(&r)),
        Ineq::Chain { p, length } => bounded(length)
            .and_then(|g| constant_chain(p, &g))
            .map(|r| serde_json::to_string_pretty(&r)),
        Ineq::Fuzz { p, trials, length } => {
            let r = bounded(length)
                .and_then(|g| constant_chain(p, &g))
                .and_then(|c| randomized_weighted_poincare_test(&c, length, trials, seed));
            match r {
                Ok(r) => {
                    println!("{}", serde_json::to_string_pretty(&r).expect("serializes"));
                    return if r.holds { ExitCode::SUCCESS } else { ExitCode::from(1) };
                }
                Err(e) => return fail(USAGE, e.to_string()),
            }
        }
    };
    match json {
        Ok(s) => {
            println!("{}", s.expect("serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(USAGE, e.to_string()),
    }
}
