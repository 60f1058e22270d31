use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use tvprox_bench::config::ExperimentConfig;
use tvprox_bench::experiment::{reanalyze, run_experiment, SUMMARY_FILE};
use tvprox_bench::report::render;
use tvprox_bench::trace_csv::TraceTable;
use tvprox_bench::BenchError;

#[derive(Parser)]
#[command(name = "tvprox-bench", version, about = "Experiments for the online inexact proximal-gradient solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides both the problem and solver seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the problem section of the configuration, with defaults filled in.
    MakeProblem,
    /// Run one experiment.
    Run,
    /// Run the configured grid, one directory per point.
    Sweep,
    /// Re-evaluate the bounds on an existing trace.
    Bounds {
        #[arg(long)]
        trace: PathBuf,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig, BenchError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| BenchError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.problem.set_seed(seed);
        cfg.solver.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn execute(cli: &Cli) -> Result<i32, BenchError> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::MakeProblem => {
            #[derive(serde::Serialize)]
            struct Doc<'a> {
                problem: &'a tvprox_bench::config::ProblemSpec,
            }
            cfg.problem.build()?;
            let text = toml::to_string_pretty(&Doc { problem: &cfg.problem })
                .map_err(|e| BenchError::Config(e.to_string()))?;
            match &cli.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
                    let path = dir.join("problem.toml");
                    std::fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Run => {
            let outcome = run_experiment(&cfg)?;
            let summary = outcome.write(&out_dir(cli, &cfg))?;
            if !cli.quiet {
                print!("{}", render(&summary));
            }
            Ok(summary.exit_code)
        }
        Command::Sweep => {
            let root = out_dir(cli, &cfg);
            let grid = cfg.sweep_grid();
            let results: Vec<(String, Result<i32, BenchError>)> = grid
                .par_iter()
                .map(|(label, c)| {
                    let dir = root.join(label);
                    let res = run_experiment(c).and_then(|o| o.write(&dir)).map(|s| s.exit_code);
                    (label.clone(), res)
                })
                .collect();
            let mut code = 0;
            for (label, res) in results {
                let c = match &res {
                    Ok(c) => *c,
                    Err(e) => {
                        log::error!("{label}: {e}");
                        e.exit_code()
                    }
                };
                if !cli.quiet {
                    println!("{label}: exit {c}");
                }
                code = code.max(c);
            }
            Ok(code)
        }
        Command::Bounds { trace } => {
            let table = TraceTable::read_file(trace)?;
            let outcome = reanalyze(&cfg, &table)?;
            let summary = outcome.summary();
            if let Some(dir) = &cli.out {
                write_summary(dir, &summary)?;
            }
            if !cli.quiet {
                print!("{}", render(&summary));
            }
            Ok(summary.exit_code)
        }
    }
}

fn write_summary(dir: &Path, summary: &tvprox_bench::experiment::SummaryReport) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let path = dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(summary).map_err(|e| BenchError::Trace(e.to_string()))?;
    std::fs::write(&path, json + "\n").map_err(|e| BenchError::io(&path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn };
    env_logger::Builder::new().filter_level(level).init();
    let code = match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
