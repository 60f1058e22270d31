//! generator → solver run(s) → analysis → trace CSV + summary.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tvprox::analysis::{
    error_aggregates, evaluate_regret_bounds, evaluate_tracking_bounds, regret_series,
    solve_optima_path, tracking_series, BoundSummary, DriftLevels, RegretOptions, TrackingSeries,
};
use tvprox::problem::{problem_constants, DomainSamples};
use tvprox::solver::{run, RngProvenance};
use tvprox::{BoundReport, OptimaPath, Problem, ProblemConstants, RunTrace, SolverConfig};

use crate::config::ExperimentConfig;
use crate::trace_csv::{Derived, TraceTable, TRACE_SCHEMA_VERSION};
use crate::BenchError;

pub const TRACE_FILE: &str = "trace.csv";
pub const BASELINE_FILE: &str = "baseline.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// One analyzed solver run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub label: String,
    pub trace: RunTrace,
    /// Set when the run stopped early; the trace holds the completed steps.
    pub error: Option<String>,
    pub tracking: Option<TrackingSeries<f64>>,
    pub regret: Option<Vec<f64>>,
    pub report: BoundReport,
    pub levels: Option<DriftLevels<f64>>,
}

impl RunOutcome {
    pub fn table(&self) -> TraceTable {
        TraceTable::from_records(
            &self.trace.records,
            Derived {
                tracking: self.tracking.as_ref(),
                regret: self.regret.as_deref(),
                bounds: Some(&self.report),
            },
        )
    }

    /// Mean of the running-average tracking error over the final quarter.
    pub fn plateau(&self) -> Option<f64> {
        let ra = &self.tracking.as_ref()?.running_average;
        let tail = &ra[ra.len() - (ra.len() / 4).max(1)..];
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }

    pub fn bounds_hold(&self) -> bool {
        self.error.is_none() && self.report.all_satisfied()
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub problem: Problem,
    pub constants: ProblemConstants,
    pub path: OptimaPath,
    pub inexact: RunOutcome,
    pub baseline: Option<RunOutcome>,
}

impl ExperimentOutcome {
    pub fn runs(&self) -> impl Iterator<Item = &RunOutcome> {
        std::iter::once(&self.inexact).chain(self.baseline.as_ref())
    }

    /// 0 when every run finished with all applicable bounds satisfied, 1 on a
    /// violated bound, 3 when a run aborted.
    pub fn exit_code(&self) -> i32 {
        if self.runs().any(|r| r.error.is_some()) {
            3
        } else if self.runs().all(RunOutcome::bounds_hold) {
            0
        } else {
            1
        }
    }
}

/// Problem-level constants for `α`, with `D` and `R` when every stage is constrained.
pub fn constants_for(problem: &Problem, cfg: &ExperimentConfig, alpha: f64) -> Result<ProblemConstants, BenchError> {
    let domain = DomainSamples::Random {
        per_stage: cfg.analysis.domain_samples,
        seed: cfg.analysis.domain_seed,
        include_vertices: true,
    };
    let domain = problem.all_constrained().then_some(&domain);
    Ok(problem_constants(problem, alpha, domain)?)
}

/// Runs the configured experiment; solver failures are captured in the outcome.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, BenchError> {
    let problem = cfg.problem.build()?;
    let solver = cfg.solver_config(&problem)?;
    let constants = constants_for(&problem, cfg, solver.step_size)?;
    let path = solve_optima_path(&problem, solver.horizon, cfg.analysis.optimum_tolerance)?;
    let inexact = execute(&problem, cfg, &solver, &path, &constants, "inexact")?;
    let baseline = if cfg.solver.baseline {
        let exact = SolverConfig::exact(solver.step_size, solver.horizon, solver.x0.clone());
        Some(execute(&problem, cfg, &exact, &path, &constants, "baseline")?)
    } else {
        None
    };
    Ok(ExperimentOutcome {
        config: cfg.clone(),
        config_hash: cfg.hash()?,
        problem,
        constants,
        path,
        inexact,
        baseline,
    })
}

fn execute(
    problem: &Problem,
    cfg: &ExperimentConfig,
    solver: &SolverConfig,
    path: &OptimaPath,
    constants: &ProblemConstants,
    label: &str,
) -> Result<RunOutcome, BenchError> {
    match run(problem, solver) {
        Ok(trace) => analyze(problem, cfg, path, constants, trace, label),
        Err(failure) => {
            log::error!("{label} run: {}", failure.error);
            Ok(RunOutcome {
                label: label.to_owned(),
                trace: failure.trace,
                error: Some(failure.error.to_string()),
                tracking: None,
                regret: None,
                report: BoundReport { bounds: Vec::new() },
                levels: None,
            })
        }
    }
}

/// Tracking, regret and the configured bounds for a completed trace.
pub fn analyze(
    problem: &Problem,
    cfg: &ExperimentConfig,
    path: &OptimaPath,
    constants: &ProblemConstants,
    trace: RunTrace,
    label: &str,
) -> Result<RunOutcome, BenchError> {
    let tracking = tracking_series(&trace, path)?;
    let regret = regret_series(problem, &trace, path)?;
    let levels = DriftLevels::measured(&trace, path);
    let aggregates = error_aggregates(&trace);
    let options = RegretOptions {
        use_diameter: cfg.analysis.regret_use_diameter,
    };
    let mut report = evaluate_tracking_bounds(&trace, path, constants, Some(levels))?
        .merge(evaluate_regret_bounds(&trace, path, constants, &aggregates, &regret, options)?);
    report.bounds.retain(|b| cfg.wants(b.kind));
    Ok(RunOutcome {
        label: label.to_owned(),
        trace,
        error: None,
        tracking: Some(tracking),
        regret: Some(regret),
        report,
        levels: Some(levels),
    })
}

/// Re-analyzes trace rows produced by `cfg` (the `bounds` subcommand).
pub fn reanalyze(cfg: &ExperimentConfig, table: &TraceTable) -> Result<ExperimentOutcome, BenchError> {
    let problem = cfg.problem.build()?;
    let mut solver = cfg.solver_config(&problem)?;
    let records = table.records();
    if records.is_empty() {
        return Err(BenchError::Trace("trace has no data rows".into()));
    }
    if records.iter().enumerate().any(|(i, r)| r.k != i + 1) || table.dimension != problem.dimension() {
        return Err(BenchError::Trace("trace rows do not match the configured problem".into()));
    }
    solver.horizon = records.len();
    let mut x0 = solver.x0.clone();
    let mut repaired = false;
    if let Some(set) = problem.stages()[0].nonsmooth.set() {
        if !set.contains(&x0) {
            x0 = set.project(&x0)?;
            repaired = true;
        }
    }
    let trace = RunTrace {
        config: solver.clone(),
        x0,
        x0_repaired: repaired,
        records,
        rng: RngProvenance {
            algorithm: tvprox::solver::RNG_ALGORITHM.to_owned(),
            seed: solver.seed,
        },
    };
    let constants = constants_for(&problem, cfg, solver.step_size)?;
    let path = solve_optima_path(&problem, solver.horizon, cfg.analysis.optimum_tolerance)?;
    let inexact = analyze(&problem, cfg, &path, &constants, trace, "trace")?;
    Ok(ExperimentOutcome {
        config: cfg.clone(),
        config_hash: cfg.hash()?,
        problem,
        constants,
        path,
        inexact,
        baseline: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub steps: usize,
    pub rng: RngProvenance,
    pub x0_repaired: bool,
    pub error: Option<String>,
    pub final_tracking_error: Option<f64>,
    pub running_average_plateau: Option<f64>,
    pub final_regret: Option<f64>,
    pub levels: Option<DriftLevels<f64>>,
    pub bounds_satisfied: bool,
    pub bounds: Vec<BoundSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSummary {
    pub dimension: usize,
    pub horizon: usize,
    pub step_size: f64,
    pub lipschitz: f64,
    pub strong_convexity: f64,
    pub rho: f64,
    pub beta: f64,
    pub diameter: Option<f64>,
    pub subgradient_bound: Option<f64>,
    pub subgradient_bound_sample_based: bool,
    pub max_sigma: f64,
    pub path_length: f64,
}

/// Summary document written next to the trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub trace_schema: u32,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub constants: ConstantsSummary,
    pub runs: Vec<RunSummary>,
    pub exit_code: i32,
}

impl ExperimentOutcome {
    pub fn summary(&self) -> SummaryReport {
        let c = &self.constants;
        let constants = ConstantsSummary {
            dimension: self.problem.dimension(),
            horizon: self.path.horizon(),
            step_size: c.step_size,
            lipschitz: c.lipschitz,
            strong_convexity: c.strong_convexity,
            rho: c.rho,
            beta: c.beta,
            diameter: c.diameter,
            subgradient_bound: c.subgradient_bound.map(|d| d.value),
            subgradient_bound_sample_based: c.subgradient_bound.is_some_and(|d| d.sample_based),
            max_sigma: self.path.max_sigma(),
            path_length: *self.path.path_length.last().unwrap_or(&0.0),
        };
        let runs = self
            .runs()
            .map(|r| RunSummary {
                label: r.label.clone(),
                steps: r.trace.len(),
                rng: r.trace.rng.clone(),
                x0_repaired: r.trace.x0_repaired,
                error: r.error.clone(),
                final_tracking_error: r.tracking.as_ref().and_then(|t| t.error.last().copied()),
                running_average_plateau: r.plateau(),
                final_regret: r.regret.as_ref().and_then(|v| v.last().copied()),
                levels: r.levels,
                bounds_satisfied: r.bounds_hold(),
                bounds: r.report.summary(),
            })
            .collect();
        SummaryReport {
            trace_schema: TRACE_SCHEMA_VERSION,
            config_hash: self.config_hash.clone(),
            config: self.config.clone(),
            constants,
            runs,
            exit_code: self.exit_code(),
        }
    }

    /// Writes `trace.csv`, `baseline.csv` (when run) and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<SummaryReport, BenchError> {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
        self.inexact.table().write_file(&dir.join(TRACE_FILE))?;
        if let Some(b) = &self.baseline {
            b.table().write_file(&dir.join(BASELINE_FILE))?;
        }
        let summary = self.summary();
        let path = dir.join(SUMMARY_FILE);
        let json = serde_json::to_string_pretty(&summary).map_err(|e| BenchError::Trace(e.to_string()))?;
        std::fs::write(&path, json + "\n").map_err(|e| BenchError::io(&path, e))?;
        Ok(summary)
    }
}
