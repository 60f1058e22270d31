//! Experiment configuration documents (TOML).
//!
//! ```toml
//! [problem]
//! generator = "quadratic-box"
//! dimension = 10
//! horizon = 500
//! mu = 0.5
//! lipschitz = 2.0
//! seed = 7
//! drift = { kind = "random-walk", step = 0.1 }
//!
//! [solver]
//! step_size = 0.5
//! seed = 11
//!
//! [gradient]
//! model = "bounded-noise"
//! level = 0.2
//!
//! [prox]
//! mode = "perturbed"
//! eps = 0.05
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tvprox::analysis::BoundKind;
use tvprox::prox::EpsSchedule;
use tvprox::{GradientOracle, Problem, ProxOracleConfig, SolverConfig};

use crate::generators::{
    gen_lasso_stream, gen_least_squares_box, gen_network_flow, gen_quadratic_box, LassoSpec,
    LeastSquaresSpec, NetworkSpec, QuadraticBoxSpec,
};
use crate::BenchError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum ProblemSpec {
    QuadraticBox(QuadraticBoxSpec),
    Lasso(LassoSpec),
    LeastSquaresBox(LeastSquaresSpec),
    NetworkFlow(NetworkSpec),
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem, BenchError> {
        match self {
            ProblemSpec::QuadraticBox(s) => gen_quadratic_box(s),
            ProblemSpec::Lasso(s) => gen_lasso_stream(s),
            ProblemSpec::LeastSquaresBox(s) => gen_least_squares_box(s),
            ProblemSpec::NetworkFlow(s) => gen_network_flow(s),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ProblemSpec::QuadraticBox(s) => s.seed,
            ProblemSpec::Lasso(s) => s.seed,
            ProblemSpec::LeastSquaresBox(s) => s.seed,
            ProblemSpec::NetworkFlow(s) => s.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ProblemSpec::QuadraticBox(s) => s.seed = seed,
            ProblemSpec::Lasso(s) => s.seed = seed,
            ProblemSpec::LeastSquaresBox(s) => s.seed = seed,
            ProblemSpec::NetworkFlow(s) => s.seed = seed,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            ProblemSpec::QuadraticBox(s) => s.horizon,
            ProblemSpec::Lasso(s) => s.horizon,
            ProblemSpec::LeastSquaresBox(s) => s.horizon,
            ProblemSpec::NetworkFlow(s) => s.horizon,
        }
    }
}

/// Starting point: `"zeros"`, `"anchor"` (interior point of the first set),
/// or an explicit vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartPoint {
    Named(String),
    Point(Vec<f64>),
}

impl Default for StartPoint {
    fn default() -> Self {
        StartPoint::Named("zeros".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Absolute step size `α`.
    #[serde(default)]
    pub step_size: Option<f64>,
    /// Step size as a multiple of `1/sup L_k`; exclusive with `step_size`.
    #[serde(default)]
    pub step_fraction: Option<f64>,
    /// Defaults to the problem horizon.
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub x0: StartPoint,
    #[serde(default)]
    pub seed: u64,
    /// Also run exact gradients with the exact prox from the same start.
    #[serde(default)]
    pub baseline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "all_bounds")]
    pub bounds: Vec<BoundKind>,
    #[serde(default = "default_optimum_tolerance")]
    pub optimum_tolerance: f64,
    /// Random points per stage for the subgradient bound `D`.
    #[serde(default = "default_domain_samples")]
    pub domain_samples: usize,
    #[serde(default)]
    pub domain_seed: u64,
    /// Replace measured distances by the set diameter in the convex regret bound.
    #[serde(default)]
    pub regret_use_diameter: bool,
}

fn all_bounds() -> Vec<BoundKind> {
    vec![
        BoundKind::OneStepTracking,
        BoundKind::UnrolledTracking,
        BoundKind::CumulativeTracking,
        BoundKind::AsymptoticTracking,
        BoundKind::RegretStronglyConvex,
        BoundKind::RegretConvex,
    ]
}

fn default_optimum_tolerance() -> f64 {
    tvprox::analysis::DEFAULT_TOLERANCE
}

fn default_domain_samples() -> usize {
    64
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            bounds: all_bounds(),
            optimum_tolerance: default_optimum_tolerance(),
            domain_samples: default_domain_samples(),
            domain_seed: 0,
            regret_use_diameter: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Overridden by `--out`.
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// Grid for the `sweep` subcommand; an empty axis keeps the base value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub eps: Vec<EpsSchedule<f64>>,
    /// Bounded-noise levels `γ_e`.
    #[serde(default)]
    pub gamma_e: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solver: SolverSection,
    #[serde(default)]
    pub gradient: GradientOracle,
    #[serde(default = "ProxOracleConfig::exact")]
    pub prox: ProxOracleConfig,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let cfg: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, BenchError> {
        toml::to_string_pretty(self).map_err(|e| BenchError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String, BenchError> {
        let json = serde_json::to_string(self).map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(json.as_bytes())))
    }

    fn check(&self) -> Result<(), BenchError> {
        match (self.solver.step_size, self.solver.step_fraction) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(BenchError::Config(
                    "set exactly one of solver.step_size and solver.step_fraction".into(),
                ))
            }
        }
        if let StartPoint::Named(name) = &self.solver.x0 {
            if name != "zeros" && name != "anchor" {
                return Err(BenchError::Config(format!("unknown start point {name:?}")));
            }
        }
        if !(self.analysis.optimum_tolerance > 0.0) {
            return Err(BenchError::Config("analysis.optimum_tolerance must be positive".into()));
        }
        self.gradient.validate()?;
        self.prox.validate()?;
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.solver.horizon.unwrap_or_else(|| self.problem.horizon())
    }

    /// Solver settings for the inexact run on `problem`.
    pub fn solver_config(&self, problem: &Problem) -> Result<SolverConfig, BenchError> {
        let step_size = match (self.solver.step_size, self.solver.step_fraction) {
            (Some(a), _) => a,
            (None, Some(f)) => f / problem.lipschitz_sup(),
            (None, None) => unreachable!("checked on load"),
        };
        let n = problem.dimension();
        let x0 = match &self.solver.x0 {
            StartPoint::Point(p) => p.clone(),
            StartPoint::Named(name) if name == "anchor" => match problem.stages()[0].nonsmooth.set() {
                Some(set) => set.anchor().to_vec(),
                None => vec![0.0; n],
            },
            StartPoint::Named(_) => vec![0.0; n],
        };
        let cfg = SolverConfig {
            step_size,
            horizon: self.horizon(),
            gradient: self.gradient.clone(),
            prox: self.prox.clone(),
            x0,
            seed: self.solver.seed,
        };
        cfg.validate(problem)?;
        Ok(cfg)
    }

    pub fn wants(&self, kind: BoundKind) -> bool {
        self.analysis.bounds.contains(&kind)
    }

    /// Every combination of the sweep axes, labeled for per-run directories.
    pub fn sweep_grid(&self) -> Vec<(String, ExperimentConfig)> {
        let seeds: Vec<Option<u64>> = axis(&self.sweep.seeds);
        let eps: Vec<Option<EpsSchedule<f64>>> = axis(&self.sweep.eps);
        let gamma: Vec<Option<f64>> = axis(&self.sweep.gamma_e);
        let mut out = Vec::new();
        for s in &seeds {
            for (ei, e) in eps.iter().enumerate() {
                for g in &gamma {
                    let mut cfg = self.clone();
                    cfg.sweep = SweepSection::default();
                    let mut label = Vec::new();
                    if let Some(s) = s {
                        cfg.problem.set_seed(*s);
                        cfg.solver.seed = *s;
                        label.push(format!("seed{s}"));
                    }
                    if let Some(e) = e {
                        cfg.prox.eps = e.clone();
                        label.push(format!("eps{ei}"));
                    }
                    if let Some(g) = g {
                        cfg.gradient = GradientOracle::BoundedNoise { level: *g };
                        label.push(format!("gamma{g}"));
                    }
                    if label.is_empty() {
                        label.push("base".into());
                    }
                    out.push((label.join("_"), cfg));
                }
            }
        }
        out
    }
}

fn axis<T: Clone>(values: &[T]) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().cloned().map(Some).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUAD: &str = r#"
[problem]
generator = "quadratic-box"
dimension = 4
horizon = 20
mu = 0.5
lipschitz = 2
seed = 3
drift = { kind = "random-walk", step = 0.1 }

[solver]
step_size = 0.5
seed = 9

[gradient]
model = "bounded-noise"
level = 0.2

[prox]
mode = "perturbed"
eps = 0.05
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(QUAD).unwrap();
        assert_eq!(cfg.horizon(), 20);
        assert_eq!(cfg.gradient, GradientOracle::BoundedNoise { level: 0.2 });
        assert_eq!(cfg.prox.eps, EpsSchedule::Constant(0.05));
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash().unwrap(), again.hash().unwrap());
    }

    #[test]
    fn restricted_margin_and_network_defaults() {
        let text = r#"
[problem]
generator = "network-flow"
horizon = 10
seed = 1

[solver]
step_size = 0.3
x0 = "anchor"

[gradient]
model = "zeroth-order"
evaluations = 41
radius = 0.05

[prox]
mode = "restricted-margin"
margin = 0.05
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let p = cfg.problem.build().unwrap();
        let sc = cfg.solver_config(&p).unwrap();
        assert_eq!(sc.x0.len(), 16);
    }

    #[test]
    fn rejects_unknown_generator_and_double_step() {
        let bad = QUAD.replace("quadratic-box", "cubic");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(BenchError::Config(_))));
        let bad = QUAD.replace("step_size = 0.5", "step_size = 0.5\nstep_fraction = 1.0");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(BenchError::Config(_))));
    }

    #[test]
    fn sweep_grid_is_a_product() {
        let mut cfg = ExperimentConfig::from_toml(QUAD).unwrap();
        cfg.sweep.seeds = vec![1, 2, 3];
        cfg.sweep.gamma_e = vec![0.0, 0.1];
        let grid = cfg.sweep_grid();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[0].0, "seed1_gamma0");
    }
}
