//! Experiment configuration.
//!
//! Files are TOML restricted to scalar keys, dotted keys and arrays, e.g.
//!
//! ```toml
//! distribution.d = 2000
//! distribution.p = 0.7
//! eps = 0.02
//! solver.sgd.lr = 0.01
//! ```
//!
//! Unknown keys are rejected so that typos surface as errors.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use slar_core::dist::paper_distribution;
use slar_core::{DistributionSpec, FeatureSpec, GameConfig, InitialModel, Method, SolverMethod};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Standard,
    At,
    Oat,
    Ne,
    #[default]
    All,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Standard => vec![Method::Standard],
            MethodChoice::At => vec![Method::At],
            MethodChoice::Oat => vec![Method::Oat],
            MethodChoice::Ne => vec![Method::Ne],
            MethodChoice::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitChoice {
    #[default]
    Zero,
    Standard,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    pub d: Option<usize>,
    pub p: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    /// Explicit feature list; excludes `d`, `p`, `mu`, `sigma`.
    pub features: Option<Vec<FeatureSpec>>,
}

impl DistributionConfig {
    pub fn spec(&self) -> Result<DistributionSpec, CliError> {
        let shape = [self.d.is_some(), self.p.is_some(), self.mu.is_some(), self.sigma.is_some()];
        match &self.features {
            Some(features) => {
                if shape.iter().any(|&b| b) {
                    return Err(CliError::config("distribution", "give either features or d/p/mu/sigma, not both"));
                }
                DistributionSpec::new(features.clone()).map_err(|e| CliError::config("distribution.features", e))
            }
            None => {
                let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::config(name, "missing"));
                let d = self.d.ok_or_else(|| CliError::config("distribution.d", "missing"))?;
                let p = need(self.p, "distribution.p")?;
                let mu = need(self.mu, "distribution.mu")?;
                let sigma = need(self.sigma, "distribution.sigma")?;
                paper_distribution(d, p, mu, sigma).map_err(|e| CliError::config("distribution", e))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgdConfig {
    pub lr: f64,
    pub batch: usize,
    /// Epochs per round.
    #[serde(default = "one")]
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub exact: Option<ExactConfig>,
    pub sgd: Option<SgdConfig>,
}

fn default_tolerance() -> f64 {
    slar_core::solve::DEFAULT_TOLERANCE
}
fn default_max_iters() -> usize {
    slar_core::solve::DEFAULT_MAX_PASSES
}
fn one() -> usize {
    1
}
fn default_n_train() -> usize {
    10_000
}
fn default_n_test() -> usize {
    1_000
}
fn default_rounds() -> usize {
    50
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionConfig,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    pub eps: f64,
    pub lambda: f64,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "yes")]
    pub emit_plots: bool,
    /// Round-0 model for adversarial training.
    #[serde(default)]
    pub init: InitChoice,
    /// Defaults to true for the stochastic solver and false for the exact one.
    pub warm_start: Option<bool>,
    /// Train and evaluate on the exact law of a finitely supported spec
    /// instead of samples.
    #[serde(default)]
    pub population: bool,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let spec = self.distribution.spec()?;
        if !self.population {
            if self.n_train == 0 {
                return Err(CliError::config("n_train", "must be at least 1"));
            }
            if self.n_test == 0 {
                return Err(CliError::config("n_test", "must be at least 1"));
            }
        } else if !spec.is_finite_support() {
            return Err(CliError::config("population", "needs a finitely supported distribution"));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(CliError::config("eps", "must be a non-negative number"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(CliError::config("lambda", "must be positive"));
        }
        if self.rounds == 0 {
            return Err(CliError::config("rounds", "must be at least 1"));
        }
        let solver = self.solver_method()?;
        solver.validate().map_err(|e| CliError::config("solver", e))
    }

    pub fn spec(&self) -> Result<DistributionSpec, CliError> {
        self.distribution.spec()
    }

    pub fn solver_method(&self) -> Result<SolverMethod, CliError> {
        match (&self.solver.exact, &self.solver.sgd) {
            (Some(e), None) => Ok(SolverMethod::Exact {
                tolerance: e.tolerance,
                max_iters: e.max_iters,
            }),
            (None, Some(s)) => Ok(SolverMethod::adam(s.lr, s.batch, s.epochs, self.seed)),
            (None, None) => Ok(SolverMethod::exact(default_tolerance())),
            (Some(_), Some(_)) => Err(CliError::config("solver", "choose one of solver.exact or solver.sgd")),
        }
    }

    pub fn game_config(&self) -> Result<GameConfig, CliError> {
        let solver = self.solver_method()?;
        let mut cfg = GameConfig::new(self.eps, self.lambda, self.rounds, solver);
        cfg.init = match self.init {
            InitChoice::Zero => InitialModel::Zero,
            InitChoice::Standard => InitialModel::Standard,
        };
        if let Some(w) = self.warm_start {
            cfg.warm_start = w;
        }
        Ok(cfg)
    }

    /// Seeds of the training and test samples.
    pub fn sample_seeds(&self) -> (u64, u64) {
        (self.seed, self.seed.wrapping_add(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER: &str = r#"
distribution.d = 2000
distribution.p = 0.7
distribution.mu = 0.01
distribution.sigma = 0.01
n_train = 10000
n_test = 1000
eps = 0.02
lambda = 0.01
rounds = 50
solver.sgd.lr = 0.01
solver.sgd.batch = 200
"#;

    #[test]
    fn paper_config_parses() {
        let c = ExperimentConfig::parse(PAPER).unwrap();
        assert_eq!(c.method, MethodChoice::All);
        assert_eq!(c.spec().unwrap().dim(), 2001);
        let g = c.game_config().unwrap();
        assert!(g.warm_start);
        assert_eq!(g.solver, SolverMethod::adam(0.01, 200, 1, 0));
    }

    #[test]
    fn explicit_features() {
        let c = ExperimentConfig::parse(
            r#"
distribution.features = [
  { kind = "two_point", p = 0.7 },
  { kind = "discrete_symmetric", atoms = [[0.3, 0.5], [-0.1, 0.5]] },
]
eps = 0.2
lambda = 0.1
population = true
solver.exact.tolerance = 1e-10
"#,
        )
        .unwrap();
        assert!((c.spec().unwrap().means()[1] - 0.1).abs() < 1e-15);
        assert!(matches!(c.solver_method().unwrap(), SolverMethod::Exact { .. }));
    }

    #[test]
    fn errors_name_the_field() {
        let e = ExperimentConfig::parse(&PAPER.replace("n_train = 10000", "n_train = 0")).unwrap_err();
        assert!(e.to_string().contains("n_train"), "{e}");
        let e = ExperimentConfig::parse(&format!("{PAPER}\nlambada = 1")).unwrap_err();
        assert!(e.to_string().contains("lambada"), "{e}");
        let e = ExperimentConfig::parse(&PAPER.replace("distribution.p = 0.7", "distribution.p = 1.7")).unwrap_err();
        assert!(e.to_string().contains("distribution"), "{e}");
        let e = ExperimentConfig::parse(&format!("{PAPER}\nsolver.exact.tolerance = 1e-8")).unwrap_err();
        assert!(e.to_string().contains("solver"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }
}
