//! Game runners: adversarial training as alternating best response, standard
//! training, optimal adversarial training and the equilibrium construction.
//!
//! Round `t ≥ 1` of adversarial training plays `v^t = ε·sign(w^{t−1})` and
//! refits the defender on the shifted data. `w^0` comes from
//! [`InitialModel`]; with the zero model `v^1 = 0`, so round one is plain
//! standard training.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{Dataset, DistributionSpec, Samples};
use crate::error::{check_dim, Error, Result};
use crate::format::decimal17;
use crate::linalg::{distance2, norm2};
use crate::model::{evaluate, ne_plan, nonrobust_mass, row_utility, worst_case_plan, PerturbationPlan, Weights};
use crate::solve::{solve_exact, AdamTrainer, HingeProblem, OptimizerConfig, SolverMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Standard,
    At,
    Oat,
    Ne,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Standard, Method::At, Method::Oat, Method::Ne];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::At => "at",
            Method::Oat => "oat",
            Method::Ne => "ne",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid("method", format!("unknown method {s:?}")))
    }
}

/// Defender model before the first adversarial-training round.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialModel {
    #[default]
    Zero,
    Given(Vec<f64>),
    /// The model obtained by standard training with the configured solver.
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub eps: f64,
    pub lambda: f64,
    pub rounds: usize,
    pub solver: SolverMethod,
    #[serde(default)]
    pub init: InitialModel,
    /// Exact mode: start each round's solve from the previous model.
    /// Stochastic mode: keep training the same model and optimizer state.
    pub warm_start: bool,
}

impl GameConfig {
    pub fn new(eps: f64, lambda: f64, rounds: usize, solver: SolverMethod) -> Self {
        let warm_start = matches!(solver, SolverMethod::Stochastic { .. });
        Self {
            eps,
            lambda,
            rounds,
            solver,
            init: InitialModel::Zero,
            warm_start,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps", "must be non-negative"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", "must be positive"));
        }
        if self.rounds == 0 {
            return Err(Error::invalid("rounds", "must be at least 1"));
        }
        self.solver.validate()
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            method: self.solver.clone(),
            lambda: self.lambda,
            init: None,
        }
    }
}

/// Training and evaluation data plus the feature means used to classify
/// coordinates as robust or not.
#[derive(Debug, Clone)]
pub struct Arena<'a> {
    pub train: Samples<'a>,
    pub test: Samples<'a>,
    pub means: Vec<f64>,
    /// Largest standard error of the means when they are plug-in estimates.
    pub mean_stderr: Option<f64>,
}

impl<'a> Arena<'a> {
    /// Sampled data. With a spec the true means are used, otherwise plug-in
    /// estimates from the training set.
    pub fn sampled(train: &'a Dataset, test: &'a Dataset, spec: Option<&DistributionSpec>) -> Result<Self> {
        check_dim(train.dim(), test.dim())?;
        let (means, mean_stderr) = match spec {
            Some(s) => {
                check_dim(s.dim(), train.dim())?;
                (s.means(), None)
            }
            None => {
                let est = train.mean_estimates();
                let worst = est.iter().map(|e| e.1).fold(0.0, f64::max);
                (est.into_iter().map(|e| e.0).collect(), Some(worst))
            }
        };
        Ok(Self {
            train: Samples::from_dataset(train),
            test: Samples::from_dataset(test),
            means,
            mean_stderr,
        })
    }

    /// Exact population game of a finitely supported spec; train and test
    /// are both the full support.
    pub fn population(spec: &DistributionSpec) -> Result<Arena<'static>> {
        let train = Samples::from_spec(spec)?;
        Ok(Arena {
            test: train.clone(),
            train,
            means: spec.means(),
            mean_stderr: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.train.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub w: Weights,
    pub v: PerturbationPlan,
    pub delta_w_norm: f64,
    pub w_norm: f64,
    /// Zero for the zero model.
    pub nonrobust_mass: f64,
    pub std_acc_train: f64,
    pub std_acc_test: f64,
    pub robust_acc_test: f64,
    pub objective: f64,
    /// Certified duality gap of the round's solve (exact mode).
    pub gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub method: Method,
    pub config: GameConfig,
    pub records: Vec<TrajectoryRecord>,
    /// Set when a solve failed; `records` holds the rounds completed before.
    pub failure: Option<String>,
}

pub const TRAJECTORY_HEADER: &str =
    "t,delta_w_norm,w_norm,nonrobust_mass,std_acc_train,std_acc_test,robust_acc_test,objective";

impl Trajectory {
    fn new(method: Method, config: &GameConfig) -> Self {
        Self {
            method,
            config: config.clone(),
            records: Vec::new(),
            failure: None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }

    /// Mean and minimum of `delta_w_norm` over rounds `t > T/2`.
    pub fn tail_delta_stats(&self) -> Option<(f64, f64)> {
        let half = self.records.len() / 2;
        let tail = &self.records[half..];
        if tail.is_empty() {
            return None;
        }
        let mean = tail.iter().map(|r| r.delta_w_norm).sum::<f64>() / tail.len() as f64;
        let min = tail.iter().map(|r| r.delta_w_norm).fold(f64::INFINITY, f64::min);
        Some((mean, min))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.t,
                decimal17(r.delta_w_norm),
                decimal17(r.w_norm),
                decimal17(r.nonrobust_mass),
                decimal17(r.std_acc_train),
                decimal17(r.std_acc_test),
                decimal17(r.robust_acc_test),
                decimal17(r.objective),
            )?;
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    arena: &Arena<'_>,
    config: &GameConfig,
    t: usize,
    w: Vec<f64>,
    prev: &[f64],
    v: PerturbationPlan,
    objective: f64,
    gap: Option<f64>,
) -> Result<TrajectoryRecord> {
    let weights = Weights::new(w, config.lambda)?;
    let train = evaluate(&weights, &arena.train, config.eps)?;
    let test = evaluate(&weights, &arena.test, config.eps)?;
    let mass = match nonrobust_mass(&weights.w, &arena.means, config.eps) {
        Ok(m) => m,
        Err(Error::ZeroWeights) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(TrajectoryRecord {
        t,
        delta_w_norm: distance2(&weights.w, prev),
        w_norm: norm2(&weights.w),
        nonrobust_mass: mass,
        std_acc_train: train.standard,
        std_acc_test: test.standard,
        robust_acc_test: test.certified_robust,
        objective,
        gap,
        w: weights,
        v,
    })
}

/// One best response in exact mode: `(w, objective, gap)`.
fn exact_response(problem: &HingeProblem<'_, '_>, start: &[f64], solver: &SolverMethod) -> Result<(Vec<f64>, f64, f64)> {
    let SolverMethod::Exact { tolerance, max_iters } = *solver else {
        unreachable!("exact_response called with a stochastic solver")
    };
    let fit = solve_exact(problem, start, tolerance, max_iters)?;
    Ok((fit.weights.w, fit.objective, fit.gap.unwrap_or(0.0)))
}

fn stochastic_parts(solver: &SolverMethod) -> (f64, usize, usize, u64) {
    match *solver {
        SolverMethod::Stochastic {
            learning_rate,
            batch_size,
            epochs,
            seed,
        } => (learning_rate, batch_size, epochs, seed),
        SolverMethod::Exact { .. } => unreachable!("stochastic_parts called with an exact solver"),
    }
}

/// Seed of the fresh optimizer used for round `t` without warm start.
fn round_seed(seed: u64, t: usize) -> u64 {
    seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Alternating best response.
pub fn run_at(arena: &Arena<'_>, config: &GameConfig) -> Result<Trajectory> {
    config.validate()?;
    let d = arena.dim();
    let mut traj = Trajectory::new(Method::At, config);
    let stochastic = matches!(config.solver, SolverMethod::Stochastic { .. });
    let mut trainer = if stochastic {
        let (lr, batch, _, seed) = stochastic_parts(&config.solver);
        Some(AdamTrainer::new(d, lr, batch, seed)?)
    } else {
        None
    };

    let mut w_prev = match &config.init {
        InitialModel::Zero => vec![0.0; d],
        InitialModel::Given(w) => {
            check_dim(d, w.len())?;
            w.clone()
        }
        InitialModel::Standard => {
            let zero = PerturbationPlan::zero(d, config.eps)?;
            let problem = HingeProblem::svm(&arena.train, &zero, config.lambda)?;
            match trainer.as_mut() {
                Some(tr) => {
                    let (.., epochs, _) = stochastic_parts(&config.solver);
                    let mut w = vec![0.0; d];
                    for _ in 0..epochs {
                        tr.run_epoch(&problem, &mut w);
                    }
                    if !config.warm_start {
                        trainer = None;
                    }
                    w
                }
                None => match exact_response(&problem, &vec![0.0; d], &config.solver) {
                    Ok((w, ..)) => w,
                    Err(e) => {
                        traj.failure = Some(format!("initial standard model: {e}"));
                        return Ok(traj);
                    }
                },
            }
        }
    };

    for t in 1..=config.rounds {
        let plan = worst_case_plan(&w_prev, config.eps)?;
        let problem = HingeProblem::svm(&arena.train, &plan, config.lambda)?;
        let (w, objective, gap) = if stochastic {
            let (lr, batch, epochs, seed) = stochastic_parts(&config.solver);
            let mut w = if config.warm_start { w_prev.clone() } else { vec![0.0; d] };
            let mut fresh;
            let tr = match trainer.as_mut() {
                Some(tr) if config.warm_start => tr,
                _ => {
                    fresh = AdamTrainer::new(d, lr, batch, round_seed(seed, t))?;
                    &mut fresh
                }
            };
            for _ in 0..epochs {
                tr.run_epoch(&problem, &mut w);
            }
            let objective = problem.objective(&w)?;
            (w, objective, None)
        } else {
            let start = if config.warm_start { w_prev.clone() } else { vec![0.0; d] };
            match exact_response(&problem, &start, &config.solver) {
                Ok((w, obj, gap)) => (w, obj, Some(gap)),
                Err(e) => {
                    traj.failure = Some(format!("round {t}: {e}"));
                    return Ok(traj);
                }
            }
        };
        let rec = record(arena, config, t, w, &w_prev, plan, objective, gap)?;
        w_prev.clone_from(&rec.w.w);
        traj.records.push(rec);
    }
    Ok(traj)
}

/// Minimizes a fixed objective. Exact mode yields one record; stochastic mode
/// yields one record per round of `epochs` epochs, comparable with the
/// adversarial-training trajectory under the same solver.
fn run_single(
    arena: &Arena<'_>,
    config: &GameConfig,
    method: Method,
    problem: &HingeProblem<'_, '_>,
    plan: &PerturbationPlan,
) -> Result<Trajectory> {
    let d = arena.dim();
    let mut traj = Trajectory::new(method, config);
    let start = match &config.init {
        InitialModel::Given(w) => {
            check_dim(d, w.len())?;
            w.clone()
        }
        _ => vec![0.0; d],
    };
    match config.solver {
        SolverMethod::Exact { .. } => match exact_response(problem, &start, &config.solver) {
            Ok((w, objective, gap)) => {
                traj.records
                    .push(record(arena, config, 1, w, &start, plan.clone(), objective, Some(gap))?);
            }
            Err(e) => traj.failure = Some(e.to_string()),
        },
        SolverMethod::Stochastic { .. } => {
            let (lr, batch, epochs, seed) = stochastic_parts(&config.solver);
            let mut trainer = AdamTrainer::new(d, lr, batch, seed)?;
            let mut w = start;
            for t in 1..=config.rounds {
                let prev = w.clone();
                for _ in 0..epochs {
                    trainer.run_epoch(problem, &mut w);
                }
                let objective = problem.objective(&w)?;
                traj.records
                    .push(record(arena, config, t, w.clone(), &prev, plan.clone(), objective, None)?);
            }
        }
    }
    Ok(traj)
}

pub fn run_standard(arena: &Arena<'_>, config: &GameConfig) -> Result<Trajectory> {
    config.validate()?;
    let plan = PerturbationPlan::zero(arena.dim(), config.eps)?;
    let problem = HingeProblem::svm(&arena.train, &plan, config.lambda)?;
    run_single(arena, config, Method::Standard, &problem, &plan)
}

/// Optimal adversarial training. The recorded plan is the worst case against
/// the final weights.
pub fn run_oat(arena: &Arena<'_>, config: &GameConfig) -> Result<Trajectory> {
    config.validate()?;
    let problem = HingeProblem::oat(&arena.train, config.eps, config.lambda)?;
    let zero = PerturbationPlan::zero(arena.dim(), config.eps)?;
    let mut traj = run_single(arena, config, Method::Oat, &problem, &zero)?;
    for r in &mut traj.records {
        r.v = worst_case_plan(&r.w.w, config.eps)?;
    }
    Ok(traj)
}

/// Equilibrium construction: the adversary cancels the mean of every
/// non-robust feature and spends the full budget on the robust ones; the
/// defender best-responds.
pub fn run_ne(arena: &Arena<'_>, config: &GameConfig) -> Result<(PerturbationPlan, Weights, Trajectory)> {
    config.validate()?;
    let plan = ne_plan(&arena.means, config.eps)?;
    let problem = HingeProblem::svm(&arena.train, &plan, config.lambda)?;
    let traj = run_single(arena, config, Method::Ne, &problem, &plan)?;
    if let Some(msg) = &traj.failure {
        return Err(Error::invalid("solver", msg.clone()));
    }
    let w = traj.last().map(|r| r.w.clone()).expect("non-empty trajectory");
    Ok((plan, w, traj))
}

pub fn fit_config(config: &GameConfig) -> OptimizerConfig {
    config.optimizer()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeReport {
    /// `U(worst_case_plan(w), w) − U(plan, w)`; zero when the plan is a best response.
    pub row_gap: f64,
    /// Certified bound on `P(w) − min P` for the defender against `plan`.
    pub column_gap: f64,
    pub row_ok: bool,
    pub column_ok: bool,
    pub passed: bool,
    /// Set when the column re-solve itself failed.
    pub note: Option<String>,
}

/// Checks both best-response conditions. Row optimality compares against the
/// worst-case plan, which attains the adversary's supremum. Column optimality
/// re-solves the defender's problem exactly and uses its dual bound.
pub fn verify_ne(
    plan: &PerturbationPlan,
    weights: &Weights,
    data: &Samples<'_>,
    eps: f64,
    lambda: f64,
    tol: f64,
) -> Result<NeReport> {
    check_dim(weights.dim(), data.dim())?;
    check_dim(weights.dim(), plan.dim())?;
    let scoring = Weights::new(weights.w.clone(), lambda)?;
    let in_budget = plan.eps() <= eps + 1e-15;
    let worst = worst_case_plan(&scoring.w, eps)?;
    let row_gap = row_utility(&worst, &scoring, data)? - row_utility(plan, &scoring, data)?;
    let row_ok = in_budget && row_gap <= tol;

    let problem = HingeProblem::svm(data, plan, lambda)?;
    let current = problem.objective(&scoring.w)?;
    let (column_gap, note) = match solve_exact(&problem, &scoring.w, (0.1 * tol).max(1e-12), 1_000_000) {
        Ok(fit) => (current - fit.lower_bound.unwrap_or(fit.objective), None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    };
    let column_ok = column_gap <= tol;
    Ok(NeReport {
        row_gap,
        column_gap,
        row_ok,
        column_ok,
        passed: row_ok && column_ok,
        note,
    })
}
