//! Best-response solvers for the defender.
//!
//! Every objective handled here has the form
//!
//! ```text
//! P(w) = Σ_i π_i · max(0, 1 − ⟨w, c_i⟩ + κ‖w‖₁) + (λ/2)‖w‖²,   c_i = y_i·x_i − v
//! ```
//!
//! with `κ = 0` for the SVM against a fixed plan `v` and `v = 0, κ = ε` for
//! the optimal-adversarial-training objective.
//!
//! [`SolverMethod::Exact`] maximizes the dual
//! `D(α) = Σα_i − ‖S_{κΣα}(Σ α_i c_i)‖² / (2λ)` over `0 ≤ α_i ≤ π_i` by exact
//! coordinate ascent (`S_t` is soft thresholding at `t`). The primal iterate is
//! `w(α) = S_{κΣα}(Σ α_i c_i) / λ` and `P(w(α)) − D(α)` bounds its
//! suboptimality. By λ-strong convexity that also gives
//! `‖w(α) − w*‖ ≤ √(2·gap/λ)`.
//!
//! [`SolverMethod::Stochastic`] is mini-batch Adam on the subgradient, with
//! the per-epoch shuffle keyed by `(seed, epoch)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dist::Samples;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, distance2, dot, norm1, norm2_sq, sign};
use crate::model::{hinge_objective, PerturbationPlan, Weights};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_PASSES: usize = 100_000;

/// Active-set polishing is attempted while the model has at most this many
/// non-zero coordinates and at most `POLISH_MAX_FREE` margin points.
const POLISH_MAX_DIM: usize = 256;
const POLISH_MAX_FREE: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Dual coordinate ascent until the duality gap is at most `tolerance`;
    /// `max_iters` caps the number of passes over the data.
    Exact { tolerance: f64, max_iters: usize },
    Stochastic {
        learning_rate: f64,
        batch_size: usize,
        epochs: usize,
        seed: u64,
    },
}

impl SolverMethod {
    pub fn exact(tolerance: f64) -> Self {
        SolverMethod::Exact {
            tolerance,
            max_iters: DEFAULT_MAX_PASSES,
        }
    }

    pub fn adam(learning_rate: f64, batch_size: usize, epochs: usize, seed: u64) -> Self {
        SolverMethod::Stochastic {
            learning_rate,
            batch_size,
            epochs,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SolverMethod::Exact {
                tolerance,
                max_iters,
            } => {
                if !(tolerance > 0.0) {
                    return Err(Error::invalid("tolerance", "must be positive"));
                }
                if max_iters == 0 {
                    return Err(Error::invalid("max_iters", "must be positive"));
                }
            }
            SolverMethod::Stochastic {
                learning_rate,
                batch_size,
                epochs,
                ..
            } => {
                if !(learning_rate > 0.0) {
                    return Err(Error::invalid("learning_rate", "must be positive"));
                }
                if batch_size == 0 {
                    return Err(Error::invalid("batch_size", "must be at least 1"));
                }
                if epochs == 0 {
                    return Err(Error::invalid("epochs", "must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

impl Default for SolverMethod {
    fn default() -> Self {
        SolverMethod::exact(DEFAULT_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub method: SolverMethod,
    pub lambda: f64,
    /// Starting point; `None` means the zero vector.
    pub init: Option<Vec<f64>>,
}

impl OptimizerConfig {
    pub fn exact(lambda: f64, tolerance: f64) -> Self {
        Self {
            method: SolverMethod::exact(tolerance),
            lambda,
            init: None,
        }
    }

    pub fn with_init(mut self, init: Vec<f64>) -> Self {
        self.init = Some(init);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", "must be positive"));
        }
        self.method.validate()
    }
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub weights: Weights,
    /// Primal objective at the returned weights.
    pub objective: f64,
    /// Dual value certifying `objective − lower_bound ≥ P(w) − P*`; exact mode only.
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    /// Passes (exact) or epochs (stochastic).
    pub iterations: usize,
}

impl FitReport {
    /// Certified bound on `‖w − w*‖₂`.
    pub fn weight_radius(&self) -> Option<f64> {
        self.gap
            .map(|g| (2.0 * g.max(0.0) / self.weights.lambda).sqrt())
    }
}

/// Defender objective on a data set: hinge loss against shift `v` plus an
/// optional `κ‖w‖₁` term inside the hinge.
#[derive(Debug, Clone)]
pub struct HingeProblem<'d, 'a> {
    data: &'d Samples<'a>,
    shift: Vec<f64>,
    l1: f64,
    lambda: f64,
}

impl<'d, 'a> HingeProblem<'d, 'a> {
    /// Regularized SVM on data perturbed by `plan`.
    pub fn svm(data: &'d Samples<'a>, plan: &PerturbationPlan, lambda: f64) -> Result<Self> {
        check_dim(data.dim(), plan.dim())?;
        Self::build(data, plan.shift().to_vec(), 0.0, lambda)
    }

    /// `E[max(0, 1 − y⟨w, x⟩ + ε‖w‖₁)] + (λ/2)‖w‖²`.
    pub fn oat(data: &'d Samples<'a>, eps: f64, lambda: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::invalid("eps", "must be non-negative"));
        }
        Self::build(data, vec![0.0; data.dim()], eps, lambda)
    }

    fn build(data: &'d Samples<'a>, shift: Vec<f64>, l1: f64, lambda: f64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyData);
        }
        if !(lambda > 0.0) {
            return Err(Error::invalid("lambda", "must be positive"));
        }
        Ok(Self {
            data,
            shift,
            l1,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn objective(&self, w: &[f64]) -> Result<f64> {
        hinge_objective(w, self.lambda, self.data, &self.shift, self.l1)
    }

    /// `c_i = y_i x_i − v`
    fn fill_c(&self, i: usize, out: &mut [f64]) {
        let y = self.data.label(i);
        for ((o, x), v) in out.iter_mut().zip(self.data.point(i)).zip(&self.shift) {
            *o = y * x - v;
        }
    }

    /// Hinge argument `1 − ⟨w, c_i⟩ + κ‖w‖₁` given precomputed `⟨w, v⟩` and `‖w‖₁`.
    #[inline]
    fn slack(&self, i: usize, w: &[f64], wv: f64, w_l1: f64) -> f64 {
        1.0 - self.data.label(i) * dot(w, self.data.point(i)) + wv + self.l1 * w_l1
    }
}

pub fn fit_svm(data: &Samples<'_>, plan: &PerturbationPlan, config: &OptimizerConfig) -> Result<FitReport> {
    config.validate()?;
    let problem = HingeProblem::svm(data, plan, config.lambda)?;
    fit(&problem, config)
}

pub fn fit_oat(data: &Samples<'_>, eps: f64, config: &OptimizerConfig) -> Result<FitReport> {
    config.validate()?;
    let problem = HingeProblem::oat(data, eps, config.lambda)?;
    fit(&problem, config)
}

pub fn fit(problem: &HingeProblem<'_, '_>, config: &OptimizerConfig) -> Result<FitReport> {
    let dim = problem.dim();
    let init = match &config.init {
        Some(w) => {
            check_dim(dim, w.len())?;
            w.clone()
        }
        None => vec![0.0; dim],
    };
    match config.method {
        SolverMethod::Exact {
            tolerance,
            max_iters,
        } => solve_exact(problem, &init, tolerance, max_iters),
        SolverMethod::Stochastic {
            learning_rate,
            batch_size,
            epochs,
            seed,
        } => {
            let mut trainer = AdamTrainer::new(dim, learning_rate, batch_size, seed)?;
            let mut w = init;
            for _ in 0..epochs {
                trainer.run_epoch(problem, &mut w);
            }
            let objective = problem.objective(&w)?;
            Ok(FitReport {
                weights: Weights::new(w, problem.lambda)?,
                objective,
                lower_bound: None,
                gap: None,
                iterations: epochs,
            })
        }
    }
}

/// Dual coordinate ascent to a certified duality gap.
///
/// The dual start is the hinge subgradient at `init`: `α_i = π_i` on points
/// with positive slack and `0` elsewhere, so distinct `init`s give distinct runs.
pub fn solve_exact(
    problem: &HingeProblem<'_, '_>,
    init: &[f64],
    tolerance: f64,
    max_passes: usize,
) -> Result<FitReport> {
    check_dim(problem.dim(), init.len())?;
    let data = problem.data;
    let (n, d) = (data.len(), problem.dim());
    let lambda = problem.lambda;
    let kappa = problem.l1;

    let wv0 = dot(init, &problem.shift);
    let l10 = norm1(init);
    let mut alpha: Vec<f64> = (0..n)
        .map(|i| {
            if problem.slack(i, init, wv0, l10) > 0.0 {
                data.weight(i)
            } else {
                0.0
            }
        })
        .collect();

    // ‖c_i‖²/λ for the closed-form SVM step
    let mut c = vec![0.0; d];
    let curvature: Vec<f64> = if kappa == 0.0 {
        (0..n)
            .map(|i| {
                problem.fill_c(i, &mut c);
                norm2_sq(&c) / lambda
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut u = vec![0.0; d];
    let mut mass = 0.0;
    let mut w = vec![0.0; d];
    rebuild(problem, &alpha, &mut u, &mut mass, &mut w);

    let mut order: Vec<usize> = (0..n).filter(|&i| data.weight(i) > 0.0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1a1);
    let check_every = if n * d < 2_000_000 { 1 } else { 4 };
    let mut last_gap = f64::INFINITY;

    for pass in 1..=max_passes {
        order.shuffle(&mut rng);
        for &i in &order {
            let pi = data.weight(i);
            problem.fill_c(i, &mut c);
            let a_old = alpha[i];
            let a_new = if kappa == 0.0 {
                let grad = 1.0 - dot(&w, &c);
                let q = curvature[i];
                if q > 0.0 {
                    (a_old + grad / q).clamp(0.0, pi)
                } else if grad > 0.0 {
                    pi
                } else {
                    0.0
                }
            } else {
                maximize_coordinate(&u, mass, &c, a_old, pi, kappa, lambda)
            };
            let step = a_new - a_old;
            if step != 0.0 {
                alpha[i] = a_new;
                axpy(step, &c, &mut u);
                mass += step;
                if kappa == 0.0 {
                    axpy(step / lambda, &c, &mut w);
                }
            }
        }
        if pass % check_every == 0 || pass == max_passes {
            rebuild(problem, &alpha, &mut u, &mut mass, &mut w);
            let mut primal = problem.objective(&w)?;
            let mut dual = mass - 0.5 * lambda * norm2_sq(&w);
            let mut best_w = None;
            if primal - dual > tolerance && pass >= 2 {
                if let Some((w_p, alpha_p)) = polish(problem, &alpha, &w) {
                    let p_obj = problem.objective(&w_p)?;
                    if p_obj < primal {
                        primal = p_obj;
                        best_w = Some(w_p);
                    }
                    let (mut u_p, mut mass_p, mut w_a) = (vec![0.0; d], 0.0, vec![0.0; d]);
                    rebuild(problem, &alpha_p, &mut u_p, &mut mass_p, &mut w_a);
                    let d_obj = mass_p - 0.5 * lambda * norm2_sq(&w_a);
                    if d_obj > dual {
                        dual = d_obj;
                        alpha = alpha_p;
                        (u, mass, w) = (u_p, mass_p, w_a);
                    }
                }
            }
            let gap = primal - dual;
            last_gap = gap;
            if gap <= tolerance {
                return Ok(FitReport {
                    weights: Weights::new(best_w.unwrap_or(w), lambda)?,
                    objective: primal,
                    lower_bound: Some(dual),
                    gap: Some(gap.max(0.0)),
                    iterations: pass,
                });
            }
        }
    }
    Err(Error::NotConverged {
        iterations: max_passes,
        achieved_gap: last_gap,
        tolerance,
    })
}

/// Recomputes `u = Σ α_i c_i`, `Σα` and `w(α)` from scratch to shed drift.
fn rebuild(problem: &HingeProblem<'_, '_>, alpha: &[f64], u: &mut [f64], mass: &mut f64, w: &mut [f64]) {
    let mut c = vec![0.0; u.len()];
    u.iter_mut().for_each(|x| *x = 0.0);
    *mass = 0.0;
    for (i, &a) in alpha.iter().enumerate() {
        if a != 0.0 {
            problem.fill_c(i, &mut c);
            axpy(a, &c, u);
            *mass += a;
        }
    }
    primal_from_dual(u, problem.l1 * *mass, problem.lambda, w);
}

/// Primal-dual active-set step. Coordinate ascent crawls along nearly
/// collinear dual directions (near-duplicate points); fixing which points
/// sit on the margin and the sign pattern of `w` turns the problem into an
/// equality-constrained quadratic that is solved directly. Points whose
/// multipliers leave `[0, π_i]` or whose margins contradict their bound are
/// reassigned and the solve repeated. Returns a candidate `(w, α)` that the
/// caller certifies like any other iterate.
fn polish(problem: &HingeProblem<'_, '_>, alpha: &[f64], w: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Lower,
        Upper,
        Free,
    }
    let data = problem.data;
    let (n, d, lambda, kappa) = (data.len(), problem.dim(), problem.lambda, problem.l1);
    let cols: Vec<usize> = if kappa == 0.0 {
        (0..d).collect()
    } else {
        (0..d).filter(|&j| w[j] != 0.0).collect()
    };
    let m = cols.len();
    if m == 0 || m > POLISH_MAX_DIM {
        return None;
    }
    let mut full = vec![0.0; d];
    let reduced: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            problem.fill_c(i, &mut full);
            cols.iter().map(|&j| full[j] - kappa * sign(w[j])).collect()
        })
        .collect();
    let mut state: Vec<State> = (0..n)
        .map(|i| {
            let pi = data.weight(i);
            if pi == 0.0 || alpha[i] <= 0.0 {
                State::Lower
            } else if alpha[i] >= pi {
                State::Upper
            } else {
                State::Free
            }
        })
        .collect();
    let mut candidate = None;
    for _ in 0..8 {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == State::Free).collect();
        if free.len() > POLISH_MAX_FREE {
            return candidate;
        }
        let mut b = DVector::zeros(m);
        for i in (0..n).filter(|&i| state[i] == State::Upper) {
            b += DVector::from_column_slice(&reduced[i]) * data.weight(i);
        }
        let mut gram = DMatrix::zeros(m, m);
        for &i in &free {
            let c = DVector::from_column_slice(&reduced[i]);
            gram.ger(1.0, &c, &c, 1.0);
        }
        let pinv = pseudo_inverse(gram);
        let w0 = &b / lambda;
        let mut r = DVector::zeros(m);
        for &i in &free {
            let c = DVector::from_column_slice(&reduced[i]);
            r += &c * (1.0 - c.dot(&w0));
        }
        let wr = w0 + &pinv * r;
        let g = &pinv * (&wr * lambda - &b);
        let mut alpha_new = vec![0.0; n];
        let mut changed = false;
        for i in 0..n {
            let pi = data.weight(i);
            let c = DVector::from_column_slice(&reduced[i]);
            match state[i] {
                State::Free => {
                    let beta = c.dot(&g);
                    alpha_new[i] = beta.clamp(0.0, pi);
                    if beta < 0.0 {
                        state[i] = State::Lower;
                        changed = true;
                    } else if beta > pi {
                        state[i] = State::Upper;
                        changed = true;
                    }
                }
                State::Upper => {
                    alpha_new[i] = pi;
                    if c.dot(&wr) > 1.0 + 1e-12 {
                        state[i] = State::Free;
                        changed = true;
                    }
                }
                State::Lower => {
                    if pi > 0.0 && c.dot(&wr) < 1.0 - 1e-12 {
                        state[i] = State::Free;
                        changed = true;
                    }
                }
            }
        }
        let mut w_full = vec![0.0; d];
        for (k, &j) in cols.iter().enumerate() {
            w_full[j] = wr[k];
        }
        candidate = Some((w_full, alpha_new));
        if !changed {
            break;
        }
    }
    candidate
}

/// Moore-Penrose inverse of a symmetric positive semi-definite matrix.
fn pseudo_inverse(a: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a);
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = top * 1e-13;
    let inv = eig.eigenvalues.map(|v| if v > cut { 1.0 / v } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

/// `w = S_t(u) / λ`
fn primal_from_dual(u: &[f64], threshold: f64, lambda: f64, w: &mut [f64]) {
    for (wj, &uj) in w.iter_mut().zip(u) {
        let s = uj.abs() - threshold;
        *wj = if s > 0.0 { sign(uj) * s / lambda } else { 0.0 };
    }
}

/// Exact maximizer over `[0, cap]` of the concave one-dimensional dual
/// restriction when `κ > 0`. Its derivative in the new value `a` is
/// `1 − ⟨w(a), c⟩ + κ‖w(a)‖₁`, piecewise linear and non-increasing, so a
/// bracketed Newton iteration terminates quickly.
fn maximize_coordinate(u: &[f64], mass: f64, c: &[f64], a_old: f64, cap: f64, kappa: f64, lambda: f64) -> f64 {
    // returns (φ'(a), φ''(a))
    let eval = |a: f64| -> (f64, f64) {
        let t = a - a_old;
        let thr = kappa * (mass + t);
        let (mut g, mut h) = (1.0, 0.0);
        for (&uj, &cj) in u.iter().zip(c) {
            let z = uj + t * cj;
            let excess = z.abs() - thr;
            if excess > 0.0 {
                let s = sign(z);
                let wj = s * excess / lambda;
                g += -wj * cj + kappa * wj.abs();
                let dz = cj - kappa * s;
                h -= dz * dz / lambda;
            }
        }
        (g, h)
    };
    let (g_lo, _) = eval(0.0);
    if g_lo <= 0.0 {
        return 0.0;
    }
    let (g_hi, _) = eval(cap);
    if g_hi >= 0.0 {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    let mut a = a_old.clamp(0.0, cap);
    for _ in 0..200 {
        let (g, h) = eval(a);
        if g == 0.0 {
            return a;
        }
        if g > 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        if hi - lo <= f64::EPSILON * cap {
            break;
        }
        let newton = if h < 0.0 { a - g / h } else { f64::NAN };
        a = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    0.5 * (lo + hi)
}

/// Mini-batch Adam on the hinge subgradient. The moment estimates persist
/// across [`AdamTrainer::run_epoch`] calls, which lets a game runner keep
/// training one model while the data shifts underneath it.
#[derive(Debug, Clone)]
pub struct AdamTrainer {
    learning_rate: f64,
    batch_size: usize,
    seed: u64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
    epoch: u64,
}

impl AdamTrainer {
    pub fn new(dim: usize, learning_rate: f64, batch_size: usize, seed: u64) -> Result<Self> {
        SolverMethod::adam(learning_rate, batch_size, 1, seed).validate()?;
        Ok(Self {
            learning_rate,
            batch_size,
            seed,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            step: 0,
            epoch: 0,
        })
    }

    pub fn epochs_done(&self) -> u64 {
        self.epoch
    }

    /// One shuffled pass. The batch loss is the mass-weighted mean hinge loss
    /// plus `(λ/2)‖w‖²`; at a hinge kink the subgradient contribution is zero.
    pub fn run_epoch(&mut self, problem: &HingeProblem<'_, '_>, w: &mut [f64]) {
        let data = problem.data;
        let d = problem.dim();
        debug_assert_eq!(w.len(), d);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.epoch);
        order.shuffle(&mut rng);

        let mut grad = vec![0.0; d];
        for batch in order.chunks(self.batch_size) {
            let wv = dot(w, &problem.shift);
            let w_l1 = norm1(w);
            grad.iter_mut().for_each(|g| *g = 0.0);
            let (mut total, mut active) = (0.0, 0.0);
            for &i in batch {
                let pi = data.weight(i);
                total += pi;
                if problem.slack(i, w, wv, w_l1) > 0.0 {
                    active += pi;
                    axpy(-pi * data.label(i), data.point(i), &mut grad);
                }
            }
            if total > 0.0 {
                for j in 0..d {
                    let g = (grad[j] + active * (problem.shift[j] + problem.l1 * sign(w[j]))) / total;
                    grad[j] = g + problem.lambda * w[j];
                }
            }
            self.apply(&grad, w);
        }
        self.epoch += 1;
    }

    fn apply(&mut self, grad: &[f64], w: &mut [f64]) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step);
        let bc2 = 1.0 - self.beta2.powi(self.step);
        for j in 0..w.len() {
            let g = grad[j];
            self.m[j] = self.beta1 * self.m[j] + (1.0 - self.beta1) * g;
            self.v[j] = self.beta2 * self.v[j] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[j] / bc1;
            let v_hat = self.v[j] / bc2;
            w[j] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub max_pairwise_distance: f64,
    pub weights: Weights,
    /// `2·√(2·tolerance/λ)`: the distance any two certified solutions may differ by.
    pub certified_bound: f64,
    pub solutions: Vec<Weights>,
}

/// Solves the SVM from `trials` different starting points: zero, then
/// Gaussian vectors inside the `√(2/λ)` ball.
pub fn certify_unique(
    data: &Samples<'_>,
    plan: &PerturbationPlan,
    lambda: f64,
    tolerance: f64,
    trials: usize,
) -> Result<UniquenessReport> {
    if trials < 2 {
        return Err(Error::invalid("trials", "need at least two"));
    }
    let d = data.dim();
    let radius = (2.0 / lambda).sqrt();
    let inits: Vec<Vec<f64>> = (0..trials)
        .map(|k| {
            if k == 0 {
                return vec![0.0; d];
            }
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let scale = radius / norm2_sq(&g).sqrt().max(f64::MIN_POSITIVE);
            g.into_iter().map(|x| x * scale).collect()
        })
        .collect();
    certify_unique_from(data, plan, lambda, tolerance, &inits)
}

pub fn certify_unique_from(
    data: &Samples<'_>,
    plan: &PerturbationPlan,
    lambda: f64,
    tolerance: f64,
    inits: &[Vec<f64>],
) -> Result<UniquenessReport> {
    let mut solutions = Vec::with_capacity(inits.len());
    for init in inits {
        let cfg = OptimizerConfig::exact(lambda, tolerance).with_init(init.clone());
        solutions.push(fit_svm(data, plan, &cfg)?.weights);
    }
    let mut max_pairwise_distance: f64 = 0.0;
    for a in 0..solutions.len() {
        for b in a + 1..solutions.len() {
            max_pairwise_distance = max_pairwise_distance.max(distance2(&solutions[a].w, &solutions[b].w));
        }
    }
    Ok(UniquenessReport {
        max_pairwise_distance,
        weights: solutions[0].clone(),
        certified_bound: 2.0 * (2.0 * tolerance / lambda).sqrt(),
        solutions,
    })
}
