//! Brute-force and closed-form checks of the structural results: threshold
//! conditions for reliance on non-robust features, the `E[max(0, X)]`
//! sandwich, sign and norm lemmas for the exact SVM solution, grid maximality
//! of the worst-case perturbation, and trajectory properties of adversarial
//! training.
//!
//! Checks report margins (how far inside the bound an instance lands) so that
//! near misses are visible, not only a verdict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::dist::{non_robust_mask, DistributionSpec, FeatureKind, FeatureSpec, Samples};
use crate::error::{check_dim, Error, Result};
use crate::game::Trajectory;
use crate::linalg::{dot, norm2, sign};
use crate::model::{worst_case_plan, PerturbationPlan};
use crate::solve::{fit_svm, OptimizerConfig};

/// Largest `d + 1` for which the supremum over `s ∈ {−1, 0, 1}^{d+1}` is
/// enumerated.
pub const EXACT_SUP_MAX_DIM: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One named verdict with its tightest margin (negative on failure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub margin: f64,
    pub detail: String,
}

impl Check {
    pub fn from_margin(name: impl Into<String>, margin: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: if margin >= 0.0 { Status::Pass } else { Status::Fail },
            margin,
            detail: detail.into(),
        }
    }

    pub fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            margin: f64::NAN,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupStrategy {
    /// Enumerate when `d + 1 ≤ 13`, otherwise use the closed-form maximizer.
    #[default]
    Auto,
    Exact,
    ClosedForm,
}

/// Quantities at one sign pattern `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternValue {
    pub s: Vec<i8>,
    /// `‖μ + εs‖₂`
    pub norm: f64,
    /// `σ̄_{μ,s}`
    pub sigma_bar: f64,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub p: f64,
    pub eps: f64,
    pub lambda: f64,
    pub sigma_max: f64,
    pub mu_norm: f64,
    /// `‖μ′‖₂` with the first coordinate zeroed.
    pub mu_prime_norm: f64,
    pub sigma_bar_mu: f64,
    /// Pattern attaining the supremum under the strategy used.
    pub sup_pattern: PatternValue,
    /// Pattern from the closed-form rule `s_i = −sign(μ_i)` iff `2|μ_i| > ε`.
    pub closed_form_pattern: PatternValue,
    pub exact_sup: bool,
    pub p_threshold_standard: f64,
    pub p_threshold_at: f64,
    pub p_threshold_at_simplified: f64,
    /// `σ_max ≥ 1` uses `σ_max` directly; otherwise the widened
    /// `σ_max + (1+ε)√(1−σ_max²)/‖μ′‖₂`.
    pub simplified_sigma: f64,
    /// `ε > 2μ_j` for every `j ≥ 2`, under which the simplified threshold is a
    /// lower bound of the supremum threshold.
    pub simplified_applicable: bool,
    pub holds_standard: bool,
    pub holds_at: bool,
    pub holds_at_simplified: bool,
    /// Threshold minus `p`; positive when the condition holds.
    pub margin_standard: f64,
    pub margin_at: f64,
    pub margin_at_simplified: f64,
    /// Lower bound on the non-robust weight mass of AT iterates.
    pub at_mass_bound: f64,
    /// Lower bound on the non-robust weight mass of the standard solution.
    pub standard_mass_bound: f64,
}

/// `½(σ̄/n + λ/(2n²)) + ½√(2/λ)·σ̄`, infinite when `n = 0`.
fn threshold_term(norm: f64, sigma_bar: f64, lambda: f64) -> f64 {
    if norm == 0.0 {
        return f64::INFINITY;
    }
    0.5 * (sigma_bar / norm + lambda / (2.0 * norm * norm)) + 0.5 * (2.0 / lambda).sqrt() * sigma_bar
}

fn pattern_value(means: &[f64], vars: &[f64], eps: f64, lambda: f64, s: Vec<i8>) -> PatternValue {
    let (mut n2, mut num) = (0.0, 0.0);
    for ((&m, &v), &si) in means.iter().zip(vars).zip(&s) {
        let a = m + eps * si as f64;
        n2 += a * a;
        num += a * a * v;
    }
    let norm = n2.sqrt();
    let sigma_bar = if n2 > 0.0 { (num / n2).sqrt() } else { 0.0 };
    PatternValue {
        term: threshold_term(norm, sigma_bar, lambda),
        s,
        norm,
        sigma_bar,
    }
}

pub fn closed_form_pattern(means: &[f64], eps: f64) -> Vec<i8> {
    means
        .iter()
        .map(|&m| if 2.0 * m.abs() > eps { -sign(m) as i8 } else { 0 })
        .collect()
}

/// Pattern maximizing the threshold term over all of `{−1, 0, 1}^n`.
/// Ties keep the first pattern in base-3 order (digit 0 ↦ s = −1).
pub fn exact_sup_pattern(means: &[f64], vars: &[f64], eps: f64, lambda: f64) -> Result<PatternValue> {
    let n = means.len();
    if n > EXACT_SUP_MAX_DIM {
        return Err(Error::EnumerationTooLarge {
            dim: n,
            limit: EXACT_SUP_MAX_DIM,
        });
    }
    let total = 3usize.pow(n as u32);
    let mut best: Option<PatternValue> = None;
    let mut s = vec![0i8; n];
    for code in 0..total {
        let mut c = code;
        for si in s.iter_mut() {
            *si = (c % 3) as i8 - 1;
            c /= 3;
        }
        let pv = pattern_value(means, vars, eps, lambda, s.clone());
        if best.as_ref().is_none_or(|b| pv.term > b.term) {
            best = Some(pv);
        }
    }
    Ok(best.expect("at least one pattern"))
}

/// Threshold conditions for a spec whose first feature is two-point.
pub fn theorem_conditions(spec: &DistributionSpec, eps: f64, lambda: f64, strategy: SupStrategy) -> Result<ConditionReport> {
    let p = match spec.features()[0].kind() {
        FeatureKind::TwoPoint { p } => *p,
        _ => return Err(Error::invalid("features", "first feature must be two-point")),
    };
    if !(eps >= 0.0) {
        return Err(Error::invalid("eps", "must be non-negative"));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", "must be positive"));
    }
    let means = spec.means();
    let vars = spec.variances();
    let n = means.len();
    let sigma_max = vars.iter().fold(0.0f64, |a, &v| a.max(v)).sqrt();
    let mu_norm = norm2(&means);
    let mu_prime_norm = norm2(&means[1..]);

    let unperturbed = pattern_value(&means, &vars, eps, lambda, vec![0; n]);
    let closed = pattern_value(&means, &vars, eps, lambda, closed_form_pattern(&means, eps));
    let exact_sup = match strategy {
        SupStrategy::Exact => true,
        SupStrategy::ClosedForm => false,
        SupStrategy::Auto => n <= EXACT_SUP_MAX_DIM,
    };
    let sup = if exact_sup {
        exact_sup_pattern(&means, &vars, eps, lambda)?
    } else {
        closed.clone()
    };

    let simplified_sigma = if sigma_max >= 1.0 || mu_prime_norm == 0.0 {
        sigma_max
    } else {
        sigma_max + (1.0 + eps) * (1.0 - sigma_max * sigma_max).sqrt() / mu_prime_norm
    };
    let p_threshold_standard = 1.0 - unperturbed.term;
    let p_threshold_at = 1.0 - sup.term;
    let p_threshold_at_simplified = 1.0 - threshold_term(mu_prime_norm, simplified_sigma, lambda);

    let tail = &means[1..];
    let at_mass_bound = {
        let a = (1.0 - eps) * (1.0 - eps);
        a / (a + tail.iter().map(|m| (m + eps) * (m + eps)).sum::<f64>())
    };
    let standard_mass_bound = 1.0 / (1.0 + tail.iter().map(|m| m * m).sum::<f64>());

    Ok(ConditionReport {
        p,
        eps,
        lambda,
        sigma_max,
        mu_norm,
        mu_prime_norm,
        sigma_bar_mu: unperturbed.sigma_bar,
        sup_pattern: sup,
        closed_form_pattern: closed,
        exact_sup,
        p_threshold_standard,
        p_threshold_at,
        p_threshold_at_simplified,
        simplified_sigma,
        simplified_applicable: tail.iter().all(|&m| eps > 2.0 * m),
        holds_standard: p < p_threshold_standard,
        holds_at: p < p_threshold_at,
        holds_at_simplified: p < p_threshold_at_simplified,
        margin_standard: p_threshold_standard - p,
        margin_at: p_threshold_at - p,
        margin_at_simplified: p_threshold_at_simplified - p,
        at_mass_bound,
        standard_mass_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmaxBounds {
    pub mean: f64,
    pub variance: f64,
    pub emax: f64,
    pub lower: f64,
    pub upper: f64,
}

impl EmaxBounds {
    fn new(mean: f64, variance: f64, emax: f64) -> Self {
        Self {
            mean,
            variance,
            emax,
            lower: mean.max(0.0),
            upper: mean.max(0.0) + 0.5 * variance.max(0.0).sqrt(),
        }
    }
}

/// Exact moments of a discrete law given as `(value, probability)` pairs.
pub fn emax_bounds_exact(law: &[(f64, f64)]) -> EmaxBounds {
    let mean: f64 = law.iter().map(|(v, q)| v * q).sum();
    let variance: f64 = law.iter().map(|(v, q)| q * (v - mean) * (v - mean)).sum();
    let emax: f64 = law.iter().map(|(v, q)| q * v.max(0.0)).sum();
    EmaxBounds::new(mean, variance, emax)
}

/// `max(0, E X) ≤ E max(0, X) ≤ max(0, E X) + ½√Var X` for a discrete law.
/// The slack covers only floating-point summation error.
pub fn check_emax_bounds(law: &[(f64, f64)]) -> Check {
    let b = emax_bounds_exact(law);
    let scale: f64 = law.iter().map(|(v, q)| q * v.abs()).sum::<f64>() + 1.0;
    let slack = 64.0 * f64::EPSILON * scale;
    let margin = (b.emax - b.lower).min(b.upper - b.emax) + slack;
    Check::from_margin(
        "emax_bounds",
        margin,
        format!("E max(0,X) = {} in [{}, {}]", b.emax, b.lower, b.upper),
    )
}

/// Monte-Carlo version for the law of `x | y = +1` of a feature, with known
/// mean and variance and a 5-sigma band on the estimate of `E max(0, X)`.
pub fn check_emax_bounds_monte_carlo(feature: &FeatureSpec, n: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let z = feature.draw(1.0, &mut rng).max(0.0);
        s += z;
        s2 += z * z;
    }
    let nf = n as f64;
    let est = s / nf;
    let se = ((s2 / nf - est * est).max(0.0) / nf).sqrt();
    let b = EmaxBounds::new(feature.mean(), feature.variance(), est);
    let band = 5.0 * se;
    let margin = (est - b.lower + band).min(b.upper - est + band);
    Check::from_margin(
        "emax_bounds_monte_carlo",
        margin,
        format!("estimate {est} ± {band} against [{}, {}]", b.lower, b.upper),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignLemmaReport {
    pub w: Vec<f64>,
    pub means: Vec<f64>,
    /// Weight-space slack `√(2·gap/λ)` from the solver certificate, floored
    /// at the rounding error of the primal recovery.
    pub slack: f64,
    /// Smallest signed margin over coordinates; negative means a violation.
    pub margin: f64,
}

/// The exact SVM solution agrees in sign with every feature mean and
/// vanishes where the mean is zero. Requires a finitely supported spec.
pub fn check_sign_lemma(spec: &DistributionSpec, lambda: f64, gap_tolerance: f64) -> Result<SignLemmaReport> {
    let data = Samples::from_spec(spec)?;
    let plan = PerturbationPlan::zero(spec.dim(), 0.0)?;
    let fit = fit_svm(&data, &plan, &OptimizerConfig::exact(lambda, gap_tolerance))?;
    let rounding = 64.0 * f64::EPSILON * (1.0 + norm2(&fit.weights.w));
    let slack = fit.weight_radius().unwrap_or(0.0).max(rounding);
    let means = spec.means();
    let margin = sign_margin(&fit.weights.w, &means, slack);
    Ok(SignLemmaReport {
        w: fit.weights.w,
        means,
        slack,
        margin,
    })
}

/// `min_i` of `slack + w_i·sign(μ_i)` (non-zero mean) or `slack − |w_i|` (zero mean).
pub fn sign_margin(w: &[f64], means: &[f64], slack: f64) -> f64 {
    w.iter()
        .zip(means)
        .map(|(&wi, &m)| if m == 0.0 { slack - wi.abs() } else { slack + wi * sign(m) })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    pub norm: f64,
    pub upper: f64,
    /// `None` when the lower bound's right side is not positive.
    pub lower: Option<f64>,
    pub slack: f64,
    pub upper_margin: f64,
    pub lower_margin: Option<f64>,
}

impl NormBoundReport {
    pub fn passed(&self) -> bool {
        self.upper_margin >= 0.0 && self.lower_margin.is_none_or(|m| m >= 0.0)
    }
}

/// `‖w‖ ≤ √(2/λ)` and, for an unshifted fit, the moment lower bound
/// `‖w‖ ≥ (1 − ½(σ̄_μ/‖μ‖ + λ/(2‖μ‖²)))/‖μ‖`. Pass `shift` to evaluate the
/// lower bound for data shifted by a plan (means become `μ − v`).
pub fn check_norm_bounds(w: &[f64], spec: &DistributionSpec, lambda: f64, shift: Option<&[f64]>, slack: f64) -> Result<NormBoundReport> {
    check_dim(spec.dim(), w.len())?;
    let mut means = spec.means();
    if let Some(v) = shift {
        check_dim(spec.dim(), v.len())?;
        means.iter_mut().zip(v).for_each(|(m, v)| *m -= v);
    }
    let norm = norm2(w);
    let upper = (2.0 / lambda).sqrt();
    let pv = pattern_value(&means, &spec.variances(), 0.0, lambda, vec![0; means.len()]);
    let lower = if pv.norm > 0.0 {
        let rhs = (1.0 - 0.5 * (pv.sigma_bar / pv.norm + lambda / (2.0 * pv.norm * pv.norm))) / pv.norm;
        (rhs > 0.0).then_some(rhs)
    } else {
        None
    };
    Ok(NormBoundReport {
        norm,
        upper,
        lower,
        slack,
        upper_margin: upper + slack - norm,
        lower_margin: lower.map(|l| norm + slack - l),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCase {
    pub worst: f64,
    pub grid_max: f64,
}

impl GridCase {
    pub fn attains(&self) -> bool {
        self.worst >= self.grid_max
    }
}

fn loss_at(w: &[f64], x: &[f64], y: f64, delta: &[f64]) -> f64 {
    let z: f64 = w.iter().zip(x).zip(delta).map(|((w, x), d)| w * (x + d)).sum();
    (1.0 - y * z).max(0.0)
}

/// Loss under `perturbation(w, y)` against the maximum over the grid
/// `{−ε + 2εm/(k−1)}^d`. Both use the same arithmetic, so the comparison is exact.
pub fn lemma1_grid_case(
    w: &[f64],
    x: &[f64],
    y: f64,
    eps: f64,
    k: usize,
    perturbation: &dyn Fn(&[f64], f64) -> Vec<f64>,
) -> Result<GridCase> {
    let d = w.len();
    check_dim(d, x.len())?;
    if d > 5 || !(2..=7).contains(&k) {
        return Err(Error::invalid("grid", format!("need d ≤ 5 and 2 ≤ k ≤ 7, got d = {d}, k = {k}")));
    }
    let levels: Vec<f64> = (0..k)
        .map(|m| -eps + 2.0 * eps * m as f64 / (k - 1) as f64)
        .collect();
    let mut delta = vec![0.0; d];
    let mut grid_max = f64::NEG_INFINITY;
    for code in 0..k.pow(d as u32) {
        let mut c = code;
        for dj in delta.iter_mut() {
            *dj = levels[c % k];
            c /= k;
        }
        grid_max = grid_max.max(loss_at(w, x, y, &delta));
    }
    Ok(GridCase {
        worst: loss_at(w, x, y, &perturbation(w, y)),
        grid_max,
    })
}

/// `δ = −yε·sign(w)`
pub fn worst_case_delta(w: &[f64], y: f64, eps: f64) -> Vec<f64> {
    worst_case_plan(w, eps).expect("eps is non-negative").delta(y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub cases: usize,
    pub failures: usize,
    /// Cases whose worst-case loss is zero (the point stays certified).
    pub zero_loss: usize,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Random `(w, x, y)` with `w ~ N(0, I)`, `x ~ U[−1, 1]^d`, uniform `y`.
pub fn check_lemma1_grid(d: usize, k: usize, eps: f64, cases: usize, seed: u64) -> Result<GridReport> {
    check_lemma1_grid_with(d, k, eps, cases, seed, &|w: &[f64], y: f64| worst_case_delta(w, y, eps))
}

/// As [`check_lemma1_grid`] with a caller-supplied perturbation; used as a
/// negative control with deliberately wrong plans.
pub fn check_lemma1_grid_with(
    d: usize,
    k: usize,
    eps: f64,
    cases: usize,
    seed: u64,
    perturbation: &dyn Fn(&[f64], f64) -> Vec<f64>,
) -> Result<GridReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let mut report = GridReport {
        cases,
        failures: 0,
        zero_loss: 0,
    };
    for _ in 0..cases {
        let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x: Vec<f64> = (0..d).map(|_| unit.sample(&mut rng)).collect();
        let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let case = lemma1_grid_case(&w, &x, y, eps, k, perturbation)?;
        if !case.attains() {
            report.failures += 1;
        }
        if case.worst == 0.0 {
            report.zero_loss += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignFlipReport {
    pub pairs_checked: usize,
    pub violations: usize,
    /// Pairs whose earlier weight is within tolerance of zero; no sign is implied.
    pub unconstrained: usize,
    /// Largest `w_j^t·w_j^{t+1}` seen.
    pub worst_product: f64,
}

impl SignFlipReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Along an adversarial-training run, every non-robust weight changes sign
/// between consecutive rounds: `w_j^t·w_j^{t+1} ≤ tol²`.
pub fn check_sign_flips(traj: &Trajectory, means: &[f64], eps: f64, weight_tol: f64) -> SignFlipReport {
    let mask = non_robust_mask(means, eps);
    let mut report = SignFlipReport {
        pairs_checked: 0,
        violations: 0,
        unconstrained: 0,
        worst_product: f64::NEG_INFINITY,
    };
    for pair in traj.records.windows(2) {
        let (a, b) = (&pair[0].w.w, &pair[1].w.w);
        for j in (0..a.len()).filter(|&j| mask[j]) {
            if a[j].abs() <= weight_tol {
                report.unconstrained += 1;
                continue;
            }
            report.pairs_checked += 1;
            let prod = a[j] * b[j];
            report.worst_product = report.worst_product.max(prod);
            if prod > weight_tol * weight_tol {
                report.violations += 1;
            }
        }
    }
    report
}

/// `‖w^t − w^{t−1}‖² ≥ Σ_{non-robust} (w_j^t)² − tol` every round.
pub fn check_corollary(traj: &Trajectory, means: &[f64], eps: f64, tol: f64) -> Check {
    let mask = non_robust_mask(means, eps);
    let margin = traj
        .records
        .iter()
        .map(|r| {
            let nr: f64 = r.w.w.iter().zip(&mask).filter(|(_, m)| **m).map(|(w, _)| w * w).sum();
            r.delta_w_norm * r.delta_w_norm - nr + tol
        })
        .fold(f64::INFINITY, f64::min);
    Check::from_margin(
        "corollary_delta_bound",
        margin,
        format!("{} rounds", traj.records.len()),
    )
}

/// Finite-horizon substitute for non-convergence: over the second half of
/// the run, `‖w^t − w^{t−1}‖ ≥ c·‖w^t‖ − tol` with
/// `c = (1−ε)/√((1−ε)² + Σ_{j≥2}(μ_j+ε)²)`. Skipped unless the threshold
/// condition holds for the spec.
pub fn check_nonconvergence_proxy(traj: &Trajectory, spec: &DistributionSpec, tol: f64) -> Result<Check> {
    let name = "nonconvergence_proxy";
    let cond = theorem_conditions(spec, traj.config.eps, traj.config.lambda, SupStrategy::Auto)?;
    if !cond.holds_at {
        return Ok(Check::skipped(
            name,
            format!("threshold condition fails (margin {})", cond.margin_at),
        ));
    }
    let c = cond.at_mass_bound.sqrt();
    let half = traj.records.len() / 2;
    let margin = traj.records[half..]
        .iter()
        .map(|r| r.delta_w_norm - c * r.w_norm + tol)
        .fold(f64::INFINITY, f64::min);
    Ok(Check::from_margin(name, margin, format!("c = {c}")))
}

/// `Σ_{j≥2} w_j μ_j − w_1`: non-negative when the model leans on the
/// non-robust features at least as much as on the robust one.
pub fn standard_reliance_margin(w: &[f64], means: &[f64]) -> f64 {
    dot(&w[1..], &means[1..]) - w[0]
}

/// Shape of the non-robust features drawn by [`random_def3_spec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonRobustShape {
    TwoPoint,
    Discrete,
}

/// Random discrete law with the given mean: 2 or 3 atoms in `[−1, 1]`,
/// shifted to hit the mean exactly up to rounding.
pub fn random_law<R: Rng>(rng: &mut R, mean: f64) -> FeatureSpec {
    let m = rng.random_range(2..=3);
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut atoms: Vec<(f64, f64)> = raw.iter().map(|q| (rng.random_range(-1.0..1.0), q / total)).collect();
    let fix = 1.0 - atoms.iter().map(|a| a.1).sum::<f64>();
    atoms[0].1 += fix;
    let cur: f64 = atoms.iter().map(|(v, q)| v * q).sum();
    for a in &mut atoms {
        a.0 += mean - cur;
    }
    FeatureSpec::discrete(atoms).expect("probabilities sum to one")
}

/// Robust two-point feature with `2p−1 ∈ (ε + 0.02, ε + 0.3)` followed by
/// `nonrobust` features with means in `(0.3ε, 0.95ε)`. Keeping the robust
/// feature weak makes the non-robust ones matter to the defender.
pub fn random_def3_spec<R: Rng>(rng: &mut R, nonrobust: usize, eps: f64, shape: NonRobustShape) -> DistributionSpec {
    let m1 = rng.random_range((eps + 0.02).min(0.9)..(eps + 0.3).min(0.95));
    let mut features = vec![FeatureSpec::two_point(0.5 + 0.5 * m1).expect("p in range")];
    for _ in 0..nonrobust {
        let mu = eps * rng.random_range(0.3..0.95);
        features.push(match shape {
            NonRobustShape::TwoPoint => FeatureSpec::two_point(0.5 + 0.5 * mu).expect("p in range"),
            NonRobustShape::Discrete => random_law(rng, mu),
        });
    }
    DistributionSpec::new(features).expect("non-empty")
}

/// A game instance with mixed features: the robust two-point label copy, one
/// robust discrete feature, and `nonrobust` features with `|μ| ≤ 0.9ε` of
/// either sign (some exactly zero).
pub fn random_game_spec<R: Rng>(rng: &mut R, nonrobust: usize, eps: f64) -> DistributionSpec {
    let mut features = random_def3_spec(rng, 0, eps, NonRobustShape::Discrete).features().to_vec();
    let sgn = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let robust = sgn * rng.random_range(1.5 * eps..1.5 * eps + 0.4);
    features.push(random_law(rng, robust));
    for _ in 0..nonrobust {
        let mu = if rng.random_range(0..4) == 0 { 0.0 } else { eps * rng.random_range(-0.9..0.9) };
        features.push(random_law(rng, mu));
    }
    DistributionSpec::new(features).expect("non-empty")
}

/// Features of arbitrary sign with some exactly centered, for the sign lemma.
pub fn random_discrete_spec<R: Rng>(rng: &mut R, dim: usize) -> DistributionSpec {
    let features = (0..dim)
        .map(|_| {
            let mu = match rng.random_range(0..4) {
                0 => 0.0,
                _ => rng.random_range(-0.5..0.5),
            };
            random_law(rng, mu)
        })
        .collect();
    DistributionSpec::new(features).expect("non-empty")
}
