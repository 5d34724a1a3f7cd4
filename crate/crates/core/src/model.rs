//! Linear model, hinge objectives and class-conditional perturbation plans.
//!
//! A plan stores a shift `v` with `‖v‖∞ ≤ ε`; the perturbation it realizes is
//! `δ(x, y) = −y·v`, so every point of class `y` moves by the same vector.
//! The perturbed margin is therefore `y⟨w, x⟩ − ⟨w, v⟩`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dist::{non_robust_mask, DistributionSpec, Samples};
use crate::error::{check_dim, Error, Result};
use crate::format::decimal17;
use crate::linalg::{dot, norm1, norm2_sq, norm_inf, sign};

#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub w: Vec<f64>,
    pub lambda: f64,
}

impl Weights {
    pub fn new(w: Vec<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("{lambda} must be positive")));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("w", "entries must be finite"));
        }
        Ok(Self { w, lambda })
    }

    pub fn zeros(dim: usize, lambda: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], lambda)
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Radius `√(2/λ)` of the ball containing every exact minimizer.
    pub fn norm_bound(&self) -> f64 {
        (2.0 / self.lambda).sqrt()
    }

    /// CSV `index,w`, one-based indices.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,w")?;
        for (i, w) in self.w.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, decimal17(*w))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, lambda: f64) -> Result<Self> {
        Self::new(read_indexed_column(input, "w")?, lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPlan {
    v: Vec<f64>,
    eps: f64,
}

impl PerturbationPlan {
    pub fn new(v: Vec<f64>, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::invalid("eps", format!("{eps} must be non-negative")));
        }
        if v.iter().any(|x| !x.is_finite()) || norm_inf(&v) > eps {
            return Err(Error::invalid("v", format!("shift leaves the ball of radius {eps}")));
        }
        Ok(Self { v, eps })
    }

    pub fn zero(dim: usize, eps: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], eps)
    }

    pub fn shift(&self) -> &[f64] {
        &self.v
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Realized perturbation `δ(x, y) = −y·v`.
    pub fn delta(&self, y: f64) -> Vec<f64> {
        self.v.iter().map(|v| -y * v).collect()
    }

    /// CSV `index,v`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,v")?;
        for (i, v) in self.v.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, decimal17(*v))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, eps: f64) -> Result<Self> {
        Self::new(read_indexed_column(input, "v")?, eps)
    }
}

fn read_indexed_column<R: BufRead>(input: R, column: &str) -> Result<Vec<f64>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != format!("index,{column}") {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected header `index,{column}`"),
        });
    }
    let mut values = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = k + 2;
        let bad = |reason: &str| Error::Parse {
            line: lineno,
            reason: reason.to_string(),
        };
        let (idx, val) = line.split_once(',').ok_or_else(|| bad("expected two fields"))?;
        let idx: usize = idx.trim().parse().map_err(|_| bad("bad index"))?;
        if idx != values.len() + 1 {
            return Err(bad("indices must be consecutive from 1"));
        }
        values.push(val.trim().parse().map_err(|_| bad("bad number"))?);
    }
    Ok(values)
}

/// `max(0, 1 − y⟨w, x⟩)`
pub fn hinge_loss(weights: &Weights, x: &[f64], y: f64) -> Result<f64> {
    check_dim(weights.dim(), x.len())?;
    Ok((1.0 - y * dot(&weights.w, x)).max(0.0))
}

/// `max(0, 1 − y⟨w, x + δ(x, y)⟩) = max(0, 1 − y⟨w, x⟩ + ⟨w, v⟩)`
pub fn perturbed_loss(weights: &Weights, x: &[f64], y: f64, plan: &PerturbationPlan) -> Result<f64> {
    check_dim(weights.dim(), x.len())?;
    check_dim(weights.dim(), plan.dim())?;
    Ok((1.0 - y * dot(&weights.w, x) + dot(&weights.w, &plan.v)).max(0.0))
}

/// Adversary's utility: expected perturbed hinge loss plus `(λ/2)‖w‖²`.
/// The regularizer does not depend on the plan but is part of the payoff.
pub fn row_utility(plan: &PerturbationPlan, weights: &Weights, data: &Samples<'_>) -> Result<f64> {
    check_dim(weights.dim(), data.dim())?;
    check_dim(weights.dim(), plan.dim())?;
    svm_objective(&weights.w, weights.lambda, data, plan.shift())
}

/// Regularized hinge objective of `w` on data shifted by `shift`.
pub fn svm_objective(w: &[f64], lambda: f64, data: &Samples<'_>, shift: &[f64]) -> Result<f64> {
    hinge_objective(w, lambda, data, shift, 0.0)
}

/// Robust objective `E[max(0, 1 − y⟨w, x⟩ + ε‖w‖₁)] + (λ/2)‖w‖²`.
pub fn oat_objective(w: &[f64], lambda: f64, data: &Samples<'_>, eps: f64) -> Result<f64> {
    let zero = vec![0.0; w.len()];
    hinge_objective(w, lambda, data, &zero, eps)
}

/// `E[max(0, 1 − y⟨w, x⟩ + ⟨w, v⟩ + κ‖w‖₁)] + (λ/2)‖w‖²`, the family every
/// solver in this crate minimizes.
pub fn hinge_objective(
    w: &[f64],
    lambda: f64,
    data: &Samples<'_>,
    shift: &[f64],
    l1: f64,
) -> Result<f64> {
    check_dim(w.len(), data.dim())?;
    check_dim(w.len(), shift.len())?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let offset = 1.0 + dot(w, shift) + l1 * norm1(w);
    let mut risk = 0.0;
    for i in 0..data.len() {
        let a = offset - data.label(i) * dot(w, data.point(i));
        if a > 0.0 {
            risk += data.weight(i) * a;
        }
    }
    Ok(risk + 0.5 * lambda * norm2_sq(w))
}

/// Plan `v = ε·sign(w)` maximizing the loss of every point against `w`.
pub fn worst_case_plan(w: &[f64], eps: f64) -> Result<PerturbationPlan> {
    PerturbationPlan::new(w.iter().map(|&x| eps * sign(x)).collect(), eps)
}

/// Equilibrium plan: full budget `ε·sign(μ_i)` against robust features and
/// `v_i = μ_i` on non-robust ones, which moves their conditional mean to zero.
pub fn ne_plan(means: &[f64], eps: f64) -> Result<PerturbationPlan> {
    let v = means
        .iter()
        .map(|&m| if m.abs() <= eps { m } else { eps * sign(m) })
        .collect();
    PerturbationPlan::new(v, eps)
}

pub fn ne_plan_for(spec: &DistributionSpec, eps: f64) -> Result<PerturbationPlan> {
    ne_plan(&spec.means(), eps)
}

/// Worst-case margin `y⟨w, x⟩ − ε‖w‖₁` over the ℓ∞ ball of radius `eps`.
/// Positive means the point is classified correctly under every perturbation.
pub fn certified_margin(weights: &Weights, x: &[f64], y: f64, eps: f64) -> Result<f64> {
    check_dim(weights.dim(), x.len())?;
    Ok(y * dot(&weights.w, x) - eps * norm1(&weights.w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub standard: f64,
    pub certified_robust: f64,
}

/// Weighted standard and certified-robust accuracy. A margin of exactly zero
/// counts as an error in both.
pub fn evaluate(weights: &Weights, data: &Samples<'_>, eps: f64) -> Result<Accuracy> {
    check_dim(weights.dim(), data.dim())?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let l1 = eps * norm1(&weights.w);
    // uniform data is counted exactly so that e.g. 698/1000 prints as 0.698
    let unit = |i: usize| if data.is_uniform() { 1.0 } else { data.weight(i) };
    let (mut std_acc, mut rob_acc) = (0.0, 0.0);
    for i in 0..data.len() {
        let m = data.label(i) * dot(&weights.w, data.point(i));
        if m > 0.0 {
            std_acc += unit(i);
        }
        if m - l1 > 0.0 {
            rob_acc += unit(i);
        }
    }
    if data.is_uniform() {
        let n = data.len() as f64;
        std_acc /= n;
        rob_acc /= n;
    }
    Ok(Accuracy {
        standard: std_acc.min(1.0),
        certified_robust: rob_acc.min(1.0),
    })
}

/// `Σ_{|μ_i| ≤ ε} w_i² / ‖w‖²`
pub fn nonrobust_mass(w: &[f64], means: &[f64], eps: f64) -> Result<f64> {
    check_dim(w.len(), means.len())?;
    let total = norm2_sq(w);
    if total == 0.0 {
        return Err(Error::ZeroWeights);
    }
    let nr: f64 = w
        .iter()
        .zip(non_robust_mask(means, eps))
        .filter(|(_, nr)| *nr)
        .map(|(x, _)| x * x)
        .sum();
    Ok(nr / total)
}
