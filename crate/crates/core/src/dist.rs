//! Symmetric-mean feature distributions.
//!
//! Every feature is drawn independently given the label `y ∈ {−1, +1}` (uniform
//! prior) and satisfies `E[x_i | y] = y·μ_i`. Three laws are supported:
//! a two-point feature equal to `y` with probability `p` and `−y` otherwise,
//! a Gaussian `N(y·μ, σ²)`, and an arbitrary finite law stored for `y = +1`
//! and mirrored for `y = −1`.

use std::borrow::Cow;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format;

/// Largest joint support [`enumerate_support`] will materialize.
pub const SUPPORT_CAP: usize = 1_000_000;

const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    /// `x = y` with probability `p`, `x = −y` otherwise.
    TwoPoint { p: f64 },
    Gaussian { mean: f64, stdev: f64 },
    /// `(value, probability)` pairs of the law of `x` given `y = +1`.
    DiscreteSymmetric { atoms: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FeatureKind", into = "FeatureKind")]
pub struct FeatureSpec {
    kind: FeatureKind,
}

impl TryFrom<FeatureKind> for FeatureSpec {
    type Error = Error;

    fn try_from(kind: FeatureKind) -> Result<Self> {
        match kind {
            FeatureKind::TwoPoint { p } => Self::two_point(p),
            FeatureKind::Gaussian { mean, stdev } => Self::gaussian(mean, stdev),
            FeatureKind::DiscreteSymmetric { atoms } => Self::discrete(atoms),
        }
    }
}

impl From<FeatureSpec> for FeatureKind {
    fn from(f: FeatureSpec) -> Self {
        f.kind
    }
}

impl FeatureSpec {
    pub fn two_point(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("{p} is not a probability")));
        }
        Ok(Self {
            kind: FeatureKind::TwoPoint { p },
        })
    }

    pub fn gaussian(mean: f64, stdev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        if !(stdev > 0.0 && stdev.is_finite()) {
            return Err(Error::invalid("stdev", format!("{stdev} must be positive")));
        }
        Ok(Self {
            kind: FeatureKind::Gaussian { mean, stdev },
        })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("atoms", "empty support"));
        }
        if atoms.iter().any(|&(v, q)| !v.is_finite() || !(0.0..=1.0).contains(&q)) {
            return Err(Error::invalid(
                "atoms",
                "values must be finite and probabilities in [0, 1]",
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invalid(
                "atoms",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        Ok(Self {
            kind: FeatureKind::DiscreteSymmetric { atoms },
        })
    }

    /// Two equally likely values `μ ± σ` given `y = +1`: mean `μ`, variance `σ²`.
    pub fn symmetric_pair(mean: f64, spread: f64) -> Result<Self> {
        Self::discrete(vec![(mean + spread, 0.5), (mean - spread, 0.5)])
    }

    pub fn kind(&self) -> &FeatureKind {
        &self.kind
    }

    /// `E[x | y = +1]`.
    pub fn mean(&self) -> f64 {
        match &self.kind {
            FeatureKind::TwoPoint { p } => 2.0 * p - 1.0,
            FeatureKind::Gaussian { mean, .. } => *mean,
            FeatureKind::DiscreteSymmetric { atoms } => atoms.iter().map(|(v, q)| v * q).sum(),
        }
    }

    /// `Var(x | y)`, identical for both labels.
    pub fn variance(&self) -> f64 {
        match &self.kind {
            FeatureKind::TwoPoint { .. } => {
                let m = self.mean();
                1.0 - m * m
            }
            FeatureKind::Gaussian { stdev, .. } => stdev * stdev,
            FeatureKind::DiscreteSymmetric { atoms } => {
                let m = self.mean();
                atoms.iter().map(|(v, q)| q * (v - m) * (v - m)).sum()
            }
        }
    }

    pub fn stdev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn is_finite_support(&self) -> bool {
        !matches!(self.kind, FeatureKind::Gaussian { .. })
    }

    /// Atoms of `x | y` as `(value, probability)`, or `None` for Gaussians.
    pub fn support(&self, y: f64) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            FeatureKind::TwoPoint { p } => Some(vec![(y, *p), (-y, 1.0 - p)]),
            FeatureKind::Gaussian { .. } => None,
            FeatureKind::DiscreteSymmetric { atoms } => {
                Some(atoms.iter().map(|&(v, q)| (y * v, q)).collect())
            }
        }
    }

    pub(crate) fn draw<R: Rng>(&self, y: f64, rng: &mut R) -> f64 {
        match &self.kind {
            FeatureKind::TwoPoint { p } => {
                if rng.random::<f64>() < *p {
                    y
                } else {
                    -y
                }
            }
            FeatureKind::Gaussian { mean, stdev } => {
                let z: f64 = rng.sample(StandardNormal);
                y * mean + stdev * z
            }
            FeatureKind::DiscreteSymmetric { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(v, q) in atoms {
                    acc += q;
                    if u < acc {
                        return y * v;
                    }
                }
                // u landed in the rounding slack above the cumulative sum
                y * atoms.iter().rev().find(|a| a.1 > 0.0).unwrap_or(&atoms[0]).0
            }
        }
    }
}

/// Joint law of `(x, y)`: uniform label, independent features given the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    features: Vec<FeatureSpec>,
}

impl DistributionSpec {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::invalid("features", "at least one feature is required"));
        }
        Ok(Self { features })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Conditional means `μ_i = E[x_i | y = +1]`.
    pub fn means(&self) -> Vec<f64> {
        self.features.iter().map(FeatureSpec::mean).collect()
    }

    pub fn variances(&self) -> Vec<f64> {
        self.features.iter().map(FeatureSpec::variance).collect()
    }

    pub fn is_finite_support(&self) -> bool {
        self.features.iter().all(FeatureSpec::is_finite_support)
    }

    /// Number of atoms in the joint support, as a float so huge products do
    /// not overflow.
    pub fn support_size(&self) -> Option<f64> {
        let mut size = 2.0;
        for f in &self.features {
            size *= f.support(1.0)?.len() as f64;
        }
        Some(size)
    }

    /// Checks the shape of the large-non-robust-fraction family: a robust
    /// two-point first feature and every other feature with `0 < μ_j < ε`.
    /// `μ_j = ε` is rejected even though such a feature is non-robust.
    pub fn check_def3(&self, eps: f64) -> Result<()> {
        match self.features[0].kind() {
            FeatureKind::TwoPoint { p } => {
                let m = 2.0 * p - 1.0;
                if m.abs() <= eps {
                    return Err(Error::invalid(
                        "p",
                        format!("first feature mean {m} must exceed the budget {eps}"),
                    ));
                }
            }
            _ => {
                return Err(Error::invalid("features", "first feature must be two-point"));
            }
        }
        for (j, f) in self.features.iter().enumerate().skip(1) {
            let m = f.mean();
            if !(m > 0.0 && m < eps) {
                return Err(Error::invalid(
                    "mu",
                    format!("feature {} has mean {m}, need 0 < mu < eps = {eps}", j + 1),
                ));
            }
        }
        Ok(())
    }
}

/// Robust two-point feature followed by `d` Gaussian features `N(y·mu, sigma²)`.
pub fn paper_distribution(d: usize, p: f64, mu: f64, sigma: f64) -> Result<DistributionSpec> {
    if d == 0 {
        return Err(Error::invalid("d", "must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("{p} is not in (0, 1)")));
    }
    let mut features = Vec::with_capacity(d + 1);
    features.push(FeatureSpec::two_point(p)?);
    let g = FeatureSpec::gaussian(mu, sigma)?;
    features.extend(std::iter::repeat_n(g, d));
    DistributionSpec::new(features)
}

/// Whether feature `i` is non-robust at budget `eps`, i.e. `|μ_i| ≤ eps`.
pub fn is_non_robust(spec: &DistributionSpec, i: usize, eps: f64) -> Result<bool> {
    let f = spec.features.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        dim: spec.dim(),
    })?;
    if !(eps >= 0.0) {
        return Err(Error::invalid("eps", "must be non-negative"));
    }
    Ok(f.mean().abs() <= eps)
}

/// Non-robust mask from a vector of means.
pub fn non_robust_mask(means: &[f64], eps: f64) -> Vec<bool> {
    means.iter().map(|m| m.abs() <= eps).collect()
}

/// A finite sample with its generating seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<f64>,
    labels: Vec<i8>,
    seed: u64,
}

impl Dataset {
    pub fn from_parts(dim: usize, points: Vec<f64>, labels: Vec<i8>, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        if points.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * labels.len(),
                found: points.len(),
            });
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::invalid("labels", "labels must be -1 or +1"));
        }
        Ok(Self {
            dim,
            points,
            labels,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> i8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Per-feature `(mean of y·x_i, standard error)` estimates.
    pub fn mean_estimates(&self) -> Vec<(f64, f64)> {
        let n = self.len() as f64;
        (0..self.dim)
            .map(|j| {
                let vals = (0..self.len()).map(|i| self.labels[i] as f64 * self.row(i)[j]);
                let mean = vals.clone().sum::<f64>() / n;
                let var = vals.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
                (mean, (var / n).sqrt())
            })
            .collect()
    }

    /// CSV with header `y,x1,...,xD`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = String::from("y");
        for j in 1..=self.dim {
            header.push_str(&format!(",x{j}"));
        }
        writeln!(out, "{header}")?;
        let mut line = String::new();
        for i in 0..self.len() {
            line.clear();
            line.push_str(format::label(self.labels[i]));
            for &v in self.row(i) {
                line.push(',');
                line.push_str(&format::decimal17(v));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Draws `n` i.i.d. samples. Sample `i` uses its own ChaCha stream keyed by
/// `(seed, i)`, so the result does not depend on thread count or order.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let dim = spec.dim();
    let mut points = vec![0.0; n * dim];
    let mut labels = vec![0i8; n];
    points
        .par_chunks_mut(dim)
        .zip(labels.par_iter_mut())
        .enumerate()
        .for_each(|(i, (row, label))| {
            let mut rng = sample_rng(seed, i as u64);
            let y: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
            *label = y as i8;
            for (x, f) in row.iter_mut().zip(&spec.features) {
                *x = f.draw(y, &mut rng);
            }
        });
    Dataset::from_parts(dim, points, labels, seed)
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One atom of a finite joint law.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub label: i8,
    pub prob: f64,
}

/// Complete joint support of a finitely supported spec, label `+1` first.
pub fn enumerate_support(spec: &DistributionSpec) -> Result<Vec<Atom>> {
    let mut per_label = Vec::with_capacity(2);
    for y in [1.0, -1.0] {
        let mut laws = Vec::with_capacity(spec.dim());
        for (index, f) in spec.features.iter().enumerate() {
            laws.push(f.support(y).ok_or(Error::NotFinitelySupported { index })?);
        }
        per_label.push(laws);
    }
    let size = spec.support_size().unwrap_or(f64::INFINITY);
    if size > SUPPORT_CAP as f64 {
        return Err(Error::SupportTooLarge {
            size,
            cap: SUPPORT_CAP,
        });
    }
    let mut atoms = Vec::with_capacity(size as usize);
    for (laws, y) in per_label.iter().zip([1i8, -1]) {
        // odometer over the per-feature supports, first feature slowest
        let mut idx = vec![0usize; laws.len()];
        'atoms: loop {
            let mut prob = 0.5;
            let mut point = Vec::with_capacity(laws.len());
            for (law, &k) in laws.iter().zip(&idx) {
                point.push(law[k].0);
                prob *= law[k].1;
            }
            atoms.push(Atom {
                point,
                label: y,
                prob,
            });
            for pos in (0..laws.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < laws[pos].len() {
                    continue 'atoms;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    Ok(atoms)
}

/// Weighted view over labelled points. Built either from a [`Dataset`]
/// (uniform mass `1/n`) or from the exact support of a discrete spec, so the
/// same losses and solvers compute empirical means and exact expectations.
#[derive(Debug, Clone)]
pub struct Samples<'a> {
    dim: usize,
    points: Cow<'a, [f64]>,
    labels: Cow<'a, [i8]>,
    mass: Option<Vec<f64>>,
}

impl<'a> Samples<'a> {
    pub fn from_dataset(data: &'a Dataset) -> Self {
        Self {
            dim: data.dim,
            points: Cow::Borrowed(&data.points),
            labels: Cow::Borrowed(&data.labels),
            mass: None,
        }
    }

    /// Exact population view of a finitely supported spec.
    pub fn from_spec(spec: &DistributionSpec) -> Result<Samples<'static>> {
        Ok(Samples::from_atoms(spec.dim(), enumerate_support(spec)?))
    }

    pub fn from_atoms(dim: usize, atoms: Vec<Atom>) -> Samples<'static> {
        let mut points = Vec::with_capacity(dim * atoms.len());
        let mut labels = Vec::with_capacity(atoms.len());
        let mut mass = Vec::with_capacity(atoms.len());
        for a in atoms {
            points.extend_from_slice(&a.point);
            labels.push(a.label);
            mass.push(a.prob);
        }
        Samples {
            dim,
            points: Cow::Owned(points),
            labels: Cow::Owned(labels),
            mass: Some(mass),
        }
    }

    /// Weighted points; weights are normalized to sum to one.
    pub fn weighted(
        dim: usize,
        points: Vec<f64>,
        labels: Vec<i8>,
        weights: Vec<f64>,
    ) -> Result<Samples<'static>> {
        if points.len() != dim * labels.len() || weights.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * labels.len(),
                found: points.len(),
            });
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::invalid("labels", "labels must be -1 or +1"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid("weights", "must be non-negative with positive sum"));
        }
        Ok(Samples {
            dim,
            points: Cow::Owned(points),
            labels: Cow::Owned(labels),
            mass: Some(weights.iter().map(|w| w / total).collect()),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i] as f64
    }

    /// True for a plain data set, where every point has mass `1/n`.
    pub fn is_uniform(&self) -> bool {
        self.mass.is_none()
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        match &self.mass {
            Some(m) => m[i],
            None => 1.0 / self.len() as f64,
        }
    }

    /// Weighted estimate of `E[y·x_i]` for every feature.
    pub fn signed_means(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for i in 0..self.len() {
            let s = self.weight(i) * self.label(i);
            crate::linalg::axpy(s, self.point(i), &mut acc);
        }
        acc
    }
}

impl<'a> From<&'a Dataset> for Samples<'a> {
    fn from(d: &'a Dataset) -> Self {
        Samples::from_dataset(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_distribution_shapes() {
        let s = paper_distribution(2000, 0.7, 0.01, 0.01).unwrap();
        assert_eq!(s.dim(), 2001);
        assert!((s.means()[0] - 0.4).abs() < 1e-15);

        let s = paper_distribution(1, 0.5, 0.0, 1.0).unwrap();
        assert_eq!(s.means()[0], 0.0);

        let s = paper_distribution(3, 0.9, 0.05, 0.02).unwrap();
        let m = s.means();
        assert!((m[0] - 0.8).abs() < 1e-15);
        assert_eq!(&m[1..], &[0.05, 0.05, 0.05]);
    }

    #[test]
    fn paper_distribution_rejects_bad_parameters() {
        assert!(paper_distribution(0, 0.7, 0.01, 0.01).is_err());
        assert!(paper_distribution(5, 0.0, 0.01, 0.01).is_err());
        assert!(paper_distribution(5, 1.0, 0.01, 0.01).is_err());
        assert!(paper_distribution(5, 0.7, 0.01, 0.0).is_err());
        assert!(paper_distribution(5, 0.7, 0.01, -1.0).is_err());
    }

    #[test]
    fn two_point_moments() {
        let f = FeatureSpec::two_point(0.7).unwrap();
        assert!((f.mean() - 0.4).abs() < 1e-15);
        assert!((f.variance() - 0.84).abs() < 1e-15);
    }

    #[test]
    fn discrete_probabilities_must_sum_to_one() {
        assert!(FeatureSpec::discrete(vec![(1.0, 0.5), (0.0, 0.4)]).is_err());
        assert!(FeatureSpec::discrete(vec![]).is_err());
        assert!(FeatureSpec::discrete(vec![(1.0, 0.5), (0.0, 0.5)]).is_ok());
    }

    #[test]
    fn non_robust_classification() {
        let spec = DistributionSpec::new(vec![
            FeatureSpec::two_point(0.7).unwrap(),
            FeatureSpec::gaussian(0.01, 1.0).unwrap(),
            FeatureSpec::gaussian(0.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert!(!is_non_robust(&spec, 0, 0.02).unwrap());
        assert!(is_non_robust(&spec, 1, 0.02).unwrap());
        assert!(is_non_robust(&spec, 2, 0.0).unwrap());
        assert!(!is_non_robust(&spec, 1, 0.0).unwrap());
        assert!(matches!(
            is_non_robust(&spec, 3, 0.02),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn boundary_mean_is_non_robust_but_not_def3() {
        let spec = DistributionSpec::new(vec![
            FeatureSpec::two_point(0.8).unwrap(),
            FeatureSpec::gaussian(0.02, 1.0).unwrap(),
        ])
        .unwrap();
        assert!(is_non_robust(&spec, 1, 0.02).unwrap());
        assert!(spec.check_def3(0.02).is_err());
        assert!(spec.check_def3(0.03).is_ok());
    }

    #[test]
    fn one_two_point_support() {
        let spec = DistributionSpec::new(vec![FeatureSpec::two_point(0.7).unwrap()]).unwrap();
        let atoms = enumerate_support(&spec).unwrap();
        let got: Vec<_> = atoms.iter().map(|a| (a.point[0], a.label, a.prob)).collect();
        let want = [(1.0, 1, 0.35), (-1.0, 1, 0.15), (-1.0, -1, 0.35), (1.0, -1, 0.15)];
        assert_eq!(got.len(), 4);
        for (g, w) in got.iter().zip(want) {
            assert_eq!(g.0, w.0);
            assert_eq!(g.1, w.1);
            assert!((g.2 - w.2).abs() < 1e-15);
        }
    }

    #[test]
    fn support_counting() {
        let two = DistributionSpec::new(vec![FeatureSpec::two_point(0.6).unwrap(); 2]).unwrap();
        let atoms = enumerate_support(&two).unwrap();
        assert_eq!(atoms.len(), 8);
        assert!((atoms.iter().map(|a| a.prob).sum::<f64>() - 1.0).abs() < 1e-12);

        let three = FeatureSpec::discrete(vec![(0.0, 0.2), (1.0, 0.3), (2.0, 0.5)]).unwrap();
        let spec = DistributionSpec::new(vec![three; 4]).unwrap();
        assert_eq!(enumerate_support(&spec).unwrap().len(), 2 * 3usize.pow(4));
    }

    #[test]
    fn support_rejects_gaussian_and_huge() {
        let spec = paper_distribution(2, 0.7, 0.01, 0.01).unwrap();
        assert!(matches!(
            enumerate_support(&spec),
            Err(Error::NotFinitelySupported { index: 1 })
        ));
        let big = DistributionSpec::new(vec![FeatureSpec::two_point(0.6).unwrap(); 25]).unwrap();
        assert!(matches!(
            enumerate_support(&big),
            Err(Error::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn exact_conditional_means_by_enumeration() {
        let spec = DistributionSpec::new(vec![
            FeatureSpec::two_point(0.7).unwrap(),
            FeatureSpec::discrete(vec![(0.3, 0.25), (-0.1, 0.75)]).unwrap(),
            FeatureSpec::symmetric_pair(-0.2, 0.5).unwrap(),
        ])
        .unwrap();
        let atoms = enumerate_support(&spec).unwrap();
        let mu = spec.means();
        for y in [1i8, -1] {
            for (i, mu_i) in mu.iter().enumerate() {
                let mass: f64 = atoms.iter().filter(|a| a.label == y).map(|a| a.prob).sum();
                let m: f64 = atoms
                    .iter()
                    .filter(|a| a.label == y)
                    .map(|a| a.prob * a.point[i])
                    .sum::<f64>()
                    / mass;
                assert!((m - y as f64 * mu_i).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = paper_distribution(5, 0.7, 0.01, 0.01).unwrap();
        let a = sample(&spec, 1, 9).unwrap();
        let b = sample(&spec, 1, 9).unwrap();
        assert_eq!(a, b);
        let c = sample(&spec, 50, 9).unwrap();
        // prefix property of counter-based streams
        assert_eq!(c.row(0), a.row(0));
        assert!(sample(&spec, 0, 9).is_err());
    }

    #[test]
    fn degenerate_two_point_copies_label() {
        let spec = DistributionSpec::new(vec![FeatureSpec::two_point(1.0).unwrap()]).unwrap();
        let d = sample(&spec, 500, 3).unwrap();
        for i in 0..d.len() {
            assert_eq!(d.row(i)[0], d.label(i) as f64);
        }
    }

    #[test]
    fn paper_scale_robust_feature_mean() {
        let spec = paper_distribution(2000, 0.7, 0.01, 0.01).unwrap();
        let d = sample(&spec, 10_000, 11).unwrap();
        let est = d.mean_estimates();
        assert!((est[0].0 - 0.4).abs() <= 0.02, "got {}", est[0].0);
    }

    #[test]
    fn csv_layout() {
        let d = Dataset::from_parts(2, vec![0.5, -1.0, 0.25, 2.0], vec![1, -1], 0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "y,x1,x2");
        assert_eq!(lines[1], "1,0.50000000000000000,-1.0000000000000000");
        assert_eq!(lines[2], "-1,0.25000000000000000,2.0000000000000000");
    }

    #[test]
    fn spec_serde_validates() {
        let json = r#"{"features":[{"kind":"two_point","p":0.7},{"kind":"gaussian","mean":0.01,"stdev":0.0}]}"#;
        assert!(serde_json::from_str::<DistributionSpec>(json).is_err());
        let json = r#"{"features":[{"kind":"two_point","p":0.7},{"kind":"gaussian","mean":0.01,"stdev":0.5}]}"#;
        let spec: DistributionSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.dim(), 2);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(8))]

        #[test]
        fn sampling_ignores_thread_count(seed in 0u64..1000, n in 1usize..400) {
            let spec = paper_distribution(30, 0.7, 0.05, 0.5).unwrap();
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let serial = pool.install(|| sample(&spec, n, seed).unwrap());
            proptest::prop_assert_eq!(serial, sample(&spec, n, seed).unwrap());
        }

        #[test]
        fn empirical_means_within_five_standard_errors(seed in 0u64..1000) {
            let spec = DistributionSpec::new(vec![
                FeatureSpec::two_point(0.65).unwrap(),
                FeatureSpec::gaussian(-0.2, 0.8).unwrap(),
                FeatureSpec::discrete(vec![(0.9, 0.3), (-0.3, 0.7)]).unwrap(),
            ])
            .unwrap();
            let d = sample(&spec, 100_000, seed).unwrap();
            for ((m, se), mu) in d.mean_estimates().into_iter().zip(spec.means()) {
                proptest::prop_assert!((m - mu).abs() <= 5.0 * se, "{m} vs {mu} (se {se})");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn non_robust_partition_is_def1(means in proptest::collection::vec(-1.0f64..1.0, 1..12), eps in 0.0f64..1.0) {
            let mask = non_robust_mask(&means, eps);
            for (m, nr) in means.iter().zip(mask) {
                proptest::prop_assert_eq!(nr, m.abs() <= eps);
            }
        }
    }
}
