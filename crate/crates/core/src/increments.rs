//! Increment distributions of the walk: integer lattice laws and a few named
//! continuous families, with their moments, characteristic function, lattice
//! span and the peakedness characteristic `V`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(probs) - 1` and on the mean.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Integer-valued increment law with zero mean.
///
/// Offsets are kept sorted and unique; zero-probability entries are dropped so
/// that `min_offset`/`max_offset` are the true support extremes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeIncrement {
    offsets: Vec<i64>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    offsets: Vec<i64>,
    probs: Vec<f64>,
}

impl<'de> Deserialize<'de> for LatticeIncrement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawLattice::deserialize(de)?;
        LatticeIncrement::new(raw.offsets, raw.probs).map_err(D::Error::custom)
    }
}

impl LatticeIncrement {
    pub fn new(offsets: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        if offsets.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} offsets but {} probabilities",
                offsets.len(),
                probs.len()
            )));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is not a finite nonnegative number"
            )));
        }
        let mut pairs: Vec<(i64, f64)> = offsets.into_iter().zip(probs).collect();
        pairs.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(i64, f64)> = Vec::with_capacity(pairs.len());
        for (k, p) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == k => last.1 += p,
                _ => merged.push((k, p)),
            }
        }
        merged.retain(|&(_, p)| p > 0.0);

        let total: f64 = merged.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > MEAN_ZERO_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mean: f64 = merged.iter().map(|&(k, p)| k as f64 * p).sum();
        if mean.abs() > MEAN_ZERO_TOL {
            return Err(Error::InvalidDistribution(format!(
                "mean is {mean:e}; increments must have zero mean (not re-centered)"
            )));
        }
        if !merged.iter().any(|&(k, _)| k < 0) || !merged.iter().any(|&(k, _)| k > 0) {
            return Err(Error::InvalidDistribution(
                "support needs a negative and a positive offset".into(),
            ));
        }
        let (offsets, probs) = merged.into_iter().unzip();
        Ok(Self { offsets, probs })
    }

    /// Simple symmetric walk `{-1: 1/2, +1: 1/2}`.
    pub fn simple() -> Self {
        Self::new(vec![-1, 1], vec![0.5, 0.5]).expect("valid")
    }

    /// Lazy walk `{-1: 1/4, 0: 1/2, +1: 1/4}`.
    pub fn lazy() -> Self {
        Self::new(vec![-1, 0, 1], vec![0.25, 0.5, 0.25]).expect("valid")
    }

    /// Skewed span-1 walk `{-1: 1/3, 0: 1/2, +2: 1/6}` with unit variance.
    pub fn skewed() -> Self {
        Self::new(vec![-1, 0, 2], vec![1.0 / 3.0, 0.5, 1.0 / 6.0]).expect("valid")
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.offsets.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn min_offset(&self) -> i64 {
        self.offsets[0]
    }

    pub fn max_offset(&self) -> i64 {
        *self.offsets.last().expect("nonempty")
    }

    /// Largest downward jump `a = -min_offset` (always >= 1).
    pub fn max_down(&self) -> usize {
        (-self.min_offset()) as usize
    }

    /// Largest upward jump `b = max_offset` (always >= 1).
    pub fn max_up(&self) -> usize {
        self.max_offset() as usize
    }

    /// Probability mass at offset `d` (zero off the support).
    pub fn pmf(&self, d: i64) -> f64 {
        self.offsets
            .binary_search(&d)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    /// Law of `-X`.
    pub fn negated(&self) -> Self {
        let offsets = self.offsets.iter().rev().map(|k| -k).collect();
        let probs = self.probs.iter().rev().copied().collect();
        Self { offsets, probs }
    }

    pub fn moments(&self) -> MomentSummary {
        let mut mean = 0.0;
        let mut sigma2 = 0.0;
        let mut beta3 = 0.0;
        for (k, p) in self.iter() {
            let k = k as f64;
            mean += p * k;
            sigma2 += p * k * k;
            beta3 += p * (k * k * k).abs();
        }
        MomentSummary::from_parts(mean, sigma2, beta3)
    }

    /// `E exp(i t X)`.
    pub fn charfn(&self, t: f64) -> Complex64 {
        self.iter()
            .map(|(k, p)| Complex64::from_polar(p, t * k as f64))
            .sum()
    }

    /// Maximal span: gcd of the differences of support points.
    pub fn span(&self) -> u64 {
        let base = self.offsets[0];
        self.offsets[1..]
            .iter()
            .fold(0u64, |g, &k| gcd(g, (k - base) as u64))
    }

    /// `1 - |phi(t)|^2`, evaluated without cancellation near `t = 0`.
    fn one_minus_abs_phi_sq(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.offsets.len() {
            for j in i + 1..self.offsets.len() {
                let d = (self.offsets[j] - self.offsets[i]) as f64;
                let s = (0.5 * t * d).sin();
                acc += self.probs[i] * self.probs[j] * s * s;
            }
        }
        4.0 * acc
    }

    /// `log|phi(t)| / (1 - cos t)`, or `None` where `|phi(t)|` underflows.
    fn peak_ratio(&self, t: f64) -> Option<f64> {
        let defect = self.one_minus_abs_phi_sq(t);
        let abs_sq = 1.0 - defect;
        // |phi| < 1e-300  <=>  |phi|^2 < 1e-600, which is 0 in f64.
        if abs_sq <= 0.0 {
            return None;
        }
        let log_abs = 0.5 * (-defect).ln_1p();
        let half = (0.5 * t).sin();
        Some(log_abs / (2.0 * half * half))
    }

    /// Bobkov-Ulyanov peakedness `V = -sup_{t in (0, 2pi)} log|phi(t)| / (1 - cos t)`.
    ///
    /// The supremum is taken over a uniform grid of [`PEAK_GRID_POINTS`] interior
    /// points, refined by golden-section search around the best grid point, and
    /// compared with the common limit `-sigma^2` of the ratio at both endpoints.
    pub fn peakedness(&self) -> Result<Peakedness> {
        let span = self.span();
        if span != 1 {
            return Err(Error::SpanNotOne { span });
        }
        let n = PEAK_GRID_POINTS;
        let step = TAU / n as f64;
        let mut best: Option<(usize, f64)> = None;
        for i in 1..n {
            if let Some(r) = self.peak_ratio(i as f64 * step) {
                if best.is_none_or(|(_, b)| r > b) {
                    best = Some((i, r));
                }
            }
        }
        let endpoint_limit = -self.moments().sigma2;
        let (mut sup, mut argsup) = (endpoint_limit, None);
        if let Some((i, r)) = best {
            let lo = (i - 1) as f64 * step;
            let hi = (i + 1) as f64 * step;
            let f = |t: f64| self.peak_ratio(t).unwrap_or(f64::NEG_INFINITY);
            let (t_ref, r_ref) = golden_section_max(f, lo.max(step * 1e-3), hi.min(TAU - step * 1e-3));
            let (t_best, r_best) = if r_ref >= r { (t_ref, r_ref) } else { (i as f64 * step, r) };
            if r_best > sup {
                sup = r_best;
                argsup = Some(t_best);
            }
        }
        let v = -sup;
        if !(v > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "peakedness V = {v} is not positive"
            )));
        }
        Ok(Peakedness {
            v,
            argsup,
            grid_points: n - 1,
            grid_step: step,
        })
    }

    /// Cumulative probabilities, for inverse-CDF sampling.
    pub fn cdf_table(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

/// Number of subintervals of `(0, 2pi)` in the peakedness grid.
pub const PEAK_GRID_POINTS: usize = 1 << 16;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (hi - lo).abs() < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gaussian,
    Laplace,
    UniformSymmetric,
}

/// Named continuous family centred at zero. `scale` is the standard deviation
/// (gaussian), the Laplace scale `b`, or the half-width of the uniform law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousIncrement {
    family: Family,
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContinuous {
    family: Family,
    scale: f64,
}

impl<'de> Deserialize<'de> for ContinuousIncrement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawContinuous::deserialize(de)?;
        ContinuousIncrement::new(raw.family, raw.scale).map_err(D::Error::custom)
    }
}

impl ContinuousIncrement {
    pub fn new(family: Family, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { family, scale })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn moments(&self) -> MomentSummary {
        let s = self.scale;
        let (sigma2, beta3) = match self.family {
            Family::Gaussian => (s * s, 2.0 * (2.0 / PI).sqrt() * s.powi(3)),
            Family::Laplace => (2.0 * s * s, 6.0 * s.powi(3)),
            Family::UniformSymmetric => (s * s / 3.0, s.powi(3) / 4.0),
        };
        MomentSummary::from_parts(0.0, sigma2, beta3)
    }

    /// Supremum of the density, `||p||_inf`.
    pub fn density_sup(&self) -> f64 {
        let s = self.scale;
        match self.family {
            Family::Gaussian => 1.0 / (s * (2.0 * PI).sqrt()),
            Family::Laplace => 1.0 / (2.0 * s),
            Family::UniformSymmetric => 1.0 / (2.0 * s),
        }
    }
}

/// Either kind of increment law.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum IncrementModel {
    Lattice(LatticeIncrement),
    Continuous(ContinuousIncrement),
}

impl<'de> Deserialize<'de> for IncrementModel {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(de)?;
        let obj = value
            .as_object()
            .ok_or_else(|| D::Error::custom("distribution must be a JSON object"))?;
        if obj.contains_key("family") {
            ContinuousIncrement::deserialize(value)
                .map(IncrementModel::Continuous)
                .map_err(D::Error::custom)
        } else if obj.contains_key("offsets") {
            LatticeIncrement::deserialize(value)
                .map(IncrementModel::Lattice)
                .map_err(D::Error::custom)
        } else {
            Err(D::Error::custom(
                "distribution needs either {\"offsets\",\"probs\"} or {\"family\",\"scale\"}",
            ))
        }
    }
}

impl IncrementModel {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn moments(&self) -> MomentSummary {
        match self {
            IncrementModel::Lattice(l) => l.moments(),
            IncrementModel::Continuous(c) => c.moments(),
        }
    }

    pub fn as_lattice(&self) -> Option<&LatticeIncrement> {
        match self {
            IncrementModel::Lattice(l) => Some(l),
            IncrementModel::Continuous(_) => None,
        }
    }
}

impl From<LatticeIncrement> for IncrementModel {
    fn from(l: LatticeIncrement) -> Self {
        IncrementModel::Lattice(l)
    }
}

impl From<ContinuousIncrement> for IncrementModel {
    fn from(c: ContinuousIncrement) -> Self {
        IncrementModel::Continuous(c)
    }
}

/// Mean, variance `sigma2 = E X^2`, third absolute moment `beta3 = E|X|^3`
/// and the Lyapunov ratio `beta3 / sigma^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub sigma2: f64,
    pub beta3: f64,
    pub lyapunov: f64,
}

impl MomentSummary {
    fn from_parts(mean: f64, sigma2: f64, beta3: f64) -> Self {
        Self {
            mean,
            sigma2,
            beta3,
            lyapunov: beta3 / sigma2.powf(1.5),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Third absolute moment of `X / sigma`.
    pub fn beta3_normalized(&self) -> f64 {
        self.lyapunov
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peakedness {
    pub v: f64,
    /// Where the supremum was found; `None` when it is the endpoint limit.
    pub argsup: Option<f64>,
    pub grid_points: usize,
    pub grid_step: f64,
}
