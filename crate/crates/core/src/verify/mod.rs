//! Grid checks of the explicit inequalities, empirical constants and rate fits,
//! with the exact engine as ground truth.
//!
//! Inequalities stated for unit variance are applied to `X / sigma`: lengths
//! and starting points are divided by `sigma`, `beta3` becomes
//! `beta3 / sigma^3` and `E|S_tau|` becomes `E|S_tau| / sigma`.

mod checks;
mod constants;
pub mod data;
mod rates;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_classical_be, check_concentration, check_lattice_local_concentration,
    check_local_clt_lattice, check_local_bound_288, check_mogulskii, check_sn_tau,
    check_tau_tail, check_truncated_overshoot,
};
pub use constants::{check_improved, estimate_constants};
pub use data::WalkData;
pub use rates::{
    check_corollary, check_thm1, rayleigh_error, survival_ratio_error, sup_y_thm1, Thm1Sup,
};

use crate::error::{Error, Result};
use crate::increments::LatticeIncrement;

/// Berry-Esseen constant for the Kolmogorov distance.
pub const GAMMA0: f64 = 0.4785;

/// `gamma_1(z) = sqrt 2 beta3 + z / sqrt pi`, with `beta3` of the unit-variance walk.
pub fn gamma1(beta3: f64, z: f64) -> f64 {
    std::f64::consts::SQRT_2 * beta3 + z / std::f64::consts::PI.sqrt()
}

/// Constant of the lattice local limit bound, `76/pi + 24/(pi V)`.
pub fn lattice_lclt_constant(v: f64) -> f64 {
    76.0 / std::f64::consts::PI + 24.0 / (std::f64::consts::PI * v)
}

/// Relative slack allowed when comparing a computed ratio with an explicit constant.
pub const HOLDS_RTOL: f64 = 1e-9;

fn default_n() -> Vec<u64> {
    (4..=12).map(|e| 1u64 << e).collect()
}
fn default_x() -> Vec<u64> {
    vec![0, 1, 2, 5, 10, 20]
}
fn default_true() -> bool {
    true
}
fn default_z() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 5.0]
}
fn default_u_max() -> u64 {
    20
}
fn default_be_small_n() -> u64 {
    64
}
fn default_rate_n_min() -> u64 {
    64
}
fn default_thm1_band() -> (f64, f64) {
    (-1.3, -0.7)
}
fn default_corollary_band() -> (f64, f64) {
    (-0.7, -0.3)
}

/// Parameter grids. Every field has a default; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n: Vec<u64>,
    #[serde(default = "default_x")]
    pub x: Vec<u64>,
    /// Add `floor(n^(1/4))` and `floor(n^(1/2))` to the starts at each `n`.
    #[serde(default = "default_true")]
    pub x_scaled: bool,
    #[serde(default = "default_z")]
    pub z: Vec<f64>,
    #[serde(default = "default_u_max")]
    pub u_max: u64,
    /// The classical Berry-Esseen check also runs at every `n <= be_small_n`.
    #[serde(default = "default_be_small_n")]
    pub be_small_n: u64,
    #[serde(default = "default_rate_n_min")]
    pub rate_n_min: u64,
    #[serde(default = "default_thm1_band")]
    pub thm1_slope_band: (f64, f64),
    #[serde(default = "default_corollary_band")]
    pub corollary_slope_band: (f64, f64),
}

impl Default for GridConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::InvalidArgument("n grid must be nonempty and positive".into()));
        }
        if self.z.iter().any(|z| !(*z >= 0.0 && z.is_finite())) {
            return Err(Error::InvalidArgument("z grid must be finite and >= 0".into()));
        }
        let (lo, hi) = self.thm1_slope_band;
        let (clo, chi) = self.corollary_slope_band;
        if !(lo <= hi && clo <= chi) {
            return Err(Error::InvalidArgument("slope bands must be ordered (lo, hi)".into()));
        }
        Ok(())
    }

    /// Sorted, deduplicated grid of `n`.
    pub fn n_sorted(&self) -> Vec<u64> {
        let mut v = self.n.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Starting points used at horizon `n`.
    pub fn starts_for(&self, n: u64) -> Vec<u64> {
        let mut xs = self.x.clone();
        if self.x_scaled {
            xs.push((n as f64).powf(0.25).floor() as u64);
            xs.push((n as f64).sqrt().floor() as u64);
        }
        xs.sort_unstable();
        xs.dedup();
        xs
    }

    /// Union of starts over all `n`, plus `0..=u_max`.
    pub fn all_starts(&self) -> Vec<u64> {
        let mut xs: Vec<u64> = self.n.iter().flat_map(|&n| self.starts_for(n)).collect();
        xs.extend(0..=self.u_max);
        xs.sort_unstable();
        xs.dedup();
        xs
    }

    /// `n` values used for rate fits.
    pub fn rate_ns(&self) -> Vec<u64> {
        self.n_sorted().into_iter().filter(|&n| n >= self.rate_n_min).collect()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub point: String,
    pub lhs: f64,
    /// Right-hand side with the (explicit or unknown) constant factored out.
    pub rhs_scaled: f64,
    pub ratio: f64,
}

/// Outcome of one inequality over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub dist: String,
    pub grid: String,
    pub max_ratio: f64,
    pub argmax: String,
    /// The constant supplied with the inequality, when there is one.
    pub constant: Option<f64>,
    /// `max_ratio <= constant`; only defined when `constant` is.
    pub holds: Option<bool>,
    /// Empirical supremum, for inequalities with an unspecified constant.
    pub estimated_constant: Option<f64>,
    pub rows: Vec<ReportRow>,
}

impl BoundReport {
    fn new(bound_id: &str, dist: &str, grid: String) -> Self {
        Self {
            bound_id: bound_id.to_string(),
            dist: dist.to_string(),
            grid,
            max_ratio: 0.0,
            argmax: String::new(),
            constant: None,
            holds: None,
            estimated_constant: None,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, point: String, lhs: f64, rhs_scaled: f64) {
        let ratio = if rhs_scaled > 0.0 {
            lhs / rhs_scaled
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if self.rows.is_empty() || ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.argmax = point.clone();
        }
        self.rows.push(ReportRow {
            point,
            lhs,
            rhs_scaled,
            ratio,
        });
    }

    /// Close an explicit-constant report.
    fn explicit(mut self, constant: f64) -> Self {
        self.constant = Some(constant);
        self.holds = Some(self.max_ratio <= constant * (1.0 + HOLDS_RTOL));
        self
    }

    /// Close an estimated-constant report.
    fn estimated(mut self) -> Self {
        self.estimated_constant = Some(self.max_ratio);
        self
    }
}

/// Least-squares line through `(ln n, ln value)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_range: (u64, u64),
    pub points: Vec<(u64, f64)>,
}

pub fn fit_rate(points: &[(u64, f64)]) -> Result<RateFit> {
    if points.len() < 2 || points.iter().any(|&(n, v)| n == 0 || !(v > 0.0)) {
        return Err(Error::InvalidArgument(
            "rate fit needs >= 2 points with positive n and values".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let n_min = points.iter().map(|p| p.0).min().expect("nonempty");
    let n_max = points.iter().map(|p| p.0).max().expect("nonempty");
    Ok(RateFit {
        slope,
        intercept,
        r2,
        n_range: (n_min, n_max),
        points: points.to_vec(),
    })
}

/// A rate fit with its tolerance band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCheck {
    pub rate_id: String,
    pub dist: String,
    pub fit: RateFit,
    pub band: (f64, f64),
    pub within_band: bool,
}

impl RateCheck {
    fn new(rate_id: &str, dist: &str, fit: RateFit, band: (f64, f64)) -> Self {
        let within_band = fit.slope >= band.0 && fit.slope <= band.1;
        Self {
            rate_id: rate_id.to_string(),
            dist: dist.to_string(),
            fit,
            band,
            within_band,
        }
    }
}

/// Everything `verify` produces for one distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkReport {
    pub dist: String,
    pub sigma2: f64,
    pub beta3: f64,
    pub lyapunov: f64,
    pub span: u64,
    pub peakedness_v: Option<f64>,
    pub abs_stau0: f64,
    pub limit_overshoot: Option<f64>,
    pub reports: Vec<BoundReport>,
    pub rates: Vec<RateCheck>,
    /// Whether the correction beats the bare reflection formula at every rate `n` (x = 0).
    pub correction_improves: Vec<(u64, f64, f64)>,
}

impl WalkReport {
    pub fn explicit_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds != Some(false))
    }
}

/// The three built-in test walks.
pub fn default_walks() -> Vec<(String, LatticeIncrement)> {
    vec![
        ("ssrw".to_string(), LatticeIncrement::simple()),
        ("lazy".to_string(), LatticeIncrement::lazy()),
        ("skewed".to_string(), LatticeIncrement::skewed()),
    ]
}

/// Run every check on one distribution.
pub fn verify_walk(name: &str, dist: &LatticeIncrement, grid: &GridConfig) -> Result<WalkReport> {
    let data = WalkData::build(name, dist, grid)?;
    verify_data(&data, grid)
}

pub fn verify_data(data: &WalkData, grid: &GridConfig) -> Result<WalkReport> {
    let mut reports = vec![
        check_classical_be(data, grid)?,
        check_concentration(data, grid)?,
        check_sn_tau(data, grid)?,
        check_tau_tail(data, grid)?,
        check_mogulskii(data, grid)?,
        check_local_bound_288(data, grid)?,
        check_truncated_overshoot(data, grid)?,
    ];
    if data.span == 1 && (data.moments.sigma2 - 1.0).abs() < 1e-12 {
        reports.push(check_local_clt_lattice(data, grid)?);
        reports.push(check_lattice_local_concentration(data, grid)?);
    }
    reports.extend(estimate_constants(data, grid)?);
    let (thm1, thm1_rate, improves) = check_thm1(data, grid)?;
    reports.push(thm1);
    let (cor_reports, cor_rates) = check_corollary(data, grid)?;
    reports.extend(cor_reports);
    if data.peakedness.is_some() {
        reports.extend(check_improved(data, grid)?);
    }
    let mut rates = vec![thm1_rate];
    rates.extend(cor_rates);
    Ok(WalkReport {
        dist: data.name.clone(),
        sigma2: data.moments.sigma2,
        beta3: data.moments.beta3,
        lyapunov: data.moments.lyapunov,
        span: data.span,
        peakedness_v: data.peakedness.map(|p| p.v),
        abs_stau0: data.start(0).abs_stau,
        limit_overshoot: data.solver.as_ref().map(|f| f.limit_overshoot()),
        reports,
        rates,
        correction_improves: improves,
    })
}
