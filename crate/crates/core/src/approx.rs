//! Diffusion approximation of `P(x + S_n >= y, tau_x > n)` and the
//! constant-free envelopes of the error bounds.
//!
//! The absolute constants in front of the envelopes are not known
//! numerically; `verify` estimates them as empirical suprema.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Standard normal CDF, `0.5 * erfc(-z / sqrt 2)`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(z)` without cancellation for large `z`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `Phi(hi) - Phi(lo)`, using whichever tail keeps precision.
fn normal_mass(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        normal_sf(lo) - normal_sf(hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

fn check_scale(n: f64, sigma: f64) -> Result<()> {
    if !(n >= 1.0) || !(sigma > 0.0) || !sigma.is_finite() || !n.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and sigma > 0, got n = {n}, sigma = {sigma}"
        )));
    }
    Ok(())
}

/// Brownian reflection formula `Phi((y+x)/(s sqrt n)) - Phi((y-x)/(s sqrt n))`.
pub fn reflection_term(x: f64, y: f64, n: f64, sigma: f64) -> Result<f64> {
    check_scale(n, sigma)?;
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("x = {x} must be >= 0")));
    }
    let s = sigma * n.sqrt();
    Ok(normal_mass((y - x) / s, (y + x) / s))
}

/// `2 m exp(-y^2 / (2 sigma^2 n)) / sqrt(2 pi sigma^2 n)` with `m = E|x + S_{tau_x}|`.
pub fn correction_term(y: f64, n: f64, sigma: f64, overshoot_mean: f64) -> Result<f64> {
    check_scale(n, sigma)?;
    if !(overshoot_mean >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "overshoot mean {overshoot_mean} must be >= 0"
        )));
    }
    let var = sigma * sigma * n;
    Ok(2.0 * overshoot_mean * (-y * y / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

/// Rayleigh tail `exp(-y^2 / (2 sigma^2 n))` for `y >= 0`, and 1 below.
pub fn rayleigh_tail(y: f64, n: f64, sigma: f64) -> Result<f64> {
    check_scale(n, sigma)?;
    let y = y.max(0.0);
    Ok((-y * y / (2.0 * sigma * sigma * n)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxTerms {
    pub reflection: f64,
    pub correction: f64,
    pub total: f64,
    pub rayleigh: f64,
}

/// Corrected diffusion approximation of `P(x + S_n >= y, tau_x > n)`.
///
/// For `y < 0` the event does not depend on `y`, so `y` is clamped to 0.
pub fn corrected_tail(x: f64, y: f64, n: f64, sigma: f64, overshoot_mean: f64) -> Result<ApproxTerms> {
    let y = y.max(0.0);
    let reflection = reflection_term(x, y, n, sigma)?;
    let correction = correction_term(y, n, sigma, overshoot_mean)?;
    Ok(ApproxTerms {
        reflection,
        correction,
        total: reflection + correction,
        rayleigh: rayleigh_tail(y, n, sigma)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Thm1,
    Ales,
    Corollary2,
    Corollary3,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEnvelope {
    pub kind: EnvelopeKind,
    /// Envelope with its absolute constant factored out.
    pub scaled_value: f64,
    pub constant_symbol: &'static str,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be positive")))
    }
}

/// `beta3^3 E|S_{tau_x}| / (sigma^9 sqrt n (x + sqrt n))`, constant `A1`.
pub fn thm1_envelope(beta3: f64, sigma: f64, abs_stau: f64, x: f64, n: f64) -> Result<BoundEnvelope> {
    check_scale(n, sigma)?;
    positive("beta3", beta3)?;
    positive("E|S_tau|", abs_stau)?;
    let rn = n.sqrt();
    Ok(BoundEnvelope {
        kind: EnvelopeKind::Thm1,
        scaled_value: beta3.powi(3) * abs_stau / (sigma.powi(9) * rn * (x + rn)),
        constant_symbol: "A1",
    })
}

/// `beta3 / sqrt n`, constant `A`.
pub fn ales_envelope(beta3: f64, n: f64) -> Result<BoundEnvelope> {
    check_scale(n, 1.0)?;
    positive("beta3", beta3)?;
    Ok(BoundEnvelope {
        kind: EnvelopeKind::Ales,
        scaled_value: beta3 / n.sqrt(),
        constant_symbol: "A",
    })
}

/// `(beta3^3 / (sigma^9 sqrt n), x^2 / (sigma^2 n))`, constants `A2`, `A3`.
/// Requires `x <= sqrt n`. The second envelope vanishes at `x = 0`.
pub fn corollary_envelopes(beta3: f64, sigma: f64, x: f64, n: f64) -> Result<(BoundEnvelope, BoundEnvelope)> {
    check_scale(n, sigma)?;
    positive("beta3", beta3)?;
    if !(x >= 0.0 && x <= n.sqrt()) {
        return Err(Error::InvalidArgument(format!(
            "x = {x} outside [0, sqrt n = {}]",
            n.sqrt()
        )));
    }
    Ok((
        BoundEnvelope {
            kind: EnvelopeKind::Corollary2,
            scaled_value: beta3.powi(3) / (sigma.powi(9) * n.sqrt()),
            constant_symbol: "A2",
        },
        BoundEnvelope {
            kind: EnvelopeKind::Corollary3,
            scaled_value: x * x / (sigma * sigma * n),
            constant_symbol: "A3",
        },
    ))
}

/// `beta3^2 E|S_{tau_x}| / (sigma^6 sqrt n (x + sqrt n)) * (1 + R beta3 / sqrt n)`,
/// constant `C`. `R` is `1/V` for span-1 lattices or `||p||_inf^2` for densities.
pub fn improved_envelope(
    beta3: f64,
    sigma: f64,
    abs_stau: f64,
    x: f64,
    n: f64,
    r: f64,
) -> Result<BoundEnvelope> {
    check_scale(n, sigma)?;
    positive("beta3", beta3)?;
    positive("E|S_tau|", abs_stau)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("R = {r} must be >= 0")));
    }
    let rn = n.sqrt();
    Ok(BoundEnvelope {
        kind: EnvelopeKind::Improved,
        scaled_value: beta3 * beta3 * abs_stau / (sigma.powi(6) * rn * (x + rn))
            * (1.0 + r * beta3 / rn),
        constant_symbol: "C",
    })
}
