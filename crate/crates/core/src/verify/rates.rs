//! Errors of the survival approximations, their constants and decay rates.

use serde::Serialize;

use super::data::WalkData;
use super::{fit_rate, BoundReport, GridConfig, RateCheck};
use crate::approx::{corollary_envelopes, corrected_tail, thm1_envelope};
use crate::error::Result;

/// `sup_y` of the approximation errors at one `(x, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm1Sup {
    pub x: u64,
    pub n: u64,
    /// Error of reflection plus correction.
    pub corrected: f64,
    /// Error of the bare reflection formula.
    pub reflection: f64,
    /// A `y` at which `corrected` is attained.
    pub y_at: f64,
}

/// Suffix sums: `t[w] = P(x + S_n >= w, tau_x > n)` for `w = 0..=len`.
fn upper_tails(row: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; row.len() + 1];
    for w in (0..row.len()).rev() {
        t[w] = t[w + 1] + row[w];
    }
    t
}

/// Exact `sup_y` over real `y`.
///
/// The exact tail is constant on `(w - 1, w]` and the approximation is
/// decreasing in `y >= 0`, so the sup over each piece sits at one of its ends.
pub fn sup_y_thm1(data: &WalkData, x: u64, n: u64) -> Result<Thm1Sup> {
    let st = data.start(x);
    let t = upper_tails(&st.rows[&n]);
    let (xf, nf, s) = (x as f64, n as f64, data.sigma);
    let mut out = Thm1Sup {
        x,
        n,
        corrected: 0.0,
        reflection: 0.0,
        y_at: 0.0,
    };
    let approx_at = |y: f64| corrected_tail(xf, y, nf, s, st.overshoot1);
    let mut prev = approx_at(0.0)?;
    for w in 1..=t.len() {
        let tw = t.get(w).copied().unwrap_or(0.0);
        let cur = approx_at(w as f64)?;
        for (a, y) in [(prev, (w - 1) as f64), (cur, w as f64)] {
            let e = (tw - a.total).abs();
            if e > out.corrected {
                out.corrected = e;
                out.y_at = y;
            }
            out.reflection = out.reflection.max((tw - a.reflection).abs());
        }
        prev = cur;
    }
    Ok(out)
}

/// Corrected approximation: estimated `A1`, slope at `x = 0`, and the correction's effect at each rate `n`.
pub fn check_thm1(
    data: &WalkData,
    grid: &GridConfig,
) -> Result<(BoundReport, RateCheck, Vec<(u64, f64, f64)>)> {
    let mut rep = BoundReport::new(
        "thm1_A1",
        &data.name,
        format!("n={:?}; x={:?} (+scaled: {}); sup over y", grid.n_sorted(), grid.x, grid.x_scaled),
    );
    for n in grid.n_sorted() {
        for x in grid.starts_for(n) {
            let sup = sup_y_thm1(data, x, n)?;
            let env = thm1_envelope(data.beta3n, 1.0, data.abs_stau_n(x), x as f64 / data.sigma, n as f64)?;
            rep.push(format!("n={n},x={x},y={}", sup.y_at), sup.corrected, env.scaled_value);
        }
    }
    let mut pts = Vec::new();
    let mut improves = Vec::new();
    for n in grid.rate_ns() {
        let sup = sup_y_thm1(data, 0, n)?;
        pts.push((n, sup.corrected));
        improves.push((n, sup.corrected, sup.reflection));
    }
    let rate = RateCheck::new("thm1_x0", &data.name, fit_rate(&pts)?, grid.thm1_slope_band);
    Ok((rep.estimated(), rate, improves))
}

/// Ratio error `|P(tau_x > n) / (sqrt(2 / (pi sigma^2)) E|S_{tau_x}| / sqrt n) - 1|`.
pub fn survival_ratio_error(data: &WalkData, x: u64, n: u64) -> f64 {
    let st = data.start(x);
    let s = data.sigma;
    let lead = (2.0 / (std::f64::consts::PI * s * s)).sqrt() * st.abs_stau / (n as f64).sqrt();
    (st.survival[n as usize] / lead - 1.0).abs()
}

/// `sup_y |P(x + S_n >= y | tau_x > n) - exp(-y^2 / (2 sigma^2 n))|`.
pub fn rayleigh_error(data: &WalkData, x: u64, n: u64) -> f64 {
    let st = data.start(x);
    let surv = st.survival[n as usize];
    let t = upper_tails(&st.rows[&n]);
    let v = 2.0 * data.sigma * data.sigma * n as f64;
    let ray = |y: f64| (-y * y / v).exp();
    let mut sup = 0.0f64;
    for w in 1..=t.len() {
        let c = t.get(w).copied().unwrap_or(0.0) / surv;
        sup = sup.max((c - ray((w - 1) as f64)).abs()).max((c - ray(w as f64)).abs());
    }
    sup
}

/// Survival ratio and conditional law: `A2` from `x = 0`, then `A3` from what `A2` leaves unexplained
/// at `x > 0`; slope fits of the ratio error at `x = 0` and `x = floor(n^(1/4))`.
pub fn check_corollary(data: &WalkData, grid: &GridConfig) -> Result<(Vec<BoundReport>, Vec<RateCheck>)> {
    let desc = format!("n={:?}; x <= sqrt n from the start grid", grid.n_sorted());
    let mut reports = Vec::new();
    for (id, err) in [
        ("rayleigh", rayleigh_error as fn(&WalkData, u64, u64) -> f64),
        ("survival_ratio", survival_ratio_error),
    ] {
        let mut a2 = BoundReport::new(&format!("corollary_{id}_A2"), &data.name, format!("{desc}; x=0"));
        let mut at_x = Vec::new();
        for n in grid.n_sorted() {
            let nf = n as f64;
            for x in grid.starts_for(n) {
                let xn = x as f64 / data.sigma;
                if xn > nf.sqrt() {
                    continue;
                }
                let (e2, e3) = corollary_envelopes(data.beta3n, 1.0, xn, nf)?;
                let e = err(data, x, n);
                if x == 0 {
                    a2.push(format!("n={n},x=0"), e, e2.scaled_value);
                } else {
                    at_x.push((n, x, e, e2.scaled_value, e3.scaled_value));
                }
            }
        }
        let a2 = a2.estimated();
        let c2 = a2.max_ratio;
        let mut a3 = BoundReport::new(&format!("corollary_{id}_A3"), &data.name, format!("{desc}; x>0, given A2={c2}"));
        for (n, x, e, e2, e3) in at_x {
            a3.push(format!("n={n},x={x}"), (e - c2 * e2).max(0.0), e3);
        }
        reports.push(a2);
        reports.push(a3.estimated());
    }

    let band = grid.corollary_slope_band;
    let ns = grid.rate_ns();
    let x0: Vec<(u64, f64)> = ns.iter().map(|&n| (n, survival_ratio_error(data, 0, n))).collect();
    let mut rates = vec![RateCheck::new("corollary_x0", &data.name, fit_rate(&x0)?, band)];
    let xq: Vec<(u64, f64)> = ns
        .iter()
        .map(|&n| (n, survival_ratio_error(data, (n as f64).powf(0.25).floor() as u64, n)))
        .collect();
    if xq.iter().all(|p| p.1 > 0.0) {
        rates.push(RateCheck::new("corollary_x_quarter", &data.name, fit_rate(&xq)?, band));
    }
    Ok((reports, rates))
}
