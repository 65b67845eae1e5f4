//! Inequalities that come with explicit constants. A ratio above the
//! constant means an implementation error, not a counterexample.

use super::data::WalkData;
use super::{gamma1, lattice_lclt_constant, BoundReport, GridConfig, GAMMA0};
use crate::approx::normal_cdf;
use crate::error::{Error, Result};
use crate::exact::pairwise_sum;

fn prefix(mass: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    std::iter::once(0.0)
        .chain(mass.iter().map(|m| {
            acc += m;
            acc
        }))
        .collect()
}

/// Largest mass of `width` consecutive cells, with the first cell's index.
pub(crate) fn max_window(mass: &[f64], width: usize) -> (f64, usize) {
    let p = prefix(mass);
    let width = width.max(1);
    if mass.len() <= width {
        return (p[mass.len()], 0);
    }
    (0..=mass.len() - width)
        .map(|i| (p[i + width] - p[i], i))
        .fold((f64::NEG_INFINITY, 0), |best, c| if c.0 > best.0 { c } else { best })
}

/// Number of integers a closed interval of length `len` can cover.
fn closed_cells(len: f64) -> usize {
    len.floor() as usize + 1
}

fn grid_desc(grid: &GridConfig) -> String {
    format!("n={:?}; x={:?} (+n^1/4, n^1/2: {})", grid.n_sorted(), grid.x, grid.x_scaled)
}

/// `sup_t |P(S_n / (sigma sqrt n) <= t) - Phi(t)| <= gamma0 beta3 / (sigma^3 sqrt n)`.
pub fn check_classical_be(data: &WalkData, _grid: &GridConfig) -> Result<BoundReport> {
    let ns: Vec<u64> = data.free.keys().copied().collect();
    let mut rep = BoundReport::new("classical_be", &data.name, format!("n={ns:?}"));
    for (&n, snap) in &data.free {
        let scale = data.sigma * (n as f64).sqrt();
        let mut below = 0.0;
        let (mut gap, mut at) = (0.0f64, 0i64);
        for (i, &m) in snap.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let s = snap.lo + i as i64;
            let phi = normal_cdf(s as f64 / scale);
            let g = (below - phi).abs().max((below + m - phi).abs());
            if g > gap {
                gap = g;
                at = s;
            }
            below += m;
        }
        rep.push(
            format!("n={n},s={at}"),
            gap,
            data.beta3n / (n as f64).sqrt(),
        );
    }
    Ok(rep.explicit(GAMMA0))
}

/// `P(x + S_n in [y, y + z]) <= gamma1(z) / sqrt(2n)`, sup over `x, y`.
pub fn check_concentration(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let mut rep = BoundReport::new(
        "concentration",
        &data.name,
        format!("n={:?}; z={:?}; sup over y", grid.n_sorted(), grid.z),
    );
    for n in grid.n_sorted() {
        let snap = &data.free[&n];
        for &z in &grid.z {
            let (lhs, i) = max_window(&snap.mass, closed_cells(z * data.sigma));
            let rhs = gamma1(data.beta3n, z) / (2.0 * n as f64).sqrt();
            rep.push(format!("n={n},z={z},y={}", snap.lo + i as i64), lhs, rhs);
        }
    }
    Ok(rep.explicit(1.0))
}

/// `P(x + S_n in [y, y + z], tau_x > n) <= gamma1(z) / sqrt n * P(tau_x > n/2)`.
pub fn check_sn_tau(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let mut rep = BoundReport::new("sn_tau", &data.name, format!("{}; z={:?}", grid_desc(grid), grid.z));
    for n in grid.n_sorted() {
        for x in grid.all_starts() {
            let st = data.start(x);
            let row = &st.rows[&n];
            let half = st.survival[(n / 2) as usize];
            for &z in &grid.z {
                let (lhs, i) = max_window(row, closed_cells(z * data.sigma));
                let rhs = gamma1(data.beta3n, z) / (n as f64).sqrt() * half;
                rep.push(format!("n={n},x={x},z={z},y={i}"), lhs, rhs);
            }
        }
    }
    Ok(rep.explicit(1.0))
}

/// `P(tau_x > n) <= 6 E|S_{tau_x}| / (x + sqrt n)` for `n >= 8 beta3^2`.
pub fn check_tau_tail(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let threshold = 8.0 * data.beta3n.powi(2);
    let mut rep = BoundReport::new(
        "tau_tail",
        &data.name,
        format!("{}; n >= {threshold}", grid_desc(grid)),
    );
    for n in grid.n_sorted().into_iter().filter(|&n| n as f64 >= threshold) {
        for x in grid.all_starts() {
            let st = data.start(x);
            let xn = x as f64 / data.sigma;
            let rhs = data.abs_stau_n(x) / (xn + (n as f64).sqrt());
            rep.push(format!("n={n},x={x}"), st.survival[n as usize], rhs);
        }
    }
    Ok(rep.explicit(6.0))
}

/// `E|u + S_{tau_u}| <= 3 beta3 / sigma^2`.
pub fn check_mogulskii(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let mut rep = BoundReport::new("mogulskii", &data.name, format!("u=0..={}", grid.u_max));
    let rhs = data.moments.beta3 / data.moments.sigma2;
    for u in 0..=grid.u_max {
        rep.push(format!("u={u}"), data.start(u).overshoot1, rhs);
    }
    Ok(rep.explicit(3.0))
}

/// `P(x + S_n in [y, y+1), tau_x > n) <= 288 gamma1(1) E|S_{tau_x}| (y + 4 beta3) / (n (x + sqrt n))`
/// for `n >= 32 beta3^2 + 4`, sup over real `y >= 0`.
///
/// In original units the window is `[y, y + sigma)`. A window holding the
/// integers `w0..w0+m-1` exists for `y` just above `max(w0 - 1, w0 + m - 1 - sigma)`;
/// the right side increases with `y`, so that infimum gives the sup of the ratio.
pub fn check_local_bound_288(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let b3 = data.beta3n;
    let threshold = 32.0 * b3 * b3 + 4.0;
    let mut rep = BoundReport::new(
        "local_288",
        &data.name,
        format!("{}; n >= {threshold}; sup over real y >= 0", grid_desc(grid)),
    );
    let sigma = data.sigma;
    let max_m = {
        let mut m = 1usize;
        while ((m + 1) as f64) < sigma + 1.0 {
            m += 1;
        }
        m
    };
    let g1 = gamma1(b3, 1.0);
    for n in grid.n_sorted().into_iter().filter(|&n| n as f64 >= threshold) {
        let rn = (n as f64).sqrt();
        for x in grid.all_starts() {
            let row = &data.start(x).rows[&n];
            let p = prefix(row);
            let scale = data.abs_stau_n(x) / (n as f64 * (x as f64 / sigma + rn));
            let (mut best, mut best_lhs, mut best_rhs, mut at) = (f64::NEG_INFINITY, 0.0, 0.0, (0, 0));
            for w0 in 1..row.len() {
                for m in 1..=max_m.min(row.len() - w0) {
                    let lhs = p[w0 + m] - p[w0];
                    if lhs == 0.0 {
                        continue;
                    }
                    let y = (w0 as f64 - 1.0).max(w0 as f64 + m as f64 - 1.0 - sigma).max(0.0);
                    let rhs = g1 * scale * (y / sigma + 4.0 * b3);
                    let r = lhs / rhs;
                    if r > best {
                        (best, best_lhs, best_rhs, at) = (r, lhs, rhs, (w0, m));
                    }
                }
            }
            if best.is_finite() {
                rep.push(format!("n={n},x={x},w0={},m={}", at.0, at.1), best_lhs, best_rhs);
            }
        }
    }
    Ok(rep.explicit(288.0))
}

/// `E[|x + S_{tau_x}|; tau_x <= n] <= 8 sqrt n / (x + sqrt n) E|S_{tau_x}|`.
pub fn check_truncated_overshoot(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let mut rep = BoundReport::new("truncated_overshoot_8", &data.name, grid_desc(grid));
    for n in grid.n_sorted() {
        let rn = (n as f64).sqrt();
        for x in grid.all_starts() {
            let st = data.start(x);
            let lhs = pairwise_sum(&st.m1k[..n as usize]) / data.sigma;
            let rhs = rn / (x as f64 / data.sigma + rn) * data.abs_stau_n(x);
            rep.push(format!("n={n},x={x}"), lhs, rhs);
        }
    }
    Ok(rep.explicit(8.0))
}

fn require_unit_lattice(data: &WalkData) -> Result<f64> {
    match data.peakedness {
        Some(p) if (data.moments.sigma2 - 1.0).abs() < 1e-12 => Ok(p.v),
        _ => Err(Error::InvalidArgument(format!(
            "{}: needs span 1 and unit variance",
            data.name
        ))),
    }
}

/// `sup_x |sqrt n P(S_n = x) - exp(-x^2/2n)/sqrt(2 pi)| <= (76/pi + 24/(pi V)) beta3 / sqrt n`.
pub fn check_local_clt_lattice(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let v = require_unit_lattice(data)?;
    let k = lattice_lclt_constant(v);
    let mut rep = BoundReport::new("lattice_lclt", &data.name, format!("n={:?}; V={v}", grid.n_sorted()));
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    for n in grid.n_sorted() {
        let snap = &data.free[&n];
        let rn = (n as f64).sqrt();
        let (mut gap, mut at) = (0.0f64, 0i64);
        for i in -1..=snap.mass.len() as i64 {
            let s = snap.lo + i;
            let p = if i < 0 || i as usize >= snap.mass.len() { 0.0 } else { snap.mass[i as usize] };
            let g = (rn * p - inv_sqrt_2pi * (-(s * s) as f64 / (2.0 * n as f64)).exp()).abs();
            if g > gap {
                gap = g;
                at = s;
            }
        }
        rep.push(format!("n={n},x={at}"), gap, data.moments.beta3 / rn);
    }
    Ok(rep.explicit(k))
}

/// `P(x + S_n in [y, y + z]) <= (1/sqrt(2 pi n) + (76/pi + 24/(pi V)) beta3 / n) (z + 1)`.
pub fn check_lattice_local_concentration(data: &WalkData, grid: &GridConfig) -> Result<BoundReport> {
    let v = require_unit_lattice(data)?;
    let k = lattice_lclt_constant(v);
    let mut rep = BoundReport::new(
        "lattice_local_concentration",
        &data.name,
        format!("n={:?}; z={:?}", grid.n_sorted(), grid.z),
    );
    for n in grid.n_sorted() {
        let snap = &data.free[&n];
        let nf = n as f64;
        for &z in &grid.z {
            let (lhs, i) = max_window(&snap.mass, closed_cells(z));
            let rhs = (1.0 / (2.0 * std::f64::consts::PI * nf).sqrt() + k * data.moments.beta3 / nf) * (z + 1.0);
            rep.push(format!("n={n},z={z},y={}", snap.lo + i as i64), lhs, rhs);
        }
    }
    Ok(rep.explicit(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        let m = [0.1, 0.4, 0.2, 0.3];
        assert_eq!(max_window(&m, 1), (0.4, 1));
        let (v, i) = max_window(&m, 2);
        assert!((v - 0.6).abs() < 1e-15 && i == 1);
        assert!((max_window(&m, 9).0 - 1.0).abs() < 1e-15);
        assert_eq!(closed_cells(0.0), 1);
        assert_eq!(closed_cells(1.0), 2);
        assert_eq!(closed_cells(0.7071), 1);
    }
}
