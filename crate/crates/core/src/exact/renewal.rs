use serde::Serialize;

use super::fluctuation::Fluctuation;
use super::ladder::{ascending_law_dp, descending_law_dp, DEFAULT_STEP_CAP};
use super::walk::KilledWalk;
use crate::error::Result;
use crate::increments::LatticeIncrement;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalTable {
    /// `H(x) = sum_{j >= 0} P(chi+_1 + ... + chi+_j <= x)`, `x = 0..=x_max`.
    pub h: Vec<f64>,
    /// Renewal mass `u(x) = H(x) - H(x - 1)`.
    pub u: Vec<f64>,
    /// `phi(x) = sum_k P(S_k in [x, x + 1), tau_0 > k)`, from the killed walk.
    pub phi: Vec<f64>,
    /// `E theta(u)`, the number of weak descending ladder epochs needed for the
    /// ladder height sum to reach `u`.
    pub theta_mean: Vec<f64>,
    /// Law of `chi+`, indexed `0..=max_offset`.
    pub ascending: Vec<f64>,
    /// Law of `chi-`, indexed `0..=max_down`.
    pub descending: Vec<f64>,
    /// Probability mass missing from the ladder laws (zero for the exact solver).
    pub residual: f64,
    /// Steps of the truncated DP, zero for the exact solver.
    pub horizon: usize,
    pub flagged: bool,
}

impl RenewalTable {
    /// `H(x-)`, the renewal function of heights strictly below `x`.
    pub fn h_left(&self, x: usize) -> f64 {
        if x == 0 {
            0.0
        } else {
            self.h[x - 1]
        }
    }
}

/// Renewal, occupation and descending-ladder tables for `x, u = 0..=x_max`.
///
/// Falls back to [`renewal_tables_truncated`] with horizon doubling (until
/// the residual is below `tol` or [`DEFAULT_STEP_CAP`]) when the root solver
/// does not apply.
pub fn renewal_tables(dist: &LatticeIncrement, x_max: usize, tol: f64) -> Result<RenewalTable> {
    let f = match Fluctuation::new(dist) {
        Ok(f) => f,
        Err(_) => {
            let mut horizon = 1024;
            loop {
                let t = renewal_tables_truncated(dist, x_max, horizon);
                if t.residual < tol || horizon >= DEFAULT_STEP_CAP {
                    return Ok(RenewalTable {
                        flagged: t.residual >= tol,
                        ..t
                    });
                }
                horizon *= 2;
            }
        }
    };
    let ascending = f.ascending_law();
    let descending = f.descending_law();
    let (u, h) = renewal(&ascending, x_max);
    Ok(RenewalTable {
        h,
        u,
        phi: f.occupation(x_max)?,
        theta_mean: theta_means(&descending, x_max),
        ascending,
        descending,
        residual: 0.0,
        horizon: 0,
        flagged: false,
    })
}

/// Same tables from DP truncated at `horizon` steps. Every entry is a lower
/// bound of the exact value.
pub fn renewal_tables_truncated(dist: &LatticeIncrement, x_max: usize, horizon: usize) -> RenewalTable {
    let (ascending, r_up) = ascending_law_dp(dist, horizon);
    let (descending, r_down) = descending_law_dp(dist, horizon);
    let (u, h) = renewal(&ascending, x_max);

    let mut phi = vec![0.0; x_max + 1];
    let mut walk = KilledWalk::new(dist, 0);
    let mut r_phi = 0.0;
    for k in 0..=horizon {
        for (w, m) in walk.mass().iter().enumerate().take(x_max + 1) {
            phi[w] += m;
        }
        if k < horizon {
            walk.step();
        } else {
            r_phi = walk.live();
        }
    }
    let residual = r_up.max(r_down).max(r_phi);
    RenewalTable {
        h,
        u,
        phi,
        theta_mean: theta_means(&descending, x_max),
        ascending,
        descending,
        residual,
        horizon,
        flagged: false,
    }
}

fn renewal(ascending: &[f64], x_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![0.0; x_max + 1];
    u[0] = 1.0;
    for x in 1..=x_max {
        u[x] = (1..ascending.len().min(x + 1))
            .map(|i| ascending[i] * u[x - i])
            .sum();
    }
    let mut acc = 0.0;
    let h = u
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    (u, h)
}

/// `M(0) = 1`; for `v >= 1`, `M(v) = (1 + sum_{h=1}^{v-1} q_h M(v - h)) / (1 - q_0)`.
fn theta_means(descending: &[f64], u_max: usize) -> Vec<f64> {
    let q0 = descending[0];
    let mut m = vec![0.0; u_max + 1];
    m[0] = 1.0;
    for v in 1..=u_max {
        let carry: f64 = (1..descending.len().min(v))
            .map(|h| descending[h] * m[v - h])
            .sum();
        m[v] = (1.0 + carry) / (1.0 - q0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ssrw_renewal_is_linear() {
        let t = renewal_tables(&LatticeIncrement::simple(), 10, 1e-8).unwrap();
        for x in 0..=10 {
            assert!((t.h[x] - (x + 1) as f64).abs() < 1e-12);
            assert!((t.phi[x] - 1.0).abs() < 1e-10);
        }
        assert_eq!(t.h_left(0), 0.0);
    }

    #[test]
    fn theta_closed_forms() {
        let t = renewal_tables(&LatticeIncrement::lazy(), 10, 1e-8).unwrap();
        assert_eq!(t.theta_mean[0], 1.0);
        for u in 1..=10 {
            assert!((t.theta_mean[u] - 4.0 * u as f64).abs() < 1e-12);
        }
        let t = renewal_tables(&LatticeIncrement::skewed(), 10, 1e-8).unwrap();
        for u in 1..=10 {
            assert!((t.theta_mean[u] - 3.0 * u as f64).abs() < 1e-11);
        }
    }

    #[test]
    fn truncated_tables_bound_exact_from_below() {
        let d = LatticeIncrement::skewed();
        let exact = renewal_tables(&d, 8, 1e-8).unwrap();
        let trunc = renewal_tables_truncated(&d, 8, 2000);
        assert!(trunc.residual > 0.0 && trunc.residual < 0.05);
        for x in 0..=8 {
            assert!(trunc.phi[x] <= exact.phi[x] + 1e-12);
            assert!(trunc.h[x] <= exact.h[x] + 1e-12);
        }
    }
}
