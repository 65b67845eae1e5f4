use serde::Serialize;

use super::walk::{pairwise_sum, KilledWalk};
use crate::error::{Error, Result};
use crate::increments::LatticeIncrement;

/// Default cap on the number of `f64` cells a [`SurvivalTable`] may hold
/// (256 MiB), and on the width of a single stepper row.
pub const MEMORY_BUDGET_CELLS: usize = 1 << 25;

fn row_width(dist: &LatticeIncrement, x: u64, k: u64) -> Option<usize> {
    let w = (dist.max_up() as u64).checked_mul(k)?.checked_add(x)?.checked_add(1)?;
    usize::try_from(w).ok()
}

fn check_row_budget(dist: &LatticeIncrement, x: u64, n: u64) -> Result<()> {
    match row_width(dist, x, n) {
        Some(w) if w <= MEMORY_BUDGET_CELLS => Ok(()),
        w => Err(Error::MemoryBudget {
            required: w.unwrap_or(usize::MAX),
            budget: MEMORY_BUDGET_CELLS,
        }),
    }
}

/// Killed measure `P(x + S_k = w, tau_x > k)` for every `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalTable {
    pub x: u64,
    pub n: u64,
    /// `rows[k][w]`; row `k` spans positions `0..=x + k * max_offset`.
    pub rows: Vec<Vec<f64>>,
    /// `killed[k] = P(tau_x <= k)`.
    pub killed: Vec<f64>,
}

impl SurvivalTable {
    pub fn mass(&self, k: usize, w: i64) -> f64 {
        if w < 0 {
            return 0.0;
        }
        self.rows[k].get(w as usize).copied().unwrap_or(0.0)
    }

    pub fn live(&self, k: usize) -> f64 {
        pairwise_sum(&self.rows[k])
    }

    pub fn final_row(&self) -> &[f64] {
        self.rows.last().expect("row 0 always present")
    }

    /// `(k, position, mass)` for every nonzero cell, in `(k, position)` order.
    pub fn nonzero_cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, m)| **m != 0.0)
                .map(move |(w, m)| (k, w, *m))
        })
    }
}

pub fn survival_evolve(dist: &LatticeIncrement, x: u64, n: u64) -> Result<SurvivalTable> {
    survival_evolve_with_budget(dist, x, n, MEMORY_BUDGET_CELLS)
}

pub fn survival_evolve_with_budget(
    dist: &LatticeIncrement,
    x: u64,
    n: u64,
    budget: usize,
) -> Result<SurvivalTable> {
    // sum_{k=0}^{n} (x + k b + 1)
    let b = dist.max_up() as u128;
    let (x128, n128) = (x as u128, n as u128);
    let cells = (n128 + 1) * (x128 + 1) + b * n128 * (n128 + 1) / 2;
    if cells > budget as u128 {
        return Err(Error::MemoryBudget {
            required: usize::try_from(cells).unwrap_or(usize::MAX),
            budget,
        });
    }
    let mut walk = KilledWalk::new(dist, x);
    let mut rows = Vec::with_capacity(n as usize + 1);
    let mut killed = Vec::with_capacity(n as usize + 1);
    rows.push(walk.mass().to_vec());
    killed.push(0.0);
    for _ in 0..n {
        walk.step();
        rows.push(walk.mass().to_vec());
        killed.push(walk.killed_total());
    }
    Ok(SurvivalTable { x, n, rows, killed })
}

/// `P(tau_x > n)`.
pub fn survival_prob(dist: &LatticeIncrement, x: u64, n: u64) -> Result<f64> {
    check_row_budget(dist, x, n)?;
    let mut walk = KilledWalk::new(dist, x);
    walk.advance(n as usize);
    Ok(walk.live())
}

/// `P(x + S_n >= y, tau_x > n)`.
pub fn tail_prob(dist: &LatticeIncrement, x: u64, y: f64, n: u64) -> Result<f64> {
    if y.is_nan() {
        return Err(Error::InvalidArgument("y is NaN".into()));
    }
    check_row_budget(dist, x, n)?;
    let mut walk = KilledWalk::new(dist, x);
    walk.advance(n as usize);
    Ok(upper_tail(walk.mass(), y))
}

/// `sum_{w >= max(1, ceil(y))} mass[w]` for a live row (`mass[0]` counts only for `y <= 0`).
pub(crate) fn upper_tail(mass: &[f64], y: f64) -> f64 {
    let start = if y <= 0.0 {
        0
    } else if y >= mass.len() as f64 {
        return 0.0;
    } else {
        y.ceil() as usize
    };
    pairwise_sum(&mass[start..])
}

/// Kill law of `tau_x` by step, with overshoot moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppingProfile {
    pub x: u64,
    pub n: u64,
    /// `pk[k-1] = P(tau_x = k)`.
    pub pk: Vec<f64>,
    /// `E[|x + S_tau|; tau_x = k]`.
    pub m1k: Vec<f64>,
    /// `E[|x + S_tau|^2; tau_x = k]`.
    pub m2k: Vec<f64>,
    pub total_p: f64,
    pub total_m1: f64,
    pub total_m2: f64,
    /// `P(tau_x > n)`.
    pub survival: f64,
}

pub fn stopping_profile(dist: &LatticeIncrement, x: u64, n: u64) -> Result<StoppingProfile> {
    check_row_budget(dist, x, n)?;
    let mut walk = KilledWalk::new(dist, x);
    let len = n as usize;
    let (mut pk, mut m1k, mut m2k) = (
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    );
    for _ in 0..n {
        walk.step();
        let kill = walk.last_kill();
        let mut p = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (h, &m) in kill.iter().enumerate() {
            let h = h as f64;
            p += m;
            m1 += h * m;
            m2 += h * h * m;
        }
        pk.push(p);
        m1k.push(m1);
        m2k.push(m2);
    }
    Ok(StoppingProfile {
        x,
        n,
        total_p: pairwise_sum(&pk),
        total_m1: pairwise_sum(&m1k),
        total_m2: pairwise_sum(&m2k),
        pk,
        m1k,
        m2k,
        survival: walk.live(),
    })
}

/// `E[tau_x ^ n] = sum_{k <= n} k P(tau_x = k) + n P(tau_x > n)`.
pub fn expected_min_tau(dist: &LatticeIncrement, x: u64, n: u64) -> Result<f64> {
    let profile = stopping_profile(dist, x, n)?;
    let terms: Vec<f64> = profile
        .pk
        .iter()
        .enumerate()
        .map(|(i, p)| (i + 1) as f64 * p)
        .collect();
    Ok(pairwise_sum(&terms) + n as f64 * profile.survival)
}
