//! Exact quantities collected once per distribution and shared by all checks.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::GridConfig;
use crate::error::Result;
use crate::exact::ladder::{ladder_stats, DEFAULT_STEP_CAP};
use crate::exact::{pairwise_sum, Fluctuation, FreeWalk, KilledWalk};
use crate::increments::{LatticeIncrement, MomentSummary, Peakedness};

/// Per-start data from one killed-walk run up to the largest grid `n`.
#[derive(Debug, Clone)]
pub struct StartData {
    pub x: u64,
    /// `E|S_{tau_x}|`.
    pub abs_stau: f64,
    /// `E|x + S_{tau_x}|`.
    pub overshoot1: f64,
    pub overshoot2: f64,
    /// `survival[k] = P(tau_x > k)`, `k = 0..=n_max`.
    pub survival: Vec<f64>,
    /// `pk[k-1] = P(tau_x = k)` and the matching overshoot moments.
    pub pk: Vec<f64>,
    pub m1k: Vec<f64>,
    pub m2k: Vec<f64>,
    /// Killed measure by position at each grid `n`.
    pub rows: BTreeMap<u64, Vec<f64>>,
}

/// Unkilled pmf of `S_n`: `(lowest position, masses)`.
#[derive(Debug, Clone)]
pub struct FreeSnapshot {
    pub lo: i64,
    pub mass: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WalkData {
    pub name: String,
    pub dist: LatticeIncrement,
    pub moments: MomentSummary,
    pub sigma: f64,
    /// Third absolute moment of `X / sigma`.
    pub beta3n: f64,
    pub span: u64,
    pub peakedness: Option<Peakedness>,
    pub solver: Option<Fluctuation>,
    pub n_grid: Vec<u64>,
    pub starts: BTreeMap<u64, StartData>,
    pub free: BTreeMap<u64, FreeSnapshot>,
}

impl WalkData {
    pub fn build(name: &str, dist: &LatticeIncrement, grid: &GridConfig) -> Result<Self> {
        grid.validate()?;
        let moments = dist.moments();
        let sigma = moments.sigma();
        let span = dist.span();
        let peakedness = if span == 1 { Some(dist.peakedness()?) } else { None };
        let solver = Fluctuation::new(dist).ok();
        let n_grid = grid.n.clone();
        let n_max = *n_grid.iter().max().expect("validated");

        let xs: Vec<u64> = grid.all_starts();
        let starts: Vec<StartData> = xs
            .par_iter()
            .map(|&x| run_start(dist, solver.as_ref(), x, &n_grid, n_max))
            .collect::<Result<_>>()?;

        let mut free_ns: Vec<u64> = (1..=grid.be_small_n).chain(n_grid.iter().copied()).collect();
        free_ns.sort_unstable();
        free_ns.dedup();
        let mut free = BTreeMap::new();
        let mut walk = FreeWalk::new(dist, 0);
        for &n in &free_ns {
            walk.advance(n as usize - walk.steps());
            free.insert(
                n,
                FreeSnapshot {
                    lo: walk.lo(),
                    mass: walk.mass().to_vec(),
                },
            );
        }

        Ok(Self {
            name: name.to_string(),
            dist: dist.clone(),
            moments,
            sigma,
            beta3n: moments.lyapunov,
            span,
            peakedness,
            solver,
            n_grid,
            starts: starts.into_iter().map(|s| (s.x, s)).collect(),
            free,
        })
    }

    pub fn start(&self, x: u64) -> &StartData {
        &self.starts[&x]
    }

    /// `E|S_{tau_x}| / sigma`, the normalized walk's value.
    pub fn abs_stau_n(&self, x: u64) -> f64 {
        self.start(x).abs_stau / self.sigma
    }
}

fn run_start(
    dist: &LatticeIncrement,
    solver: Option<&Fluctuation>,
    x: u64,
    n_grid: &[u64],
    n_max: u64,
) -> Result<StartData> {
    let (overshoot1, overshoot2) = match solver {
        Some(f) => f.overshoot_moments(x),
        None => {
            let s = ladder_stats(dist, x, 1024, 1e-8, DEFAULT_STEP_CAP)?;
            (s.overshoot1, s.overshoot2)
        }
    };
    let mut walk = KilledWalk::new(dist, x);
    let n = n_max as usize;
    let mut survival = Vec::with_capacity(n + 1);
    let (mut pk, mut m1k, mut m2k) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut rows = BTreeMap::new();
    survival.push(1.0);
    for k in 1..=n_max {
        walk.step();
        let (mut p, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (h, &m) in walk.last_kill().iter().enumerate() {
            let h = h as f64;
            p += m;
            m1 += h * m;
            m2 += h * h * m;
        }
        pk.push(p);
        m1k.push(m1);
        m2k.push(m2);
        survival.push(pairwise_sum(walk.mass()));
        if n_grid.contains(&k) {
            rows.insert(k, walk.mass().to_vec());
        }
    }
    Ok(StartData {
        x,
        abs_stau: x as f64 + overshoot1,
        overshoot1,
        overshoot2,
        survival,
        pk,
        m1k,
        m2k,
        rows,
    })
}
