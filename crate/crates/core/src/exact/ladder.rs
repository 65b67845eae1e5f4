use serde::Serialize;

use super::fluctuation::Fluctuation;
use super::walk::KilledWalk;
use crate::error::Result;
use crate::increments::LatticeIncrement;

/// Step cap for the truncated fallback. The DP costs O(horizon^2).
pub const DEFAULT_STEP_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderStats {
    pub x: u64,
    /// `E|S_{tau_x}| = x + E|x + S_{tau_x}|`.
    pub abs_stau: f64,
    pub overshoot1: f64,
    pub overshoot2: f64,
    /// Unaccounted probability `P(tau_x > horizon)`; zero for the exact solver.
    pub residual: f64,
    /// Steps simulated; zero when the closed-form solver was used.
    pub horizon: usize,
    /// `true` when the residual is above the requested tolerance.
    pub flagged: bool,
}

/// Overshoot moments from `x`.
///
/// Uses the characteristic-root solver; when the walk is unsupported there
/// (common factor in the offsets), runs the DP from `horizon` steps, doubling
/// until `P(tau_x > horizon) < tol` or `step_cap` is reached.
pub fn ladder_stats(
    dist: &LatticeIncrement,
    x: u64,
    horizon: usize,
    tol: f64,
    step_cap: usize,
) -> Result<LadderStats> {
    match Fluctuation::new(dist) {
        Ok(f) => {
            let (m1, m2) = f.overshoot_moments(x);
            Ok(LadderStats {
                x,
                abs_stau: x as f64 + m1,
                overshoot1: m1,
                overshoot2: m2,
                residual: 0.0,
                horizon: 0,
                flagged: false,
            })
        }
        Err(_) => Ok(ladder_stats_doubling(dist, x, horizon.max(1), tol, step_cap)),
    }
}

fn ladder_stats_doubling(
    dist: &LatticeIncrement,
    x: u64,
    horizon: usize,
    tol: f64,
    step_cap: usize,
) -> LadderStats {
    let mut walk = KilledWalk::new(dist, x);
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut target = horizon.min(step_cap);
    loop {
        while walk.steps() < target {
            walk.step();
            accumulate(walk.last_kill(), &mut m1, &mut m2);
        }
        let residual = walk.live();
        if residual < tol || target >= step_cap {
            return LadderStats {
                x,
                abs_stau: x as f64 + m1,
                overshoot1: m1,
                overshoot2: m2,
                residual,
                horizon: target,
                flagged: residual >= tol,
            };
        }
        target = (target * 2).min(step_cap);
    }
}

fn accumulate(kill: &[f64], m1: &mut f64, m2: &mut f64) {
    for (h, &m) in kill.iter().enumerate().skip(1) {
        let h = h as f64;
        *m1 += h * m;
        *m2 += h * h * m;
    }
}

/// Truncated DP moments over exactly `horizon` steps (lower bounds).
pub fn ladder_stats_dp(dist: &LatticeIncrement, x: u64, horizon: usize) -> LadderStats {
    ladder_stats_doubling(dist, x, horizon, 0.0, horizon)
}

/// Law of the first strictly positive value of the walk from 0, by DP over
/// `horizon` steps: the mirrored walk started at 1 is killed exactly when the
/// original first exceeds 0, with `chi+ = 1 + overshoot`. Returns the law
/// indexed `0..=b` and the missing mass.
pub fn ascending_law_dp(dist: &LatticeIncrement, horizon: usize) -> (Vec<f64>, f64) {
    let mirrored = dist.negated();
    let mut walk = KilledWalk::new(&mirrored, 1);
    let mut law = vec![0.0; dist.max_up() + 1];
    for _ in 0..horizon {
        walk.step();
        for (h, &m) in walk.last_kill().iter().enumerate() {
            if m != 0.0 {
                law[h + 1] += m;
            }
        }
    }
    (law, walk.live())
}

/// Law of `|S_{tau_0}|` by DP over `horizon` steps, with the missing mass.
pub fn descending_law_dp(dist: &LatticeIncrement, horizon: usize) -> (Vec<f64>, f64) {
    let mut walk = KilledWalk::new(dist, 0);
    let mut law = vec![0.0; dist.max_down() + 1];
    for _ in 0..horizon {
        walk.step();
        for (h, &m) in walk.last_kill().iter().enumerate() {
            law[h] += m;
        }
    }
    (law, walk.live())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootScan {
    /// `(x, E|x + S_{tau_x}|)`.
    pub points: Vec<(u64, f64)>,
    /// Difference between the last two scanned values.
    pub last_diff: Option<f64>,
    /// The limit constant `E`, when the closed-form solver applies.
    pub limit: Option<f64>,
}

pub fn overshoot_scan(dist: &LatticeIncrement, xs: &[u64]) -> Result<OvershootScan> {
    let solver = Fluctuation::new(dist).ok();
    let points: Vec<(u64, f64)> = xs
        .iter()
        .map(|&x| {
            let m1 = match &solver {
                Some(f) => f.overshoot_moments(x).0,
                None => ladder_stats_doubling(dist, x, 1024, 1e-8, DEFAULT_STEP_CAP).overshoot1,
            };
            (x, m1)
        })
        .collect();
    let last_diff = match points.as_slice() {
        [.., (_, p), (_, q)] => Some(q - p),
        _ => None,
    };
    Ok(OvershootScan {
        points,
        last_diff,
        limit: solver.map(|f| f.limit_overshoot()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_values() {
        let s = ladder_stats(&LatticeIncrement::simple(), 0, 1024, 1e-8, DEFAULT_STEP_CAP).unwrap();
        assert!((s.abs_stau - 0.5).abs() < 1e-15);
        let s = ladder_stats(&LatticeIncrement::lazy(), 0, 1024, 1e-8, DEFAULT_STEP_CAP).unwrap();
        assert!((s.abs_stau - 0.25).abs() < 1e-15);
        let s = ladder_stats(&LatticeIncrement::skewed(), 0, 1024, 1e-8, DEFAULT_STEP_CAP).unwrap();
        assert!((s.abs_stau - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn fallback_flags_residual() {
        let d = LatticeIncrement::new(vec![-2, 2], vec![0.5, 0.5]).unwrap();
        let s = ladder_stats(&d, 0, 16, 1e-8, 256).unwrap();
        assert!(s.flagged && s.horizon == 256 && s.residual > 0.0);
        // the walk lives on 2Z: tau_0 lands on -2 or 0
        assert!(s.overshoot1 <= 1.0);
    }

    #[test]
    fn ssrw_scan_is_zero() {
        let s = overshoot_scan(&LatticeIncrement::simple(), &[1, 2, 5, 10]).unwrap();
        assert!(s.points.iter().all(|&(_, v)| v == 0.0));
        assert_eq!(s.limit, Some(0.0));
    }
}
