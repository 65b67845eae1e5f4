//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use fpwalk::approx::normal_cdf;
use fpwalk::exact::{renewal_tables, survival_evolve, Fluctuation, KilledWalk};
use fpwalk::montecarlo::{mc_tail, McConfig};
use fpwalk::verify::{default_walks, verify_walk, GridConfig, WalkReport};
use fpwalk::{IncrementModel, LatticeIncrement};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Killed measure at every depth by brute-force path enumeration:
/// `out[k][w] = P(x + S_k = w, tau_x > k)`.
fn enumerate_paths(dist: &LatticeIncrement, x: i64, n: usize) -> Vec<Vec<f64>> {
    let width = (x + dist.max_up() as i64 * n as i64 + 1) as usize;
    let mut out = vec![vec![0.0; width]; n + 1];
    fn dfs(d: &LatticeIncrement, pos: i64, prob: f64, k: usize, n: usize, out: &mut [Vec<f64>]) {
        out[k][pos as usize] += prob;
        if k == n {
            return;
        }
        for (step, p) in d.iter() {
            let next = pos + step;
            if next > 0 {
                dfs(d, next, prob * p, k + 1, n, out);
            }
        }
    }
    dfs(dist, x, 1.0, 0, n, &mut out);
    out
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for dist in [LatticeIncrement::simple(), LatticeIncrement::lazy()] {
        for x in 0..=4u64 {
            let brute = enumerate_paths(&dist, x as i64, 12);
            for n in 0..=12u64 {
                let t = survival_evolve(&dist, x, n).expect("within budget");
                for (k, row) in brute.iter().enumerate().take(n as usize + 1) {
                    for (w, &b) in row.iter().enumerate() {
                        worst = worst.max((t.mass(k, w as i64) - b).abs());
                    }
                    let live: f64 = row.iter().sum();
                    worst = worst.max((t.live(k) - live).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |table - enumeration| = {worst:.3e} (tol 1e-12)"))
}

fn criterion_2() -> Outcome {
    let dist = LatticeIncrement::simple();
    let n_max = 200usize;
    // binom[n][j] = P(S_n = 2j - n), built by repeated halving.
    let mut binom = vec![vec![1.0f64]];
    for n in 1..=n_max {
        let prev = &binom[n - 1];
        let mut row = vec![0.0; n + 1];
        for (j, &p) in prev.iter().enumerate() {
            row[j] += 0.5 * p;
            row[j + 1] += 0.5 * p;
        }
        binom.push(row);
    }
    let free = |n: usize, d: i64| -> f64 {
        let twice = d + n as i64;
        if twice < 0 || twice % 2 != 0 || twice / 2 > n as i64 {
            0.0
        } else {
            binom[n][(twice / 2) as usize]
        }
    };
    let mut worst = 0.0f64;
    for x in 1..=20i64 {
        let mut walk = KilledWalk::new(&dist, x as u64);
        for n in 1..=n_max {
            walk.step();
            let mass = walk.mass();
            for y in 1..=20i64 {
                let killed = mass.get(y as usize).copied().unwrap_or(0.0);
                let reflected = free(n, y - x) - free(n, y + x);
                worst = worst.max((killed - reflected).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max reflection defect = {worst:.3e} (tol 1e-12)"))
}

fn criterion_3(reports: &[WalkReport]) -> Outcome {
    let mut failures = Vec::new();
    let mut lclt_ran = false;
    let mut checked = 0;
    for w in reports {
        for r in &w.reports {
            if let (Some(c), Some(h)) = (r.constant, r.holds) {
                checked += 1;
                lclt_ran |= r.bound_id == "lattice_lclt" && w.dist == "skewed";
                if !h {
                    failures.push(format!("{}/{} ratio {} > {c}", w.dist, r.bound_id, r.max_ratio));
                }
            }
        }
    }
    let pass = failures.is_empty() && lclt_ran && checked == 23;
    outcome(
        pass,
        format!(
            "{checked} explicit-constant reports, lattice LCLT on skewed: {lclt_ran}, violations: {failures:?}"
        ),
    )
}

fn criterion_4(reports: &[WalkReport]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in reports {
        let r = w.rates.iter().find(|r| r.rate_id == "thm1_x0").expect("thm1 rate");
        pass &= r.fit.slope >= -1.3 && r.fit.slope <= -0.7 && r.fit.n_range == (64, 4096);
        let mut part = format!("{} slope {:.4}", w.dist, r.fit.slope);
        if w.dist == "lazy" || w.dist == "skewed" {
            let improves = w.correction_improves.iter().all(|&(n, c, f)| n < 64 || c < f);
            pass &= improves && w.correction_improves.len() == 7;
            part.push_str(&format!(", correction improves at every n >= 64: {improves}"));
        }
        parts.push(part);
    }
    outcome(pass, format!("{} (band [-1.3, -0.7])", parts.join("; ")))
}

fn criterion_5(reports: &[WalkReport]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in reports {
        let r = w.rates.iter().find(|r| r.rate_id == "corollary_x0").expect("corollary rate");
        pass &= r.fit.slope >= -0.7 && r.fit.slope <= -0.3 && r.fit.n_range == (64, 4096);
        parts.push(format!("{} slope {:.4}", w.dist, r.fit.slope));
    }
    outcome(pass, format!("{} (band [-0.7, -0.3])", parts.join("; ")))
}

fn criterion_6() -> Outcome {
    let mut worst_wald = 0.0f64;
    let mut worst_phi = 0.0f64;
    for dist in [LatticeIncrement::lazy(), LatticeIncrement::skewed()] {
        let f = Fluctuation::new(&dist).expect("solver applies");
        let t = renewal_tables(&dist, 10, 1e-12).expect("renewal tables");
        let tol_adj = t.residual;
        let s0 = f.overshoot_moments(0).0;
        for u in 0..=10u64 {
            let su = u as f64 + f.overshoot_moments(u).0;
            worst_wald = worst_wald.max((s0 * t.theta_mean[u as usize] - su).abs() - tol_adj);
            let x = u as usize;
            // H read as H(x-) on the integer lattice, so H(x + 1) - H(x) is the mass at x
            let gap = t.h_left(x + 1) - t.h_left(x);
            worst_phi = worst_phi.max((t.phi[x] - gap).abs() - tol_adj);
        }
    }
    let pass = worst_wald <= 1e-6 && worst_phi <= 1e-6;
    outcome(
        pass,
        format!("Wald defect {worst_wald:.3e}, phi vs renewal mass defect {worst_phi:.3e} (tol 1e-6)"),
    )
}

fn criterion_7() -> Outcome {
    let model = IncrementModel::from(LatticeIncrement::lazy());
    let cfg = |seed, workers| McConfig {
        seed,
        batches: 100,
        paths_per_batch: 10_000,
        horizon: 2,
        workers,
    };
    let mut worst_z = 0.0f64;
    let mut covered = true;
    for seed in 0..10u64 {
        let e = mc_tail(&model, 1.0, 1.0, 2, &cfg(seed, None)).expect("mc");
        let z = (e.mean - 0.625).abs() / e.stderr;
        worst_z = worst_z.max(z);
        covered &= z <= 4.0 && e.n_paths == 1_000_000;
    }
    let runs: Vec<_> = [1, 2, 8]
        .iter()
        .map(|&w| mc_tail(&model, 1.0, 1.0, 2, &cfg(2024, Some(w))).expect("mc"))
        .collect();
    let identical = runs.iter().all(|r| {
        r.mean.to_bits() == runs[0].mean.to_bits()
            && r.stderr.to_bits() == runs[0].stderr.to_bits()
            && r.ci95.0.to_bits() == runs[0].ci95.0.to_bits()
            && r.ci95.1.to_bits() == runs[0].ci95.1.to_bits()
    });
    outcome(
        covered && identical,
        format!("max |mean - 5/8| / stderr over 10 seeds = {worst_z:.2} (limit 4); bit-identical over 1/2/8 workers: {identical}"),
    )
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let mut t = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, t);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (t * p1 - p0) / (t * t - 1.0);
                let dt = p1 / dp;
                t -= dt;
                if dt.abs() < 1e-16 {
                    break;
                }
            }
            (t, 2.0 / ((1.0 - t * t) * dp * dp))
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let rule = gauss_legendre(20);
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let integrate = |a: f64, b: f64| -> f64 {
        let panels = ((b - a).abs() / 0.25).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|j| {
                let mid = a + (j as f64 + 0.5) * h;
                rule.iter().map(|&(t, w)| w * density(mid + 0.5 * h * t)).sum::<f64>() * 0.5 * h
            })
            .sum()
    };
    let mut worst = 0.0f64;
    let mut at = 0.0;
    let points = 10_000;
    for i in 0..points {
        let z = -8.0 + 16.0 * i as f64 / (points - 1) as f64;
        // Integrate over the short side to keep the oracle's own error small.
        let oracle = if z <= 0.0 {
            0.5 - integrate(z, 0.0)
        } else {
            0.5 + integrate(0.0, z)
        };
        let e = (normal_cdf(z) - oracle).abs();
        if e > worst {
            worst = e;
            at = z;
        }
    }
    outcome(worst <= 1e-12, format!("max |Phi - quadrature| = {worst:.3e} at z = {at:.4} over {points} points (tol 1e-12)"))
}

fn timed(label: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(l) = limit {
        if took > l {
            o.pass = false;
            o.detail.push_str(&format!("; runtime {took:?} over limit {l:?}"));
        }
    }
    println!(
        "{} {label}: {} [{:.2}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    o.pass
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        timed("criterion 1 exact engine vs path enumeration", Some(secs(1)), criterion_1),
        timed("criterion 2 discrete reflection identity", Some(secs(10)), criterion_2),
    ];

    let grid = GridConfig::default();
    let start = Instant::now();
    let reports: Vec<WalkReport> = default_walks()
        .iter()
        .map(|(name, d)| verify_walk(name, d, &grid).expect("verify"))
        .collect();
    let verify_time = start.elapsed();
    println!("     default-grid verification of ssrw, lazy, skewed took {:.2}s", verify_time.as_secs_f64());
    let within = |limit: u64| {
        let ok = verify_time <= secs(limit);
        move |mut o: Outcome| {
            if !ok {
                o.pass = false;
                o.detail.push_str("; shared verification over time limit");
            }
            o
        }
    };
    results.push(timed("criterion 3 explicit-constant bounds", Some(secs(300)), || within(300)(criterion_3(&reports))));
    results.push(timed("criterion 4 corrected approximation rate and correction gain", Some(secs(120)), || within(120)(criterion_4(&reports))));
    results.push(timed("criterion 5 survival ratio rate at x = 0", Some(secs(60)), || within(60)(criterion_5(&reports))));
    results.push(timed("criterion 6 Wald and occupation identities", None, criterion_6));
    results.push(timed("criterion 7 Monte Carlo calibration and determinism", None, criterion_7));
    results.push(timed("criterion 8 normal CDF vs quadrature", None, criterion_8));

    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
