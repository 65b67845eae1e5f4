//! Empirical suprema for inequalities whose absolute constant is unspecified.
//! These are lower bounds on the true constants, never certificates.

use super::checks::max_window;
use super::data::WalkData;
use super::rates::sup_y_thm1;
use super::{gamma1, BoundReport, GridConfig};
use crate::approx::{ales_envelope, improved_envelope, normal_cdf};
use crate::error::{Error, Result};
use crate::exact::{pairwise_sum, renewal_tables};

/// Horizons `k` for per-step bounds: every `k <= 64`, then about eight per octave.
fn k_grid(lo: u64, hi: u64) -> Vec<u64> {
    let mut ks: Vec<u64> = (1..=64.min(hi)).collect();
    let mut j = 48;
    loop {
        let k = 2f64.powf(j as f64 / 8.0).floor() as u64;
        if k > hi {
            break;
        }
        ks.push(k);
        j += 1;
    }
    ks.retain(|&k| k >= lo);
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn threshold_32(b3: f64) -> f64 {
    32.0 * b3 * b3 + 5.0
}

pub fn estimate_constants(data: &WalkData, grid: &GridConfig) -> Result<Vec<BoundReport>> {
    let s = data.sigma;
    let b3 = data.beta3n;
    let n_max = *grid.n.iter().max().expect("validated");
    let starts = grid.all_starts();
    let mut out = Vec::new();

    // E|u + S|^2 <= C E|S_tau_u| beta3^2
    let mut second = BoundReport::new("second_moment_C", &data.name, format!("u=0..={}", grid.u_max));
    for u in 0..=grid.u_max {
        let st = data.start(u);
        second.push(format!("u={u}"), st.overshoot2 / (s * s), data.abs_stau_n(u) * b3 * b3);
    }
    out.push(second.estimated());

    // H(x) <= 2 E|S_tau_0| (x + c2 beta3)
    let ren = renewal_tables(&data.dist, grid.u_max as usize, 1e-10)?;
    let mut c2 = BoundReport::new("renewal_c2", &data.name, format!("x=0..={}", grid.u_max));
    let s0 = data.abs_stau_n(0);
    for x in 0..=grid.u_max {
        let lhs = ren.h[x as usize] / (2.0 * s0) - x as f64 / s;
        c2.push(format!("x={x}"), lhs, b3);
    }
    out.push(c2.estimated());

    // Per-step bounds at k >= 32 beta3^2 + 5.
    let kmin = threshold_32(b3).ceil() as u64;
    let ks = k_grid(kmin, n_max);
    let kdesc = format!("x={starts:?}; k in [{kmin}, {n_max}] (all k <= 64, ~8 per octave above)");
    let mut per_k = [
        BoundReport::new("stau_pk_C1", &data.name, kdesc.clone()),
        BoundReport::new("stau_m1_C1", &data.name, kdesc.clone()),
        BoundReport::new("stau_gamma1_C1", &data.name, kdesc.clone()),
        BoundReport::new("stau_m2_C1", &data.name, kdesc),
    ];
    for &x in &starts {
        let st = data.start(x);
        let xn = x as f64 / s;
        let es = data.abs_stau_n(x);
        for &k in &ks {
            let kf = k as f64;
            let i = (k - 1) as usize;
            let (p, m1, m2) = (st.pk[i], st.m1k[i] / s, st.m2k[i] / (s * s));
            let base = es / (kf * (xn + kf.sqrt()));
            let point = format!("k={k},x={x}");
            per_k[0].push(point.clone(), p, base * b3 * b3);
            per_k[1].push(point.clone(), m1, base * b3 * b3);
            // gamma1 is affine in its argument, so its expectation is exact.
            let g = gamma1(b3, 0.0) * p + m1 / std::f64::consts::PI.sqrt();
            per_k[2].push(point.clone(), g, base * b3.powi(3));
            per_k[3].push(point, m2, base * kf.sqrt() * b3 * b3);
        }
    }
    out.extend(per_k.into_iter().map(BoundReport::estimated));

    // Truncated-horizon bounds.
    let ndesc = |t: f64| format!("x={starts:?}; n={:?}, n >= {t}", grid.n_sorted());
    let t8 = 8.0 * b3 * b3;
    let t32 = threshold_32(b3);
    let mut tau_exp = BoundReport::new("tau_exp_C", &data.name, ndesc(t8));
    let mut stau2 = BoundReport::new("stau2_C", &data.name, ndesc(t32));
    let mut stau3 = BoundReport::new("stau3_C", &data.name, ndesc(t32));
    for n in grid.n_sorted() {
        let nf = n as f64;
        let rn = nf.sqrt();
        for &x in &starts {
            let st = data.start(x);
            let xn = x as f64 / s;
            let es = data.abs_stau_n(x);
            let point = format!("n={n},x={x}");
            if nf >= t8 {
                let e_min = pairwise_sum(&st.survival[..n as usize]);
                tau_exp.push(point.clone(), e_min, b3 * nf * es / (xn + rn));
            }
            if nf >= t32 {
                let weighted: Vec<f64> = st.m1k[..n as usize]
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (i + 1) as f64 * m / s)
                    .collect();
                stau2.push(point.clone(), pairwise_sum(&weighted), b3 * b3 * nf / (xn + rn) * es);
                let m2 = pairwise_sum(&st.m2k[..n as usize]) / (s * s);
                stau3.push(point, m2, b3 * b3 * rn / (xn + rn) * es);
            }
        }
    }
    out.push(tau_exp.estimated());
    out.push(stau2.estimated());
    out.push(stau3.estimated());

    // E|S_n|^3 <= C (beta3 n + n^(3/2))
    let mut third = BoundReport::new(
        "third_moment_C",
        &data.name,
        format!("n=1..={} and {:?}", grid.be_small_n, grid.n_sorted()),
    );
    for (&n, snap) in &data.free {
        let terms: Vec<f64> = snap
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| ((snap.lo + i as i64).abs() as f64 / s).powi(3) * m)
            .collect();
        let nf = n as f64;
        third.push(format!("n={n}"), pairwise_sum(&terms), b3 * nf + nf.powf(1.5));
    }
    out.push(third.estimated());

    // sup_x |P(tau_x > n) - reflection| <= A beta3 / sqrt n
    let mut ales = BoundReport::new("ales_A", &data.name, format!("x={starts:?}; n={:?}", grid.n_sorted()));
    for n in grid.n_sorted() {
        let sn = s * (n as f64).sqrt();
        let env = ales_envelope(b3, n as f64)?;
        let (mut gap, mut at) = (0.0f64, 0);
        for &x in &starts {
            let refl = normal_cdf(x as f64 / sn) - normal_cdf(-(x as f64) / sn);
            let g = (data.start(x).survival[n as usize] - refl).abs();
            if g > gap {
                gap = g;
                at = x;
            }
        }
        ales.push(format!("n={n},x={at}"), gap, env.scaled_value);
    }
    out.push(ales.estimated());
    Ok(out)
}

/// Constants of the span-1 refinements with `R = 1/V`: the `beta3^2` form of
/// the main bound and the sharpened concentration bound.
pub fn check_improved(data: &WalkData, grid: &GridConfig) -> Result<Vec<BoundReport>> {
    let v = data
        .peakedness
        .ok_or_else(|| Error::InvalidArgument(format!("{}: needs span 1", data.name)))?
        .v;
    let r = 1.0 / v;
    let s = data.sigma;
    let b3 = data.beta3n;
    let mut main = BoundReport::new(
        "improved_C",
        &data.name,
        format!("n={:?}; x={:?} (+scaled); sup over y; R={r}", grid.n_sorted(), grid.x),
    );
    for n in grid.n_sorted() {
        for x in grid.starts_for(n) {
            let sup = sup_y_thm1(data, x, n)?;
            let env = improved_envelope(b3, 1.0, data.abs_stau_n(x), x as f64 / s, n as f64, r)?;
            main.push(format!("n={n},x={x},y={}", sup.y_at), sup.corrected, env.scaled_value);
        }
    }
    let mut conc = BoundReport::new(
        "new_conc_A",
        &data.name,
        format!("n={:?}; windows of length 1 (normalized); R={r}", grid.n_sorted()),
    );
    for n in grid.n_sorted() {
        let snap = &data.free[&n];
        let (lhs, i) = max_window(&snap.mass, s.floor() as usize + 1);
        let q = (2.0 * n as f64).sqrt();
        conc.push(format!("n={n},y={}", snap.lo + i as i64), lhs, (1.0 + r * b3 / q) / q);
    }
    Ok(vec![main.estimated(), conc.estimated()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_grid_shape() {
        let ks = k_grid(10, 4096);
        assert_eq!(ks[0], 10);
        assert!(ks.contains(&64) && ks.contains(&4096) && ks.contains(&128));
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
    }
}
