//! Cross-checks between independent routes to the same quantity.

use fpwalk::approx::{corrected_tail, normal_cdf, reflection_term};
use fpwalk::exact::ladder::{ascending_law_dp, descending_law_dp, ladder_stats_dp};
use fpwalk::exact::{
    expected_min_tau, renewal_tables, renewal_tables_truncated, stopping_profile, survival_prob,
    tail_prob, Fluctuation, FreeWalk,
};
use fpwalk::verify::{check_classical_be, check_mogulskii, GridConfig, WalkData};
use fpwalk::LatticeIncrement;

/// Symmetric walk with jumps of one and two, so overshoots are nontrivial.
fn two_sided() -> LatticeIncrement {
    LatticeIncrement::new(vec![-2, -1, 1, 2], vec![0.25; 4]).unwrap()
}

fn small_grid() -> GridConfig {
    serde_json::from_str(r#"{"n":[16,64],"x":[0,1],"u_max":5,"be_small_n":8}"#).unwrap()
}

#[test]
fn lazy_two_step_survival_from_one() {
    // paths from 1 that avoid {<= 0} for two steps: 1 - (1/4 + 1/2 * 1/4) = 5/8
    let d = LatticeIncrement::lazy();
    assert!((survival_prob(&d, 1, 2).unwrap() - 0.625).abs() < 1e-15);
    assert!((tail_prob(&d, 1, 1.0, 2).unwrap() - 0.625).abs() < 1e-15);
    assert!((tail_prob(&d, 1, 2.0, 2).unwrap() - (2.0 * 0.25 * 0.5 + 0.0625)).abs() < 1e-15);
}

#[test]
fn root_solver_agrees_with_dp() {
    for d in [LatticeIncrement::lazy(), LatticeIncrement::skewed(), two_sided()] {
        let f = Fluctuation::new(&d).unwrap();
        for x in 0..6u64 {
            let dp = ladder_stats_dp(&d, x, 3000);
            let (m1, m2) = f.overshoot_moments(x);
            // the DP misses at most `residual` mass, each worth at most max_down (resp. its square)
            let a = d.max_down() as f64;
            assert!(dp.overshoot1 <= m1 + 1e-12 && m1 - dp.overshoot1 <= dp.residual * a + 1e-12);
            assert!(dp.overshoot2 <= m2 + 1e-12 && m2 - dp.overshoot2 <= dp.residual * a * a + 1e-12);
        }
        let (desc, r) = descending_law_dp(&d, 3000);
        for (h, (&p, &q)) in desc.iter().zip(&f.descending_law()).enumerate() {
            assert!(p <= q + 1e-12 && q - p <= r + 1e-12, "chi- at {h}");
        }
        let (asc, r) = ascending_law_dp(&d, 3000);
        for (h, (&p, &q)) in asc.iter().zip(&f.ascending_law()).enumerate() {
            assert!(p <= q + 1e-12 && q - p <= r + 1e-12, "chi+ at {h}");
        }
    }
}

#[test]
fn ladder_closed_forms() {
    let cases = [
        (LatticeIncrement::simple(), 0.5),
        (LatticeIncrement::lazy(), 0.25),
        (LatticeIncrement::skewed(), 1.0 / 3.0),
    ];
    for (d, s0) in cases {
        let t = renewal_tables(&d, 12, 1e-12).unwrap();
        let e: f64 = t.descending.iter().enumerate().map(|(h, p)| h as f64 * p).sum();
        assert!((e - s0).abs() < 1e-13);
    }
    // skewed: chi+ is 1 or 2 with probability 1/2 each
    let asc = Fluctuation::new(&LatticeIncrement::skewed()).unwrap().ascending_law();
    assert!((asc[1] - 0.5).abs() < 1e-14 && (asc[2] - 0.5).abs() < 1e-14);
    // E theta(u) is linear with slope 1 / E|S_tau0| for these skip-free walks
    for (d, slope) in [(LatticeIncrement::lazy(), 4.0), (LatticeIncrement::skewed(), 3.0)] {
        let t = renewal_tables(&d, 10, 1e-12).unwrap();
        for u in 1..=10 {
            assert!((t.theta_mean[u] - slope * u as f64).abs() < 1e-10);
        }
    }
}

#[test]
fn truncated_renewal_is_a_lower_bound() {
    let d = two_sided();
    let exact = renewal_tables(&d, 15, 1e-12).unwrap();
    let trunc = renewal_tables_truncated(&d, 15, 4096);
    for x in 0..=15 {
        assert!(trunc.h[x] <= exact.h[x] + 1e-12);
        assert!(trunc.phi[x] <= exact.phi[x] + 1e-12);
    }
    assert!(trunc.residual > 0.0);
}

#[test]
fn profile_bookkeeping() {
    let d = two_sided();
    for x in [0u64, 3, 7] {
        let p = stopping_profile(&d, x, 300).unwrap();
        assert!((p.total_p + p.survival - 1.0).abs() < 1e-12);
        for k in 0..p.pk.len() {
            assert!(p.m1k[k] <= (p.pk[k] * p.m2k[k]).sqrt() + 1e-15);
        }
        let direct: f64 = (0..300).map(|k| survival_prob(&d, x, k).unwrap()).sum();
        assert!((expected_min_tau(&d, x, 300).unwrap() - direct).abs() < 1e-9);
    }
}

#[test]
fn free_walk_is_convolution() {
    let d = LatticeIncrement::skewed();
    let mut w = FreeWalk::new(&d, 0);
    w.advance(3);
    // P(S_3 = 0): {0,0,0} plus the three orderings of {-1,-1,2}
    let expect = 0.125 + 3.0 * (1.0 / 9.0) * (1.0 / 6.0);
    assert!((w.pmf(0) - expect).abs() < 1e-15);
}

#[test]
fn classical_be_single_step() {
    let data = WalkData::build("ssrw", &LatticeIncrement::simple(), &small_grid()).unwrap();
    let rep = check_classical_be(&data, &small_grid()).unwrap();
    let row = rep.rows.iter().find(|r| r.point.starts_with("n=1,")).unwrap();
    // the jump of 1/2 at -1 against Phi(-1)
    assert!((row.ratio - (0.5 - normal_cdf(-1.0))).abs() < 1e-15);
    assert!(rep.holds == Some(true));
}

#[test]
fn mogulskii_lazy_origin() {
    let g = small_grid();
    let data = WalkData::build("lazy", &LatticeIncrement::lazy(), &g).unwrap();
    let rep = check_mogulskii(&data, &g).unwrap();
    // from 0 the overshoot is |S_tau0|, from u >= 1 the walk lands exactly on 0
    assert!((rep.rows[0].lhs - 0.25).abs() < 1e-15);
    assert!(rep.rows[1..].iter().all(|r| r.lhs.abs() < 1e-15));
    assert!((rep.max_ratio - 0.25).abs() < 1e-15);
}

#[test]
fn approximation_limits() {
    for n in [10.0, 100.0, 1000.0] {
        assert_eq!(reflection_term(0.0, 1.0, n, 1.0).unwrap(), 0.0);
        let far = corrected_tail(3.0, 1e4, n, 1.0, 0.5).unwrap();
        assert!(far.total < 1e-300);
    }
}
