use fpwalk::exact::{tail_prob, Fluctuation};
use fpwalk::montecarlo::{mc_stopping, mc_tail, McConfig};
use fpwalk::{ContinuousIncrement, Family, IncrementModel, LatticeIncrement};

fn cfg(seed: u64, batches: usize, paths: usize, horizon: usize) -> McConfig {
    McConfig {
        seed,
        batches,
        paths_per_batch: paths,
        horizon,
        workers: None,
    }
}

#[test]
fn ci_coverage_over_seeds() {
    let d = LatticeIncrement::skewed();
    let exact = tail_prob(&d, 2, 3.0, 10).unwrap();
    let model = IncrementModel::from(d);
    let covered = (0..100u64)
        .filter(|&s| {
            let e = mc_tail(&model, 2.0, 3.0, 10, &cfg(s, 20, 500, 10)).unwrap();
            e.ci95.0 <= exact && exact <= e.ci95.1
        })
        .count();
    assert!(covered >= 90, "{covered}/100 intervals cover {exact}");
}

#[test]
fn overshoot_matches_root_solver() {
    let d = LatticeIncrement::new(vec![-2, -1, 1, 2], vec![0.25; 4]).unwrap();
    let exact = Fluctuation::new(&d).unwrap().overshoot_moments(3).0;
    let est = mc_stopping(&IncrementModel::from(d), 3.0, 5000, &cfg(7, 50, 2000, 5000)).unwrap();
    assert!(est.truncated_fraction > 0.0 && est.truncated_fraction < 0.05);
    // truncation biases the ratio estimator by O(truncated_fraction)
    let z = (est.overshoot.mean - exact).abs() / est.overshoot.stderr;
    assert!(z < 4.0, "mc {} vs exact {exact}", est.overshoot.mean);
}

#[test]
fn worker_count_does_not_change_bits() {
    let model = IncrementModel::from(ContinuousIncrement::new(Family::Laplace, 1.0).unwrap());
    let mut c = cfg(99, 16, 300, 400);
    let runs: Vec<_> = [1, 3, 8]
        .into_iter()
        .map(|w| {
            c.workers = Some(w);
            mc_stopping(&model, 0.5, 400, &c).unwrap()
        })
        .collect();
    for r in &runs[1..] {
        assert_eq!(r, &runs[0]);
    }
}

#[test]
fn gaussian_run_completes() {
    let model = IncrementModel::from(ContinuousIncrement::new(Family::Gaussian, 2.0).unwrap());
    let e = mc_tail(&model, 1.0, 0.0, 50, &cfg(1, 10, 1000, 50)).unwrap();
    assert!(e.mean > 0.0 && e.mean < 1.0 && e.n_paths == 10_000);
}
