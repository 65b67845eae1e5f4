//! Seeded Monte Carlo for real starting points and continuous increments.
//!
//! Batch `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so
//! the output depends only on `(seed, batches, paths_per_batch)`. Batches are
//! run on a rayon pool and reduced in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::{Family, IncrementModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub seed: u64,
    pub batches: usize,
    pub paths_per_batch: usize,
    /// Step cap for stopping-time estimates.
    pub horizon: usize,
    /// Worker threads; `None` uses the global rayon pool. Never affects results.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batches < 2 {
            return Err(Error::InvalidConfig(format!(
                "batches = {} (need at least 2 for batch means)",
                self.batches
            )));
        }
        if self.paths_per_batch == 0 {
            return Err(Error::InvalidConfig("paths_per_batch must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n_paths(&self) -> u64 {
        self.batches as u64 * self.paths_per_batch as u64
    }

    fn run<T: Send>(&self, f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send) -> Result<Vec<T>> {
        self.validate()?;
        let job = || -> Vec<T> {
            (0..self.batches)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                    rng.set_stream(i as u64);
                    f(i, &mut rng)
                })
                .collect()
        };
        match self.workers {
            None => Ok(job()),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
                .map(|pool| pool.install(job)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub n_paths: u64,
}

const Z95: f64 = 1.959963984540054;

/// Estimate of an indicator mean from equal-size batches.
fn probability_estimate(hits: &[u64], per_batch: usize) -> McEstimate {
    let b = hits.len() as f64;
    let n_paths = hits.len() as u64 * per_batch as u64;
    let means: Vec<f64> = hits.iter().map(|&h| h as f64 / per_batch as f64).collect();
    let mean = hits.iter().sum::<u64>() as f64 / n_paths as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let stderr = (var / b).sqrt();
    let n = n_paths as f64;
    let ci95 = if (mean.min(1.0 - mean)) * n < 10.0 {
        wilson(mean, n)
    } else {
        ((mean - Z95 * stderr).max(0.0), (mean + Z95 * stderr).min(1.0))
    };
    McEstimate {
        mean,
        stderr,
        ci95,
        n_paths,
    }
}

fn wilson(p: f64, n: f64) -> (f64, f64) {
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

enum Sampler {
    Lattice { offsets: Vec<f64>, cdf: Vec<f64> },
    Gaussian(Normal<f64>),
    Laplace(f64),
    Uniform(Uniform<f64>),
}

impl Sampler {
    fn new(dist: &IncrementModel) -> Result<Self> {
        Ok(match dist {
            IncrementModel::Lattice(l) => Sampler::Lattice {
                offsets: l.offsets().iter().map(|&k| k as f64).collect(),
                cdf: l.cdf_table(),
            },
            IncrementModel::Continuous(c) => match c.family() {
                Family::Gaussian => Sampler::Gaussian(
                    Normal::new(0.0, c.scale()).map_err(|e| Error::InvalidDistribution(e.to_string()))?,
                ),
                Family::Laplace => Sampler::Laplace(c.scale()),
                Family::UniformSymmetric => Sampler::Uniform(
                    Uniform::new_inclusive(-c.scale(), c.scale())
                        .map_err(|e| Error::InvalidDistribution(e.to_string()))?,
                ),
            },
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Lattice { offsets, cdf } => {
                let u: f64 = rng.random();
                let i = cdf.partition_point(|&c| c <= u).min(offsets.len() - 1);
                offsets[i]
            }
            Sampler::Gaussian(n) => n.sample(rng),
            Sampler::Laplace(b) => {
                let u: f64 = rng.random::<f64>() - 0.5;
                -b * u.signum() * (-2.0 * u.abs()).ln_1p()
            }
            Sampler::Uniform(u) => u.sample(rng),
        }
    }
}

/// One path: `Ok(position)` if alive after `n` steps, else `Err((tau, overshoot))`.
fn run_path(sampler: &Sampler, x: f64, n: usize, rng: &mut ChaCha8Rng) -> std::result::Result<f64, (usize, f64)> {
    let mut pos = x;
    for k in 1..=n {
        pos += sampler.sample(rng);
        if pos <= 0.0 {
            return Err((k, 0.0 - pos));
        }
    }
    Ok(pos)
}

fn check_start(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("start x = {x} must be finite and >= 0")))
    }
}

/// Estimate of `P(x + S_n >= y, tau_x > n)`.
pub fn mc_tail(dist: &IncrementModel, x: f64, y: f64, n: usize, cfg: &McConfig) -> Result<McEstimate> {
    check_start(x)?;
    let sampler = Sampler::new(dist)?;
    let hits = cfg.run(|_, rng| {
        (0..cfg.paths_per_batch)
            .filter(|_| matches!(run_path(&sampler, x, n, rng), Ok(p) if p >= y))
            .count() as u64
    })?;
    Ok(probability_estimate(&hits, cfg.paths_per_batch))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingEstimate {
    /// `E|x + S_{tau_x}|` over paths stopped within the horizon.
    pub overshoot: McEstimate,
    /// `P(tau_x > horizon)`.
    pub survival: McEstimate,
    /// Fraction of paths still alive at the horizon, excluded from `overshoot`.
    pub truncated_fraction: f64,
}

#[derive(Clone, Copy, Default)]
struct StopBatch {
    stopped: u64,
    overshoot_sum: f64,
}

/// Overshoot mean and survival past `horizon`.
pub fn mc_stopping(dist: &IncrementModel, x: f64, horizon: usize, cfg: &McConfig) -> Result<StoppingEstimate> {
    check_start(x)?;
    let sampler = Sampler::new(dist)?;
    let per = cfg.paths_per_batch;
    let batches = cfg.run(|_, rng| {
        let mut acc = StopBatch::default();
        for _ in 0..per {
            if let Err((_, depth)) = run_path(&sampler, x, horizon, rng) {
                acc.stopped += 1;
                acc.overshoot_sum += depth;
            }
        }
        acc
    })?;

    let alive: Vec<u64> = batches.iter().map(|b| per as u64 - b.stopped).collect();
    let survival = probability_estimate(&alive, per);

    let total_stopped: u64 = batches.iter().map(|b| b.stopped).sum();
    let total_sum: f64 = batches.iter().map(|b| b.overshoot_sum).sum();
    let nb = batches.len() as f64;
    let overshoot = if total_stopped == 0 {
        McEstimate {
            mean: f64::NAN,
            stderr: f64::NAN,
            ci95: (f64::NAN, f64::NAN),
            n_paths: 0,
        }
    } else {
        let ratio = total_sum / total_stopped as f64;
        let mean_count = total_stopped as f64 / nb;
        let ss: f64 = batches
            .iter()
            .map(|b| ((b.overshoot_sum - ratio * b.stopped as f64) / mean_count).powi(2))
            .sum();
        let stderr = (ss / (nb * (nb - 1.0))).sqrt();
        McEstimate {
            mean: ratio,
            stderr,
            ci95: (ratio - Z95 * stderr, ratio + Z95 * stderr),
            n_paths: total_stopped,
        }
    };
    Ok(StoppingEstimate {
        overshoot,
        survival,
        truncated_fraction: survival.mean,
    })
}
