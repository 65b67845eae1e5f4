use std::path::PathBuf;

use clap::Args;
use fpwalk::approx::{ales_envelope, corrected_tail, improved_envelope, thm1_envelope};
use fpwalk::exact::ladder::DEFAULT_STEP_CAP;
use fpwalk::exact::{
    ladder_stats, overshoot_scan, stopping_profile, survival_evolve, survival_prob, tail_prob,
};
use fpwalk::montecarlo::{mc_stopping, mc_tail, McConfig, McEstimate};
use fpwalk::output::{Cell, CsvTable};
use fpwalk::verify::{
    default_walks, rayleigh_error, sup_y_thm1, survival_ratio_error, verify_walk, GridConfig,
    WalkData,
};
use fpwalk::{IncrementModel, LatticeIncrement, Result};
use serde_json::{json, Value};

use crate::io::{comment, config_hash, load_dist, read_text, Sink};

pub enum Status {
    Ok,
    Violation,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Lattice distribution JSON file
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub x: u64,
    #[arg(long)]
    pub n: u64,
    /// Residual tolerance for the ladder DP fallback
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long)]
    pub n: u64,
    /// Comma-separated levels; defaults to 0, 1, sigma sqrt n, 2 sigma sqrt n
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<f64>,
    /// E|x + S_tau|; computed exactly for lattice laws, simulated otherwise
    #[arg(long)]
    pub overshoot: Option<f64>,
    /// Seed for the simulated overshoot
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub batches: usize,
    #[arg(long, default_value_t = 10_000)]
    pub paths_per_batch: usize,
    /// Step cap for the stopping-time estimates
    #[arg(long, default_value_t = 10_000)]
    pub horizon: usize,
    /// Worker threads (results do not depend on it)
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Grid JSON; every key is optional
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Lattice distribution JSON; defaults to the three built-in walks
    #[arg(long)]
    pub dist: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub dist: PathBuf,
    /// Comma-separated starting points for the overshoot scan
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<u64>,
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_grid(path: Option<&PathBuf>) -> Result<GridConfig> {
    let grid = match path {
        Some(p) => serde_json::from_str(&read_text(p)?)?,
        None => GridConfig::default(),
    };
    grid.validate()?;
    Ok(grid)
}

fn opt(v: Option<f64>) -> Cell {
    v.map(Cell::Float).unwrap_or_else(|| Cell::Text(String::new()))
}

fn integer_start(x: f64) -> Option<u64> {
    (x >= 0.0 && x.fract() == 0.0 && x < 9e15).then_some(x as u64)
}

pub fn exact(a: &ExactArgs) -> Result<Status> {
    let d = load_dist(&a.dist)?;
    let dist = d.lattice()?;
    let cfg = json!({"command": "exact", "dist": d.json, "x": a.x, "n": a.n, "tol": a.tol});
    let c = comment("exact", &cfg);
    let sink = Sink::new(a.out.clone())?;

    let table = survival_evolve(dist, a.x, a.n)?;
    let prof = stopping_profile(dist, a.x, a.n)?;
    let mut p = CsvTable::new(&c, &["k", "p_tau_eq_k", "m1_k", "m2_k", "survival"]);
    for k in 0..=a.n as usize {
        let (pk, m1, m2) = match k {
            0 => (0.0, 0.0, 0.0),
            _ => (prof.pk[k - 1], prof.m1k[k - 1], prof.m2k[k - 1]),
        };
        p.push(vec![Cell::Int(k as i64), pk.into(), m1.into(), m2.into(), table.live(k).into()]);
    }
    sink.primary("profile.csv", &p)?;

    let mut s = CsvTable::new(&c, &["k", "w", "mass"]);
    for (k, w, m) in table.nonzero_cells() {
        s.push(vec![Cell::Int(k as i64), Cell::Int(w as i64), m.into()]);
    }
    sink.secondary("survival.csv", &s)?;

    let l = ladder_stats(dist, a.x, 1024, a.tol, DEFAULT_STEP_CAP)?;
    let mut t = CsvTable::new(
        &c,
        &["x", "abs_stau", "overshoot1", "overshoot2", "residual", "horizon", "flagged"],
    );
    t.push(vec![
        Cell::Int(l.x as i64),
        l.abs_stau.into(),
        l.overshoot1.into(),
        l.overshoot2.into(),
        l.residual.into(),
        Cell::Int(l.horizon as i64),
        Cell::Text(l.flagged.to_string()),
    ]);
    sink.secondary("ladder.csv", &t)?;
    Ok(Status::Ok)
}

fn overshoot_mean(model: &IncrementModel, x: f64, seed: u64) -> Result<f64> {
    if let (Some(dist), Some(xi)) = (model.as_lattice(), integer_start(x)) {
        return Ok(ladder_stats(dist, xi, 1024, 1e-10, DEFAULT_STEP_CAP)?.overshoot1);
    }
    let cfg = McConfig {
        seed,
        batches: 100,
        paths_per_batch: 1000,
        horizon: 10_000,
        workers: None,
    };
    Ok(mc_stopping(model, x, cfg.horizon, &cfg)?.overshoot.mean)
}

/// `R` of the refined bound for the walk scaled to unit variance.
fn refinement_r(model: &IncrementModel, sigma: f64) -> Result<Option<f64>> {
    Ok(match model {
        IncrementModel::Lattice(l) if l.span() == 1 => Some(1.0 / l.peakedness()?.v),
        IncrementModel::Lattice(_) => None,
        IncrementModel::Continuous(c) => Some((sigma * c.density_sup()).powi(2)),
    })
}

pub fn approx(a: &ApproxArgs) -> Result<Status> {
    let d = load_dist(&a.dist)?;
    let m = d.model.moments();
    let sigma = m.sigma();
    let nf = a.n as f64;
    let ys = if a.y.is_empty() {
        let s = sigma * nf.sqrt();
        vec![0.0, 1.0, s.floor(), (2.0 * s).floor()]
    } else {
        a.y.clone()
    };
    let over = match a.overshoot {
        Some(v) => v,
        None => overshoot_mean(&d.model, a.x, a.seed)?,
    };
    let cfg = json!({
        "command": "approx", "dist": d.json, "x": a.x, "n": a.n, "y": ys,
        "overshoot": a.overshoot, "seed": a.seed,
    });
    let mut c = comment("approx", &cfg);
    c.push_str(&format!("\novershoot_mean={}", fpwalk::output::format_f64(over)));

    let b3 = m.lyapunov;
    let es = (a.x + over) / sigma;
    let xn = a.x / sigma;
    let thm1 = thm1_envelope(b3, 1.0, es, xn, nf)?.scaled_value;
    let ales = ales_envelope(b3, nf)?.scaled_value;
    let improved = match refinement_r(&d.model, sigma)? {
        Some(r) => Some(improved_envelope(b3, 1.0, es, xn, nf, r)?.scaled_value),
        None => None,
    };
    let mut t = CsvTable::new(
        c,
        &["y", "reflection", "correction", "total", "rayleigh", "thm1_env", "ales_env", "improved_env"],
    );
    for y in ys {
        let r = corrected_tail(a.x, y, nf, sigma, over)?;
        t.push(vec![
            y.into(),
            r.reflection.into(),
            r.correction.into(),
            r.total.into(),
            r.rayleigh.into(),
            thm1.into(),
            ales.into(),
            opt(improved),
        ]);
    }
    Sink::new(a.out.clone())?.primary("approx.csv", &t)?;
    Ok(Status::Ok)
}

fn mc_row(name: &str, e: &McEstimate, truncated: Option<f64>, exact: Option<f64>) -> Vec<Cell> {
    vec![
        Cell::Text(name.into()),
        e.mean.into(),
        e.stderr.into(),
        e.ci95.0.into(),
        e.ci95.1.into(),
        Cell::Int(e.n_paths as i64),
        opt(truncated),
        opt(exact),
    ]
}

pub fn mc(a: &McArgs) -> Result<Status> {
    let d = load_dist(&a.dist)?;
    let cfg = McConfig {
        seed: a.seed,
        batches: a.batches,
        paths_per_batch: a.paths_per_batch,
        horizon: a.horizon,
        workers: a.workers,
    };
    cfg.validate()?;
    let hashed = json!({
        "command": "mc", "dist": d.json, "x": a.x, "y": a.y, "n": a.n, "seed": a.seed,
        "batches": a.batches, "paths_per_batch": a.paths_per_batch, "horizon": a.horizon,
    });
    let c = format!(
        "{}\nseed={} batches={} paths_per_batch={} horizon={}",
        comment("mc", &hashed),
        a.seed,
        a.batches,
        a.paths_per_batch,
        a.horizon
    );
    let tail = mc_tail(&d.model, a.x, a.y, a.n, &cfg)?;
    let stop = mc_stopping(&d.model, a.x, a.horizon, &cfg)?;

    let lattice_start = d.model.as_lattice().zip(integer_start(a.x));
    let (ex_tail, ex_over, ex_surv) = match lattice_start {
        Some((dist, x)) => (
            Some(tail_prob(dist, x, a.y, a.n as u64)?),
            Some(ladder_stats(dist, x, 1024, 1e-10, DEFAULT_STEP_CAP)?.overshoot1),
            survival_prob(dist, x, a.horizon as u64).ok(),
        ),
        None => (None, None, None),
    };
    let mut t = CsvTable::new(
        c,
        &["quantity", "mean", "stderr", "lo", "hi", "n_paths", "truncated_fraction", "exact"],
    );
    t.push(mc_row("tail", &tail, None, ex_tail));
    t.push(mc_row("overshoot_mean", &stop.overshoot, Some(stop.truncated_fraction), ex_over));
    t.push(mc_row("survival_at_horizon", &stop.survival, Some(stop.truncated_fraction), ex_surv));
    Sink::new(a.out.clone())?.primary("mc.csv", &t)?;
    Ok(Status::Ok)
}

fn walks(dist: Option<&PathBuf>) -> Result<(Vec<(String, LatticeIncrement)>, Value)> {
    match dist {
        Some(p) => {
            let d = load_dist(p)?;
            let l = d.lattice()?.clone();
            Ok((vec![(d.name.clone(), l)], d.json))
        }
        None => Ok((default_walks(), Value::String("default".into()))),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Status> {
    let grid = load_grid(a.grid.as_ref())?;
    let (walks, dist_json) = walks(a.dist.as_ref())?;
    let cfg = json!({"command": "verify", "dist": dist_json, "grid": grid});
    let c = comment("verify", &cfg);
    let sink = Sink::new(a.out.clone())?;

    let mut summaries = Vec::new();
    let mut all_hold = true;
    for (name, dist) in &walks {
        let rep = verify_walk(name, dist, &grid)?;
        all_hold &= rep.explicit_hold();
        let mut t = CsvTable::new(&c, &["bound_id", "point", "lhs", "rhs_scaled", "ratio"]);
        for b in &rep.reports {
            for r in &b.rows {
                t.push(vec![
                    Cell::Text(b.bound_id.clone()),
                    Cell::Text(r.point.clone()),
                    r.lhs.into(),
                    r.rhs_scaled.into(),
                    r.ratio.into(),
                ]);
            }
        }
        sink.secondary(&format!("{name}_bounds.csv"), &t)?;
        let mut rt = CsvTable::new(&c, &["rate_id", "n", "value"]);
        for r in &rep.rates {
            for &(n, v) in &r.fit.points {
                rt.push(vec![Cell::Text(r.rate_id.clone()), Cell::Int(n as i64), v.into()]);
            }
        }
        sink.secondary(&format!("{name}_rates.csv"), &rt)?;

        let explicit_hold = rep.explicit_hold();
        let mut v = serde_json::to_value(&rep)?;
        if let Some(reports) = v.get_mut("reports").and_then(Value::as_array_mut) {
            for r in reports {
                if let Some(o) = r.as_object_mut() {
                    o.remove("rows");
                }
            }
        }
        v["explicit_hold"] = Value::Bool(explicit_hold);
        summaries.push(v);
    }
    let summary = json!({
        "version": fpwalk::VERSION,
        "config_sha256": config_hash(&cfg),
        "grid": grid,
        "all_explicit_hold": all_hold,
        "walks": summaries,
    });
    sink.json("summary.json", &summary)?;
    Ok(if all_hold { Status::Ok } else { Status::Violation })
}

pub fn scan(a: &ScanArgs) -> Result<Status> {
    let d = load_dist(&a.dist)?;
    let dist = d.lattice()?;
    let grid = load_grid(a.grid.as_ref())?;
    let xs: Vec<u64> = if a.x.is_empty() { (0..=20).collect() } else { a.x.clone() };
    let cfg = json!({"command": "scan", "dist": d.json, "x": xs, "grid": grid});
    let c = comment("scan", &cfg);
    let sink = Sink::new(a.out.clone())?;

    let s = overshoot_scan(dist, &xs)?;
    let mut head = c.clone();
    if let Some(l) = s.limit {
        head.push_str(&format!("\nlimit={}", fpwalk::output::format_f64(l)));
    }
    let mut t = CsvTable::new(head, &["x", "overshoot_mean", "abs_stau"]);
    for &(x, m) in &s.points {
        t.push(vec![Cell::Int(x as i64), m.into(), (x as f64 + m).into()]);
    }
    sink.primary("overshoot_scan.csv", &t)?;

    let mut g = grid.clone();
    g.x = g.x.into_iter().chain(xs.iter().copied()).collect();
    let data = WalkData::build(&d.name, dist, &g)?;
    let mut r = CsvTable::new(
        &c,
        &["n", "x", "thm1_error", "reflection_error", "survival_ratio_error", "rayleigh_error"],
    );
    for n in g.n_sorted() {
        for x in g.starts_for(n) {
            let sup = sup_y_thm1(&data, x, n)?;
            r.push(vec![
                Cell::Int(n as i64),
                Cell::Int(x as i64),
                sup.corrected.into(),
                sup.reflection.into(),
                survival_ratio_error(&data, x, n).into(),
                rayleigh_error(&data, x, n).into(),
            ]);
        }
    }
    sink.secondary("rates.csv", &r)?;
    Ok(Status::Ok)
}

impl From<Status> for std::process::ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => 0.into(),
            Status::Violation => 1.into(),
        }
    }
}

