use std::path::Path;

use pauli_core::seed;
use serde::{Deserialize, Serialize};
use surface_code::{fit_pf_exponent, logical_error_rate_stratified, rate_sweep, write_sweep_csv, ExponentFit, SurfaceError};

use crate::io::{Failure, Outcome, OutputDir};

pub const KEYS: &[(&str, &str)] = &[
    ("distances", "odd code distances (default [3, 5, 7])"),
    ("rates", "readout flip rates (default [0.01])"),
    ("trials", "Monte Carlo trials per cell, at least 1 (default 100000)"),
    ("stratified_fit", "fit c from weight-stratified estimates instead of the sweep (default false)"),
    ("seed", "master seed (default 0)"),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeBenchConfig {
    #[serde(default = "default_distances")]
    pub distances: Vec<usize>,
    #[serde(default = "default_rates")]
    pub rates: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub stratified_fit: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_distances() -> Vec<usize> {
    vec![3, 5, 7]
}
fn default_rates() -> Vec<f64> {
    vec![0.01]
}
fn default_trials() -> u64 {
    100_000
}

#[derive(Serialize)]
struct RateFit {
    p: f64,
    points: Vec<(usize, f64)>,
    fit: Option<ExponentFit>,
    /// Why no fit was produced.
    note: Option<String>,
}

fn surface_failure(e: SurfaceError) -> Failure {
    match e {
        SurfaceError::Distance(_) | SurfaceError::Rate(_) | SurfaceError::Trials => Failure::config(e),
        _ => Failure::runtime(e),
    }
}

pub fn run(cfg: &DecodeBenchConfig, out: &Path) -> Outcome<()> {
    if cfg.distances.is_empty() || cfg.rates.is_empty() {
        return Err(Failure::Config("distances and rates must be non-empty".into()));
    }
    let rows = rate_sweep(&cfg.distances, &cfg.rates, cfg.trials, cfg.seed).map_err(surface_failure)?;
    let mut fits = Vec::new();
    for (j, &p) in cfg.rates.iter().enumerate() {
        let mut points = Vec::new();
        for &d in &cfg.distances {
            let p_l = if cfg.stratified_fit {
                let s = seed::derive_seed(seed::derive_named(cfg.seed, "stratified"), (d as u64) << 32 | j as u64);
                logical_error_rate_stratified(d, p, cfg.trials, s).map_err(surface_failure)?.estimate
            } else {
                rows.iter().find(|r| r.distance == d && r.p == p).map(|r| r.p_l).unwrap_or(0.0)
            };
            points.push((d, p_l));
        }
        let (fit, note) = match fit_pf_exponent(&points) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        fits.push(RateFit { p, points, fit, note });
    }
    let dir = OutputDir::create(out, "decode-bench", cfg, cfg.seed)?;
    dir.text("sweep.csv", |w| write_sweep_csv(&rows, w))?;
    dir.json("fit.json", &serde_json::json!({ "fits": fits }))
}
