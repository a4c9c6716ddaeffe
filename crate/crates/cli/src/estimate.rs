use std::collections::BTreeMap;
use std::path::Path;

use bounds_estimator::{overhead_3d, overhead_4d, BoundsError, ScalingParams};
use pipeline::Architecture;
use serde::{Deserialize, Serialize};

use crate::io::{Failure, Outcome, OutputDir};

pub const CONSTANTS_HELP: &str = "object overriding c_c1, c_r, c_c2, c_prep, c_lambda, c_c1p, c_rp, c_cells; missing ones are 1";

pub const KEYS: &[(&str, &str)] = &[
    ("mode", "4d | 3d (default 4d)"),
    ("n", "problem size (default 64)"),
    ("k", "columns; defaults to n (4d) or n^3 (3d)"),
    ("r", "block-size constant in l = ceil(r ln^2 n) (default 1)"),
    ("constants", CONSTANTS_HELP),
    ("seed", "recorded only; estimates are deterministic (default 0)"),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default)]
    pub mode: Architecture,
    #[serde(default = "default_n")]
    pub n: f64,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_n() -> f64 {
    64.0
}
fn one() -> f64 {
    1.0
}

pub fn run(cfg: &EstimateConfig, out: &Path) -> Outcome<()> {
    let params = ScalingParams { n: cfg.n, k: cfg.k, r: cfg.r, constants: cfg.constants.clone() };
    let report = match cfg.mode {
        Architecture::FourD => overhead_4d(&params),
        Architecture::ThreeD => overhead_3d(&params),
    }
    .map_err(|e| match e {
        BoundsError::Formula(_) => Failure::runtime(e),
        _ => Failure::config(e),
    })?;
    let dir = OutputDir::create(out, "estimate", cfg, cfg.seed)?;
    dir.json("report.json", &serde_json::json!({ "report": report }))
}
