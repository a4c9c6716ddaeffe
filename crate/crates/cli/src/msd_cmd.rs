use std::path::Path;

use msd::{
    exact_distillation, fit_loglog_slope, plan_zmsd, write_sweep_csv, y_state_requirements, Distiller, MsdError, MsdProtocolSpec, OracleOutcome,
    PlanConstants, StratifiedOptions, SweepRow,
};
use serde::{Deserialize, Serialize};

use crate::io::{Failure, Outcome, OutputDir};

fn msd_failure(e: MsdError) -> Failure {
    match e {
        MsdError::Unreachable { .. } => Failure::runtime(e),
        _ => Failure::config(e),
    }
}

pub const PLAN_KEYS: &[(&str, &str)] = &[
    ("eps", "input infidelity (default 0.01)"),
    ("target_eps_out", "required output infidelity (default 1e-9)"),
    ("d", "suppression order per layer (default 3)"),
    ("n", "problem size; n^2 successes are needed (default 64)"),
    ("constants", "object: c, gamma_q, k_depth, k_clifford, k_cz, k_width, k_success, fail_budget"),
    ("y_target", "output infidelity for the Y-state report; omitted when absent"),
    ("seed", "recorded only; planning is deterministic (default 0)"),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsdPlanConfig {
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_target")]
    pub target_eps_out: f64,
    #[serde(default = "default_d")]
    pub d: u32,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default)]
    pub constants: PlanConstants,
    #[serde(default)]
    pub y_target: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_eps() -> f64 {
    0.01
}
fn default_target() -> f64 {
    1e-9
}
fn default_d() -> u32 {
    3
}
fn default_n() -> u64 {
    64
}

pub fn run_plan(cfg: &MsdPlanConfig, out: &Path) -> Outcome<()> {
    let plan = plan_zmsd(cfg.eps, cfg.target_eps_out, cfg.d, cfg.n, &cfg.constants).map_err(msd_failure)?;
    let y = cfg.y_target.map(|t| y_state_requirements(cfg.n, t)).transpose().map_err(msd_failure)?;
    let dir = OutputDir::create(out, "msd-plan", cfg, cfg.seed)?;
    dir.json("plan.json", &serde_json::json!({ "plan": plan, "y_states": y }))
}

pub const SIM_KEYS: &[(&str, &str)] = &[
    ("protocol", "t15 | y7 | path to a protocol JSON (default t15)"),
    ("eps", "input infidelities (default [0.005, 0.01, 0.02, 0.04])"),
    ("method", "stratified | shots (default stratified)"),
    ("shots", "shots per eps for method shots (default 100000)"),
    ("stratified", "object: exhaustive_limit, per_stratum, max_weight"),
    ("cap", "largest circuit width in qubits (default 24)"),
    ("seed", "master seed (default 0)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Stratified,
    Shots,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsdSimConfig {
    #[serde(default = "default_protocol")]
    pub protocol: String,
    #[serde(default = "default_eps_list")]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub stratified: StratifiedOptions,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_protocol() -> String {
    "t15".into()
}
fn default_eps_list() -> Vec<f64> {
    vec![0.005, 0.01, 0.02, 0.04]
}
fn default_shots() -> u64 {
    100_000
}
fn default_cap() -> usize {
    24
}

#[derive(Serialize)]
struct OracleRow {
    eps: f64,
    oracle: OracleOutcome,
    /// |simulated − oracle| / oracle for the infidelity.
    relative_error: f64,
}

pub fn run_sim(cfg: &MsdSimConfig, out: &Path) -> Outcome<()> {
    if cfg.eps.is_empty() {
        return Err(Failure::Config("eps must list at least one value".into()));
    }
    if cfg.method == Method::Shots && cfg.shots == 0 {
        return Err(Failure::Config("shots must be at least 1".into()));
    }
    let protocol = match MsdProtocolSpec::builtin(&cfg.protocol) {
        Some(p) => p,
        None => MsdProtocolSpec::load(Path::new(&cfg.protocol)).map_err(Failure::config)?,
    };
    let mut distiller = Distiller::new(&protocol, cfg.cap).map_err(msd_failure)?;
    let mut rows = Vec::new();
    let mut strata = Vec::new();
    for (i, &eps) in cfg.eps.iter().enumerate() {
        let s = pauli_core::seed::derive_seed(cfg.seed, i as u64);
        match cfg.method {
            Method::Stratified => {
                let r = distiller.simulate_stratified(eps, &cfg.stratified, s).map_err(msd_failure)?;
                rows.push(SweepRow::from(&r));
                strata.push(r);
            }
            Method::Shots => rows.push(SweepRow::from(&distiller.simulate(eps, cfg.shots, s).map_err(msd_failure)?)),
        }
    }
    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.infidelity > 0.0).map(|r| (r.eps, r.infidelity)).collect();
    let slope = fit_loglog_slope(&points).ok();
    let oracle: Vec<OracleRow> = match &protocol.code {
        Some(code) => rows
            .iter()
            .map(|r| {
                let o = exact_distillation(code, r.eps);
                OracleRow { eps: r.eps, oracle: o, relative_error: (r.infidelity - o.infidelity).abs() / o.infidelity }
            })
            .collect(),
        None => Vec::new(),
    };
    let dir = OutputDir::create(out, "msd-sim", cfg, cfg.seed)?;
    dir.text("sweep.csv", |w| write_sweep_csv(&rows, w))?;
    dir.json("report.json", &serde_json::json!({ "protocol": protocol.name, "rows": rows, "slope": slope, "oracle": oracle, "strata": strata }))
}
