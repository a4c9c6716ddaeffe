use std::path::Path;

use msd::magic_state;
use num_complex::Complex64 as C;
use pauli_core::seed;
use routing::{
    plan_routes, simulate_branches, simulate_routing_statevector, verify_disjoint, verify_isolated, Basis, RoutingError, SourceState,
    STATEVECTOR_CAP,
};
use serde::{Deserialize, Serialize};

use crate::io::{Failure, Outcome, OutputDir};

pub const KEYS: &[(&str, &str)] = &[
    ("p", "source slots (required)"),
    ("m", "states to deliver (required)"),
    ("flags", "string of 0/1 per slot, 1 = distillation succeeded (default all 1)"),
    ("branches", "sampled outcome branches for the stabilizer check (default 64)"),
    ("sources", "source states cycled over the p slots: 0, 1, +, -, +i, -i (default all six)"),
    ("seed", "master seed (default 0)"),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteConfig {
    pub p: usize,
    pub m: usize,
    #[serde(default)]
    pub flags: Option<String>,
    #[serde(default = "default_branches")]
    pub branches: usize,
    #[serde(default = "default_sources")]
    pub sources: Vec<SourceState>,
    #[serde(default)]
    pub seed: u64,
}

fn default_branches() -> usize {
    64
}
fn default_sources() -> Vec<SourceState> {
    SourceState::ALL.to_vec()
}

#[derive(Serialize)]
struct Counts {
    x: usize,
    z: usize,
    o: usize,
}

#[derive(Serialize)]
struct Report {
    qubits: usize,
    disjoint: bool,
    isolated: bool,
    counts: Counts,
    branches: Option<usize>,
    matched: Option<usize>,
    /// Smallest fidelity when the first routed source carries a T state.
    statevector_min_fidelity: Option<f64>,
    notes: Vec<String>,
}

fn routing_failure(e: RoutingError) -> Failure {
    match e {
        RoutingError::Invalid(_) => Failure::runtime(e),
        _ => Failure::config(e),
    }
}

pub fn parse_flags(text: &str) -> Outcome<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Failure::Config(format!("flags must be a string of 0 and 1, found {c:?}"))),
        })
        .collect()
}

pub fn run(cfg: &RouteConfig, out: &Path) -> Outcome<()> {
    if cfg.sources.is_empty() {
        return Err(Failure::Config("sources must be non-empty".into()));
    }
    let flags = match &cfg.flags {
        Some(f) => parse_flags(f)?,
        None => vec![true; cfg.p],
    };
    let plan = plan_routes(cfg.p, cfg.m, &flags).map_err(routing_failure)?;
    let pattern = plan.measurement_pattern();
    let count = |b: Basis| pattern.iter().filter(|&&x| x == b).count();
    let inputs: Vec<SourceState> = (0..cfg.p).map(|i| cfg.sources[i % cfg.sources.len()]).collect();
    let mut notes = Vec::new();
    let (branches, matched) = if cfg.branches == 0 {
        (None, None)
    } else {
        match simulate_branches(&plan, &inputs, cfg.branches, seed::derive_named(cfg.seed, "branches")) {
            Ok(r) => (Some(r.branches), Some(r.matched)),
            Err(e @ RoutingError::Budget { .. }) => {
                notes.push(format!("stabilizer check skipped: {e}"));
                (None, None)
            }
            Err(e) => return Err(routing_failure(e)),
        }
    };
    let statevector_min_fidelity = if cfg.m > 0 && plan.grid.num_qubits() <= STATEVECTOR_CAP {
        let mut amps: Vec<[C; 2]> = inputs.iter().map(|s| s.amplitudes()).collect();
        amps[plan.paths[0].source] = magic_state(std::f64::consts::FRAC_PI_4);
        let r = simulate_routing_statevector(&plan, &amps, None, &mut seed::rng_from_seed(seed::derive_named(cfg.seed, "statevector")))
            .map_err(routing_failure)?;
        r.fidelities.iter().copied().reduce(f64::min)
    } else if cfg.m > 0 {
        notes.push(format!("statevector check skipped: {} qubits exceed {STATEVECTOR_CAP}", plan.grid.num_qubits()));
        None
    } else {
        None
    };
    let report = Report {
        qubits: plan.grid.num_qubits(),
        disjoint: verify_disjoint(&plan),
        isolated: verify_isolated(&plan),
        counts: Counts { x: count(Basis::X), z: count(Basis::Z), o: count(Basis::O) },
        branches,
        matched,
        statevector_min_fidelity,
        notes,
    };
    let dir = OutputDir::create(out, "route", cfg, cfg.seed)?;
    dir.text("plan.txt", |w| {
        w.extend_from_slice(plan.to_text().as_bytes());
        Ok(())
    })?;
    dir.json("plan.json", &serde_json::json!({ "plan": plan }))?;
    dir.json("report.json", &report)?;
    if matched.is_some() && matched != branches {
        return Err(Failure::Runtime(format!("{} of {} branches delivered the wrong state", branches.unwrap() - matched.unwrap(), branches.unwrap())));
    }
    Ok(())
}
