use std::path::Path;

use graph_sampler::{
    anticoncentration_stats, build_brickwork_graph_with, exact_distribution_with_cap, l1_distance, sample_batch, sampling_envelope,
    substitute_gbprime, uniform_s_deviation, BrickworkOptions, GadgetSpec, GraphError, OutcomeDistribution, Sampler,
};
use pauli_core::seed;
use pipeline::GadgetChoice;
use serde::{Deserialize, Serialize};

use crate::io::{Failure, Outcome, OutputDir};

pub const KEYS: &[(&str, &str)] = &[
    ("n", "wires (required)"),
    ("k", "columns, at least 2 (required)"),
    ("gadget", "gb | gb_prime (default gb)"),
    ("gadget_file", "path to a gadget JSON; default tile when absent"),
    ("alpha", "anti-concentration threshold factor (default 1)"),
    ("shots", "samples to draw; 0 writes the exact table only (default 100000)"),
    ("link_length", "interior vertices per wrap-around link (default 12)"),
    ("cap", "largest statevector, in qubits (default 24)"),
    ("envelope_z", "standard deviations in the sampling envelope (default 5)"),
    ("seed", "master seed (default 0)"),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub gadget: GadgetChoice,
    #[serde(default)]
    pub gadget_file: Option<String>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_link")]
    pub link_length: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default = "default_z")]
    pub envelope_z: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}
fn default_shots() -> u64 {
    100_000
}
fn default_link() -> usize {
    BrickworkOptions::default().link_length
}
fn default_cap() -> usize {
    graph_sampler::DEFAULT_QUBIT_CAP
}
fn default_z() -> f64 {
    5.0
}

#[derive(Serialize)]
struct Stats {
    num_vertices: usize,
    num_s: usize,
    num_x: usize,
    peak_width: usize,
    total: Option<f64>,
    uniform_s_deviation: Option<f64>,
    alpha: f64,
    beta: Option<f64>,
    shots: u64,
    l1_empirical: Option<f64>,
    envelope: Option<f64>,
}

fn graph_failure(e: GraphError) -> Failure {
    match e {
        GraphError::Mismatch(_) => Failure::runtime(e),
        _ => Failure::config(e),
    }
}

pub fn run(cfg: &SampleConfig, out: &Path) -> Outcome<()> {
    if !(cfg.alpha > 0.0) || !(cfg.envelope_z >= 0.0) {
        return Err(Failure::Config("alpha must be positive and envelope_z non-negative".into()));
    }
    let gadget = match &cfg.gadget_file {
        Some(p) => GadgetSpec::load(Path::new(p)).map_err(graph_failure)?,
        None => GadgetSpec::default_gb(),
    };
    let mut spec = build_brickwork_graph_with(cfg.n, cfg.k, &gadget, BrickworkOptions { link_length: cfg.link_length }).map_err(graph_failure)?;
    if cfg.gadget == GadgetChoice::GbPrime {
        spec = substitute_gbprime(&spec).map_err(graph_failure)?;
    }
    let sampler = Sampler::with_cap(&spec, cfg.cap).map_err(graph_failure)?;
    let num_s = spec.measured_vertices().len();
    let num_x = spec.num_vertices() - num_s;
    let exact = if spec.num_vertices() <= cfg.cap { Some(exact_distribution_with_cap(&spec, cfg.cap).map_err(graph_failure)?) } else { None };
    let samples = sample_batch(&sampler, cfg.shots as usize, seed::derive_named(cfg.seed, "sample"));
    let empirical = if cfg.shots > 0 { Some(OutcomeDistribution::empirical(num_s, num_x, &samples).map_err(graph_failure)?) } else { None };
    let l1_empirical = match (&exact, &empirical) {
        (Some(a), Some(b)) => Some(l1_distance(b, a).map_err(graph_failure)?),
        _ => None,
    };
    let stats = Stats {
        num_vertices: spec.num_vertices(),
        num_s,
        num_x,
        peak_width: sampler.peak_width(),
        total: exact.as_ref().map(|d| d.total()),
        uniform_s_deviation: exact.as_ref().map(uniform_s_deviation),
        alpha: cfg.alpha,
        beta: exact.as_ref().map(|d| anticoncentration_stats(d, cfg.alpha)),
        shots: cfg.shots,
        l1_empirical,
        envelope: exact.as_ref().filter(|_| cfg.shots > 0).map(|d| sampling_envelope(d, cfg.shots as usize, cfg.envelope_z)),
    };
    let dir = OutputDir::create(out, "sample", cfg, cfg.seed)?;
    if let Some(d) = &exact {
        dir.text("distribution.csv", |w| d.write_csv(w))?;
    }
    if let Some(d) = &empirical {
        dir.text("empirical.csv", |w| d.write_csv(w))?;
        dir.text("samples.csv", |w| {
            use std::io::Write;
            writeln!(w, "shot,s,x")?;
            let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
            for (i, s) in samples.iter().enumerate() {
                writeln!(w, "{i},{},{}", bits(&s.s), bits(&s.x))?;
            }
            Ok(())
        })?;
    }
    dir.json("stats.json", &stats)
}
