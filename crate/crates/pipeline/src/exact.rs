use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use graph_sampler::{l1_distance, sampling_envelope, GraphSpec, OutcomeDistribution, Sample};
use msd::{corrupt, magic_state, Distiller, MsdProtocolSpec};
use pauli_core::seed::{self, TrialRng};
use rand::Rng;
use rayon::prelude::*;
use routing::{plan_routes, simulate_routing, simulate_routing_statevector, RoutingGrid, SourceState};
use serde::Serialize;
use surface_code::{Decoder, StabilizerKind, SurfaceCodePatch};

use crate::audit::interaction_audit;
use crate::graph::{assembled_distribution, compose, draw_index, ideal_states, load_gadget, magic_vertices, pipeline_graph};
use crate::{Architecture, DecodeMeta, FeedbackEvent, Mode, MsdTally, PipelineConfig, PipelineError, Result, RoutingMeta, RunRecord};

/// Qubit budget of the distillation circuits.
const MSD_CAP: usize = 24;

#[derive(Clone)]
struct Stage {
    name: &'static str,
    protocol: String,
    distiller: Distiller,
    angle: f64,
    eps: f64,
    copies: usize,
    needed: usize,
}

/// Per-thread state; caches only memoise, so results do not depend on how
/// shots are split across threads.
#[derive(Clone)]
struct Worker<'a> {
    cfg: &'a PipelineConfig,
    spec: &'a GraphSpec,
    t_vertices: Vec<usize>,
    y_stage: Option<Stage>,
    t_stage: Option<Stage>,
    decoder: Option<Decoder>,
    branches: HashMap<Vec<u8>, Vec<f64>>,
}

fn stream(cfg: &PipelineConfig, label: &str, shot: u64) -> TrialRng {
    seed::trial_rng(seed::derive_named(cfg.seed, label), shot)
}

/// Raw input corruption: with probability `eps`, a uniformly random Pauli.
fn raw_code(eps: f64, rng: &mut TrialRng) -> u8 {
    if rng.gen::<f64>() < eps {
        rng.gen_range(1..=3u8)
    } else {
        0
    }
}

fn routing_qubits(copies: usize, needed: usize) -> usize {
    RoutingGrid::new(copies, needed).num_qubits()
}

impl<'a> Worker<'a> {
    fn new(cfg: &'a PipelineConfig, spec: &'a GraphSpec) -> Result<Self> {
        let t_vertices = magic_vertices(spec);
        let needed = t_vertices.len();
        let make = |name, protocol: MsdProtocolSpec, angle, eps, copies: Option<usize>| -> Result<Stage> {
            let copies = copies.unwrap_or(needed + 1);
            if copies < needed {
                return Err(PipelineError::Config(format!("{name}: {copies} copies cannot supply {needed} states")));
            }
            Ok(Stage { name, protocol: protocol.name.clone(), distiller: Distiller::new(&protocol, MSD_CAP)?, angle, eps, copies, needed })
        };
        let active = cfg.distill && needed > 0;
        let t_stage = if active { Some(make("t", MsdProtocolSpec::t15(), FRAC_PI_4, cfg.eps_t, cfg.t_copies)?) } else { None };
        let y_stage = if active && cfg.architecture == Architecture::ThreeD {
            Some(make("y", MsdProtocolSpec::y7(), FRAC_PI_2, cfg.eps_y, cfg.y_copies)?)
        } else {
            None
        };
        let decoder = if cfg.distance > 1 { Some(Decoder::new(&SurfaceCodePatch::new(cfg.distance)?)) } else { None };
        Ok(Worker { cfg, spec, t_vertices, y_stage, t_stage, decoder, branches: HashMap::new() })
    }

    /// Distils, then (feedback) plans and routes. Returns the error code of
    /// every delivered state in target order.
    fn distil_and_route(&mut self, which: usize, shot: u64, rec: &mut RunRecord) -> Result<Vec<u8>> {
        let stage = if which == 0 { self.y_stage.as_mut() } else { self.t_stage.as_mut() }.expect("stage present");
        let mut rng = stream(self.cfg, &format!("{}_msd", stage.name), shot);
        let mut outputs = Vec::with_capacity(stage.copies);
        for _ in 0..stage.copies {
            outputs.push(stage.distiller.run_shot(stage.eps, &mut rng)?);
        }
        let flags: Vec<bool> = outputs.iter().map(|o| o.accepted).collect();
        let successes = flags.iter().filter(|&&f| f).count();
        rec.msd.push(MsdTally { stage: stage.name.into(), protocol: stage.protocol.clone(), copies: stage.copies, needed: stage.needed, successes });
        if successes < stage.needed {
            return Err(PipelineError::InsufficientSuccesses { stage: stage.name.into(), needed: stage.needed, found: successes });
        }
        // The single classical interaction of this stage: syndromes pick the pattern.
        rec.feedback.push(FeedbackEvent { after: format!("{} distillation", stage.name), selects: format!("{} routing pattern", stage.name) });
        let plan = plan_routes(stage.copies, stage.needed, &flags)?;
        // A distilled output of infidelity f is twirled to the magic state with
        // probability 1 - f and the orthogonal Z|m> otherwise.
        let codes: Vec<u8> = outputs.iter().map(|o| if o.accepted && rng.gen::<f64>() < o.output_infidelity { 3 } else { 0 }).collect();
        let mut route_rng = stream(self.cfg, &format!("{}_route", stage.name), shot);
        let min_fidelity = if plan.grid.num_qubits() <= self.cfg.cap {
            let inputs: Vec<_> = codes.iter().map(|&c| corrupt(magic_state(stage.angle), c as u64)).collect();
            let sv = simulate_routing_statevector(&plan, &inputs, None, &mut route_rng)?;
            sv.fidelities.iter().copied().fold(1.0, f64::min)
        } else {
            // Too wide for a statevector: route stabilizer stand-ins on the
            // tableau; the corrected outputs must reproduce them exactly.
            let inputs: Vec<SourceState> = (0..stage.copies).map(|i| SourceState::ALL[(shot as usize + i) % SourceState::ALL.len()]).collect();
            if simulate_routing(&plan, &inputs, &mut route_rng)?.matches {
                1.0
            } else {
                0.0
            }
        };
        if min_fidelity < 1.0 - 1e-9 {
            return Err(PipelineError::RoutingFidelity(min_fidelity));
        }
        let flag_text: String = flags.iter().map(|&f| if f { '1' } else { '0' }).collect();
        rec.routing.push(RoutingMeta { plan_id: format!("{}:{}:{}:{flag_text}", stage.name, stage.copies, stage.needed), min_fidelity });
        Ok(plan.paths.iter().map(|p| codes[p.source]).collect())
    }

    fn run(&mut self, shot: u64) -> Result<RunRecord> {
        let start = Instant::now();
        let cfg = self.cfg;
        let nt = self.t_vertices.len();
        let mut rec = RunRecord {
            shot,
            architecture: cfg.architecture,
            s: Vec::new(),
            x: Vec::new(),
            raw_s: Vec::new(),
            raw_x: Vec::new(),
            decode: DecodeMeta { distance: cfg.distance, defects: 0, corrections: 0 },
            msd: Vec::new(),
            routing: Vec::new(),
            feedback: Vec::new(),
            elapsed_us: 0,
        };
        // Each T injection is corrected with a Y state in 3D; an orthogonal Y
        // leaves Z on that vertex.
        let y_err: Vec<u8> = if cfg.architecture == Architecture::ThreeD {
            if self.y_stage.is_some() {
                self.distil_and_route(0, shot, &mut rec)?
            } else {
                let mut rng = stream(cfg, "y_raw", shot);
                // X and Z corruptions map |Y> to Z|Y>; Y leaves it alone.
                (0..nt).map(|_| match raw_code(cfg.eps_y, &mut rng) { 1 | 3 => 3, _ => 0 }).collect()
            }
        } else {
            vec![0; nt]
        };
        let t_err: Vec<u8> = if self.t_stage.is_some() {
            self.distil_and_route(1, shot, &mut rec)?
        } else {
            let mut rng = stream(cfg, "t_raw", shot);
            (0..nt).map(|_| raw_code(cfg.eps_t, &mut rng)).collect()
        };
        let key: Vec<u8> = t_err.iter().zip(&y_err).map(|(&a, &b)| compose(a, b)).collect();
        let probs = match self.branches.get(&key) {
            Some(p) => p,
            None => {
                let mut states = ideal_states(self.spec);
                for (&v, &c) in self.t_vertices.iter().zip(&key) {
                    states[v] = corrupt(states[v], c as u64);
                }
                let d = assembled_distribution(self.spec, &states, cfg.cap)?;
                self.branches.entry(key).or_insert_with(|| d.probabilities().to_vec())
            }
        };
        let idx = draw_index(probs, stream(cfg, "graph", shot).gen());
        let num_s = self.spec.measured_vertices().len();
        let mut readout = stream(cfg, "readout", shot);
        for j in 0..self.spec.num_vertices() {
            let truth = (idx >> j) & 1 == 1;
            let (decoded, raw) = self.read_logical(truth, &mut readout, &mut rec.decode)?;
            if j < num_s {
                rec.s.push(decoded);
                rec.raw_s.push(raw);
            } else {
                rec.x.push(decoded);
                rec.raw_x.push(raw);
            }
        }
        rec.elapsed_us = start.elapsed().as_micros() as u64;
        Ok(rec)
    }

    /// Transversal Z readout of one logical bit: returns (decoded, raw Z̄ parity).
    fn read_logical(&self, truth: bool, rng: &mut TrialRng, meta: &mut DecodeMeta) -> Result<(bool, bool)> {
        let p = self.cfg.readout_flip();
        let Some(decoder) = &self.decoder else {
            let b = truth ^ (rng.gen::<f64>() < p);
            return Ok((b, b));
        };
        let patch = decoder.patch();
        let mut bits = vec![false; patch.num_qubits()];
        for s in patch.stabilizers_of(StabilizerKind::X) {
            if rng.gen::<bool>() {
                for &q in &s.support {
                    bits[q] ^= true;
                }
            }
        }
        if truth {
            for &q in patch.logical_x_support() {
                bits[q] ^= true;
            }
        }
        for b in bits.iter_mut() {
            *b ^= rng.gen::<f64>() < p;
        }
        let raw = patch.logical_z_support().iter().fold(false, |a, &q| a ^ bits[q]);
        let result = decoder.decode(&bits)?;
        meta.defects += result.defects.len();
        meta.corrections += (result.logical != raw) as usize;
        Ok((result.logical, raw))
    }
}

fn check_mode(cfg: &PipelineConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.mode != Mode::ExactSmall {
        return Err(PipelineError::Config("run_exact_small needs mode exact_small".into()));
    }
    Ok(())
}

fn build(cfg: &PipelineConfig) -> Result<GraphSpec> {
    let spec = pipeline_graph(cfg.n, cfg.k, &load_gadget(cfg)?, cfg.gadget)?;
    if spec.num_vertices() > cfg.cap {
        return Err(PipelineError::Cap { what: "graph pattern".into(), qubits: spec.num_vertices(), cap: cfg.cap });
    }
    Ok(spec)
}

/// One end-to-end run (shot 0 of the configured seed).
pub fn run_exact_small(cfg: &PipelineConfig) -> Result<RunRecord> {
    check_mode(cfg)?;
    let spec = build(cfg)?;
    Worker::new(cfg, &spec)?.run(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactSmallReport {
    pub config: PipelineConfig,
    pub seed: u64,
    pub shots: u64,
    pub completed: u64,
    /// Runs stopped for lack of distillation successes.
    pub aborted: u64,
    pub num_logical: usize,
    pub num_t: usize,
    /// Routing statevector width per stage, for the record.
    pub routing_qubits: Vec<usize>,
    /// l1 of the decoded outcomes of completed runs to the ideal distribution.
    pub l1_decoded: f64,
    /// Same for the undecoded readout.
    pub l1_raw: f64,
    /// Aborts counted as a separate outcome: `Σ|(1-a) P̂ - D| + a`.
    pub l1_unconditional: f64,
    /// Sampling envelope of the ideal distribution at the completed count.
    pub envelope: f64,
    pub feedback_layers: Option<usize>,
    #[serde(skip)]
    pub exact: OutcomeDistribution,
    #[serde(skip)]
    pub empirical: OutcomeDistribution,
    #[serde(skip)]
    pub empirical_raw: OutcomeDistribution,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

/// `shots` runs; run `i` draws every random choice from streams derived
/// from `(seed, stage label, i)`.
pub fn run_exact_small_batch(cfg: &PipelineConfig, shots: u64) -> Result<ExactSmallReport> {
    check_mode(cfg)?;
    if shots == 0 {
        return Err(PipelineError::Config("shots must be at least 1".into()));
    }
    let spec = build(cfg)?;
    let worker = Worker::new(cfg, &spec)?;
    let mut widths = Vec::new();
    for stage in [&worker.y_stage, &worker.t_stage].into_iter().flatten() {
        widths.push(routing_qubits(stage.copies, stage.needed));
    }
    let results: Vec<Result<RunRecord>> = (0..shots).into_par_iter().map_init(|| worker.clone(), |w, i| w.run(i)).collect();
    let mut records = Vec::with_capacity(results.len());
    let mut aborted = 0;
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(PipelineError::InsufficientSuccesses { .. }) => aborted += 1,
            Err(e) => return Err(e),
        }
    }
    let exact = assembled_distribution(&spec, &ideal_states(&spec), cfg.cap)?;
    let (ns, nx) = (exact.num_s(), exact.num_x());
    let decoded: Vec<Sample> = records.iter().map(|r| Sample { s: r.s.clone(), x: r.x.clone() }).collect();
    let raw: Vec<Sample> = records.iter().map(|r| Sample { s: r.raw_s.clone(), x: r.raw_x.clone() }).collect();
    let empirical = OutcomeDistribution::empirical(ns, nx, &decoded)?;
    let empirical_raw = OutcomeDistribution::empirical(ns, nx, &raw)?;
    let completed = records.len() as u64;
    let (l1_decoded, l1_raw) = if completed > 0 { (l1_distance(&empirical, &exact)?, l1_distance(&empirical_raw, &exact)?) } else { (2.0, 2.0) };
    let a = aborted as f64 / shots as f64;
    let l1_unconditional = if completed > 0 {
        empirical.probabilities().iter().zip(exact.probabilities()).map(|(p, d)| ((1.0 - a) * p - d).abs()).sum::<f64>() + a
    } else {
        2.0
    };
    let envelope = sampling_envelope(&exact, completed.max(1) as usize, cfg.envelope_z);
    let feedback_layers = interaction_audit(&records).ok();
    Ok(ExactSmallReport {
        config: cfg.clone(),
        seed: cfg.seed,
        shots,
        completed,
        aborted,
        num_logical: spec.num_vertices(),
        num_t: worker.t_vertices.len(),
        routing_qubits: widths,
        l1_decoded,
        l1_raw,
        l1_unconditional,
        envelope,
        feedback_layers,
        exact,
        empirical,
        empirical_raw,
        records,
    })
}
