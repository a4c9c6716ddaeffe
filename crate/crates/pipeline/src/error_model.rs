use std::collections::HashMap;
use std::time::Instant;

use bounds_estimator::appendix_b_l1_chain_q;
use graph_sampler::{l1_distance, sampling_envelope, GraphSpec, OutcomeDistribution, Sample};
use msd::corrupt;
use pauli_core::seed;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{assembled_distribution, draw_index, ideal_states, load_gadget, magic_vertices, pipeline_graph};
use crate::{Architecture, DecodeMeta, DecodeModel, FeedbackEvent, MagicNoise, Mode, PipelineConfig, PipelineError, Result, RunRecord};

/// Largest number of magic-error branches summed for the exact noisy table.
const MAX_BRANCHES: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct ErrorModelReport {
    pub config: PipelineConfig,
    pub seed: u64,
    pub shots: u64,
    pub p_f: f64,
    pub eps_out: f64,
    pub num_logical: usize,
    pub num_t: usize,
    /// l1 of the empirical table to the ideal distribution.
    pub l1_empirical: f64,
    /// l1 of the exact noisy distribution to the ideal one, when enumerable.
    pub l1_model: Option<f64>,
    /// Sampling envelope of the noisy distribution at this shot count.
    pub envelope: f64,
    pub decode_bound: f64,
    pub decode_bound_coarse: f64,
    pub fidelity_bound: f64,
    pub fidelity_bound_coarse: f64,
    /// The bound that applies to the chosen decode model.
    pub bound: f64,
    /// `l1_empirical <= bound + envelope`.
    pub within_bound: bool,
    #[serde(skip)]
    pub exact: OutcomeDistribution,
    #[serde(skip)]
    pub model: Option<OutcomeDistribution>,
    #[serde(skip)]
    pub empirical: OutcomeDistribution,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

fn branch_probability(codes: &[u8], eps: f64, noise: MagicNoise) -> f64 {
    codes
        .iter()
        .map(|&c| match (c, noise) {
            (0, _) => 1.0 - eps,
            (_, MagicNoise::Dephasing) => eps,
            (_, MagicNoise::Depolarizing) => eps / 3.0,
        })
        .product()
}

fn branch_table(spec: &GraphSpec, t_vertices: &[usize], codes: &[u8], cap: usize) -> Result<Vec<f64>> {
    let mut states = ideal_states(spec);
    for (&v, &c) in t_vertices.iter().zip(codes) {
        states[v] = corrupt(states[v], c as u64);
    }
    Ok(assembled_distribution(spec, &states, cap)?.probabilities().to_vec())
}

/// All branch code vectors with nonzero weight under `noise`.
fn all_branches(nt: usize, noise: MagicNoise) -> Vec<Vec<u8>> {
    let alphabet: &[u8] = match noise {
        MagicNoise::Dephasing => &[0, 3],
        MagicNoise::Depolarizing => &[0, 1, 2, 3],
    };
    let mut out = vec![Vec::new()];
    for _ in 0..nt {
        out = out.into_iter().flat_map(|v| alphabet.iter().map(move |&c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

/// Applies the decode-failure channel to a table exactly.
fn apply_failures(probs: &[f64], bits: usize, p_f: f64, model: DecodeModel) -> Vec<f64> {
    match model {
        DecodeModel::Independent => {
            let mut q = probs.to_vec();
            for b in 0..bits {
                let m = 1usize << b;
                let prev = q.clone();
                for (i, v) in q.iter_mut().enumerate() {
                    *v = (1.0 - p_f) * prev[i] + p_f * prev[i ^ m];
                }
            }
            q
        }
        DecodeModel::UnionBound => {
            let r = (bits as f64 * p_f).min(1.0);
            (0..probs.len())
                .map(|i| (1.0 - r) * probs[i] + r / bits as f64 * (0..bits).map(|b| probs[i ^ (1 << b)]).sum::<f64>())
                .collect()
        }
    }
}

/// Logical-level run: ideal outcomes, then magic-state errors by resampling
/// from the perturbed pattern, then decode failures on every logical bit.
pub fn run_error_model(cfg: &PipelineConfig, shots: u64) -> Result<ErrorModelReport> {
    cfg.validate()?;
    if cfg.mode != Mode::ErrorModel {
        return Err(PipelineError::Config("run_error_model needs mode error_model".into()));
    }
    if shots == 0 {
        return Err(PipelineError::Config("shots must be at least 1".into()));
    }
    let p_f = cfg.resolve_p_f()?;
    let spec = pipeline_graph(cfg.n, cfg.k, &load_gadget(cfg)?, cfg.gadget)?;
    let t_vertices = magic_vertices(&spec);
    let nt = t_vertices.len();
    let nv = spec.num_vertices();
    let exact = assembled_distribution(&spec, &ideal_states(&spec), cfg.cap)?;
    let num_s = exact.num_s();
    let feedback: Vec<FeedbackEvent> = if nt == 0 {
        Vec::new()
    } else {
        let stages: &[&str] = match cfg.architecture {
            Architecture::FourD => &["t"],
            Architecture::ThreeD => &["y", "t"],
        };
        stages.iter().map(|s| FeedbackEvent { after: format!("{s} distillation"), selects: format!("{s} routing pattern") }).collect()
    };
    let master = seed::derive_named(cfg.seed, "error_model");
    let mut seed_cache: HashMap<Vec<u8>, Vec<f64>> = HashMap::new();
    seed_cache.insert(vec![0; nt], exact.probabilities().to_vec());
    let results: Vec<Result<RunRecord>> = (0..shots)
        .into_par_iter()
        .map_init(
            || seed_cache.clone(),
            |cache, i| {
                let start = Instant::now();
                let mut rng = seed::trial_rng(master, i);
                let codes: Vec<u8> = (0..nt)
                    .map(|_| {
                        if rng.gen::<f64>() >= cfg.eps_out {
                            0
                        } else if cfg.magic_noise == MagicNoise::Dephasing {
                            3
                        } else {
                            rng.gen_range(1..=3u8)
                        }
                    })
                    .collect();
                if !cache.contains_key(&codes) {
                    let t = branch_table(&spec, &t_vertices, &codes, cfg.cap)?;
                    cache.insert(codes.clone(), t);
                }
                let ideal = draw_index(&cache[&codes], rng.gen());
                let mut flipped = ideal;
                match cfg.decode_model {
                    DecodeModel::Independent => {
                        for b in 0..nv {
                            if rng.gen::<f64>() < p_f {
                                flipped ^= 1 << b;
                            }
                        }
                    }
                    DecodeModel::UnionBound => {
                        if rng.gen::<f64>() < (nv as f64 * p_f).min(1.0) {
                            flipped ^= 1 << rng.gen_range(0..nv);
                        }
                    }
                }
                let bit = |w: usize, j: usize| (w >> j) & 1 == 1;
                Ok(RunRecord {
                    shot: i,
                    architecture: cfg.architecture,
                    s: (0..num_s).map(|j| bit(flipped, j)).collect(),
                    x: (num_s..nv).map(|j| bit(flipped, j)).collect(),
                    raw_s: (0..num_s).map(|j| bit(ideal, j)).collect(),
                    raw_x: (num_s..nv).map(|j| bit(ideal, j)).collect(),
                    decode: DecodeMeta { distance: cfg.distance, defects: 0, corrections: (flipped ^ ideal).count_ones() as usize },
                    msd: Vec::new(),
                    routing: Vec::new(),
                    feedback: feedback.clone(),
                    elapsed_us: start.elapsed().as_micros() as u64,
                })
            },
        )
        .collect();
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    let samples: Vec<Sample> = records.iter().map(|r| Sample { s: r.s.clone(), x: r.x.clone() }).collect();
    let empirical = OutcomeDistribution::empirical(num_s, nv - num_s, &samples)?;
    let l1_empirical = l1_distance(&empirical, &exact)?;

    let branches = match cfg.magic_noise {
        MagicNoise::Dephasing => 1usize.checked_shl(nt as u32),
        MagicNoise::Depolarizing => 1usize.checked_shl(2 * nt as u32),
    };
    let model = match branches {
        Some(b) if b <= MAX_BRANCHES => {
            let mut mix = vec![0.0; exact.probabilities().len()];
            for codes in all_branches(nt, cfg.magic_noise) {
                let w = branch_probability(&codes, cfg.eps_out, cfg.magic_noise);
                if w == 0.0 {
                    continue;
                }
                for (m, p) in mix.iter_mut().zip(branch_table(&spec, &t_vertices, &codes, cfg.cap)?) {
                    *m += w * p;
                }
            }
            let noisy = apply_failures(&mix, nv, p_f, cfg.decode_model);
            let total: f64 = noisy.iter().sum();
            Some(OutcomeDistribution::new(num_s, nv - num_s, noisy.into_iter().map(|p| p / total).collect())?)
        }
        _ => None,
    };
    let l1_model = model.as_ref().map(|m| l1_distance(m, &exact)).transpose()?;
    let envelope = sampling_envelope(model.as_ref().unwrap_or(&exact), shots as usize, cfg.envelope_z);
    let chain = appendix_b_l1_chain_q(p_f, cfg.eps_out, nt as f64, nv as f64)?;
    let bound = match cfg.decode_model {
        DecodeModel::Independent => chain.total,
        DecodeModel::UnionBound => chain.decode_coarse + chain.fidelity,
    };
    Ok(ErrorModelReport {
        config: cfg.clone(),
        seed: cfg.seed,
        shots,
        p_f,
        eps_out: cfg.eps_out,
        num_logical: nv,
        num_t: nt,
        l1_empirical,
        l1_model,
        envelope,
        decode_bound: chain.decode,
        decode_bound_coarse: chain.decode_coarse,
        fidelity_bound: chain.fidelity,
        fidelity_bound_coarse: chain.fidelity_coarse,
        bound,
        within_bound: l1_empirical <= bound + envelope,
        exact,
        model,
        empirical,
        records,
    })
}
