use std::io::Write;

use num_complex::Complex64 as C;
use pauli_core::seed;
use rand::Rng;
use rayon::prelude::*;

use crate::statevector::{hadamard, z_rotation, StateVector};
use crate::{GraphError, GraphSpec, Result};

pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Rotated graph state: `H·Z(θ_v)` on every measured vertex of `|G⟩`, so
/// that every measurement becomes a computational-basis readout. Qubit `i`
/// is vertex `i`.
pub fn graph_statevector(spec: &GraphSpec) -> Result<StateVector> {
    graph_statevector_with_cap(spec, DEFAULT_QUBIT_CAP)
}

pub fn graph_statevector_with_cap(spec: &GraphSpec, cap: usize) -> Result<StateVector> {
    let nv = spec.num_vertices();
    if nv > cap {
        return Err(GraphError::SizeCap { qubits: nv, cap });
    }
    let edge_masks: Vec<usize> = spec.edges().iter().map(|&(a, b)| (1 << a) | (1 << b)).collect();
    let rot: Vec<Option<[C; 2]>> = spec
        .vertices()
        .iter()
        .map(|v| v.role.angle().map(|t| { let m = z_rotation(t); [m[0][0], m[1][1]] }))
        .collect();
    let norm = (1u64 << nv) as f64;
    let norm = norm.sqrt().recip();
    let amps = (0..1usize << nv)
        .into_par_iter()
        .map(|b| {
            let parity = edge_masks.iter().filter(|&&m| b & m == m).count() & 1;
            let mut a = C::new(if parity == 1 { -norm } else { norm }, 0.0);
            for (i, r) in rot.iter().enumerate() {
                if let Some(d) = r {
                    a *= d[(b >> i) & 1];
                }
            }
            a
        })
        .collect();
    let mut state = StateVector::from_amplitudes(nv, amps);
    let h = hadamard();
    for (i, v) in spec.vertices().iter().enumerate() {
        if !v.role.is_output() {
            state.apply_single(i, &h);
        }
    }
    Ok(state)
}

/// Joint distribution over `(s, x)`; entry `s | x << num_s` holds `D(s, x)`.
/// Bit `i` of `s` is the `i`-th measured vertex in index order, bit `j` of
/// `x` the `j`-th output vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    num_s: usize,
    num_x: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(num_s: usize, num_x: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << (num_s + num_x) {
            return Err(GraphError::Invalid(format!(
                "{} probabilities for a space of {} bits",
                probs.len(),
                num_s + num_x
            )));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(GraphError::Invalid("negative or NaN probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(GraphError::Invalid(format!("probabilities sum to {total}")));
        }
        Ok(OutcomeDistribution { num_s, num_x, probs })
    }

    pub fn uniform(num_s: usize, num_x: usize) -> Self {
        let len = 1usize << (num_s + num_x);
        OutcomeDistribution { num_s, num_x, probs: vec![1.0 / len as f64; len] }
    }

    pub fn point_mass(num_s: usize, num_x: usize, index: usize) -> Self {
        let mut probs = vec![0.0; 1usize << (num_s + num_x)];
        probs[index] = 1.0;
        OutcomeDistribution { num_s, num_x, probs }
    }

    /// Frequency table of `samples`.
    pub fn empirical(num_s: usize, num_x: usize, samples: &[Sample]) -> Result<Self> {
        if num_s + num_x > 30 {
            return Err(GraphError::SizeCap { qubits: num_s + num_x, cap: 30 });
        }
        let mut counts = vec![0u64; 1usize << (num_s + num_x)];
        for s in samples {
            if s.s.len() != num_s || s.x.len() != num_x {
                return Err(GraphError::Mismatch("sample length differs from the outcome space".into()));
            }
            counts[s.index()] += 1;
        }
        let total = samples.len().max(1) as f64;
        Ok(OutcomeDistribution { num_s, num_x, probs: counts.into_iter().map(|c| c as f64 / total).collect() })
    }

    pub fn num_s(&self) -> usize {
        self.num_s
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, s: usize, x: usize) -> f64 {
        self.probs[s | (x << self.num_s)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ_x D(s, x)` for every `s`.
    pub fn s_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; 1usize << self.num_s];
        for (i, p) in self.probs.iter().enumerate() {
            m[i & ((1usize << self.num_s) - 1)] += p;
        }
        m
    }

    /// Writes `s,x,probability` rows; bit strings list bit 0 first.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "x", "probability"])?;
        for (i, p) in self.probs.iter().enumerate() {
            let s = bits(i, 0, self.num_s);
            let x = bits(i, self.num_s, self.num_x);
            w.write_record([s, x, format!("{p:.17e}")])?;
        }
        w.flush()
    }
}

fn bits(word: usize, from: usize, len: usize) -> String {
    (0..len).map(|j| if (word >> (from + j)) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn exact_distribution(spec: &GraphSpec) -> Result<OutcomeDistribution> {
    exact_distribution_with_cap(spec, DEFAULT_QUBIT_CAP)
}

pub fn exact_distribution_with_cap(spec: &GraphSpec, cap: usize) -> Result<OutcomeDistribution> {
    let state = graph_statevector_with_cap(spec, cap)?;
    let measured = spec.measured_vertices();
    let outputs = spec.output_vertices();
    // Destination bit of every vertex in the (s, x) index.
    let mut dest = vec![0usize; spec.num_vertices()];
    for (j, &v) in measured.iter().chain(outputs.iter()).enumerate() {
        dest[v] = j;
    }
    let mut probs = vec![0.0; state.amplitudes().len()];
    for (b, a) in state.amplitudes().iter().enumerate() {
        let mut idx = 0usize;
        for (v, &d) in dest.iter().enumerate() {
            idx |= ((b >> v) & 1) << d;
        }
        probs[idx] = a.norm_sqr();
    }
    Ok(OutcomeDistribution { num_s: measured.len(), num_x: outputs.len(), probs })
}

/// One draw of `(s, x)` in the same bit order as [`OutcomeDistribution`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sample {
    pub s: Vec<bool>,
    pub x: Vec<bool>,
}

impl Sample {
    pub fn index(&self) -> usize {
        self.s.iter().chain(self.x.iter()).enumerate().fold(0, |acc, (i, &b)| acc | ((b as usize) << i))
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// Add the vertex in `|+⟩` and entangle it with its live neighbours.
    Add,
    Measure,
}

/// Precomputed elimination order for sequential sampling. Each vertex is
/// added in `|+⟩`, entangled with its live neighbours, and measured as soon
/// as all of its neighbours have been added, so only the frontier is stored.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: GraphSpec,
    steps: Vec<(Step, usize)>,
    peak_width: usize,
}

impl Sampler {
    pub fn new(spec: &GraphSpec) -> Result<Self> {
        Self::with_cap(spec, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(spec: &GraphSpec, cap: usize) -> Result<Self> {
        let adj = spec.neighbors();
        let mut order: Vec<usize> = (0..spec.num_vertices()).collect();
        order.sort_by_key(|&i| {
            let v = &spec.vertices()[i];
            (v.col, v.sub, v.kind, v.row, i)
        });
        let mut added = vec![false; order.len()];
        let mut pending = vec![0usize; order.len()];
        for (v, nb) in adj.iter().enumerate() {
            pending[v] = nb.len();
        }
        let mut steps = Vec::with_capacity(2 * order.len());
        let (mut live, mut peak) = (0usize, 0usize);
        for &v in &order {
            added[v] = true;
            steps.push((Step::Add, v));
            live += 1;
            peak = peak.max(live);
            let mut ready = Vec::new();
            for &u in &adj[v] {
                pending[u] -= 1;
                if added[u] && pending[u] == 0 {
                    ready.push(u);
                }
            }
            if pending[v] == 0 {
                ready.push(v);
            }
            // A vertex whose last neighbour arrives is measured right away.
            ready.sort_unstable();
            ready.dedup();
            for u in ready {
                steps.push((Step::Measure, u));
                live -= 1;
            }
        }
        if peak > cap {
            return Err(GraphError::SizeCap { qubits: peak, cap });
        }
        Ok(Sampler { spec: spec.clone(), steps, peak_width: peak })
    }

    /// Largest number of simultaneously stored qubits.
    pub fn peak_width(&self) -> usize {
        self.peak_width
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let nv = self.spec.num_vertices();
        let adj = self.spec.neighbors();
        let mut slot_of: Vec<Option<usize>> = vec![None; nv];
        let mut slots: Vec<usize> = Vec::new();
        let mut state = StateVector::from_amplitudes(0, vec![C::new(1.0, 0.0)]);
        let mut outcome = vec![false; nv];
        let plus = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let h = hadamard();
        for &(step, v) in &self.steps {
            match step {
                Step::Add => {
                    state.push_qubit([plus, plus]);
                    let q = slots.len();
                    slots.push(v);
                    slot_of[v] = Some(q);
                    for &u in &adj[v] {
                        if let Some(p) = slot_of[u] {
                            state.apply_cz(p, q);
                        }
                    }
                }
                Step::Measure => {
                    let q = slot_of[v].expect("measured vertex is live");
                    if let Some(theta) = self.spec.vertices()[v].role.angle() {
                        state.apply_single(q, &z_rotation(theta));
                        state.apply_single(q, &h);
                    }
                    let total = state.norm_sqr();
                    let p1 = state.prob_one(q) / total;
                    let bit = rng.gen::<f64>() < p1;
                    outcome[v] = bit;
                    state = state.remove_qubit(q, bit);
                    state.normalize();
                    slots.remove(q);
                    slot_of[v] = None;
                    for (i, &u) in slots.iter().enumerate().skip(q) {
                        slot_of[u] = Some(i);
                    }
                }
            }
        }
        Sample {
            s: self.spec.measured_vertices().into_iter().map(|v| outcome[v]).collect(),
            x: self.spec.output_vertices().into_iter().map(|v| outcome[v]).collect(),
        }
    }
}

/// Draws one `(s, x)` by sequential conditional sampling.
pub fn sample_outcome<R: Rng + ?Sized>(spec: &GraphSpec, rng: &mut R) -> Result<Sample> {
    Ok(Sampler::new(spec)?.sample(rng))
}

/// `shots` independent draws; shot `i` uses the generator derived from `(seed, i)`.
pub fn sample_batch(sampler: &Sampler, shots: usize, master_seed: u64) -> Vec<Sample> {
    (0..shots as u64)
        .into_par_iter()
        .map(|i| sampler.sample(&mut seed::trial_rng(master_seed, i)))
        .collect()
}

/// `max_s |Σ_x D(s,x) − 2^{−#s}|`.
pub fn uniform_s_deviation(dist: &OutcomeDistribution) -> f64 {
    let target = 1.0 / (1u64 << dist.num_s) as f64;
    dist.s_marginal().into_iter().map(|m| (m - target).abs()).fold(0.0, f64::max)
}

pub fn uniform_s_marginal_check(spec: &GraphSpec) -> Result<f64> {
    Ok(uniform_s_deviation(&exact_distribution(spec)?))
}

/// Fraction of outcomes with `D(s,x) ≥ α / 2^{#s + #x}`. Ties within a relative
/// 1e-9 count as hits, so the uniform distribution scores 1 at `α = 1`.
pub fn anticoncentration_stats(dist: &OutcomeDistribution, alpha: f64) -> f64 {
    let threshold = alpha / dist.probs.len() as f64 * (1.0 - 1e-9);
    let hits = dist.probs.iter().filter(|&&p| p >= threshold).count();
    hits as f64 / dist.probs.len() as f64
}

pub fn l1_distance(a: &OutcomeDistribution, b: &OutcomeDistribution) -> Result<f64> {
    if a.num_s != b.num_s || a.num_x != b.num_x {
        return Err(GraphError::Mismatch(format!(
            "({}, {}) bits vs ({}, {}) bits",
            a.num_s, a.num_x, b.num_s, b.num_x
        )));
    }
    Ok(a.probs.iter().zip(&b.probs).map(|(p, q)| (p - q).abs()).sum())
}

/// Upper envelope for the l1 distance between an `shots`-sample empirical
/// table and `exact`: `Σ √(p(1−p)/N)` bounds the mean (Jensen) and
/// `z/√N` bounds `z` standard deviations of the sum.
pub fn sampling_envelope(exact: &OutcomeDistribution, shots: usize, z: f64) -> f64 {
    let n = shots as f64;
    let mean: f64 = exact.probs.iter().map(|p| (p * (1.0 - p) / n).sqrt()).sum();
    mean + z / n.sqrt()
}
