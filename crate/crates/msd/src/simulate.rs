//! Monte Carlo of concrete distillation circuits with Pauli-corrupted magic inputs.

use std::collections::HashMap;
use std::io::Write;

use graph_sampler::statevector::StateVector;
use num_complex::Complex64 as C;
use pauli_core::seed;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::sparse::SparseState;
use crate::{ConcreteCircuit, MsdError, MsdProtocolSpec, Result};

const Z95: f64 = 1.959963984540054;

/// Two bits per magic slot: 0 = clean, 1 = X, 2 = Y, 3 = Z corruption.
pub type Pattern = u64;

pub fn magic_state(angle: f64) -> [C; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [C::new(h, 0.0), C::from_polar(h, angle)]
}

/// `P |m>` for corruption code 0..=3.
pub fn corrupt(m: [C; 2], code: u64) -> [C; 2] {
    let i = C::i();
    match code {
        0 => m,
        1 => [m[1], m[0]],
        2 => [-i * m[1], i * m[0]],
        3 => [m[0], -m[1]],
        _ => unreachable!("corruption codes are two bits"),
    }
}

/// Acceptance probability and `accept * infidelity` for one corruption pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternValue {
    pub accept: f64,
    pub bad: f64,
}

impl PatternValue {
    pub fn infidelity(&self) -> f64 {
        if self.accept > 0.0 {
            self.bad / self.accept
        } else {
            0.0
        }
    }
}

/// Aggregate of plain shots: each shot samples a corruption pattern, then
/// acceptance; infidelity is averaged over accepted shots only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistillOutcome {
    pub eps: f64,
    pub shots: u64,
    pub accepted: u64,
    pub accept_rate: f64,
    pub infidelity: f64,
    /// Half-width of the 95% normal interval on `infidelity`.
    pub ci: f64,
}

/// One shot: whether it was accepted and, if so, its output infidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotResult {
    pub accepted: bool,
    pub output_infidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StratifiedOptions {
    /// Strata with at most this many patterns are enumerated.
    pub exhaustive_limit: u64,
    /// Patterns sampled from each larger stratum.
    pub per_stratum: u64,
    /// Heaviest corruption weight included.
    pub max_weight: usize,
}

impl Default for StratifiedOptions {
    fn default() -> Self {
        StratifiedOptions { exhaustive_limit: 16_384, per_stratum: 4_096, max_weight: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumRow {
    pub weight: usize,
    pub probability: f64,
    pub patterns: u64,
    pub exhaustive: bool,
    pub mean_accept: f64,
    pub mean_bad: f64,
}

/// Weight-stratified estimate: `accept = sum_w pi_w A_w`,
/// `infidelity = sum_w pi_w B_w / accept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratifiedDistill {
    pub eps: f64,
    pub patterns: u64,
    pub accept_rate: f64,
    pub infidelity: f64,
    pub std_error: f64,
    /// Probability of corruption weights above `max_weight`, left out.
    pub truncated_mass: f64,
    pub strata: Vec<StratumRow>,
}

/// Runs a concrete circuit on corruption patterns, caching each pattern's
/// value so sweeps over `eps` reuse work.
#[derive(Clone)]
pub struct Distiller {
    circuit: ConcreteCircuit,
    encoded: SparseState,
    magic: [C; 2],
    cache: HashMap<Pattern, PatternValue>,
}

impl Distiller {
    pub fn new(protocol: &MsdProtocolSpec, cap: usize) -> Result<Self> {
        let circuit = protocol.concrete_circuit.clone().ok_or(MsdError::MissingCircuit)?;
        circuit.validate()?;
        if circuit.num_qubits > cap {
            return Err(MsdError::CapExceeded { qubits: circuit.num_qubits, cap });
        }
        let mut encoded = SparseState::zero(circuit.num_qubits);
        encoded.apply_circuit(&circuit.encoder);
        let magic = magic_state(circuit.magic_angle);
        Ok(Distiller { circuit, encoded, magic, cache: HashMap::new() })
    }

    pub fn num_slots(&self) -> usize {
        self.circuit.magic_slots.len()
    }

    pub fn cached_patterns(&self) -> usize {
        self.cache.len()
    }

    fn injection(&self, pattern: Pattern, slot: usize) -> (C, C) {
        let psi = corrupt(self.magic, pattern >> (2 * slot) & 3);
        let s2 = std::f64::consts::SQRT_2;
        (psi[0] * s2, psi[1] * s2)
    }

    fn value_of(&self, accept: f64, rho: [[C; 2]; 2]) -> PatternValue {
        let m = self.magic;
        let mut overlap = C::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                overlap += m[a].conj() * rho[a][b] * m[b];
            }
        }
        PatternValue { accept, bad: (accept - overlap.re).max(0.0) }
    }

    /// Exact value of one pattern (no caching).
    pub fn evaluate_uncached(&self, pattern: Pattern) -> PatternValue {
        let mut sv = self.encoded.clone();
        for (i, &q) in self.circuit.magic_slots.iter().enumerate() {
            let (d0, d1) = self.injection(pattern, i);
            sv.apply_diagonal(q, d0, d1);
        }
        sv.apply_circuit(&self.circuit.decoder);
        for &q in &self.circuit.postselect {
            sv.project(q, false);
        }
        self.value_of(sv.norm_sqr(), sv.reduced_qubit(self.circuit.output))
    }

    /// Same as [`Self::evaluate_uncached`] on the dense statevector engine.
    pub fn evaluate_dense(&self, pattern: Pattern) -> PatternValue {
        let mut sv = StateVector::zero(self.circuit.num_qubits);
        sv.apply_circuit(&self.circuit.encoder);
        for (i, &q) in self.circuit.magic_slots.iter().enumerate() {
            let (d0, d1) = self.injection(pattern, i);
            sv.apply_diagonal(q, d0, d1);
        }
        sv.apply_circuit(&self.circuit.decoder);
        for &q in &self.circuit.postselect {
            sv.project(q, false);
        }
        self.value_of(sv.norm_sqr(), sv.reduced_qubit(self.circuit.output))
    }

    /// Fills the cache for every pattern in `patterns`.
    pub fn evaluate_all(&mut self, patterns: &[Pattern]) {
        let mut missing: Vec<Pattern> = patterns.iter().copied().filter(|p| !self.cache.contains_key(p)).collect();
        missing.sort_unstable();
        missing.dedup();
        let this = &*self;
        let values: Vec<PatternValue> = missing.par_iter().map(|&p| this.evaluate_uncached(p)).collect();
        self.cache.extend(missing.into_iter().zip(values));
    }

    pub fn evaluate(&mut self, pattern: Pattern) -> PatternValue {
        if let Some(v) = self.cache.get(&pattern) {
            return *v;
        }
        let v = self.evaluate_uncached(pattern);
        self.cache.insert(pattern, v);
        v
    }

    fn sample_pattern<R: Rng + ?Sized>(&self, eps: f64, rng: &mut R) -> Pattern {
        let mut p = 0;
        for i in 0..self.num_slots() {
            if rng.gen::<f64>() < eps {
                p |= rng.gen_range(1..=3u64) << (2 * i);
            }
        }
        p
    }

    /// One shot with acceptance drawn from the pattern's acceptance probability.
    pub fn run_shot<R: Rng + ?Sized>(&mut self, eps: f64, rng: &mut R) -> Result<ShotResult> {
        check_eps(eps)?;
        let pattern = self.sample_pattern(eps, rng);
        let v = self.evaluate(pattern);
        let accepted = rng.gen::<f64>() < v.accept;
        Ok(ShotResult { accepted, output_infidelity: if accepted { v.infidelity() } else { 0.0 } })
    }

    /// `shots` independent shots; shot `i` uses the stream derived from `(seed, i)`.
    pub fn simulate(&mut self, eps: f64, shots: u64, seed_value: u64) -> Result<DistillOutcome> {
        check_eps(eps)?;
        if shots == 0 {
            return Err(MsdError::Invalid("shots must be at least 1".into()));
        }
        let draws: Vec<(Pattern, f64)> = (0..shots)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed::trial_rng(seed_value, i);
                let p = self.sample_pattern(eps, &mut rng);
                (p, rng.gen::<f64>())
            })
            .collect();
        let patterns: Vec<Pattern> = draws.iter().map(|d| d.0).collect();
        self.evaluate_all(&patterns);
        let (mut accepted, mut sum, mut sum2) = (0u64, 0.0, 0.0);
        for (p, u) in draws {
            let v = self.cache[&p];
            if u < v.accept {
                accepted += 1;
                let f = v.infidelity();
                sum += f;
                sum2 += f * f;
            }
        }
        let (infidelity, ci) = if accepted > 0 {
            let a = accepted as f64;
            let mean = sum / a;
            let var = (sum2 / a - mean * mean).max(0.0);
            (mean, Z95 * (var / a).sqrt())
        } else {
            (0.0, 0.0)
        };
        Ok(DistillOutcome { eps, shots, accepted, accept_rate: accepted as f64 / shots as f64, infidelity, ci })
    }

    /// Stratified estimate over corruption weight. Patterns drawn for a
    /// stratum depend only on `(seed, weight)`, not on `eps`, so a sweep
    /// reuses them.
    pub fn simulate_stratified(&mut self, eps: f64, opts: &StratifiedOptions, seed_value: u64) -> Result<StratifiedDistill> {
        check_eps(eps)?;
        let n = self.num_slots();
        let max_w = opts.max_weight.min(n);
        let mut strata = Vec::new();
        let (mut acc, mut bad, mut var_terms, mut covered) = (0.0, 0.0, Vec::new(), 0.0);
        let mut total_patterns = 0;
        for w in 0..=max_w {
            let pi = binomial_pmf(n, w, eps);
            covered += pi;
            let count = choose(n, w) * 3f64.powi(w as i32);
            let exhaustive = count <= opts.exhaustive_limit as f64;
            let patterns = if exhaustive { enumerate_weight(n, w) } else { self.sample_weight(w, opts.per_stratum, seed_value) };
            self.evaluate_all(&patterns);
            let vals: Vec<PatternValue> = patterns.iter().map(|p| self.cache[p]).collect();
            let k = vals.len() as f64;
            let mean_a = vals.iter().map(|v| v.accept).sum::<f64>() / k;
            let mean_b = vals.iter().map(|v| v.bad).sum::<f64>() / k;
            acc += pi * mean_a;
            bad += pi * mean_b;
            if !exhaustive {
                var_terms.push((pi, vals, mean_a, mean_b));
            }
            total_patterns += patterns.len() as u64;
            strata.push(StratumRow { weight: w, probability: pi, patterns: patterns.len() as u64, exhaustive, mean_accept: mean_a, mean_bad: mean_b });
        }
        let ratio = if acc > 0.0 { bad / acc } else { 0.0 };
        // Delta-method variance of the ratio estimator over sampled strata.
        let mut var = 0.0;
        for (pi, vals, ma, mb) in &var_terms {
            let k = vals.len() as f64;
            let s2 = vals.iter().map(|v| ((v.bad - mb) - ratio * (v.accept - ma)).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
            var += pi * pi * s2 / k;
        }
        Ok(StratifiedDistill {
            eps,
            patterns: total_patterns,
            accept_rate: acc,
            infidelity: ratio,
            std_error: if acc > 0.0 { var.sqrt() / acc } else { 0.0 },
            truncated_mass: (1.0 - covered).max(0.0),
            strata,
        })
    }

    fn sample_weight(&self, w: usize, count: u64, seed_value: u64) -> Vec<Pattern> {
        let n = self.num_slots();
        let stream = seed::derive_seed(seed_value, w as u64);
        (0..count)
            .map(|i| {
                let mut rng = seed::trial_rng(stream, i);
                sample_indices(&mut rng, n, w).into_iter().fold(0, |p, slot| p | rng.gen_range(1..=3u64) << (2 * slot))
            })
            .collect()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eps) {
        return Err(MsdError::Eps(eps));
    }
    Ok(())
}

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Every pattern with exactly `w` corrupted slots out of `n`.
pub fn enumerate_weight(n: usize, w: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        for t in 0..3u64.pow(w as u32) {
            let mut p = 0;
            let mut r = t;
            for &slot in &idx {
                p |= (r % 3 + 1) << (2 * slot);
                r /= 3;
            }
            out.push(p);
        }
        // Next combination in lexicographic order.
        let Some(i) = (0..w).rev().find(|&i| idx[i] < n - w + i) else { break };
        idx[i] += 1;
        for j in i + 1..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub shots: u64,
    pub accept_rate: f64,
    pub infidelity: f64,
    pub ci: f64,
}

impl From<&StratifiedDistill> for SweepRow {
    fn from(s: &StratifiedDistill) -> Self {
        SweepRow { eps: s.eps, shots: s.patterns, accept_rate: s.accept_rate, infidelity: s.infidelity, ci: Z95 * s.std_error }
    }
}

impl From<&DistillOutcome> for SweepRow {
    fn from(o: &DistillOutcome) -> Self {
        SweepRow { eps: o.eps, shots: o.shots, accept_rate: o.accept_rate, infidelity: o.infidelity, ci: o.ci }
    }
}

/// Writes `eps,shots,accept_rate,infidelity,ci`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "shots", "accept_rate", "infidelity", "ci"])?;
    for r in rows {
        w.write_record([r.eps.to_string(), r.shots.to_string(), r.accept_rate.to_string(), r.infidelity.to_string(), r.ci.to_string()])?;
    }
    w.flush()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(MsdError::Invalid("slope fit needs two or more positive points".into()));
    }
    let k = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(MsdError::Invalid("slope fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
