use std::io::Write;

use pauli_core::seed;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Decoder, Result, StabilizerKind, SurfaceCodePatch, SurfaceError};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub failures: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

impl RateEstimate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        let estimate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        RateEstimate { failures, trials, estimate, ci_low, ci_high }
    }

    pub fn overlaps(&self, other: &RateEstimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// One readout experiment: a uniformly random logical bit, a uniformly random
/// element of the X-stabilizer group (the Z-basis image of the code state),
/// then i.i.d. flips at rate `p`. Returns whether decoding failed.
pub fn readout_trial<R: Rng + ?Sized>(decoder: &Decoder, p: f64, rng: &mut R) -> bool {
    let patch = decoder.patch();
    let mut bits = vec![false; patch.num_qubits()];
    for s in patch.stabilizers_of(StabilizerKind::X) {
        if rng.gen::<bool>() {
            for &q in &s.support {
                bits[q] ^= true;
            }
        }
    }
    let truth = rng.gen::<bool>();
    if truth {
        for &q in patch.logical_x_support() {
            bits[q] ^= true;
        }
    }
    for b in bits.iter_mut() {
        if rng.gen::<f64>() < p {
            *b ^= true;
        }
    }
    decoder.decode(&bits).expect("length matches").logical != truth
}

fn check_rate(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(SurfaceError::Rate(p));
    }
    Ok(())
}

/// Monte Carlo decoding-failure rate with a Wilson 95% interval. Trial `i`
/// uses the generator derived from `(seed, i)`.
pub fn logical_error_rate(distance: usize, p: f64, trials: u64, seed: u64) -> Result<RateEstimate> {
    check_rate(p)?;
    if trials == 0 {
        return Err(SurfaceError::Trials);
    }
    let decoder = Decoder::new(&SurfaceCodePatch::new(distance)?);
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&i| readout_trial(&decoder, p, &mut seed::trial_rng(seed, i)))
        .count() as u64;
    Ok(RateEstimate::from_counts(failures, trials))
}

/// Decoding failure depends only on the flip pattern (the code word and the
/// logical bit drop out), so `p_L = Σ_w Pr(|e| = w)·f_w` with `f_w` the
/// failing fraction of weight-`w` patterns.
pub fn pattern_fails(decoder: &Decoder, flips: &[bool]) -> bool {
    let r = decoder.decode(flips).expect("length matches");
    r.logical
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratifiedEstimate {
    pub estimate: f64,
    /// Standard error from the per-weight binomial variances.
    pub std_error: f64,
    /// `(weight, samples, failures)` per stratum.
    pub strata: Vec<(usize, u64, u64)>,
    /// Binomial mass above the largest sampled weight (counted as failures
    /// in `estimate_upper`).
    pub truncated_mass: f64,
    pub estimate_upper: f64,
}

fn binomial_pmf(n: usize, w: usize, p: f64) -> f64 {
    if p == 0.0 {
        return if w == 0 { 1.0 } else { 0.0 };
    }
    let ln_choose = (1..=w).map(|i| ((n - w + i) as f64 / i as f64).ln()).sum::<f64>();
    (ln_choose + w as f64 * p.ln() + (n - w) as f64 * (1.0 - p).ln()).exp()
}

/// Failure rate estimated by sampling flip patterns of each fixed weight
/// separately and weighting by the binomial law. Weights whose total mass
/// is below `1e-15` are skipped; `trials` is split evenly over the rest.
/// Resolves rates far below `1/trials`, which plain sampling cannot.
pub fn logical_error_rate_stratified(distance: usize, p: f64, trials: u64, seed: u64) -> Result<StratifiedEstimate> {
    check_rate(p)?;
    if trials == 0 {
        return Err(SurfaceError::Trials);
    }
    let decoder = Decoder::new(&SurfaceCodePatch::new(distance)?);
    let l = decoder.patch().num_qubits();
    let mut weights = Vec::new();
    let mut tail = 1.0;
    for w in 1..=l {
        tail -= binomial_pmf(l, w - 1, p);
        if tail < 1e-15 {
            break;
        }
        weights.push(w);
    }
    let truncated_mass = tail.max(0.0);
    let per = (trials / weights.len().max(1) as u64).max(1);
    let mut strata = Vec::new();
    let (mut est, mut var) = (0.0, 0.0);
    for &w in &weights {
        let stream = seed::derive_seed(seed, w as u64);
        let failures = (0..per)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = seed::trial_rng(stream, i);
                let mut flips = vec![false; l];
                for q in rand::seq::index::sample(&mut rng, l, w) {
                    flips[q] = true;
                }
                pattern_fails(&decoder, &flips)
            })
            .count() as u64;
        let f = failures as f64 / per as f64;
        let pi = binomial_pmf(l, w, p);
        est += pi * f;
        var += pi * pi * f * (1.0 - f) / per as f64;
        strata.push((w, per, failures));
    }
    Ok(StratifiedEstimate {
        estimate: est,
        std_error: var.sqrt(),
        strata,
        truncated_mass,
        estimate_upper: est + truncated_mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Slope `c` in `−ln p_L ≈ c·√l + a`.
    pub c: f64,
    pub intercept: f64,
}

/// Least-squares fit of `−ln p_L` against `√l = d` over `(distance, p_L)` points.
pub fn fit_pf_exponent(points: &[(usize, f64)]) -> Result<ExponentFit> {
    if points.len() < 2 {
        return Err(SurfaceError::Fit("need at least two points".into()));
    }
    if let Some(&(d, p)) = points.iter().find(|&&(_, p)| !(p > 0.0 && p < 1.0)) {
        return Err(SurfaceError::Fit(format!("p_L = {p} at distance {d} is not in (0, 1)")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(d, _)| ((d * d) as f64).sqrt()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, p)| -p.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(SurfaceError::Fit("all points share one distance".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c = sxy / sxx;
    Ok(ExponentFit { c, intercept: my - c * mx })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub distance: usize,
    pub l: usize,
    pub p: f64,
    pub trials: u64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Every (distance, rate) combination; each cell gets its own seed stream.
pub fn rate_sweep(distances: &[usize], rates: &[f64], trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &d in distances {
        for (j, &p) in rates.iter().enumerate() {
            let cell = pauli_core::seed::derive_seed(seed::derive_seed(seed, d as u64), j as u64);
            let est = logical_error_rate(d, p, trials, cell)?;
            rows.push(SweepRow {
                distance: d,
                l: d * d,
                p,
                trials,
                p_l: est.estimate,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["distance", "l", "p", "trials", "p_L", "ci_low", "ci_high"])?;
    for r in rows {
        w.write_record([
            r.distance.to_string(),
            r.l.to_string(),
            r.p.to_string(),
            r.trials.to_string(),
            r.p_l.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
        ])?;
    }
    w.flush()
}
