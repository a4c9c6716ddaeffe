//! Resource arithmetic for layered non-adaptive distillation.

use serde::Serialize;

use crate::{MsdError, Result};

/// Layer cap for [`plan_zmsd`]; beyond this d^z overflows any useful budget.
pub const MAX_LAYERS: u32 = 40;

/// Relative slack when comparing a planned output infidelity with its target,
/// so that a calibrated input hitting the target exactly is not rejected by
/// one ulp of rounding.
pub const TARGET_SLACK: f64 = 1e-9;

/// Exponent of the input-count law for the 7-qubit Y protocol.
pub const Y_GAMMA: f64 = 1.77;

/// Largest success target for which [`plan_zmsd`] solves for the copy count.
pub const MAX_EXACT_TARGET: u64 = 1_000_000;

fn check_regime(eps: f64, d: u32, c: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(MsdError::Regime(format!("eps = {eps} outside (0, 1)")));
    }
    if d < 2 {
        return Err(MsdError::Invalid(format!("block parameter d = {d} must be at least 2")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(MsdError::Invalid(format!("suppression constant C = {c} must be positive")));
    }
    if c * eps.powi(d as i32) >= 1.0 {
        return Err(MsdError::Regime(format!("C*eps^d = {} is not below 1", c * eps.powi(d as i32))));
    }
    Ok(())
}

/// Applies `eps <- C * eps^d` exactly `z` times.
pub fn epsilon_recursion(eps: f64, d: u32, z: u32, c: f64) -> Result<f64> {
    check_regime(eps, d, c)?;
    let mut e = eps;
    for _ in 0..z {
        e = c * e.powi(d as i32);
    }
    Ok(e)
}

/// Closed form of the recursion, `C^((d^z - 1)/(d - 1)) * eps^(d^z)`,
/// evaluated in log space.
pub fn epsilon_closed_form(eps: f64, d: u32, z: u32, c: f64) -> f64 {
    let dz = (d as f64).powi(z as i32);
    (((dz - 1.0) / (d as f64 - 1.0)) * c.ln() + dz * eps.ln()).exp()
}

/// The leading-order form `C^(d^(z-1)) * eps^(d^z)`. It agrees with the exact
/// recursion when `C = 1` or `z = 1`.
pub fn epsilon_leading_form(eps: f64, d: u32, z: u32, c: f64) -> f64 {
    if z == 0 {
        return eps;
    }
    let d = d as f64;
    (d.powi(z as i32 - 1) * c.ln() + d.powi(z as i32) * eps.ln()).exp()
}

/// Input infidelity `2^(-gamma*beta) / C^(1/d)` for which the leading form
/// gives `eps_out = 2^(-gamma*beta*d^z)`, i.e. `n^(-beta)` once
/// `gamma * d^z = log2 n`.
pub fn calibrated_eps(gamma_q: f64, beta: f64, c: f64, d: u32) -> f64 {
    (-gamma_q * beta * std::f64::consts::LN_2).exp() / c.powf(1.0 / d as f64)
}

/// Proportionality constants of the size formulas; all default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanConstants {
    /// Per-round suppression constant C.
    pub c: f64,
    /// Logical qubits per instance divided by d^z.
    pub gamma_q: f64,
    /// Factor on d^2 log2 d, the depth of the round with long-range Cliffords.
    pub k_depth: f64,
    /// Factor on d^2, the depth of one compiled Clifford.
    pub k_clifford: f64,
    /// Factor on d, nearest-neighbour CZs per long-range CZ.
    pub k_cz: f64,
    /// Factor on d, the row count of one round's cluster.
    pub k_width: f64,
    /// Successes required are `k_success * n^2`.
    pub k_success: f64,
    /// Allowed probability of fewer successes than required.
    pub fail_budget: f64,
}

impl Default for PlanConstants {
    fn default() -> Self {
        PlanConstants { c: 1.0, gamma_q: 1.0, k_depth: 1.0, k_clifford: 1.0, k_cz: 1.0, k_width: 1.0, k_success: 1.0, fail_budget: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZMsdPlan {
    pub n: u64,
    pub d: u32,
    pub z: u32,
    /// Copies in the first layer, `d^(z-1)`.
    #[serde(rename = "N")]
    pub big_n: u64,
    pub copies_per_layer: Vec<u64>,
    /// Columns of one round's cluster: `(k_depth d^2 log2 d)(k_clifford d^2)(k_cz d)`.
    pub n_c: f64,
    /// Qubits of one round's cluster: `k_width d n_c`.
    pub n_t: f64,
    /// Logical qubits per instance: `gamma_q d^z`.
    pub n_nmsd: f64,
    /// Explicit layered count `sum(copies_per_layer) * n_T`.
    pub layered_qubits: f64,
    pub eps_in: f64,
    pub eps_out: f64,
    pub target_eps_out: f64,
    pub target_successes: u64,
    /// Lower bound `2^(-n_NMSD)` on one instance succeeding.
    pub p_single: f64,
    /// Parallel instances needed; `None` when the target is too large to solve exactly.
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub constants: PlanConstants,
}

/// Smallest number of layers `z` reaching `target_eps_out`, with the derived
/// copy counts and cluster sizes for a problem of size `n`.
pub fn plan_zmsd(eps: f64, target_eps_out: f64, d: u32, n: u64, k: &PlanConstants) -> Result<ZMsdPlan> {
    check_regime(eps, d, k.c)?;
    if !(target_eps_out > 0.0 && target_eps_out < eps) {
        return Err(MsdError::Target(format!("target {target_eps_out} must lie in (0, eps = {eps})")));
    }
    if n < 1 {
        return Err(MsdError::Invalid("problem size n must be at least 1".into()));
    }
    let mut z = 0;
    let mut eps_out = eps;
    while eps_out > target_eps_out * (1.0 + TARGET_SLACK) {
        z += 1;
        if z > MAX_LAYERS {
            return Err(MsdError::Unreachable { target: target_eps_out, layers: MAX_LAYERS });
        }
        eps_out = epsilon_recursion(eps, d, z, k.c)?;
    }
    let big_n = (d as u64).checked_pow(z - 1).ok_or(MsdError::Unreachable { target: target_eps_out, layers: z })?;
    let copies_per_layer: Vec<u64> = (0..z).map(|i| big_n / (d as u64).pow(i)).collect();
    let df = d as f64;
    let n_c = (k.k_depth * df * df * df.log2()) * (k.k_clifford * df * df) * (k.k_cz * df);
    let n_t = k.k_width * df * n_c;
    let n_nmsd = k.gamma_q * df.powi(z as i32);
    let layered_qubits = copies_per_layer.iter().sum::<u64>() as f64 * n_t;
    let target_successes = (k.k_success * (n as f64).powi(2)).ceil().max(1.0) as u64;
    let p_single = success_probability_bound(n_nmsd);
    let m = if target_successes <= MAX_EXACT_TARGET && p_single > 0.0 {
        Some(copies_for_target(p_single, target_successes, k.fail_budget)?.m)
    } else {
        None
    };
    Ok(ZMsdPlan {
        n,
        d,
        z,
        big_n,
        copies_per_layer,
        n_c,
        n_t,
        n_nmsd,
        layered_qubits,
        eps_in: eps,
        eps_out,
        target_eps_out,
        target_successes,
        p_single,
        m,
        constants: *k,
    })
}

/// `2^(-n_NMSD)`: only the all-zero decoded string counts as success.
pub fn success_probability_bound(n_nmsd: f64) -> f64 {
    (-n_nmsd).exp2()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Pr(X <= k_max)` for `X ~ Binomial(m, p)`.
pub fn ln_binomial_cdf(m: u64, p: f64, k_max: u64) -> f64 {
    if k_max >= m {
        return 0.0;
    }
    if p >= 1.0 {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return 0.0;
    }
    let ratio = (p / (1.0 - p)).ln();
    let mut term = m as f64 * (-p).ln_1p();
    let mut acc = term;
    for k in 0..k_max {
        term += ((m - k) as f64 / (k + 1) as f64).ln() + ratio;
        acc = log_add(acc, term);
    }
    acc.min(0.0)
}

fn ln_choose(m: u64, t: u64) -> f64 {
    if t > m {
        return f64::NEG_INFINITY;
    }
    (0..t.min(m - t)).map(|i| ((m - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// The stages of the analytic bound on missing the success target, in log
/// space: `ln_d31` is `Pr(X <= T)`; `ln_d32` replaces every
/// `p^a (1-p)^(M-a)` by `(1-p)^M`; `ln_d34` replaces the binomial sum by
/// `(T+1) C(M, T)`; `ln_d35` replaces `C(M, T)` by `M^T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundChain {
    pub ln_d31: f64,
    pub ln_d32: f64,
    pub ln_d34: f64,
    pub ln_d35: f64,
    /// The chain's own hypotheses: `p <= 1/2` and `M > 2T`.
    pub applicable: bool,
}

impl BoundChain {
    pub fn evaluate(p: f64, target: u64, m: u64) -> Self {
        let ln_q = if p >= 1.0 { f64::NEG_INFINITY } else { m as f64 * (-p).ln_1p() };
        let mut ln_sum = f64::NEG_INFINITY;
        let mut ln_c = 0.0;
        for j in 0..=target.min(m) {
            if j > 0 {
                ln_c += ((m - j + 1) as f64 / j as f64).ln();
            }
            ln_sum = log_add(ln_sum, ln_c);
        }
        let ln_t1 = ((target + 1) as f64).ln();
        BoundChain {
            ln_d31: ln_binomial_cdf(m, p, target),
            ln_d32: ln_sum + ln_q,
            ln_d34: ln_t1 + ln_choose(m, target) + ln_q,
            ln_d35: ln_t1 + target as f64 * (m as f64).ln() + ln_q,
            applicable: p <= 0.5 && m > 2 * target,
        }
    }

    /// Each stage bounds the previous one and the first bounds `ln_exact`.
    pub fn dominates(&self, ln_exact: f64) -> bool {
        let tol = 1e-9;
        self.ln_d31 + tol >= ln_exact && self.ln_d32 + tol >= self.ln_d31 && self.ln_d34 + tol >= self.ln_d32 && self.ln_d35 + tol >= self.ln_d34
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CopiesReport {
    pub m: u64,
    /// `ln Pr(successes < target)` at `m`.
    pub ln_exact_tail: f64,
    pub chain: BoundChain,
}

/// Smallest `M` with `Pr(Binomial(M, p) < target) <= fail_budget`.
pub fn copies_for_target(p_single: f64, target: u64, fail_budget: f64) -> Result<CopiesReport> {
    if !(p_single > 0.0 && p_single <= 1.0) {
        return Err(MsdError::Probability(p_single));
    }
    if target < 1 {
        return Err(MsdError::Invalid("target must be at least 1".into()));
    }
    if !(fail_budget > 0.0 && fail_budget < 1.0) {
        return Err(MsdError::Invalid(format!("fail budget {fail_budget} outside (0, 1)")));
    }
    let ln_budget = fail_budget.ln();
    let tail = |m: u64| ln_binomial_cdf(m, p_single, target - 1);
    // tail(target - 1) = 0 > ln_budget, so the answer lies above it.
    let mut lo = target - 1;
    let mut hi = target;
    while tail(hi) > ln_budget {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| MsdError::Invalid("copy count overflows u64".into()))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) > ln_budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CopiesReport { m: hi, ln_exact_tail: tail(hi), chain: BoundChain::evaluate(p_single, target, hi) })
}

/// Rounds up, treating values within 1e-9 of an integer as that integer.
fn ceil_tolerant(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// `ceil(ln(1/target)^gamma)`.
pub fn n_noisy_inputs(target_eps_out: f64, gamma: f64) -> Result<u64> {
    if !(target_eps_out > 0.0 && target_eps_out < 1.0) {
        return Err(MsdError::Target(format!("target {target_eps_out} outside (0, 1)")));
    }
    Ok(ceil_tolerant((-target_eps_out.ln()).powf(gamma)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YStateReport {
    pub n: u64,
    pub target_eps_prime: f64,
    pub n_y: u64,
    /// `2^(-N_Y)`.
    pub p_s: f64,
    pub log2_n: f64,
    /// Whether `N_Y < log2 n`, which makes `P_s >= 1/n`.
    pub n_y_below_log_n: bool,
    /// `(1/n) (1 - eps')^(log2 n)`.
    pub corrected_bound: f64,
    /// `corrected_bound * n`.
    pub ratio_to_inverse_n: f64,
}

/// Ancilla count and success bounds for Y-state distillation at output
/// infidelity `target_eps_prime`.
pub fn y_state_requirements(n: u64, target_eps_prime: f64) -> Result<YStateReport> {
    if n < 2 {
        return Err(MsdError::Invalid("problem size n must be at least 2".into()));
    }
    let n_y = n_noisy_inputs(target_eps_prime, Y_GAMMA)?;
    let log2_n = (n as f64).log2();
    let ratio = (1.0 - target_eps_prime).powf(log2_n);
    Ok(YStateReport {
        n,
        target_eps_prime,
        n_y,
        p_s: success_probability_bound(n_y as f64),
        log2_n,
        n_y_below_log_n: (n_y as f64) < log2_n,
        corrected_bound: ratio / n as f64,
        ratio_to_inverse_n: ratio,
    })
}
