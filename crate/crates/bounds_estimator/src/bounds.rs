use serde::{Deserialize, Serialize};

use crate::formula::{Ledger, Record};
use crate::{BoundsError, Result};

/// Decay per unit walk length assumed when choosing L_m: L_m = alpha ln n
/// with `SAW_DECAY_EXPONENT * alpha` exceeding the polynomial degree.
pub const SAW_DECAY_EXPONENT: f64 = 0.06;

fn domain(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(BoundsError::Domain(msg()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChooseL {
    pub l: f64,
    /// `sqrt(l) - (1 + delta) ln(k n)`; positive when the degree check passes.
    pub margin: f64,
    pub records: Vec<Record>,
}

/// Block size `l = ceil(r ln^2 n)`, checked numerically against
/// `e^sqrt(l) > (k n)^(1 + delta)`.
pub fn choose_l(n: f64, k: f64, r: f64, delta: f64) -> Result<ChooseL> {
    domain(n >= 2.0 && k > 0.0 && r > 0.0 && delta >= 0.0, || format!("choose_l needs n >= 2, k > 0, r > 0, delta >= 0 (n={n}, k={k}, r={r}, delta={delta})"))?;
    let mut led = Ledger::new();
    led.bind("n", n).bind("k", k).bind("r", r).bind("delta", delta);
    let l = led.add("l", "ceil(r * math::ln(n)^2.0)")?;
    let sqrt_l = led.add("sqrt_l", "math::sqrt(l)")?;
    let rhs = led.add("degree_rhs", "(1.0 + delta) * math::ln(k * n)")?;
    let margin = led.add("margin", "sqrt_l - degree_rhs")?;
    if margin <= 0.0 {
        return Err(BoundsError::DegreeCheck { l, sqrt_l, rhs });
    }
    Ok(ChooseL { l, margin, records: led.into_records() })
}

/// An exact failure expression and its linearised (union-bound) form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCoarse {
    pub exact: f64,
    pub coarse: f64,
    pub records: Vec<Record>,
}

fn l1_from_q(led: &mut Ledger) -> Result<ExactCoarse> {
    let exact = led.add("l1_exact", "2.0 * -expm1(count * ln1p(-q))")?;
    let coarse = led.add("l1_linearized", "2.0 * count * q")?;
    Ok(ExactCoarse { exact, coarse, records: led.records.clone() })
}

/// `2(1 - (1 - q)^count)` and `2 count q` for a per-qubit failure `q`.
pub fn appendix_a_from_q(q: f64, count: f64) -> Result<ExactCoarse> {
    domain((0.0..=1.0).contains(&q) && count >= 0.0, || format!("need q in [0, 1] and count >= 0 (q={q}, count={count})"))?;
    let mut led = Ledger::new();
    led.bind("q", q).bind("count", count);
    l1_from_q(&mut led)
}

/// Decoding-failure l1 bound over `k n` logical qubits with `q = e^(-c sqrt l)`.
pub fn appendix_a_l1_bound(n: f64, k: f64, l: f64, c: f64) -> Result<ExactCoarse> {
    domain(c > 0.0 && n > 0.0 && k > 0.0 && l >= 0.0, || format!("need c, n, k > 0 and l >= 0 (n={n}, k={k}, l={l}, c={c})"))?;
    let mut led = Ledger::new();
    led.bind("n", n).bind("k", k).bind("l", l).bind("c", c);
    led.add("q", "math::exp(-c * math::sqrt(l))")?;
    led.add("count", "k * n")?;
    l1_from_q(&mut led)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BChain {
    pub decode: f64,
    pub decode_coarse: f64,
    pub fidelity: f64,
    pub fidelity_coarse: f64,
    pub total: f64,
    pub total_coarse: f64,
    pub records: Vec<Record>,
}

/// Decode term, magic-state fidelity term and their sum, given the
/// per-logical decode failure `q` directly.
pub fn appendix_b_l1_chain_q(q: f64, eps_out: f64, num_t: f64, num_logical: f64) -> Result<BChain> {
    domain((0.0..1.0).contains(&eps_out), || format!("eps_out must lie in [0, 1), got {eps_out}"))?;
    domain((0.0..=1.0).contains(&q) && num_t >= 0.0 && num_logical >= 0.0, || "need q in [0, 1] and nonnegative counts".into())?;
    let mut led = Ledger::new();
    led.bind("q", q).bind("eps_out", eps_out).bind("num_t", num_t).bind("num_logical", num_logical);
    let decode = led.add("decode", "2.0 * -expm1(num_logical * ln1p(-q))")?;
    let decode_coarse = led.add("decode_linearized", "2.0 * num_logical * q")?;
    let fidelity = led.add("fidelity", "2.0 * math::sqrt(-expm1(2.0 * num_t * ln1p(-eps_out)))")?;
    let fidelity_coarse = led.add("fidelity_linearized", "2.0 * math::sqrt(2.0 * num_t * eps_out)")?;
    let total = led.add("total", "decode + fidelity")?;
    let total_coarse = led.add("total_linearized", "decode_linearized + fidelity_linearized")?;
    Ok(BChain { decode, decode_coarse, fidelity, fidelity_coarse, total, total_coarse, records: led.into_records() })
}

/// Same with `q = e^(-c sqrt l)`.
pub fn appendix_b_l1_chain(l: f64, c: f64, eps_out: f64, num_t: f64, num_logical: f64) -> Result<BChain> {
    domain(c > 0.0 && l >= 0.0, || format!("need c > 0 and l >= 0 (l={l}, c={c})"))?;
    appendix_b_l1_chain_q((-c * l.sqrt()).exp(), eps_out, num_t, num_logical)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SawBound {
    /// Geometric ratio `sqrt(100 q)` per unit walk length.
    pub ratio: f64,
    /// `P sum_{L=L_m}^{L_max} 6 5^(L-1) (4q)^(L/2)` in closed form.
    pub exact: f64,
    /// Infinite tail `P (6/5)(100 q)^(L_m/2) / (1 - sqrt(100 q))`.
    pub coarse: f64,
    pub records: Vec<Record>,
}

/// Union bound over self-avoiding walks of length at least `l_m` starting
/// at any of `num_sites` sites. `l_max = None` sums to infinity.
pub fn saw_failure_bound(q: f64, l_m: f64, num_sites: f64, l_max: Option<f64>) -> Result<SawBound> {
    domain(q >= 0.0 && l_m >= 1.0 && num_sites >= 0.0, || format!("need q >= 0, L_m >= 1, sites >= 0 (q={q}, L_m={l_m})"))?;
    if 100.0 * q >= 1.0 {
        return Err(BoundsError::Divergent((100.0 * q).sqrt()));
    }
    let mut led = Ledger::new();
    led.bind("q", q).bind("l_m", l_m).bind("num_sites", num_sites);
    let ratio = led.add("ratio", "math::sqrt(100.0 * q)")?;
    let coarse = led.add("tail_bound", "num_sites * 1.2 * (100.0 * q)^(l_m / 2.0) / (1.0 - math::sqrt(100.0 * q))")?;
    let exact = match l_max {
        Some(top) => {
            domain(top >= l_m, || format!("L_max {top} below L_m {l_m}"))?;
            led.bind("l_max", top);
            led.add("finite_sum", "num_sites * 1.2 * ratio^l_m * -expm1((l_max - l_m + 1.0) * math::ln(ratio)) / (1.0 - ratio)")?
        }
        None => led.add("finite_sum", "num_sites * 1.2 * ratio^l_m / (1.0 - ratio)")?,
    };
    Ok(SawBound { ratio, exact, coarse, records: led.into_records() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmChoice {
    pub alpha: f64,
    pub l_m: f64,
    pub records: Vec<Record>,
}

/// `alpha = (degree + 1) / 0.06`, `L_m = ceil(alpha ln n)`.
pub fn lm_for_target(n: f64, poly_degree: f64) -> Result<LmChoice> {
    domain(poly_degree >= 0.0 && n > 1.0, || format!("need degree >= 0 and n > 1 (n={n}, degree={poly_degree})"))?;
    let mut led = Ledger::new();
    led.bind("n", n).bind("degree", poly_degree).bind("decay", SAW_DECAY_EXPONENT);
    let alpha = led.add("alpha", "(degree + 1.0) / decay")?;
    let l_m = led.add("l_m", "ceil(alpha * math::ln(n))")?;
    Ok(LmChoice { alpha, l_m, records: led.into_records() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// `q = p^(4^-(d+1))`.
    PowerLaw,
    /// `q = 4 p^(4^-(d+1))`.
    FourTimesPowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub ln_p: f64,
    /// Underflows to 0 for realistic depths.
    pub p: f64,
    /// `-4.6 * 4^(-d-1)`, the crude form as printed.
    pub printed_crude_ln_p: f64,
    /// `-4.6 * 4^(d+1)`, the same estimate with the exponent's sign flipped.
    pub sign_corrected_crude_ln_p: f64,
    pub records: Vec<Record>,
}

/// Physical error rate `p` that pushes to logical-level rate `q_target`
/// through a depth-`d_total` circuit.
pub fn threshold_backsolve(q_target: f64, d_total: f64, mode: ThresholdMode) -> Result<Threshold> {
    domain(q_target > 0.0 && q_target < 1.0 && d_total >= 0.0, || format!("need 0 < q < 1 and d >= 0 (q={q_target}, d={d_total})"))?;
    let mut led = Ledger::new();
    led.bind("q", q_target).bind("d", d_total);
    let ln_p = match mode {
        ThresholdMode::PowerLaw => led.add("ln_p", "4.0^(d + 1.0) * math::ln(q)")?,
        ThresholdMode::FourTimesPowerLaw => led.add("ln_p", "4.0^(d + 1.0) * math::ln(q / 4.0)")?,
    };
    let p = led.add("p", "math::exp(ln_p)")?;
    let printed_crude_ln_p = led.add("printed_crude_ln_p", "-4.6 * 4.0^(-d - 1.0)")?;
    let sign_corrected_crude_ln_p = led.add("sign_corrected_crude_ln_p", "-4.6 * 4.0^(d + 1.0)")?;
    Ok(Threshold { ln_p, p, printed_crude_ln_p, sign_corrected_crude_ln_p, records: led.into_records() })
}
