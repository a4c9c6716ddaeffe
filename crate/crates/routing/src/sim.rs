use graph_sampler::statevector::{hadamard, StateVector};
use num_complex::Complex64 as C;
use pauli_core::{seed, CliffordCircuit, Gate, Pauli, PauliString, StabilizerState};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::plan::{verify_isolated, Basis, RoutingPlan, WireFrameRule};
use crate::{Result, RoutingError};

/// Largest tableau the simulator will build.
pub const STABILIZER_BUDGET: usize = 4096;
/// Largest dense statevector the cross-check will build.
pub const STATEVECTOR_CAP: usize = 20;

/// The six single-qubit stabilizer states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl SourceState {
    pub const ALL: [SourceState; 6] = [Self::Zero, Self::One, Self::Plus, Self::Minus, Self::PlusI, Self::MinusI];

    /// Stabilizing Pauli and whether its sign is negative.
    pub fn stabilizer(self) -> (Pauli, bool) {
        match self {
            Self::Zero => (Pauli::Z, false),
            Self::One => (Pauli::Z, true),
            Self::Plus => (Pauli::X, false),
            Self::Minus => (Pauli::X, true),
            Self::PlusI => (Pauli::Y, false),
            Self::MinusI => (Pauli::Y, true),
        }
    }

    fn from_stabilizer(p: Pauli, negative: bool) -> Self {
        *Self::ALL.iter().find(|s| s.stabilizer() == (p, negative)).expect("non-identity Pauli")
    }

    /// Gates preparing the state from `|0⟩`.
    pub fn prep_gates(self, q: usize) -> Vec<Gate> {
        match self {
            Self::Zero => vec![],
            Self::One => vec![Gate::X(q)],
            Self::Plus => vec![Gate::H(q)],
            Self::Minus => vec![Gate::X(q), Gate::H(q)],
            Self::PlusI => vec![Gate::H(q), Gate::S(q)],
            Self::MinusI => vec![Gate::X(q), Gate::H(q), Gate::S(q)],
        }
    }

    pub fn amplitudes(self) -> [C; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        match self {
            Self::Zero => [o, z],
            Self::One => [z, o],
            Self::Plus => [o * h, o * h],
            Self::Minus => [o * h, -o * h],
            Self::PlusI => [o * h, C::i() * h],
            Self::MinusI => [o * h, -C::i() * h],
        }
    }

    /// `P|s⟩` as a state: the sign flips when `P` anticommutes with the stabilizer.
    pub fn after_pauli(self, p: Pauli) -> Self {
        let (s, neg) = self.stabilizer();
        let anti = p != Pauli::I && p != s;
        Self::from_stabilizer(s, neg ^ anti)
    }

    pub fn parse(text: &str) -> Option<Self> {
        Some(match text {
            "0" => Self::Zero,
            "1" => Self::One,
            "+" => Self::Plus,
            "-" => Self::Minus,
            "+i" => Self::PlusI,
            "-i" => Self::MinusI,
            _ => return None,
        })
    }
}

/// Byproduct on one wire output: the output holds `X^x Z^z H^h |ψ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Frame {
    pub x: bool,
    pub z: bool,
    pub hadamard: bool,
}

impl Frame {
    /// Gates undoing the byproduct on qubit `q`.
    pub fn correction(&self, q: usize) -> Vec<Gate> {
        let mut g = Vec::new();
        if self.x {
            g.push(Gate::X(q));
        }
        if self.z {
            g.push(Gate::Z(q));
        }
        if self.hadamard {
            g.push(Gate::H(q));
        }
        g
    }

    pub fn pauli(&self) -> Pauli {
        Pauli::from_bits(self.x, self.z)
    }
}

/// Folds the outcomes along a chain. `outcome[q]` is the bit of qubit `q`.
/// Each X step maps `φ ↦ X^s H φ`; each Z-measured neighbour contributes `Z^t`.
fn frame_for(rule: &WireFrameRule, outcome: &[bool]) -> Frame {
    let kick = |k: usize| rule.z_neighbors[k].iter().fold(false, |a, &u| a ^ outcome[u]);
    let (mut x, mut z) = (false, kick(0));
    for k in 1..rule.chain.len() {
        std::mem::swap(&mut x, &mut z);
        x ^= outcome[rule.chain[k - 1]];
        z ^= kick(k);
    }
    Frame { x, z, hadamard: rule.chain.len() % 2 == 0 }
}

/// One simulated branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingOutcome {
    /// Outcomes in measurement order (ascending qubit index, outputs skipped).
    pub outcomes: Vec<bool>,
    pub frames: Vec<Frame>,
    /// Corrected output states; `None` if an output is not a pure stabilizer state.
    pub outputs: Vec<Option<SourceState>>,
    /// Every corrected output equals its source's input.
    pub matches: bool,
}

fn check_plan(plan: &RoutingPlan, inputs: usize, cap: usize) -> Result<()> {
    if !verify_isolated(plan) {
        return Err(RoutingError::Invalid("paths must be disjoint, connected and mutually non-adjacent".into()));
    }
    if inputs != plan.grid.p {
        return Err(RoutingError::Inputs(format!("{inputs} source states for {} sources", plan.grid.p)));
    }
    let n = plan.grid.num_qubits();
    if n > cap {
        return Err(RoutingError::Budget { qubits: n, cap });
    }
    Ok(())
}

fn single(n: usize, q: usize, p: Pauli) -> PauliString {
    PauliString::single(n, q, p).expect("qubit in range")
}

fn run_tableau(plan: &RoutingPlan, inputs: &[SourceState], error: Option<&PauliString>, mut coin: impl FnMut(usize) -> bool) -> Result<RoutingOutcome> {
    check_plan(plan, inputs.len(), STABILIZER_BUDGET)?;
    let g = &plan.grid;
    let n = g.num_qubits();
    let sim_err = |e: pauli_core::PauliError| RoutingError::Invalid(e.to_string());
    let mut st = StabilizerState::zero(n);
    for (q, s) in inputs.iter().enumerate() {
        for gate in s.prep_gates(q) {
            st.apply_gate(&gate).map_err(sim_err)?;
        }
    }
    for q in g.p..n {
        st.apply_gate(&Gate::H(q)).map_err(sim_err)?;
    }
    if let Some(e) = error {
        st.apply_pauli(e).map_err(sim_err)?;
    }
    for (a, b) in g.edges() {
        st.apply_gate(&Gate::Cz(a, b)).map_err(sim_err)?;
    }
    let bases = plan.qubit_bases();
    let mut bits = vec![false; n];
    let mut outcomes = Vec::new();
    for (q, b) in bases.iter().enumerate() {
        let obs = match b {
            Basis::O => continue,
            Basis::X => single(n, q, Pauli::X),
            Basis::Z => single(n, q, Pauli::Z),
        };
        let forced = coin(outcomes.len());
        let m = st.measure_forced(&obs, forced).map_err(sim_err)?;
        bits[q] = m.outcome;
        outcomes.push(m.outcome);
    }
    let frames: Vec<Frame> = plan.frame_rules().iter().map(|r| frame_for(r, &bits)).collect();
    let mut outputs = Vec::with_capacity(frames.len());
    for (path, frame) in plan.paths.iter().zip(&frames) {
        let t = g.vertex_qubit(path.output().expect("nonempty path"));
        for gate in frame.correction(t) {
            st.apply_gate(&gate).map_err(sim_err)?;
        }
        let found = [Pauli::X, Pauli::Y, Pauli::Z].into_iter().find_map(|p| match st.expectation(&single(n, t, p)) {
            Ok(Some(neg)) => Some(SourceState::from_stabilizer(p, neg)),
            _ => None,
        });
        outputs.push(found);
    }
    let matches = plan.paths.iter().zip(&outputs).all(|(path, o)| *o == Some(inputs[path.source]));
    Ok(RoutingOutcome { outcomes, frames, outputs, matches })
}

/// Runs the routing on stabilizer inputs (one per source) with random outcomes.
pub fn simulate_routing<R: Rng + ?Sized>(plan: &RoutingPlan, inputs: &[SourceState], rng: &mut R) -> Result<RoutingOutcome> {
    run_tableau(plan, inputs, None, |_| rng.gen())
}

/// Same, with random outcomes taken from `forced` in measurement order.
pub fn simulate_routing_forced(plan: &RoutingPlan, inputs: &[SourceState], forced: &[bool]) -> Result<RoutingOutcome> {
    run_tableau(plan, inputs, None, |k| forced.get(k).copied().unwrap_or(false))
}

/// Routing with a Pauli `error` applied right after state preparation.
pub fn simulate_with_error(plan: &RoutingPlan, inputs: &[SourceState], error: &PauliString, forced: &[bool]) -> Result<RoutingOutcome> {
    run_tableau(plan, inputs, Some(error), |k| forced.get(k).copied().unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchReport {
    pub branches: usize,
    pub matched: usize,
}

/// Samples `branches` independent outcome strings in parallel.
pub fn simulate_branches(plan: &RoutingPlan, inputs: &[SourceState], branches: usize, master: u64) -> Result<BranchReport> {
    let matched = (0..branches)
        .into_par_iter()
        .map(|i| simulate_routing(plan, inputs, &mut seed::trial_rng(master, i as u64)).map(|o| o.matches as usize))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(BranchReport { branches, matched })
}

/// Depth-constant circuit after preparation: all CZs, then H on every
/// X-measured qubit so that every measurement reads in Z.
pub fn entangling_circuit(plan: &RoutingPlan) -> CliffordCircuit {
    let g = &plan.grid;
    // Five colour classes (source links, then even/odd horizontal and vertical
    // edges) so the greedy packing gives depth 5 for the CZs.
    let class = |(a, b): (usize, usize)| match (g.qubit_vertex(a), g.qubit_vertex(b)) {
        (None, _) => 0,
        (Some((r, c)), Some((r2, _))) if r == r2 => 1 + c % 2,
        (Some((r, _)), _) => 3 + r % 2,
    };
    let mut edges = g.edges();
    edges.sort_by_key(|&e| class(e));
    let mut gates: Vec<Gate> = edges.into_iter().map(|(a, b)| Gate::Cz(a, b)).collect();
    gates.extend(plan.qubit_bases().iter().enumerate().filter(|(_, &b)| b == Basis::X).map(|(q, _)| Gate::H(q)));
    CliffordCircuit::from_gates(g.num_qubits(), &gates).expect("gates in range")
}

/// Output error per wire, after correction, left by a Pauli `end_error`
/// sitting just before the measurements of [`entangling_circuit`].
pub fn residual_target_error(plan: &RoutingPlan, end_error: &PauliString) -> Vec<Pauli> {
    let bases = plan.qubit_bases();
    let flips: Vec<bool> = (0..plan.grid.num_qubits()).map(|q| bases[q] != Basis::O && end_error.x_bit(q)).collect();
    plan.frame_rules()
        .iter()
        .map(|rule| {
            let f = frame_for(rule, &flips);
            let t = *rule.chain.last().expect("nonempty chain");
            let (x, z) = (f.x ^ end_error.x_bit(t), f.z ^ end_error.z_bit(t));
            if f.hadamard {
                Pauli::from_bits(z, x)
            } else {
                Pauli::from_bits(x, z)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatevectorRouting {
    pub outcomes: Vec<bool>,
    /// Probability of this outcome string.
    pub probability: f64,
    pub frames: Vec<Frame>,
    /// `⟨ψ|ρ_out|ψ⟩` per wire after correction.
    pub fidelities: Vec<f64>,
}

/// Dense cross-check accepting arbitrary source states. Random outcomes are
/// drawn from `rng` unless `forced` supplies them.
pub fn simulate_routing_statevector<R: Rng + ?Sized>(
    plan: &RoutingPlan,
    inputs: &[[C; 2]],
    forced: Option<&[bool]>,
    rng: &mut R,
) -> Result<StatevectorRouting> {
    check_plan(plan, inputs.len(), STATEVECTOR_CAP)?;
    for s in inputs {
        if ((s[0].norm_sqr() + s[1].norm_sqr()) - 1.0).abs() > 1e-9 {
            return Err(RoutingError::Inputs("source states must be normalised".into()));
        }
    }
    let g = &plan.grid;
    let n = g.num_qubits();
    let plus = SourceState::Plus.amplitudes();
    let states: Vec<[C; 2]> = (0..n).map(|q| if q < g.p { inputs[q] } else { plus }).collect();
    let mut sv = StateVector::product(&states);
    for (a, b) in g.edges() {
        sv.apply_cz(a, b);
    }
    let h = hadamard();
    let mut bits = vec![false; n];
    let mut outcomes = Vec::new();
    let mut probability = 1.0;
    for (q, b) in plan.qubit_bases().iter().enumerate() {
        if *b == Basis::O {
            continue;
        }
        if *b == Basis::X {
            sv.apply_single(q, &h);
        }
        let p1 = sv.prob_one(q) / sv.norm_sqr();
        let bit = match forced {
            Some(f) => f.get(outcomes.len()).copied().unwrap_or(false),
            None => rng.gen::<f64>() < p1,
        };
        let kept = if bit { p1 } else { 1.0 - p1 };
        if kept < 1e-12 {
            return Err(RoutingError::Inputs(format!("forced outcome on qubit {q} has zero probability")));
        }
        probability *= kept;
        sv.project(q, bit);
        sv.normalize();
        bits[q] = bit;
        outcomes.push(bit);
    }
    let frames: Vec<Frame> = plan.frame_rules().iter().map(|r| frame_for(r, &bits)).collect();
    let mut fidelities = Vec::with_capacity(frames.len());
    for (path, frame) in plan.paths.iter().zip(&frames) {
        let t = g.vertex_qubit(path.output().expect("nonempty path"));
        for gate in frame.correction(t) {
            sv.apply_gate(&gate);
        }
        let rho = sv.reduced_qubit(t);
        let psi = inputs[path.source];
        let tr = (rho[0][0] + rho[1][1]).re;
        let mut f = C::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                f += psi[a].conj() * rho[a][b] * psi[b];
            }
        }
        fidelities.push(f.re / tr);
    }
    Ok(StatevectorRouting { outcomes, probability, frames, fidelities })
}
