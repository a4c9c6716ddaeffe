use rand::Rng;

use crate::clifford::conjugate_in_place;
use crate::{CliffordCircuit, CliffordLayer, Gate, Pauli, PauliError, PauliString, Phase, Result};

/// Stabilizer state as `2n` Hermitian generator rows: `rows[..n]` are the
/// destabilizers and `rows[n..]` the stabilizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    rows: Vec<PauliString>,
}

/// Result of a Pauli measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    /// `false` for eigenvalue +1.
    pub outcome: bool,
    /// Whether the outcome was a fair coin rather than fixed by the state.
    pub random: bool,
}

impl StabilizerState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, Pauli::X).unwrap());
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, Pauli::Z).unwrap());
        }
        StabilizerState { n, rows }
    }

    /// `∏_{(a,b)∈E} CZ_ab |+⟩^{⊗n}`.
    pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut s = Self::zero(n);
        for q in 0..n {
            s.apply_gate(&Gate::H(q))?;
        }
        for &(a, b) in edges {
            s.apply_gate(&Gate::Cz(a, b))?;
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.rows[..self.n]
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for q in gate.sites() {
            if q >= self.n {
                return Err(PauliError::SiteOutOfRange { index: q, num_qubits: self.n });
            }
        }
        for row in &mut self.rows {
            conjugate_in_place(gate, row);
        }
        Ok(())
    }

    pub fn apply_layer(&mut self, layer: &CliffordLayer) -> Result<()> {
        if layer.num_qubits() != self.n {
            return Err(PauliError::WidthMismatch { expected: self.n, found: layer.num_qubits() });
        }
        for row in &mut self.rows {
            for g in layer.gates() {
                conjugate_in_place(g, row);
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &CliffordCircuit) -> Result<()> {
        for l in circuit.layers() {
            self.apply_layer(l)?;
        }
        Ok(())
    }

    /// Multiplies the state by a Pauli operator (flips signs of anticommuting rows).
    pub fn apply_pauli(&mut self, pauli: &PauliString) -> Result<()> {
        if pauli.num_qubits() != self.n {
            return Err(PauliError::WidthMismatch { expected: self.n, found: pauli.num_qubits() });
        }
        for row in &mut self.rows {
            if !row.commutes_with(pauli) {
                row.flip_sign();
            }
        }
        Ok(())
    }

    fn check_observable(&self, obs: &PauliString) -> Result<()> {
        if obs.num_qubits() != self.n {
            return Err(PauliError::WidthMismatch { expected: self.n, found: obs.num_qubits() });
        }
        if !obs.is_hermitian() {
            return Err(PauliError::NonHermitian);
        }
        Ok(())
    }

    /// Outcome bit of `obs` if it lies in `±` the stabilizer group, else `None`.
    pub fn expectation(&self, obs: &PauliString) -> Result<Option<bool>> {
        self.check_observable(obs)?;
        if self.stabilizers().iter().any(|s| !s.commutes_with(obs)) {
            return Ok(None);
        }
        Ok(Some(self.deterministic_outcome(obs)))
    }

    fn deterministic_outcome(&self, obs: &PauliString) -> bool {
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if !self.rows[i].commutes_with(obs) {
                acc.mul_assign_right(&self.rows[i + self.n]);
            }
        }
        acc.phase() != obs.phase()
    }

    /// Measures `obs`, drawing a fair coin from `rng` when the outcome is random.
    pub fn measure<R: Rng + ?Sized>(&mut self, obs: &PauliString, rng: &mut R) -> Result<Measurement> {
        self.check_observable(obs)?;
        let coin = self.stabilizers().iter().any(|s| !s.commutes_with(obs)).then(|| rng.gen::<bool>());
        self.measure_inner(obs, coin.unwrap_or(false))
    }

    /// Measures `obs`, choosing `forced` whenever the outcome is random.
    pub fn measure_forced(&mut self, obs: &PauliString, forced: bool) -> Result<Measurement> {
        self.check_observable(obs)?;
        self.measure_inner(obs, forced)
    }

    fn measure_inner(&mut self, obs: &PauliString, coin: bool) -> Result<Measurement> {
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&i| !self.rows[i].commutes_with(obs)) else {
            return Ok(Measurement { outcome: self.deterministic_outcome(obs), random: false });
        };
        let pivot = self.rows[p].clone();
        for i in 0..2 * n {
            if i != p && !self.rows[i].commutes_with(obs) {
                self.rows[i].mul_assign_right(&pivot);
            }
        }
        self.rows[p - n] = pivot;
        let mut new_stab = obs.clone();
        if coin {
            new_stab.flip_sign();
        }
        self.rows[p] = new_stab;
        Ok(Measurement { outcome: coin, random: true })
    }

    /// True when both tableaux describe the same state.
    pub fn same_state(&self, other: &StabilizerState) -> bool {
        self.n == other.n
            && other.stabilizers().iter().all(|s| {
                let mut plain = s.clone();
                plain.set_phase(Phase::ONE);
                match self.expectation(&plain) {
                    Ok(Some(bit)) => bit == (s.phase() == Phase::MINUS_ONE),
                    _ => false,
                }
            })
    }
}

/// Functional form of [`StabilizerState::apply_layer`].
pub fn apply_clifford(state: &StabilizerState, layer: &CliffordLayer) -> Result<StabilizerState> {
    let mut out = state.clone();
    out.apply_layer(layer)?;
    Ok(out)
}

/// Functional form of [`StabilizerState::measure`].
pub fn measure_pauli<R: Rng + ?Sized>(
    state: &StabilizerState,
    observable: &PauliString,
    rng: &mut R,
) -> Result<(bool, StabilizerState)> {
    let mut out = state.clone();
    let m = out.measure(observable, rng)?;
    Ok((m.outcome, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn plus_state_from_hadamards() {
        let mut s = StabilizerState::zero(3);
        s.apply_layer(&CliffordLayer::new(3, vec![Gate::H(0), Gate::H(1), Gate::H(2)]).unwrap()).unwrap();
        for q in 0..3 {
            let mut x = PauliString::identity(3);
            x.set(q, Pauli::X);
            assert_eq!(s.expectation(&x).unwrap(), Some(false));
        }
    }

    #[test]
    fn single_edge_graph_state() {
        let s = StabilizerState::graph_state(2, &[(0, 1)]).unwrap();
        assert_eq!(s.expectation(&p("XZ")).unwrap(), Some(false));
        assert_eq!(s.expectation(&p("ZX")).unwrap(), Some(false));
        assert_eq!(s.expectation(&p("-XZ")).unwrap(), Some(true));
        assert_eq!(s.expectation(&p("ZI")).unwrap(), None);
    }

    #[test]
    fn z_on_zero_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (bit, after) = measure_pauli(&StabilizerState::zero(1), &p("Z"), &mut rng).unwrap();
        assert!(!bit);
        assert!(after.same_state(&StabilizerState::zero(1)));
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let s = StabilizerState::zero(1);
        assert_eq!(s.expectation(&p("+iZ")), Err(PauliError::NonHermitian));
    }

    #[test]
    fn repeated_measurement_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = StabilizerState::graph_state(3, &[(0, 1), (1, 2)]).unwrap();
        let obs = p("ZIZ");
        let first = s.measure(&obs, &mut rng).unwrap();
        assert!(first.random);
        let second = s.measure(&obs, &mut rng).unwrap();
        assert!(!second.random);
        assert_eq!(first.outcome, second.outcome);
    }

    #[test]
    fn apply_pauli_flips_expectation() {
        let mut s = StabilizerState::zero(2);
        s.apply_pauli(&p("XI")).unwrap();
        assert_eq!(s.expectation(&p("ZI")).unwrap(), Some(true));
        assert_eq!(s.expectation(&p("IZ")).unwrap(), Some(false));
    }
}
