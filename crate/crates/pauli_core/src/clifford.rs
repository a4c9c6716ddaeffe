use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{PauliError, PauliString, Result};

/// A placed gate from the fixed alphabet {H, S, Pauli, CZ, CNOT, SWAP}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    /// `S = diag(1, i)`.
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cz(usize, usize),
    /// `Cnot(control, target)`.
    Cnot(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn sites(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::Cz(a, b) | Gate::Cnot(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cz(..) | Gate::Cnot(..) | Gate::Swap(..))
    }

    fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::Cz(..) => "CZ",
            Gate::Cnot(..) => "CNOT",
            Gate::Swap(..) => "SWAP",
        }
    }

    fn parse(token: &str) -> Result<Gate> {
        let mut parts = token.split_whitespace();
        let name = parts.next().ok_or_else(|| PauliError::Parse("empty gate".into()))?;
        let sites = parts
            .map(|s| s.parse::<usize>().map_err(|e| PauliError::Parse(format!("bad site {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let one = |f: fn(usize) -> Gate| match sites.as_slice() {
            [q] => Ok(f(*q)),
            _ => Err(PauliError::Parse(format!("{name} takes one site"))),
        };
        let two = |f: fn(usize, usize) -> Gate| match sites.as_slice() {
            [a, b] => Ok(f(*a, *b)),
            _ => Err(PauliError::Parse(format!("{name} takes two sites"))),
        };
        match name {
            "H" => one(Gate::H),
            "S" => one(Gate::S),
            "X" => one(Gate::X),
            "Y" => one(Gate::Y),
            "Z" => one(Gate::Z),
            "CZ" => two(Gate::Cz),
            "CNOT" | "CX" => two(Gate::Cnot),
            "SWAP" => two(Gate::Swap),
            other => Err(PauliError::Parse(format!("unknown gate {other:?}"))),
        }
    }

    fn check(&self, num_qubits: usize) -> Result<()> {
        let sites = self.sites();
        for &q in &sites {
            if q >= num_qubits {
                return Err(PauliError::SiteOutOfRange { index: q, num_qubits });
            }
        }
        if sites.len() == 2 && sites[0] == sites[1] {
            return Err(PauliError::RepeatedSite(sites[0]));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.sites() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// `U P U†` for a single placed gate.
pub fn conjugate_pauli(gate: &Gate, pauli: &PauliString) -> Result<PauliString> {
    gate.check(pauli.num_qubits())?;
    let mut out = pauli.clone();
    conjugate_in_place(gate, &mut out);
    Ok(out)
}

pub(crate) fn conjugate_in_place(gate: &Gate, p: &mut PauliString) {
    match *gate {
        Gate::H(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            if x && z {
                p.flip_sign();
            }
            p.set_bits(q, z, x);
        }
        Gate::S(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            if x && z {
                p.flip_sign();
            }
            p.set_bits(q, x, z ^ x);
        }
        Gate::X(q) => {
            if p.z_bit(q) {
                p.flip_sign();
            }
        }
        Gate::Z(q) => {
            if p.x_bit(q) {
                p.flip_sign();
            }
        }
        Gate::Y(q) => {
            if p.x_bit(q) != p.z_bit(q) {
                p.flip_sign();
            }
        }
        Gate::Cnot(a, b) => {
            let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
            if xa && zb && (xb == za) {
                p.flip_sign();
            }
            p.set_bits(b, xb ^ xa, zb);
            p.set_bits(a, xa, za ^ zb);
        }
        Gate::Cz(a, b) => {
            let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
            if xa && xb && (za != zb) {
                p.flip_sign();
            }
            p.set_bits(a, xa, za ^ xb);
            p.set_bits(b, xb, zb ^ xa);
        }
        Gate::Swap(a, b) => {
            let (pa, pb) = (p.get(a), p.get(b));
            p.set(a, pb);
            p.set(b, pa);
        }
    }
}

/// Depth-one layer: no qubit is touched by two gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordLayer {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl CliffordLayer {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut used = BTreeSet::new();
        for g in &gates {
            g.check(num_qubits)?;
            for q in g.sites() {
                if !used.insert(q) {
                    return Err(PauliError::OverlappingGates(q));
                }
            }
        }
        Ok(CliffordLayer { num_qubits, gates })
    }

    pub fn empty(num_qubits: usize) -> Self {
        CliffordLayer { num_qubits, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn conjugate(&self, pauli: &PauliString) -> Result<PauliString> {
        if pauli.num_qubits() != self.num_qubits {
            return Err(PauliError::WidthMismatch { expected: self.num_qubits, found: pauli.num_qubits() });
        }
        let mut out = pauli.clone();
        self.conjugate_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn conjugate_in_place(&self, p: &mut PauliString) {
        for g in &self.gates {
            conjugate_in_place(g, p);
        }
    }

    /// Layers whose product is the inverse of this layer. `S† = Z·S`, so a layer
    /// containing S gates inverts in two layers; every other gate is self-inverse.
    pub fn inverse(&self) -> CliffordCircuit {
        let zs: Vec<Gate> = self
            .gates
            .iter()
            .filter_map(|g| if let Gate::S(q) = g { Some(Gate::Z(*q)) } else { None })
            .collect();
        let mut layers = vec![self.clone()];
        if !zs.is_empty() {
            layers.push(CliffordLayer { num_qubits: self.num_qubits, gates: zs });
        }
        CliffordCircuit { num_qubits: self.num_qubits, layers }
    }
}

/// Ordered list of layers; `layers[0]` acts first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    num_qubits: usize,
    layers: Vec<CliffordLayer>,
}

impl CliffordCircuit {
    pub fn new(num_qubits: usize, layers: Vec<CliffordLayer>) -> Result<Self> {
        for l in &layers {
            if l.num_qubits != num_qubits {
                return Err(PauliError::WidthMismatch { expected: num_qubits, found: l.num_qubits });
            }
        }
        Ok(CliffordCircuit { num_qubits, layers })
    }

    pub fn empty(num_qubits: usize) -> Self {
        CliffordCircuit { num_qubits, layers: Vec::new() }
    }

    /// Packs gates greedily into the earliest layer after the last use of their sites.
    pub fn from_gates(num_qubits: usize, gates: &[Gate]) -> Result<Self> {
        let mut frontier = vec![0usize; num_qubits];
        let mut layers: Vec<Vec<Gate>> = Vec::new();
        for g in gates {
            g.check(num_qubits)?;
            let sites = g.sites();
            let depth = sites.iter().map(|&q| frontier[q]).max().unwrap_or(0);
            if depth == layers.len() {
                layers.push(Vec::new());
            }
            layers[depth].push(*g);
            for q in sites {
                frontier[q] = depth + 1;
            }
        }
        let layers = layers.into_iter().map(|gates| CliffordLayer { num_qubits, gates }).collect();
        Ok(CliffordCircuit { num_qubits, layers })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[CliffordLayer] {
        &self.layers
    }

    pub fn push(&mut self, layer: CliffordLayer) -> Result<()> {
        if layer.num_qubits != self.num_qubits {
            return Err(PauliError::WidthMismatch { expected: self.num_qubits, found: layer.num_qubits });
        }
        self.layers.push(layer);
        Ok(())
    }

    pub fn append(&mut self, other: &CliffordCircuit) -> Result<()> {
        for l in &other.layers {
            self.push(l.clone())?;
        }
        Ok(())
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    pub fn inverse(&self) -> CliffordCircuit {
        let mut out = CliffordCircuit::empty(self.num_qubits);
        for l in self.layers.iter().rev() {
            out.layers.extend(l.inverse().layers);
        }
        out
    }

    /// `U P U†` with `U = U_d … U_1`.
    pub fn conjugate(&self, pauli: &PauliString) -> Result<PauliString> {
        if pauli.num_qubits() != self.num_qubits {
            return Err(PauliError::WidthMismatch { expected: self.num_qubits, found: pauli.num_qubits() });
        }
        let mut out = pauli.clone();
        for l in &self.layers {
            l.conjugate_in_place(&mut out);
        }
        Ok(out)
    }

    /// Line-based text: a `qubits N` header, then one layer per line with
    /// gates separated by `;`. An empty line is an empty layer.
    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\n", self.num_qubits);
        for l in &self.layers {
            let line: Vec<String> = l.gates.iter().map(|g| g.to_string()).collect();
            s.push_str(&line.join("; "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| PauliError::Parse("missing header".into()))?;
        let num_qubits = header
            .trim()
            .strip_prefix("qubits")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| PauliError::Parse(format!("bad header {header:?}")))?;
        let mut layers = Vec::new();
        for line in lines {
            let gates = line
                .split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(Gate::parse)
                .collect::<Result<Vec<_>>>()?;
            layers.push(CliffordLayer::new(num_qubits, gates)?);
        }
        Ok(CliffordCircuit { num_qubits, layers })
    }
}

impl From<CliffordLayer> for CliffordCircuit {
    fn from(layer: CliffordLayer) -> Self {
        CliffordCircuit { num_qubits: layer.num_qubits, layers: vec![layer] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn hadamard_maps_x_to_z() {
        assert_eq!(conjugate_pauli(&Gate::H(0), &p("X")).unwrap(), p("Z"));
        assert_eq!(conjugate_pauli(&Gate::H(0), &p("Y")).unwrap(), p("-Y"));
    }

    #[test]
    fn cz_spreads_x() {
        assert_eq!(conjugate_pauli(&Gate::Cz(0, 1), &p("XI")).unwrap(), p("XZ"));
        assert_eq!(conjugate_pauli(&Gate::Cz(0, 1), &p("XX")).unwrap(), p("YY"));
    }

    #[test]
    fn s_and_cnot_tables() {
        assert_eq!(conjugate_pauli(&Gate::S(0), &p("X")).unwrap(), p("Y"));
        assert_eq!(conjugate_pauli(&Gate::S(0), &p("Y")).unwrap(), p("-X"));
        assert_eq!(conjugate_pauli(&Gate::Cnot(0, 1), &p("XI")).unwrap(), p("XX"));
        assert_eq!(conjugate_pauli(&Gate::Cnot(0, 1), &p("IZ")).unwrap(), p("ZZ"));
        assert_eq!(conjugate_pauli(&Gate::Swap(0, 1), &p("XZ")).unwrap(), p("ZX"));
    }

    #[test]
    fn out_of_range_site_is_rejected() {
        assert!(matches!(
            conjugate_pauli(&Gate::H(3), &p("XX")),
            Err(PauliError::SiteOutOfRange { index: 3, num_qubits: 2 })
        ));
    }

    #[test]
    fn layer_rejects_overlap() {
        assert!(CliffordLayer::new(3, vec![Gate::H(0), Gate::Cz(0, 1)]).is_err());
        assert!(CliffordLayer::new(3, vec![Gate::Cz(1, 1)]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let c = CliffordCircuit::new(
            6,
            vec![
                CliffordLayer::new(6, vec![Gate::H(3), Gate::Cz(2, 5)]).unwrap(),
                CliffordLayer::empty(6),
                CliffordLayer::new(6, vec![Gate::Cnot(0, 1), Gate::S(4), Gate::Y(2)]).unwrap(),
            ],
        )
        .unwrap();
        let text = c.to_text();
        assert!(text.contains("H 3; CZ 2 5"));
        assert_eq!(CliffordCircuit::from_text(&text).unwrap(), c);
    }

    #[test]
    fn greedy_packing() {
        let c = CliffordCircuit::from_gates(3, &[Gate::H(0), Gate::H(1), Gate::Cz(0, 1), Gate::H(2)]).unwrap();
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn inverse_conjugation_restores() {
        let c = CliffordCircuit::from_gates(3, &[Gate::S(0), Gate::H(1), Gate::Cnot(1, 2), Gate::S(2), Gate::Cz(0, 1)])
            .unwrap();
        let q = p("+iXYZ");
        let back = c.inverse().conjugate(&c.conjugate(&q).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn pauli_gate_signs() {
        assert_eq!(conjugate_pauli(&Gate::X(0), &p("Z")).unwrap(), p("-Z"));
        assert_eq!(conjugate_pauli(&Gate::Y(0), &p("Y")).unwrap(), p("Y"));
        assert_eq!(conjugate_pauli(&Gate::Z(0), &p("Y")).unwrap(), p("-Y"));
    }
}
