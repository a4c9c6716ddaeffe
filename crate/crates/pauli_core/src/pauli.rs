use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{PauliError, Result};

/// Single-qubit Pauli operator (Hermitian representative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase `i^k` with `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    fn token(self) -> &'static str {
        ["+", "+i", "-", "-i"][self.0 as usize]
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// An `n`-qubit Pauli operator `i^k P_0 ⊗ … ⊗ P_{n-1}` stored in symplectic form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        let w = words_for(num_qubits);
        PauliString { num_qubits, x: vec![0; w], z: vec![0; w], phase: Phase::ONE }
    }

    /// Builds a string from `(site, pauli)` pairs; later entries overwrite earlier ones.
    pub fn from_sparse(num_qubits: usize, terms: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(num_qubits);
        for &(q, op) in terms {
            p.check_site(q)?;
            p.set(q, op);
        }
        Ok(p)
    }

    pub fn single(num_qubits: usize, site: usize, op: Pauli) -> Result<Self> {
        Self::from_sparse(num_qubits, &[(site, op)])
    }

    pub fn from_paulis(ops: &[Pauli]) -> Self {
        let mut p = Self::identity(ops.len());
        for (q, &op) in ops.iter().enumerate() {
            p.set(q, op);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub(crate) fn check_site(&self, q: usize) -> Result<()> {
        if q < self.num_qubits {
            Ok(())
        } else {
            Err(PauliError::SiteOutOfRange { index: q, num_qubits: self.num_qubits })
        }
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / WORD, q % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((z as u64) << b);
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Overwrites the Pauli factor on `q` without touching the global phase.
    pub fn set(&mut self, q: usize, op: Pauli) {
        let (x, z) = op.bits();
        self.set_bits(q, x, z);
    }

    pub fn flip_sign(&mut self) {
        self.phase = self.phase * Phase::MINUS_ONE;
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// True when the operator part is the identity (the phase may differ from +1).
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.num_qubits, other.num_qubits, "width mismatch");
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        acc == 0
    }

    /// Checked product `self · other`.
    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.num_qubits != other.num_qubits {
            return Err(PauliError::WidthMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// In place `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        assert_eq!(self.num_qubits, other.num_qubits, "width mismatch");
        let mut k = self.phase.0 as i64 + other.phase.0 as i64;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            if (x1 | z1) & (x2 | z2) != 0 {
                k += phase_exponent_word(x1, z1, x2, z2);
            }
            self.x[i] = x1 ^ x2;
            self.z[i] = z1 ^ z2;
        }
        self.phase = Phase::from_exponent(k);
    }

    /// In place `self ← other · self`.
    pub fn mul_assign_left(&mut self, other: &PauliString) {
        let mut out = other.clone();
        out.mul_assign_right(self);
        *self = out;
    }

    pub fn inverse(&self) -> PauliString {
        let mut out = self.clone();
        out.phase = Phase::from_exponent(-(self.phase.0 as i64));
        out
    }

    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut out = PauliString::identity(self.num_qubits + other.num_qubits);
        for q in 0..self.num_qubits {
            out.set(q, self.get(q));
        }
        for q in 0..other.num_qubits {
            out.set(self.num_qubits + q, other.get(q));
        }
        out.phase = self.phase * other.phase;
        out
    }

    /// Restriction to the listed sites, keeping the phase.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        let mut out = PauliString::identity(sites.len());
        for (i, &q) in sites.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out.phase = self.phase;
        out
    }
}

/// Sum over the qubits of one word of the exponent `g` with
/// `P(x1,z1) P(x2,z2) = i^g P(x1^x2, z1^z2)`.
fn phase_exponent_word(x1: u64, z1: u64, x2: u64, z2: u64) -> i64 {
    // g = +1 on the cyclic pairs XY, YZ, ZX and -1 on YX, ZY, XZ.
    let xs = x1 & !z1;
    let ys = x1 & z1;
    let zs = !x1 & z1;
    let x2s = x2 & !z2;
    let y2s = x2 & z2;
    let z2s = !x2 & z2;
    let plus = (xs & y2s) | (ys & z2s) | (zs & x2s);
    let minus = (ys & x2s) | (zs & y2s) | (xs & z2s);
    plus.count_ones() as i64 - minus.count_ones() as i64
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign_right(rhs);
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::ONE {
            f.write_str(self.phase.token())?;
        }
        for q in 0..self.num_qubits {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({}{})", self.phase.token(), self.body())
    }
}

impl PauliString {
    fn body(&self) -> String {
        (0..self.num_qubits).map(|q| self.get(q).to_char()).collect()
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        if body.is_empty() {
            return Err(PauliError::Parse("empty Pauli string".into()));
        }
        let ops = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(PauliError::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_paulis(&ops).with_phase(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(&p("X") * &p("Y"), p("+iZ"));
        assert_eq!(&p("Y") * &p("X"), p("-iZ"));
        assert_eq!(&p("Z") * &p("X"), p("+iY"));
        assert_eq!(&p("X") * &p("Z"), p("-iY"));
        assert_eq!(&p("Y") * &p("Z"), p("+iX"));
        assert_eq!(&p("Y") * &p("Y"), p("I"));
    }

    #[test]
    fn text_round_trip() {
        for s in ["-XIZ", "+iYY", "-iZ", "IIII", "XYZI"] {
            let q = p(s);
            let again: PauliString = q.to_string().parse().unwrap();
            assert_eq!(q, again);
        }
        assert_eq!(p("-XIZ").to_string(), "-XIZ");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn support_and_weight() {
        let q = p("IXIZY");
        assert_eq!(q.support(), vec![1, 3, 4]);
        assert_eq!(q.weight(), 3);
        assert!(p("-III").is_identity());
    }

    #[test]
    fn wide_strings_cross_word_boundary() {
        let mut a = PauliString::identity(130);
        a.set(0, Pauli::X);
        a.set(129, Pauli::Y);
        let mut b = PauliString::identity(130);
        b.set(129, Pauli::X);
        assert!(!a.commutes_with(&b));
        let c = &a * &b;
        assert_eq!(c.get(129), Pauli::Z);
        assert_eq!(c.phase(), Phase::MINUS_I);
    }

    #[test]
    fn inverse_gives_identity() {
        let q = p("+iXYZ");
        let r = &q * &q.inverse();
        assert!(r.is_identity());
        assert_eq!(r.phase(), Phase::ONE);
    }
}
