//! Dense state vectors over qubits.
//!
//! Amplitude index bit `k` holds the computational-basis value of qubit `k`
//! (qubit 0 is the least significant bit). Every constructor and operation
//! that returns a state returns it normalized.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the simulator will allocate (16 MiB of amplitudes).
pub const MAX_QUBITS: usize = 24;
/// Tolerance for single algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for accumulated pipelines (normalization checks, sums of probabilities).
pub const PIPELINE_TOL: f64 = 1e-10;
/// Projections below this probability are flagged instead of normalized.
pub const ZERO_PROBABILITY: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative sign of a cat state or overall sign of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// `true` for `Minus`.
    pub fn bit(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        Sign::from_bit(!self.bit())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    // ±1 values multiply as their bits add mod 2
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ rhs.bit())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// One elementary gate of the network builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::Cnot { .. } => "CNOT",
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::SameControlTarget(control));
            }
        }
        Ok(())
    }
}

/// Serialized form of a gate: `{"gate": "CNOT", "qubits": [control, target]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GateRecord {
    gate: String,
    qubits: Vec<usize>,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        GateRecord {
            gate: g.name().to_string(),
            qubits: g.qubits(),
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = String;

    fn try_from(r: GateRecord) -> std::result::Result<Self, String> {
        match (r.gate.as_str(), r.qubits.as_slice()) {
            ("H", &[q]) => Ok(Gate::H(q)),
            ("X", &[q]) => Ok(Gate::X(q)),
            ("Z", &[q]) => Ok(Gate::Z(q)),
            ("CNOT", &[control, target]) if control != target => Ok(Gate::Cnot { control, target }),
            (name, qs) => Err(format!("bad gate record {name} on {qs:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Orthonormal eigenbasis as `(+1 eigenvector, -1 eigenvector)`.
    pub fn eigenbasis(self) -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Pauli::I | Pauli::Z => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [
                [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            ],
            Pauli::Y => [
                [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
                [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
            ],
        }
    }
}

/// Tensor product of single-qubit Paulis with an overall sign.
/// Letter `k` acts on qubit `k`; displayed as e.g. `-XYY`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub sign: Sign,
    pub ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(sign: Sign, ops: Vec<Pauli>) -> Self {
        PauliString { sign, ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        for p in &self.ops {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest),
            None => (Sign::Plus, s.strip_prefix('+').unwrap_or(s)),
        };
        let ops = body
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidParameter(format!("bad Pauli string {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::InvalidParameter("empty Pauli string".into()));
        }
        Ok(PauliString { sign, ops })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Outcome of [`StateVector::project_subset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Normalized state of the remaining qubits, `None` when the projection
    /// has (numerically) zero probability.
    pub residual: Option<StateVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::NoQubits);
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: num_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Spreads the low bits of `value` onto the bit positions listed in `positions`.
#[inline]
fn deposit(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((value >> i) & 1) << p))
}

impl StateVector {
    /// Basis state from a bitstring read like a binary number: the rightmost
    /// character is qubit 0, so `"10"` sets qubit 1.
    pub fn new_basis_state(num_qubits: usize, bits: &str) -> Result<Self> {
        check_size(num_qubits)?;
        if bits.chars().count() != num_qubits {
            return Err(Error::LengthMismatch {
                expected: num_qubits,
                found: bits.chars().count(),
            });
        }
        let index = bits.chars().try_fold(0usize, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            _ => Err(Error::InvalidBits(bits.to_string())),
        })?;
        Self::basis(num_qubits, index)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        if index >> num_qubits != 0 {
            return Err(Error::InvalidBits(format!("index {index} for {num_qubits} qubits")));
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index] = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Basis state with `bits[k]` on qubit `k`.
    pub fn from_qubit_bits(bits: &[bool]) -> Result<Self> {
        let index = bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | ((b as usize) << k));
        Self::basis(bits.len(), index)
    }

    /// Takes amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let sv = Self::wrap(amps)?;
        let n = sv.norm_sqr();
        if (n - 1.0).abs() > PIPELINE_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(sv)
    }

    /// Takes any nonzero amplitude vector and rescales it to unit norm.
    pub fn from_unnormalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut sv = Self::wrap(amps)?;
        let n = sv.norm_sqr();
        if n <= ZERO_PROBABILITY {
            return Err(Error::NotNormalized(n));
        }
        sv.scale(1.0 / n.sqrt());
        Ok(sv)
    }

    fn wrap(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        check_size(num_qubits)?;
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn scale(&mut self, factor: f64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_size(self.num_qubits + other.num_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        })
    }

    /// Rearranges qubits so that old qubit `order[k]` becomes new qubit `k`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector> {
        self.check_subset(order)?;
        if order.len() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                found: order.len(),
            });
        }
        let mut amps = vec![ZERO; self.dim()];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            *slot = self.amps[deposit(new_index, order)];
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }

    pub fn apply_gate(&self, gate: Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub(crate) fn apply_gate_mut(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::H(q) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let bit = 1 << q;
                for i in 0..self.dim() {
                    if i & bit == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = (a + b) * h;
                        self.amps[i | bit] = (a - b) * h;
                    }
                }
            }
            Gate::X(q) => {
                let bit = 1 << q;
                for i in 0..self.dim() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Z(q) => {
                let bit = 1 << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in 0..self.dim() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the 2x2 matrix `u` (row-major) to qubit `q`.
    pub(crate) fn apply_single_qubit_mut(&mut self, q: usize, u: [[Complex64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        for i in 0..self.dim() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[i | bit] = u[1][0] * a + u[1][1] * b;
            }
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &q in subset {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.num_qubits).filter(|q| !subset.contains(q)).collect()
    }

    /// Applies `⟨projector|` to the qubits in `subset` (projector qubit `i`
    /// is matched with `subset[i]`). The remaining qubits keep their relative
    /// order and are renumbered from 0.
    pub fn project_subset(&self, subset: &[usize], projector: &StateVector) -> Result<Projection> {
        self.check_subset(subset)?;
        if subset.is_empty() || subset.len() >= self.num_qubits {
            return Err(Error::InvalidSubset(format!(
                "projection onto {} of {} qubits must leave a residual",
                subset.len(),
                self.num_qubits
            )));
        }
        if projector.num_qubits != subset.len() {
            return Err(Error::LengthMismatch {
                expected: subset.len(),
                found: projector.num_qubits,
            });
        }
        let rest = self.complement(subset);
        let terms: Vec<(usize, Complex64)> = projector
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(j, a)| (deposit(j, subset), a.conj()))
            .collect();

        let mut amps = vec![ZERO; 1 << rest.len()];
        for (r, slot) in amps.iter_mut().enumerate() {
            let base = deposit(r, &rest);
            *slot = terms.iter().map(|&(offset, c)| c * self.amps[base | offset]).sum();
        }
        let mut residual = StateVector {
            num_qubits: rest.len(),
            amps,
        };
        let probability = residual.norm_sqr();
        if probability <= ZERO_PROBABILITY {
            return Ok(Projection {
                probability: 0.0,
                residual: None,
            });
        }
        residual.scale(1.0 / probability.sqrt());
        Ok(Projection {
            probability,
            residual: Some(residual),
        })
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_of_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Deterministic branch of a computational-basis measurement of `q`.
    pub fn collapse(&self, q: usize, bit: bool) -> Result<Projection> {
        self.project_subset(&[q], &StateVector::basis(1, bit as usize)?)
    }

    /// Measures qubit `q` in the computational basis and removes it.
    pub fn measure_qubit<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(bool, StateVector)> {
        self.check_qubit(q)?;
        if self.num_qubits == 1 {
            return Err(Error::LastQubit);
        }
        let p1 = self.probability_of_one(q)?;
        let bit = rng.gen::<f64>() < p1;
        let projection = self.collapse(q, bit)?;
        // the sampled branch always has nonzero weight
        Ok((bit, projection.residual.expect("sampled branch has support")))
    }

    /// Measures qubit `q` in the computational basis and leaves it in place,
    /// collapsed to the observed value (intercept-resend).
    pub fn measure_and_keep<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(bool, StateVector)> {
        let p1 = self.probability_of_one(q)?;
        let bit = rng.gen::<f64>() < p1;
        let mask = 1 << q;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if ((i & mask) != 0) == bit { a } else { ZERO })
            .collect();
        Ok((bit, StateVector::from_unnormalized(amps)?))
    }

    /// Draws a basis index from the Born distribution.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut r = rng.gen::<f64>() * self.norm_sqr();
        for (i, a) in self.amps.iter().enumerate() {
            r -= a.norm_sqr();
            if r < 0.0 {
                return i;
            }
        }
        // rounding left r marginally positive: fall back to the last supported index
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }

    /// Von Neumann entropy (bits) of the reduced state of `subset`.
    pub fn subsystem_entropy(&self, subset: &[usize]) -> Result<f64> {
        self.check_subset(subset)?;
        if subset.is_empty() || subset.len() >= self.num_qubits {
            return Err(Error::InvalidSubset(format!(
                "entropy needs a nonempty proper subset, got {} of {} qubits",
                subset.len(),
                self.num_qubits
            )));
        }
        let rest = self.complement(subset);
        // both sides share a spectrum; diagonalize the smaller one
        let (kept, traced) = if subset.len() <= rest.len() {
            (subset.to_vec(), rest)
        } else {
            (rest, subset.to_vec())
        };
        let (dk, dt) = (1usize << kept.len(), 1usize << traced.len());
        let kept_offsets: Vec<usize> = (0..dk).map(|i| deposit(i, &kept)).collect();
        let traced_offsets: Vec<usize> = (0..dt).map(|j| deposit(j, &traced)).collect();
        let m = DMatrix::from_fn(dk, dt, |i, j| self.amps[kept_offsets[i] | traced_offsets[j]]);
        let rho = &m * m.adjoint();
        let eigen = SymmetricEigen::new(rho);
        Ok(eigen
            .eigenvalues
            .iter()
            .filter(|&&l| l > 1e-15)
            .map(|&l| -l * l.log2())
            .sum::<f64>()
            .max(0.0))
    }

    /// Real part of `⟨ψ|P|ψ⟩`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                found: p.len(),
            });
        }
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut y_count = 0u32;
        for (q, op) in p.ops.iter().enumerate() {
            match op {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Z => zmask |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    zmask |= 1 << q;
                    y_count += 1;
                }
            }
        }
        // Y = i X Z, so P|i⟩ = i^{#Y} (-1)^{popcount(i & zmask)} |i ^ flip⟩
        let global = Complex64::i().powu(y_count) * p.sign.value();
        let total: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let parity = if (i & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                self.amps[i ^ flip].conj() * a * parity
            })
            .sum();
        Ok((total * global).re)
    }

    /// Largest elementwise distance to `other`.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        if self.num_qubits != other.num_qubits {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `Σ_k bits[k] << k`: index of the basis state with `bits[k]` on qubit `k`.
pub fn ket_index(bits: &[bool]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | ((b as usize) << k))
}
