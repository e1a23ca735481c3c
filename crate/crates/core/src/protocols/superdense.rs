//! Reading N senders through one cat-basis measurement.
//!
//! The receiver holds qubit 0 of an (N+1)-qubit GHZ and sender `i` holds
//! qubit `i + 1`. One sender may apply any of {I, X, Z, XZ} (two bits), the
//! others {I, X} (one bit). X on qubit `k` flips pattern bit `k` of the cat
//! and Z flips its sign, so every message lands on a different cat label.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::catalg::{cat_basis_on, cat_state, CatLabel};
use crate::circuits::{analyze_cat, cat_analyzer_circuit, gate_cost, Circuit};
use crate::error::{Error, Result};
use crate::qstate::Gate;
use crate::report::{Check, OutcomeRecord, ProtocolReport};

pub const MAX_SENDERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpSet {
    /// {I, X, Z, XZ}: first bit selects Z, second bit selects X.
    Four,
    /// {I, X}.
    Two,
}

impl OpSet {
    pub fn bits(self) -> usize {
        match self {
            OpSet::Four => 2,
            OpSet::Two => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperdenseAssignment {
    pub receiver: String,
    pub senders: Vec<String>,
    /// Operation set of each sender, parallel to `senders`.
    pub operations: Vec<OpSet>,
}

impl SuperdenseAssignment {
    /// Receiver `R`, senders `S1..SN`, the first sender holding the four-element set.
    pub fn standard(n: usize) -> Self {
        SuperdenseAssignment {
            receiver: "R".into(),
            senders: (1..=n).map(|i| format!("S{i}")).collect(),
            operations: (0..n).map(|i| if i == 0 { OpSet::Four } else { OpSet::Two }).collect(),
        }
    }

    pub fn num_senders(&self) -> usize {
        self.senders.len()
    }

    /// Index of the sender with the four-element set.
    pub fn designated(&self) -> usize {
        self.operations.iter().position(|&o| o == OpSet::Four).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.senders.len();
        if !(1..=MAX_SENDERS).contains(&n) {
            return Err(Error::range("N", n, 1, MAX_SENDERS));
        }
        if self.operations.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} senders but {} operation sets",
                n,
                self.operations.len()
            )));
        }
        let fours = self.operations.iter().filter(|&&o| o == OpSet::Four).count();
        if fours != 1 {
            return Err(Error::InvalidParameter(format!(
                "exactly one sender must hold the four-element set, found {fours}"
            )));
        }
        let mut names = HashSet::new();
        for name in std::iter::once(&self.receiver).chain(&self.senders) {
            if !names.insert(name) {
                return Err(Error::InvalidParameter(format!("participant {name} listed twice")));
            }
        }
        Ok(())
    }
}

/// Local operations for `message` (`N + 1` bits, senders in order).
pub fn encode_message(message: &[bool], assignment: &SuperdenseAssignment) -> Result<Vec<Gate>> {
    assignment.validate()?;
    let n = assignment.num_senders();
    if message.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            found: message.len(),
        });
    }
    let mut gates = Vec::new();
    let mut bits = message.iter();
    for (i, op) in assignment.operations.iter().enumerate() {
        let qubit = i + 1;
        if *op == OpSet::Four && *bits.next().unwrap() {
            gates.push(Gate::Z(qubit));
        }
        if *bits.next().unwrap() {
            gates.push(Gate::X(qubit));
        }
    }
    Ok(gates)
}

/// Inverts [`encode_message`] given the analyzer readout (`bits[0]` is the sign bit).
pub fn decode_message(bits: &[bool], assignment: &SuperdenseAssignment) -> Result<Vec<bool>> {
    let n = assignment.num_senders();
    if bits.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            found: bits.len(),
        });
    }
    let mut message = Vec::with_capacity(n + 1);
    for (i, op) in assignment.operations.iter().enumerate() {
        if *op == OpSet::Four {
            message.push(bits[0]);
        }
        message.push(bits[i + 1]);
    }
    Ok(message)
}

fn bits_text(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

struct Trip {
    label: CatLabel,
    decoded: Vec<bool>,
    encoder: Circuit,
}

fn transmit(message: &[bool], assignment: &SuperdenseAssignment) -> Result<Trip> {
    let n = assignment.num_senders();
    let qubits: Vec<usize> = (0..=n).collect();
    let gates = encode_message(message, assignment)?;
    let mut encoder = Circuit::new(n + 1);
    for g in &gates {
        encoder.push(*g)?;
    }
    let shared = cat_state(&CatLabel::ghz(qubits.clone())?)?;
    let (bits, label) = analyze_cat(&encoder.apply(&shared)?, &qubits)?;
    Ok(Trip {
        label,
        decoded: decode_message(&bits, assignment)?,
        encoder,
    })
}

/// Sends one message and decodes it.
pub fn superdense_roundtrip(message: &[bool], assignment: &SuperdenseAssignment) -> Result<(Vec<bool>, ProtocolReport)> {
    let trip = transmit(message, assignment)?;
    let n = assignment.num_senders();
    let mut report = ProtocolReport::new("superdense", "exhaustive");
    report.value("N", n);
    report.value("message", bits_text(message));
    report.value("decoded", bits_text(&trip.decoded));
    report.outcomes.push(OutcomeRecord::new(Some(trip.label.clone()), 1.0, None));
    report.check(Check::new(
        "decoded message",
        bits_text(message),
        bits_text(&trip.decoded),
        trip.decoded == message,
    ));
    report.circuits.push(trip.encoder);
    report.circuits.push(cat_analyzer_circuit(n + 1)?);
    Ok((trip.decoded, report))
}

/// Sends all `2^(N+1)` messages; checks decoding and that the labels are
/// exactly the cat basis.
pub fn superdense_exhaustive(assignment: &SuperdenseAssignment) -> Result<ProtocolReport> {
    assignment.validate()?;
    let n = assignment.num_senders();
    let mut report = ProtocolReport::new("superdense", "exhaustive");
    report.value("N", n);
    let mut errors = 0usize;
    let mut labels = BTreeSet::new();
    for m in 0..1usize << (n + 1) {
        let message: Vec<bool> = (0..=n).map(|k| (m >> (n - k)) & 1 == 1).collect();
        let trip = transmit(&message, assignment)?;
        errors += usize::from(trip.decoded != message);
        labels.insert(trip.label.clone());
        if n <= 3 {
            report.outcomes.push(
                OutcomeRecord::new(Some(trip.label), 1.0, None)
                    .detail("message", bits_text(&message))
                    .detail("decoded", bits_text(&trip.decoded)),
            );
        }
    }
    let total = 1usize << (n + 1);
    report.check(Check::new("decoding errors", "0", errors.to_string(), errors == 0));
    report.check(Check::new(
        "distinct cat labels",
        total.to_string(),
        labels.len().to_string(),
        labels.len() == total,
    ));
    let basis: BTreeSet<CatLabel> = cat_basis_on(&(0..=n).collect::<Vec<_>>()).into_iter().collect();
    report.check(Check::holds("labels cover the cat basis", (labels == basis).to_string(), labels == basis));
    report.circuits.push(cat_analyzer_circuit(n + 1)?);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    /// Bits per unit time reading all senders with one (N+1)-qubit analyzer.
    pub r1: f64,
    /// Bits per unit time with N separate Bell analyzers.
    pub r2: f64,
    pub particles_multiparty: usize,
    pub particles_pairwise: usize,
}

/// `r1 = (N+1) / (t_h + N t_c)` and `r2 = 2N / (N (t_h + t_c))`.
pub fn information_rates(n: usize, t_h: f64, t_c: f64) -> Result<Rates> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(t_h > 0.0 && t_c > 0.0) || !t_h.is_finite() || !t_c.is_finite() {
        return Err(Error::InvalidParameter(format!("gate times must be positive, got t_h = {t_h}, t_c = {t_c}")));
    }
    let nf = n as f64;
    Ok(Rates {
        r1: (nf + 1.0) / (t_h + nf * t_c),
        r2: 2.0 * nf / (nf * (t_h + t_c)),
        particles_multiparty: n + 1,
        particles_pairwise: 2 * n,
    })
}

/// The same rates derived from gate counts of the analyzer circuits.
pub(crate) fn rates_from_circuits(n: usize, t_h: f64, t_c: f64) -> Result<(f64, f64)> {
    let one_shot = gate_cost(&cat_analyzer_circuit(n + 1)?, t_h, t_c)?;
    let bell = gate_cost(&cat_analyzer_circuit(2)?, t_h, t_c)?;
    Ok(((n + 1) as f64 / one_shot, (2 * n) as f64 / (n as f64 * bell)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn standard_two_bit_superdense_coding() {
        let a = SuperdenseAssignment::standard(1);
        for m in ["00", "01", "10", "11"] {
            let (decoded, report) = superdense_roundtrip(&bits(m), &a).unwrap();
            assert_eq!(decoded, bits(m));
            assert!(report.passed());
        }
    }

    #[test]
    fn zero_message_is_identity() {
        let a = SuperdenseAssignment::standard(3);
        assert!(encode_message(&bits("0000"), &a).unwrap().is_empty());
        let (decoded, _) = superdense_roundtrip(&bits("0000"), &a).unwrap();
        assert_eq!(decoded, bits("0000"));
    }

    #[test]
    fn all_sixteen_messages_for_three_senders() {
        let report = superdense_exhaustive(&SuperdenseAssignment::standard(3)).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        assert_eq!(report.outcomes.len(), 16);
    }

    #[test]
    fn designated_sender_need_not_be_first() {
        let mut a = SuperdenseAssignment::standard(3);
        a.operations = vec![OpSet::Two, OpSet::Two, OpSet::Four];
        assert_eq!(a.designated(), 2);
        assert!(superdense_exhaustive(&a).unwrap().passed());
    }

    #[test]
    fn malformed_assignments() {
        let mut a = SuperdenseAssignment::standard(2);
        a.operations = vec![OpSet::Four, OpSet::Four];
        assert!(a.validate().is_err());
        let mut a = SuperdenseAssignment::standard(2);
        a.operations.pop();
        assert!(a.validate().is_err());
        let mut a = SuperdenseAssignment::standard(2);
        a.senders[1] = "R".into();
        assert!(a.validate().is_err());
        assert!(SuperdenseAssignment::standard(0).validate().is_err());
        assert!(encode_message(&bits("01"), &SuperdenseAssignment::standard(2)).is_err());
    }

    #[test]
    fn rates() {
        for n in 1..8 {
            let r = information_rates(n, 1.0, 1.0).unwrap();
            assert!((r.r1 - r.r2).abs() < 1e-12);
            assert_eq!((r.particles_multiparty, r.particles_pairwise), (n + 1, 2 * n));
        }
        let r = information_rates(1, 1.0, 1.0).unwrap();
        assert_eq!((r.r1, r.r2), (1.0, 1.0));
        let r = information_rates(4, 2.0, 1.0).unwrap();
        assert!((r.r1 - 5.0 / 6.0).abs() < 1e-15);
        assert!((r.r2 - 2.0 / 3.0).abs() < 1e-15);
        let (c1, c2) = rates_from_circuits(4, 2.0, 1.0).unwrap();
        assert!((c1 - r.r1).abs() < 1e-15 && (c2 - r.r2).abs() < 1e-15);
        assert!(information_rates(2, 0.0, 1.0).is_err());
        assert!(information_rates(0, 1.0, 1.0).is_err());
    }
}
