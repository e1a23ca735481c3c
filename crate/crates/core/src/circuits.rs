//! Gate networks built from H, CNOT, X and Z.
//!
//! The cat generator puts a Hadamard on qubit 0 and fans CNOTs out from it.
//! On a basis input `|b_0 b_1 … b_{n-1}⟩` it produces the cat with sign
//! `(-1)^{b_0}` and pattern `(0, b_1, …, b_{n-1})`, which is a bijection
//! between bitstrings and the cat basis. Run backwards it is an analyzer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalg::CatLabel;
use crate::error::{Error, Result};
use crate::qstate::{Gate, Projection, Sign, StateVector, MAX_QUBITS, PIPELINE_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        for q in gate.qubits() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        if let Gate::Cnot { control, target } = gate {
            if control == target {
                return Err(Error::SameControlTarget(control));
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    /// Every gate in the set is its own inverse, so the inverse circuit is
    /// the gate list reversed.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                found: state.num_qubits(),
            });
        }
        let mut out = state.clone();
        for &g in &self.gates {
            out.apply_gate_mut(g)?;
        }
        Ok(out)
    }
}

/// H on qubit 0, then CNOT(0 → k) for k = 1..n.
pub fn cat_generator_circuit(n: usize) -> Result<Circuit> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::range("n", n, 2, MAX_QUBITS));
    }
    let mut c = Circuit::new(n);
    c.push(Gate::H(0))?;
    for k in 1..n {
        c.push(Gate::Cnot { control: 0, target: k })?;
    }
    Ok(c)
}

/// The generator run backwards: CNOTs in reverse order, then H on qubit 0.
pub fn cat_analyzer_circuit(n: usize) -> Result<Circuit> {
    Ok(cat_generator_circuit(n)?.inverse())
}

/// Cat label produced by the generator from input bits (`bits[k]` on qubit `k`).
pub fn label_for_bits(qubits: &[usize], bits: &[bool]) -> Result<CatLabel> {
    if bits.len() != qubits.len() {
        return Err(Error::LengthMismatch {
            expected: qubits.len(),
            found: bits.len(),
        });
    }
    let mut pattern = bits.to_vec();
    pattern[0] = false;
    CatLabel::new(qubits.to_vec(), pattern, Sign::from_bit(bits[0]))
}

/// Inverse of [`label_for_bits`].
pub fn bits_for_label(label: &CatLabel) -> Vec<bool> {
    let mut bits = label.pattern().0.clone();
    bits[0] = label.sign().bit();
    bits
}

/// Runs the analyzer on a cat state and reads out the generator input.
///
/// Fails with [`Error::NotACat`] when the readout is not deterministic
/// (its most likely outcome has probability below `1 - 1e-10`).
pub fn analyze_cat(state: &StateVector, qubits: &[usize]) -> Result<(Vec<bool>, CatLabel)> {
    if state.num_qubits() != qubits.len() {
        return Err(Error::LengthMismatch {
            expected: qubits.len(),
            found: state.num_qubits(),
        });
    }
    let out = cat_analyzer_circuit(qubits.len())?.apply(state)?;
    let (index, p) = (0..out.dim())
        .map(|i| (i, out.probability(i)))
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if p < 1.0 - PIPELINE_TOL {
        return Err(Error::NotACat(p));
    }
    let bits: Vec<bool> = (0..qubits.len()).map(|k| (index >> k) & 1 == 1).collect();
    let label = label_for_bits(qubits, &bits)?;
    Ok((bits, label))
}

/// CNOT from `control` into `target`, then the `target` readout branch `bit`.
pub fn zeilinger_branch(state: &StateVector, control: usize, target: usize, bit: bool) -> Result<Projection> {
    state.apply_gate(Gate::Cnot { control, target })?.collapse(target, bit)
}

/// CNOT-and-measure merge of two cats: CNOT from `control` into `target`,
/// measure `target` and drop it. On an N-cat ⊗ M-cat input the residual is
/// an (N+M-1)-qubit cat.
pub fn zeilinger_merge<R: Rng + ?Sized>(
    state: &StateVector,
    control: usize,
    target: usize,
    rng: &mut R,
) -> Result<(bool, StateVector)> {
    state.apply_gate(Gate::Cnot { control, target })?.measure_qubit(target, rng)
}

/// Serial execution time: `t_h` per Hadamard, `t_c` per CNOT, X and Z free.
pub fn gate_cost(circuit: &Circuit, t_h: f64, t_c: f64) -> Result<f64> {
    if !(t_h >= 0.0 && t_c >= 0.0) {
        return Err(Error::InvalidParameter(format!("gate times must be non-negative (t_h = {t_h}, t_c = {t_c})")));
    }
    Ok(circuit
        .gates()
        .iter()
        .map(|g| match g {
            Gate::H(_) => t_h,
            Gate::Cnot { .. } => t_c,
            Gate::X(_) | Gate::Z(_) => 0.0,
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalg::{cat_state, enumerate_cat_basis, identify_cat};
    use crate::qstate::tests::{kets, random_state};
    use crate::qstate::ALGEBRA_TOL;

    #[test]
    fn generator_examples() {
        let g2 = cat_generator_circuit(2).unwrap();
        let s = g2.apply(&StateVector::basis(2, 0).unwrap()).unwrap();
        assert!(s.max_deviation(&kets(2, &[("00", 1.0), ("11", 1.0)])) < ALGEBRA_TOL);

        // b0 = 1, b1 = b2 = 0: H|1⟩ = (|0⟩ - |1⟩)/√2, fanned out to |000⟩ - |111⟩
        let g3 = cat_generator_circuit(3).unwrap();
        let s = g3.apply(&StateVector::from_qubit_bits(&[true, false, false]).unwrap()).unwrap();
        assert!(s.max_deviation(&kets(3, &[("000", 1.0), ("111", -1.0)])) < ALGEBRA_TOL);

        assert!(cat_generator_circuit(1).is_err());
        assert!(cat_generator_circuit(25).is_err());
    }

    #[test]
    fn two_qubit_generator_gives_bell_basis() {
        let g = cat_generator_circuit(2).unwrap();
        let outs: Vec<StateVector> = (0..4).map(|i| g.apply(&StateVector::basis(2, i).unwrap()).unwrap()).collect();
        for (i, a) in outs.iter().enumerate() {
            for (j, b) in outs.iter().enumerate() {
                let f = a.fidelity(b).unwrap();
                assert!((f - if i == j { 1.0 } else { 0.0 }).abs() < ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn generator_matches_bijection() {
        let g = cat_generator_circuit(4).unwrap();
        let qubits = [0, 1, 2, 3];
        for index in 0..16 {
            let bits: Vec<bool> = (0..4).map(|k| (index >> k) & 1 == 1).collect();
            let out = g.apply(&StateVector::basis(4, index).unwrap()).unwrap();
            let expected = label_for_bits(&qubits, &bits).unwrap();
            let id = identify_cat(&out, &qubits, 1e-10).unwrap().unwrap();
            assert_eq!(id.label, expected);
            assert_eq!(bits_for_label(&expected), bits);
        }
    }

    #[test]
    fn analyzer_examples() {
        let (bits, label) = analyze_cat(&kets(2, &[("00", 1.0), ("11", 1.0)]), &[0, 1]).unwrap();
        assert_eq!(bits, [false, false]);
        assert_eq!(label.pattern().to_string(), "00");
        assert_eq!(label.sign(), Sign::Plus);

        let (bits, label) = analyze_cat(&kets(3, &[("000", 1.0), ("111", -1.0)]), &[0, 1, 2]).unwrap();
        assert_eq!(bits, [true, false, false]);
        assert_eq!(label.sign(), Sign::Minus);
    }

    #[test]
    fn analyzer_round_trips_four_qubit_basis() {
        for l in enumerate_cat_basis(4).unwrap() {
            let (_, got) = analyze_cat(&cat_state(&l).unwrap(), l.qubits()).unwrap();
            assert_eq!(got, l);
        }
    }

    #[test]
    fn analyzer_rejects_non_cat() {
        let product = kets(2, &[("00", 1.0), ("01", 1.0)]);
        assert!(matches!(analyze_cat(&product, &[0, 1]), Err(Error::NotACat(_))));
    }

    #[test]
    fn generator_then_inverse_is_identity() {
        let g = cat_generator_circuit(5).unwrap();
        let inv = g.inverse();
        for seed in 0..200 {
            let s = random_state(5, seed);
            let back = inv.apply(&g.apply(&s).unwrap()).unwrap();
            assert!(back.max_deviation(&s) < 1e-10);
        }
    }

    #[test]
    fn merge_two_bells() {
        let bells = kets(4, &[("0000", 1.0), ("0011", 1.0), ("1100", 1.0), ("1111", 1.0)]);
        let zero = zeilinger_branch(&bells, 1, 2, false).unwrap();
        assert!((zero.probability - 0.5).abs() < ALGEBRA_TOL);
        let r0 = zero.residual.unwrap();
        assert!(r0.max_deviation(&kets(3, &[("000", 1.0), ("111", 1.0)])) < ALGEBRA_TOL);

        let one = zeilinger_branch(&bells, 1, 2, true).unwrap();
        let r1 = one.residual.unwrap();
        assert!(r1.max_deviation(&kets(3, &[("001", 1.0), ("110", 1.0)])) < ALGEBRA_TOL);
        let id = identify_cat(&r1, &[0, 1, 3], 1e-10).unwrap().unwrap();
        assert_eq!(id.label.pattern().to_string(), "001");

        let mut rng = crate::rng::substream(11, 0);
        let (bit, residual) = zeilinger_merge(&bells, 1, 2, &mut rng).unwrap();
        let expected = if bit { &r1 } else { &r0 };
        assert!(residual.max_deviation(expected) < ALGEBRA_TOL);
    }

    #[test]
    fn merge_three_cat_with_bell() {
        let three = cat_state(&CatLabel::ghz(vec![0, 1, 2]).unwrap()).unwrap();
        let two = cat_state(&CatLabel::ghz(vec![0, 1]).unwrap()).unwrap();
        let s = three.tensor(&two).unwrap();
        for bit in [false, true] {
            let r = zeilinger_branch(&s, 2, 3, bit).unwrap().residual.unwrap();
            assert!(identify_cat(&r, &[0, 1, 2, 4], 1e-10).unwrap().is_some());
        }
    }

    #[test]
    fn costs() {
        for n in 1..6 {
            let c = cat_analyzer_circuit(n + 1).unwrap();
            assert_eq!(gate_cost(&c, 2.0, 3.0).unwrap(), 2.0 + 3.0 * n as f64);
        }
        assert_eq!(gate_cost(&Circuit::new(3), 1.0, 1.0).unwrap(), 0.0);
        let mut c = Circuit::new(1);
        c.push(Gate::X(0)).unwrap().push(Gate::Z(0)).unwrap();
        assert_eq!(gate_cost(&c, 1.0, 1.0).unwrap(), 0.0);
        assert!(gate_cost(&c, -1.0, 1.0).is_err());
    }

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::Cnot { control: 0, target: 0 }).is_err());
        assert!(c.gates().is_empty());
    }

    #[test]
    fn circuit_serializes_as_gate_records() {
        let c = cat_generator_circuit(3).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            json,
            r#"{"num_qubits":3,"gates":[{"gate":"H","qubits":[0]},{"gate":"CNOT","qubits":[0,1]},{"gate":"CNOT","qubits":[0,2]}]}"#
        );
    }
}
