//! Cat-state labels and the generalized swapping law.
//!
//! A cat state on qubits `q_0..q_{n-1}` is `(|u⟩ ± |ū⟩)/√2`. Because `u` and
//! its complement describe the same state, labels are stored with the first
//! pattern bit cleared.
//!
//! Projecting `p` qubits drawn from several cats onto a `p`-qubit cat leaves
//! the unmeasured qubits of those cats in a single cat. [`swap_predict`]
//! computes that result in closed form; [`swap_simulate`] builds the state
//! vector and projects onto every basis outcome. The two are expected to
//! agree entry for entry.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{ket_index, Sign, StateVector, MAX_QUBITS, PIPELINE_TOL};

/// Largest cat basis that may be enumerated.
pub const MAX_BASIS_QUBITS: usize = 12;

/// Bit pattern serialized as a string of `0`/`1`, character `i` for qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(pub Vec<bool>);

impl Pattern {
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBits(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Pattern)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> Pattern {
        Pattern(self.0.iter().map(|b| !b).collect())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Pattern::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Symbolic name of a cat state over an ordered list of qubit ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CatLabel {
    qubits: Vec<usize>,
    pattern: Pattern,
    sign: Sign,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatLabel {
    qubits: Vec<usize>,
    pattern: Pattern,
    sign: Sign,
}

impl<'de> Deserialize<'de> for CatLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCatLabel::deserialize(d)?;
        CatLabel::new(raw.qubits, raw.pattern.0, raw.sign).map_err(serde::de::Error::custom)
    }
}

impl CatLabel {
    /// Builds a label, complementing the pattern if its first bit is set.
    /// Single-qubit labels are accepted as degenerate markers.
    pub fn new(qubits: Vec<usize>, pattern: Vec<bool>, sign: Sign) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::DegenerateCat(0));
        }
        if pattern.len() != qubits.len() {
            return Err(Error::LengthMismatch {
                expected: qubits.len(),
                found: pattern.len(),
            });
        }
        let mut seen = HashSet::new();
        for &q in &qubits {
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        let pattern = if pattern[0] {
            Pattern(pattern).complement()
        } else {
            Pattern(pattern)
        };
        Ok(CatLabel { qubits, pattern, sign })
    }

    pub fn parse(qubits: Vec<usize>, pattern: &str, sign: Sign) -> Result<Self> {
        Self::new(qubits, Pattern::parse(pattern)?.0, sign)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `qubits`.
    pub fn ghz(qubits: Vec<usize>) -> Result<Self> {
        let n = qubits.len();
        Self::new(qubits, vec![false; n], Sign::Plus)
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Pattern bit of qubit id `q`, if the label covers it.
    pub fn bit_of(&self, q: usize) -> Option<bool> {
        self.qubits.iter().position(|&x| x == q).map(|i| self.pattern.0[i])
    }

    /// Same pattern and sign on a different list of qubit ids.
    pub fn relabel(&self, qubits: Vec<usize>) -> Result<Self> {
        Self::new(qubits, self.pattern.0.clone(), self.sign)
    }

    /// Pattern and sign agree, ignoring qubit ids.
    pub fn same_state_as(&self, other: &CatLabel) -> bool {
        self.pattern == other.pattern && self.sign == other.sign
    }
}

impl fmt::Display for CatLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]{:?}", self.sign, self.pattern, self.qubits)
    }
}

/// `(|u⟩ + sign·|ū⟩)/√2`; state qubit `i` is `label.qubits()[i]`.
pub fn cat_state(label: &CatLabel) -> Result<StateVector> {
    if label.len() < 2 {
        return Err(Error::DegenerateCat(label.len()));
    }
    cat_state_any(label)
}

/// As [`cat_state`] but also accepts degenerate single-qubit labels.
pub(crate) fn cat_state_any(label: &CatLabel) -> Result<StateVector> {
    let n = label.len();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            max: MAX_QUBITS,
        });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[ket_index(&label.pattern.0)] = Complex64::new(h, 0.0);
    amps[ket_index(&label.pattern.complement().0)] = Complex64::new(h * label.sign.value(), 0.0);
    StateVector::from_amplitudes(amps)
}

/// All `2^p` cat labels on qubits `0..p`, ordered by (pattern, sign).
pub fn enumerate_cat_basis(p: usize) -> Result<Vec<CatLabel>> {
    if !(2..=MAX_BASIS_QUBITS).contains(&p) {
        return Err(Error::range("p", p, 2, MAX_BASIS_QUBITS));
    }
    Ok(cat_basis_on(&(0..p).collect::<Vec<_>>()))
}

/// Cat basis over arbitrary qubit ids, same order as [`enumerate_cat_basis`].
pub fn cat_basis_on(qubits: &[usize]) -> Vec<CatLabel> {
    let p = qubits.len();
    let mut out = Vec::with_capacity(1 << p);
    for tail in 0..1usize << (p - 1) {
        // string order: pattern[1] is the most significant free bit
        let pattern: Vec<bool> = (0..p).map(|i| i > 0 && (tail >> (p - 1 - i)) & 1 == 1).collect();
        for sign in [Sign::Plus, Sign::Minus] {
            out.push(CatLabel {
                qubits: qubits.to_vec(),
                pattern: Pattern(pattern.clone()),
                sign,
            });
        }
    }
    out
}

/// A cat label recovered from a state vector, with the global phase `φ`
/// such that `state ≈ e^{iφ} · cat_state(label)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Identified {
    pub label: CatLabel,
    pub phase: f64,
}

/// Finds the cat label matching `state` up to global phase.
///
/// A cat state has weight only on one complementary pair of basis indices,
/// so the candidate is read off the largest amplitude and then confirmed by
/// its overlap: the match is accepted when `1 - |⟨cat|state⟩|² ≤ tol`.
pub fn identify_cat(state: &StateVector, qubits: &[usize], tol: f64) -> Result<Option<Identified>> {
    if state.num_qubits() != qubits.len() {
        return Err(Error::LengthMismatch {
            expected: state.num_qubits(),
            found: qubits.len(),
        });
    }
    let full = state.dim() - 1;
    let (peak, _) = state
        .amplitudes()
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, a)| if a.norm_sqr() > best.1 { (i, a.norm_sqr()) } else { best });
    let base = if peak & 1 == 0 { peak } else { peak ^ full };
    let (a, b) = (state.amplitude(base), state.amplitude(base ^ full));
    if a.norm_sqr() <= tol || b.norm_sqr() <= tol {
        return Ok(None);
    }
    let sign = Sign::from_bit((b / a).re < 0.0);
    let pattern = (0..qubits.len()).map(|k| (base >> k) & 1 == 1).collect();
    let label = CatLabel::new(qubits.to_vec(), pattern, sign)?;
    let overlap = cat_state_any(&label)?.inner(state)?;
    if 1.0 - overlap.norm_sqr() > tol {
        return Ok(None);
    }
    Ok(Some(Identified {
        label,
        phase: overlap.arg(),
    }))
}

/// Cats plus the qubits selected from each for the joint measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapScenario {
    pub cats: Vec<CatLabel>,
    /// `measured[m]` lists the qubits of `cats[m]` brought to the measurement.
    pub measured: Vec<Vec<usize>>,
}

impl SwapScenario {
    pub fn new(cats: Vec<CatLabel>, measured: Vec<Vec<usize>>) -> Result<Self> {
        let s = SwapScenario { cats, measured };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cats.len() != self.measured.len() {
            return Err(Error::InvalidScenario(format!(
                "{} cats but {} measured lists",
                self.cats.len(),
                self.measured.len()
            )));
        }
        let mut seen = HashSet::new();
        for (m, (cat, sel)) in self.cats.iter().zip(&self.measured).enumerate() {
            if cat.len() < 2 {
                return Err(Error::DegenerateCat(cat.len()));
            }
            for &q in cat.qubits() {
                if !seen.insert(q) {
                    return Err(Error::InvalidScenario(format!("qubit {q} appears in more than one cat")));
                }
            }
            let mut local = HashSet::new();
            for &q in sel {
                if cat.bit_of(q).is_none() {
                    return Err(Error::InvalidScenario(format!("measured qubit {q} is not in cat {m}")));
                }
                if !local.insert(q) {
                    return Err(Error::DuplicateQubit(q));
                }
            }
        }
        if self.measured_qubits().is_empty() {
            return Err(Error::InvalidScenario("no qubit is measured".into()));
        }
        if self.residual_qubits().is_empty() {
            return Err(Error::InvalidScenario("measurement consumes every qubit of the measured cats".into()));
        }
        Ok(())
    }

    /// Indices of cats with at least one measured qubit.
    pub fn measured_cats(&self) -> Vec<usize> {
        (0..self.cats.len()).filter(|&m| !self.measured[m].is_empty()).collect()
    }

    /// Cats left out of the measurement; they pass through unchanged.
    pub fn passthrough(&self) -> Vec<&CatLabel> {
        (0..self.cats.len())
            .filter(|&m| self.measured[m].is_empty())
            .map(|m| &self.cats[m])
            .collect()
    }

    pub fn measured_qubits(&self) -> Vec<usize> {
        self.measured.concat()
    }

    /// Unmeasured qubits of the measured cats, in cat order.
    pub fn residual_qubits(&self) -> Vec<usize> {
        self.measured_cats()
            .into_iter()
            .flat_map(|m| {
                let sel = &self.measured[m];
                self.cats[m].qubits().iter().copied().filter(move |q| !sel.contains(q))
            })
            .collect()
    }

    /// Qubits of the measured cats, in cat order; the layout used by the simulator.
    pub fn simulated_qubits(&self) -> Vec<usize> {
        self.measured_cats()
            .into_iter()
            .flat_map(|m| self.cats[m].qubits().to_vec())
            .collect()
    }

    /// The cat basis the measured qubits are projected onto.
    pub fn outcome_basis(&self) -> Vec<CatLabel> {
        cat_basis_on(&self.measured_qubits())
    }
}

/// Closed-form result for one compatible outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub probability: f64,
    pub residual: CatLabel,
}

/// Applies the swapping law to one outcome; `None` means the outcome has
/// zero probability.
///
/// The outcome is compatible when, on every measured cat, it agrees with the
/// cat's pattern or with its complement. Then the probability is
/// `2^-N'` (`N'` measured cats), the residual pattern on each cat's
/// unmeasured qubits is the cat's pattern flipped where the outcome chose the
/// complement, and the residual sign is the outcome sign times the signs of
/// all measured cats.
pub fn swap_predict(scenario: &SwapScenario, outcome: &CatLabel) -> Result<Option<Prediction>> {
    scenario.validate()?;
    let measured = scenario.measured_qubits();
    let covers = outcome.len() == measured.len() && measured.iter().all(|&q| outcome.bit_of(q).is_some());
    if !covers {
        return Err(Error::InvalidScenario(format!(
            "outcome {outcome} does not cover exactly the measured qubits {measured:?}"
        )));
    }

    let measured_cats = scenario.measured_cats();
    let mut residual_bits = Vec::new();
    let mut sign = outcome.sign();
    for &m in &measured_cats {
        let cat = &scenario.cats[m];
        let sel = &scenario.measured[m];
        let first = sel[0];
        let flip = outcome.bit_of(first).unwrap() ^ cat.bit_of(first).unwrap();
        if sel.iter().any(|&q| outcome.bit_of(q).unwrap() != cat.bit_of(q).unwrap() ^ flip) {
            return Ok(None);
        }
        for &q in cat.qubits() {
            if !sel.contains(&q) {
                residual_bits.push(cat.bit_of(q).unwrap() ^ flip);
            }
        }
        sign = sign * cat.sign();
    }
    let residual = CatLabel::new(scenario.residual_qubits(), residual_bits, sign)?;
    Ok(Some(Prediction {
        probability: 0.5f64.powi(measured_cats.len() as i32),
        residual,
    }))
}

/// One outcome of the simulated measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapEntry {
    pub outcome: CatLabel,
    pub probability: f64,
    /// Identified residual, `None` when the outcome has zero probability or
    /// the residual is not a cat state.
    pub residual: Option<CatLabel>,
    #[serde(skip)]
    pub residual_state: Option<StateVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapDistribution {
    pub entries: Vec<SwapEntry>,
}

impl SwapDistribution {
    pub fn nonzero(&self) -> impl Iterator<Item = &SwapEntry> {
        self.entries.iter().filter(|e| e.probability > 0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    /// Draws `trials` outcomes and counts them, keyed by entry index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> BTreeMap<usize, usize> {
        let total = self.total_probability();
        let mut counts = BTreeMap::new();
        for _ in 0..trials {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, e) in self.entries.iter().enumerate() {
                if e.probability <= 0.0 {
                    continue;
                }
                pick = Some(i);
                r -= e.probability;
                if r < 0.0 {
                    break;
                }
            }
            if let Some(i) = pick {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Tensor product of cat states, first cat on the lowest qubits. Returns the
/// state and the qubit id held by each state position.
pub fn product_state(cats: &[&CatLabel]) -> Result<(StateVector, Vec<usize>)> {
    let layout: Vec<usize> = cats.iter().flat_map(|c| c.qubits().to_vec()).collect();
    if layout.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: layout.len(),
            max: MAX_QUBITS,
        });
    }
    let mut state: Option<StateVector> = None;
    for cat in cats {
        let s = cat_state(cat)?;
        state = Some(match state {
            None => s,
            Some(acc) => acc.tensor(&s)?,
        });
    }
    let state = state.ok_or_else(|| Error::InvalidScenario("no cats".into()))?;
    Ok((state, layout))
}

/// Builds the product of the measured cats as a state vector and projects
/// the measured qubits onto every cat-basis outcome.
pub fn swap_simulate(scenario: &SwapScenario) -> Result<SwapDistribution> {
    scenario.validate()?;
    let measured = scenario.measured_qubits();
    if measured.len() > MAX_BASIS_QUBITS {
        return Err(Error::range("measured qubits", measured.len(), 1, MAX_BASIS_QUBITS));
    }

    let measured_cats: Vec<&CatLabel> = scenario.measured_cats().into_iter().map(|m| &scenario.cats[m]).collect();
    let (state, layout) = product_state(&measured_cats)?;
    let position = |q: usize| layout.iter().position(|&x| x == q).unwrap();
    let subset: Vec<usize> = measured.iter().map(|&q| position(q)).collect();
    let residual_ids = scenario.residual_qubits();

    let mut entries = Vec::new();
    for outcome in scenario.outcome_basis() {
        let projector = cat_state_any(&outcome)?;
        let projection = state.project_subset(&subset, &projector)?;
        let residual = match &projection.residual {
            Some(r) => identify_cat(r, &residual_ids, PIPELINE_TOL)?.map(|id| id.label),
            None => None,
        };
        entries.push(SwapEntry {
            outcome,
            probability: projection.probability,
            residual,
            residual_state: projection.residual,
        });
    }
    Ok(SwapDistribution { entries })
}

/// Checks every simulated entry against [`swap_predict`]; returns the
/// first disagreement.
pub fn check_agreement(scenario: &SwapScenario, dist: &SwapDistribution, tol: f64) -> std::result::Result<(), String> {
    for e in &dist.entries {
        let predicted = swap_predict(scenario, &e.outcome).map_err(|err| err.to_string())?;
        match predicted {
            None if e.probability.abs() <= tol => {}
            None => return Err(format!("outcome {} predicted impossible, simulated p = {}", e.outcome, e.probability)),
            Some(p) => {
                if (p.probability - e.probability).abs() > tol {
                    return Err(format!(
                        "outcome {}: predicted p = {}, simulated p = {}",
                        e.outcome, p.probability, e.probability
                    ));
                }
                if e.residual.as_ref() != Some(&p.residual) {
                    return Err(format!(
                        "outcome {}: predicted residual {}, simulated {:?}",
                        e.outcome, p.residual, e.residual
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::tests::kets;
    use crate::qstate::ALGEBRA_TOL;

    fn label(qubits: &[usize], pattern: &str, sign: Sign) -> CatLabel {
        CatLabel::parse(qubits.to_vec(), pattern, sign).unwrap()
    }

    /// Residual of every overlap-identified match, by brute force over the basis.
    fn identify_by_overlap(state: &StateVector, qubits: &[usize]) -> Option<CatLabel> {
        cat_basis_on(qubits)
            .into_iter()
            .find(|l| (cat_state_any(l).unwrap().fidelity(state).unwrap() - 1.0).abs() < 1e-10)
    }

    #[test]
    fn cat_states() {
        let bell = cat_state(&label(&[0, 1], "00", Sign::Plus)).unwrap();
        assert!(bell.max_deviation(&kets(2, &[("00", 1.0), ("11", 1.0)])) < ALGEBRA_TOL);
        let ghz = cat_state(&label(&[0, 1, 2], "000", Sign::Minus)).unwrap();
        assert!(ghz.max_deviation(&kets(3, &[("000", 1.0), ("111", -1.0)])) < ALGEBRA_TOL);
        let psi = cat_state(&label(&[0, 1], "01", Sign::Plus)).unwrap();
        assert!(psi.max_deviation(&kets(2, &[("01", 1.0), ("10", 1.0)])) < ALGEBRA_TOL);
        assert!(matches!(cat_state(&label(&[4], "0", Sign::Plus)), Err(Error::DegenerateCat(1))));
    }

    #[test]
    fn labels_are_canonical() {
        let a = label(&[0, 1, 2], "101", Sign::Minus);
        assert_eq!(a.pattern().to_string(), "010");
        assert_eq!(a.sign(), Sign::Minus);
        assert!(CatLabel::parse(vec![1, 1], "00", Sign::Plus).is_err());
        assert!(CatLabel::parse(vec![1, 2], "000", Sign::Plus).is_err());
    }

    #[test]
    fn basis_sizes_and_order() {
        let b2 = enumerate_cat_basis(2).unwrap();
        let names: Vec<String> = b2.iter().map(|l| format!("{}{}", l.pattern(), l.sign())).collect();
        assert_eq!(names, ["00+", "00-", "01+", "01-"]);
        assert_eq!(enumerate_cat_basis(3).unwrap().len(), 8);
        assert!(enumerate_cat_basis(1).is_err());
        assert!(enumerate_cat_basis(13).is_err());
    }

    #[test]
    fn four_qubit_basis_is_orthonormal() {
        let states: Vec<StateVector> = enumerate_cat_basis(4).unwrap().iter().map(|l| cat_state(l).unwrap()).collect();
        assert_eq!(states.len(), 16);
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let g = a.inner(b).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(expected, 0.0)).norm() < ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn identify_examples() {
        let bell = kets(2, &[("00", 1.0), ("11", 1.0)]);
        let id = identify_cat(&bell, &[0, 1], 1e-10).unwrap().unwrap();
        assert_eq!(id.label, label(&[0, 1], "00", Sign::Plus));
        assert!(id.phase.abs() < 1e-12);

        let phase = std::f64::consts::FRAC_PI_3;
        let rotated: Vec<Complex64> = kets(3, &[("000", 1.0), ("111", -1.0)])
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::from_polar(1.0, phase))
            .collect();
        let rotated = StateVector::from_amplitudes(rotated).unwrap();
        let id = identify_cat(&rotated, &[0, 1, 2], 1e-10).unwrap().unwrap();
        assert_eq!(id.label, label(&[0, 1, 2], "000", Sign::Minus));
        assert!((id.phase - phase).abs() < 1e-12);

        let product = kets(2, &[("00", 1.0), ("01", 1.0)]);
        assert!(identify_cat(&product, &[0, 1], 1e-10).unwrap().is_none());
        assert!(identify_cat(&StateVector::basis(2, 3).unwrap(), &[0, 1], 1e-10).unwrap().is_none());
    }

    #[test]
    fn identify_matches_exhaustive_overlap() {
        for l in enumerate_cat_basis(5).unwrap() {
            let qubits = [9, 3, 4, 7, 1];
            let l = l.relabel(qubits.to_vec()).unwrap();
            let s = cat_state(&l).unwrap().apply_gate(crate::qstate::Gate::Z(2)).unwrap();
            let fast = identify_cat(&s, &qubits, 1e-10).unwrap().map(|i| i.label);
            assert_eq!(fast, identify_by_overlap(&s, &qubits));
        }
    }

    fn two_bells() -> SwapScenario {
        SwapScenario::new(
            vec![label(&[1, 2], "00", Sign::Plus), label(&[3, 4], "00", Sign::Plus)],
            vec![vec![2], vec![3]],
        )
        .unwrap()
    }

    #[test]
    fn predict_bell_swap() {
        let s = two_bells();
        let p = swap_predict(&s, &label(&[2, 3], "01", Sign::Minus)).unwrap().unwrap();
        assert_eq!(p.probability, 0.25);
        assert_eq!(p.residual, label(&[1, 4], "01", Sign::Minus));
    }

    #[test]
    fn predict_fig2_scenario() {
        let s = SwapScenario::new(
            vec![
                label(&[0, 1], "00", Sign::Plus),
                label(&[2, 3], "00", Sign::Plus),
                label(&[4, 5, 6], "000", Sign::Plus),
            ],
            vec![vec![1], vec![2], vec![4]],
        )
        .unwrap();
        let p = swap_predict(&s, &label(&[1, 2, 4], "000", Sign::Plus)).unwrap().unwrap();
        assert_eq!(p.probability, 0.125);
        assert_eq!(p.residual.len(), 4);
        assert_eq!(p.residual.qubits(), &[0, 3, 5, 6]);
    }

    #[test]
    fn incompatible_outcome_has_zero_probability() {
        let s = SwapScenario::new(
            vec![label(&[0, 1, 2], "000", Sign::Plus), label(&[3, 4], "00", Sign::Plus)],
            vec![vec![0, 1], vec![3]],
        )
        .unwrap();
        let outcome = label(&[0, 1, 3], "010", Sign::Plus);
        assert_eq!(swap_predict(&s, &outcome).unwrap(), None);
        let dist = swap_simulate(&s).unwrap();
        let entry = dist.entries.iter().find(|e| e.outcome == outcome).unwrap();
        assert_eq!(entry.probability, 0.0);
        assert!(entry.residual.is_none());
    }

    #[test]
    fn predict_rejects_malformed_outcome() {
        let s = two_bells();
        assert!(swap_predict(&s, &label(&[2, 4], "00", Sign::Plus)).is_err());
        assert!(swap_predict(&s, &label(&[2, 3, 1], "000", Sign::Plus)).is_err());
    }

    #[test]
    fn scenario_validation() {
        let bell = |a, b| label(&[a, b], "00", Sign::Plus);
        assert!(SwapScenario::new(vec![bell(0, 1), bell(1, 2)], vec![vec![1], vec![2]]).is_err());
        assert!(SwapScenario::new(vec![bell(0, 1)], vec![vec![5]]).is_err());
        assert!(SwapScenario::new(vec![bell(0, 1)], vec![vec![]]).is_err());
        assert!(SwapScenario::new(vec![bell(0, 1)], vec![vec![0, 1]]).is_err());
        assert!(SwapScenario::new(vec![bell(0, 1), bell(2, 3)], vec![vec![0]]).is_err());
    }

    #[test]
    fn simulate_bell_swap() {
        let s = two_bells();
        let dist = swap_simulate(&s).unwrap();
        assert_eq!(dist.entries.len(), 4);
        for e in &dist.entries {
            assert!((e.probability - 0.25).abs() < PIPELINE_TOL);
            let r = e.residual.as_ref().unwrap();
            // Φ± → Φ±, Ψ± → Ψ± on the outer pair
            assert!(r.same_state_as(&e.outcome));
            assert_eq!(r.qubits(), &[1, 4]);
        }
        check_agreement(&s, &dist, PIPELINE_TOL).unwrap();
    }

    #[test]
    fn three_bells_to_ghz() {
        let s = SwapScenario::new(
            vec![
                label(&[0, 1], "00", Sign::Plus),
                label(&[2, 3], "00", Sign::Plus),
                label(&[4, 5], "00", Sign::Plus),
            ],
            vec![vec![1], vec![3], vec![5]],
        )
        .unwrap();
        let dist = swap_simulate(&s).unwrap();
        assert_eq!(dist.nonzero().count(), 8);
        for e in dist.nonzero() {
            assert_eq!(e.residual.as_ref().unwrap().qubits(), &[0, 2, 4]);
        }
        check_agreement(&s, &dist, PIPELINE_TOL).unwrap();
    }

    #[test]
    fn passthrough_cats_are_ignored_by_the_measurement() {
        let s = SwapScenario::new(
            vec![
                label(&[0, 1], "00", Sign::Plus),
                label(&[2, 3], "01", Sign::Minus),
                label(&[4, 5], "00", Sign::Plus),
            ],
            vec![vec![1], vec![], vec![4]],
        )
        .unwrap();
        assert_eq!(s.passthrough().len(), 1);
        let dist = swap_simulate(&s).unwrap();
        assert!((dist.total_probability() - 1.0).abs() < PIPELINE_TOL);
        check_agreement(&s, &dist, PIPELINE_TOL).unwrap();
    }

    #[test]
    fn sampling_hits_only_supported_outcomes() {
        let s = SwapScenario::new(
            vec![label(&[0, 1, 2], "000", Sign::Plus), label(&[3, 4], "00", Sign::Plus)],
            vec![vec![0, 1], vec![3]],
        )
        .unwrap();
        let dist = swap_simulate(&s).unwrap();
        let mut rng = crate::rng::substream(3, 0);
        let counts = dist.sample(&mut rng, 4000);
        assert_eq!(counts.values().sum::<usize>(), 4000);
        for (&i, &c) in &counts {
            assert!(dist.entries[i].probability > 0.0);
            assert!((c as f64 / 4000.0 - 0.25).abs() < 0.04);
        }
    }

    #[test]
    fn label_serde() {
        let l = label(&[3, 1], "01", Sign::Minus);
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(json, r#"{"qubits":[3,1],"pattern":"01","sign":"-"}"#);
        assert_eq!(serde_json::from_str::<CatLabel>(&json).unwrap(), l);
        let from_complement: CatLabel = serde_json::from_str(r#"{"qubits":[3,1],"pattern":"10","sign":"-"}"#).unwrap();
        assert_eq!(from_complement, l);
    }
}
