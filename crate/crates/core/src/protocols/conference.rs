//! Conference key distribution over an exchange-made GHZ state, with a
//! stabilizer test for eavesdropping.
//!
//! Each round the exchange projects its halves of the users' Bell pairs onto
//! the cat basis, the users correct the announced label to GHZ+ and measure
//! X (or a random choice of X and Y). When the number of Y choices is even
//! the product of the outcomes is fixed, which lets every user reconstruct
//! user 0's bit.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalg::{cat_basis_on, cat_state, swap_predict, CatLabel, SwapScenario};
use crate::error::{Error, Result};
use crate::protocols::NetworkTopology;
use crate::qstate::{Gate, Pauli, PauliString, Sign, StateVector, ALGEBRA_TOL};
use crate::report::{sig12, Check, ProtocolReport};
use crate::rng::substream;

pub const MIN_USERS: usize = 2;
pub const MAX_USERS: usize = 10;
pub const MAX_ROUNDS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMode {
    /// Everyone measures X.
    Single,
    /// Everyone picks X or Y at random.
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Eavesdropper {
    None,
    /// Measures user `channel`'s qubit in the computational basis on its way
    /// from the exchange and forwards it.
    InterceptResend { channel: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConferenceOutcome {
    /// Key bits of each user, one per kept round.
    pub keys: Vec<Vec<bool>>,
    pub report: ProtocolReport,
}

/// `X^n`, every `-(Y_i Y_j X…)`, and the adjacent `Z_i Z_{i+1}`.
pub fn stabilizer_set(n: usize) -> Vec<PauliString> {
    let mut set = vec![PauliString::new(Sign::Plus, vec![Pauli::X; n])];
    for i in 0..n {
        for j in i + 1..n {
            let mut ops = vec![Pauli::X; n];
            ops[i] = Pauli::Y;
            ops[j] = Pauli::Y;
            set.push(PauliString::new(Sign::Minus, ops));
        }
    }
    for i in 0..n.saturating_sub(1) {
        let mut ops = vec![Pauli::I; n];
        ops[i] = Pauli::Z;
        ops[i + 1] = Pauli::Z;
        set.push(PauliString::new(Sign::Plus, ops));
    }
    set
}

/// Expectation of every stabilizer of the n-qubit GHZ+ on `state`.
pub fn stabilizer_check(state: &StateVector) -> Result<Vec<(PauliString, f64)>> {
    stabilizer_set(state.num_qubits())
        .into_iter()
        .map(|p| {
            let e = state.pauli_expectation(&p)?;
            Ok((p, e))
        })
        .collect()
}

/// `U` with `U|v_±⟩ = |0⟩, |1⟩`, so a Z readout after `U` is a `basis` readout.
fn rotation(basis: Pauli) -> [[Complex64; 2]; 2] {
    let [plus, minus] = basis.eigenbasis();
    [
        [plus[0].conj(), plus[1].conj()],
        [minus[0].conj(), minus[1].conj()],
    ]
}

/// Pauli corrections taking the users' cat `label` (on positions `0..n`) to GHZ+.
fn corrections(label: &CatLabel) -> Vec<Gate> {
    let mut gates: Vec<Gate> = label
        .pattern()
        .0
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| Gate::X(k))
        .collect();
    if label.sign() == Sign::Minus {
        gates.push(Gate::Z(0));
    }
    gates
}

struct Branch {
    probability: f64,
    users: StateVector,
    announced: CatLabel,
}

/// Every exchange outcome with the users' post-measurement state and the
/// label the swap law announces for it.
fn exchange_branches(n: usize) -> Result<Vec<Branch>> {
    let names: Vec<String> = (0..n).map(|i| format!("U{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let topo = NetworkTopology::star(&refs);
    let cats = topo.links.iter().map(|l| l.label()).collect::<Result<Vec<_>>>()?;
    let exchange: Vec<usize> = topo.links.iter().map(|l| l.exchange_qubit).collect();
    let scenario = SwapScenario::new(cats.clone(), exchange.iter().map(|&q| vec![q]).collect())?;
    let (state, _) = crate::catalg::product_state(&cats.iter().collect::<Vec<_>>())?;
    let mut branches = Vec::new();
    for outcome in cat_basis_on(&exchange) {
        let projection = state.project_subset(&exchange, &cat_state(&outcome)?)?;
        let (Some(users), Some(pred)) = (projection.residual, swap_predict(&scenario, &outcome)?) else {
            continue;
        };
        // the residual keeps user qubits 0, 2, 4, … as positions 0..n
        let announced = pred.residual.relabel((0..n).collect())?;
        branches.push(Branch {
            probability: projection.probability,
            users,
            announced,
        });
    }
    Ok(branches)
}

fn pick<R: Rng + ?Sized>(branches: &[Branch], rng: &mut R) -> usize {
    let mut r = rng.gen::<f64>();
    for (i, b) in branches.iter().enumerate() {
        r -= b.probability;
        if r < 0.0 {
            return i;
        }
    }
    branches.len() - 1
}

/// Runs `rounds` rounds. Round `r` draws from `substream(seed, r)`, so any
/// round can be replayed on its own.
pub fn conference_key(
    n_users: usize,
    rounds: usize,
    basis_mode: BasisMode,
    seed: u64,
    eavesdropper: Eavesdropper,
) -> Result<ConferenceOutcome> {
    if !(MIN_USERS..=MAX_USERS).contains(&n_users) {
        return Err(Error::range("n_users", n_users, MIN_USERS, MAX_USERS));
    }
    if !(1..=MAX_ROUNDS).contains(&rounds) {
        return Err(Error::range("rounds", rounds, 1, MAX_ROUNDS));
    }
    if let Eavesdropper::InterceptResend { channel } = eavesdropper {
        if channel >= n_users {
            return Err(Error::range("channel", channel, 0, n_users - 1));
        }
    }
    let n = n_users;
    let branches = exchange_branches(n)?;
    let stabilizers = stabilizer_set(n);

    let mut keys = vec![Vec::new(); n];
    let mut kept = 0usize;
    let mut errors = 0usize;
    let mut violations = 0usize;
    let mut xxx_sum = 0.0;
    let mut worst_honest = 0.0f64;
    let mut stabilizer_sums = vec![0.0; stabilizers.len()];

    for round in 0..rounds {
        let mut rng = substream(seed, round as u64);
        let branch = &branches[pick(&branches, &mut rng)];
        let mut state = branch.users.clone();
        if let Eavesdropper::InterceptResend { channel } = eavesdropper {
            state = state.measure_and_keep(channel, &mut rng)?.1;
        }
        for g in corrections(&branch.announced) {
            state.apply_gate_mut(g)?;
        }
        for (sum, p) in stabilizer_sums.iter_mut().zip(&stabilizers) {
            *sum += state.pauli_expectation(p)?;
        }
        let xxx = state.pauli_expectation(&stabilizers[0])?;
        xxx_sum += xxx;
        worst_honest = worst_honest.max((1.0 - xxx).abs());

        let bases: Vec<Pauli> = (0..n)
            .map(|_| match basis_mode {
                BasisMode::Single => Pauli::X,
                BasisMode::Dual => {
                    if rng.gen::<bool>() {
                        Pauli::Y
                    } else {
                        Pauli::X
                    }
                }
            })
            .collect();
        let ys = bases.iter().filter(|&&b| b == Pauli::Y).count();
        if ys % 2 == 1 {
            continue;
        }
        for (q, b) in bases.iter().enumerate() {
            state.apply_single_qubit_mut(q, rotation(*b))?;
        }
        let index = state.sample_index(&mut rng);
        let bits: Vec<bool> = (0..n).map(|k| (index >> k) & 1 == 1).collect();
        // product of ±1 outcomes is +1 iff the outcome bits have even parity
        let expected_parity = ys % 4 == 2;
        let parity = bits.iter().fold(false, |acc, &b| acc ^ b);
        kept += 1;
        if parity != expected_parity {
            errors += 1;
            if basis_mode == BasisMode::Single {
                violations += 1;
            }
        }
        let others = bits[1..].iter().fold(false, |acc, &b| acc ^ b);
        keys[0].push(bits[0]);
        for key in keys.iter_mut().skip(1) {
            key.push(expected_parity ^ others);
        }
    }

    let mode = match basis_mode {
        BasisMode::Single => "single",
        BasisMode::Dual => "dual",
    };
    let mut report = ProtocolReport::new("conference", mode);
    report.seed = Some(seed);
    report.value("users", n);
    report.value("rounds", rounds);
    report.value(
        "eavesdropper",
        serde_json::to_value(eavesdropper).expect("eavesdropper serializes"),
    );
    let sift_rate = kept as f64 / rounds as f64;
    let agreement = (0..kept).filter(|&i| keys.iter().all(|k| k[i] == keys[0][i])).count();
    let agreement_rate = if kept == 0 { 0.0 } else { agreement as f64 / kept as f64 };
    let error_rate = if kept == 0 { 0.0 } else { errors as f64 / kept as f64 };
    let xxx_mean = xxx_sum / rounds as f64;
    report.value("kept_rounds", kept);
    report.value("sift_rate", sig12(sift_rate));
    report.value("agreement_rate", sig12(agreement_rate));
    report.value("error_rate", sig12(error_rate));
    report.value("xxx_expectation", sig12(xxx_mean));
    report.value(
        "stabilizers",
        stabilizers
            .iter()
            .zip(&stabilizer_sums)
            .map(|(p, s)| (p.to_string(), serde_json::Value::from(sig12(s / rounds as f64))))
            .collect::<serde_json::Map<_, _>>(),
    );

    match eavesdropper {
        Eavesdropper::None => {
            report.check(Check::close("X^n expectation every round", 1.0, 1.0 - worst_honest, ALGEBRA_TOL));
            report.check(Check::new(
                "key agreement",
                "1",
                sig12(agreement_rate),
                agreement == kept,
            ));
            if basis_mode == BasisMode::Single {
                report.check(Check::new("outcome product violations", "0", violations.to_string(), violations == 0));
            }
        }
        Eavesdropper::InterceptResend { .. } => {
            report.check(Check::new(
                "attack reduces X^n expectation",
                "< 1",
                sig12(xxx_mean),
                xxx_mean < 1.0 - ALGEBRA_TOL,
            ));
            report.check(Check::new("attack causes key errors", "> 0", sig12(error_rate), errors > 0));
        }
    }
    Ok(ConferenceOutcome { keys, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalg::CatLabel;

    #[test]
    fn stabilizers_of_ghz() {
        for n in 2..6 {
            let ghz = cat_state(&CatLabel::ghz((0..n).collect()).unwrap()).unwrap();
            let checks = stabilizer_check(&ghz).unwrap();
            assert_eq!(checks.len(), 1 + n * (n - 1) / 2 + n - 1);
            for (p, e) in checks {
                assert!((e - 1.0).abs() < 1e-12, "{p}: {e}");
            }
        }
    }

    #[test]
    fn stabilizer_text() {
        let s: Vec<String> = stabilizer_set(3).iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["XXX", "-YYX", "-YXY", "-XYY", "ZZI", "IZZ"]);
    }

    #[test]
    fn collapsed_state_loses_xxx() {
        let ghz = cat_state(&CatLabel::ghz(vec![0, 1, 2]).unwrap()).unwrap();
        let mut rng = substream(0, 0);
        let (_, collapsed) = ghz.measure_and_keep(1, &mut rng).unwrap();
        let checks = stabilizer_check(&collapsed).unwrap();
        assert!(checks[0].1.abs() < 1e-12);
        assert!(checks.iter().filter(|(p, _)| p.to_string().contains('Z')).all(|(_, e)| (e - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rotation_reads_eigenvalues() {
        for b in [Pauli::X, Pauli::Y] {
            let [plus, minus] = b.eigenbasis();
            let u = rotation(b);
            for (v, expected) in [(plus, 0usize), (minus, 1)] {
                let mut s = StateVector::from_amplitudes(v.to_vec()).unwrap();
                s.apply_single_qubit_mut(0, u).unwrap();
                assert!((s.probability(expected) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn honest_single_mode() {
        let out = conference_key(3, 500, BasisMode::Single, 7, Eavesdropper::None).unwrap();
        assert!(out.report.passed(), "{:#?}", out.report.checks);
        assert_eq!(out.keys[0].len(), 500);
        assert!(out.keys.iter().all(|k| k == &out.keys[0]));
    }

    #[test]
    fn dual_mode_sifts_half_for_three_users() {
        let out = conference_key(3, 4000, BasisMode::Dual, 3, Eavesdropper::None).unwrap();
        assert!(out.report.passed());
        let kept = out.keys[0].len() as f64 / 4000.0;
        assert!((kept - 0.5).abs() < 0.04, "{kept}");
    }

    #[test]
    fn attack_is_detected() {
        let out = conference_key(3, 2000, BasisMode::Single, 5, Eavesdropper::InterceptResend { channel: 1 }).unwrap();
        assert!(out.report.passed(), "{:#?}", out.report.checks);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = conference_key(4, 100, BasisMode::Dual, 11, Eavesdropper::None).unwrap();
        let b = conference_key(4, 100, BasisMode::Dual, 11, Eavesdropper::None).unwrap();
        assert_eq!(a.keys, b.keys);
    }

    #[test]
    fn argument_errors() {
        assert!(conference_key(1, 10, BasisMode::Single, 0, Eavesdropper::None).is_err());
        assert!(conference_key(3, 0, BasisMode::Single, 0, Eavesdropper::None).is_err());
        assert!(conference_key(3, 10, BasisMode::Single, 0, Eavesdropper::InterceptResend { channel: 3 }).is_err());
    }
}
