//! Swapping two partially entangled pairs `cosθ|01⟩ + sinθ|10⟩`.
//!
//! A Bell measurement on the inner qubits succeeds (Φ±) with probability
//! `sin²2θ / 2` and then leaves a maximally entangled outer pair. The Ψ±
//! outcomes leave `cos²θ|01⟩ + sin²θ|10⟩`, less entangled than the input.

use num_complex::Complex64;
use rand::Rng;

use crate::catalg::{cat_basis_on, cat_state, identify_cat, CatLabel};
use crate::error::{Error, Result};
use crate::protocols::Mode;
use crate::qstate::{ket_index, StateVector, PIPELINE_TOL};
use crate::report::{sig12, Check, OutcomeRecord, ProtocolReport};

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeOutcome {
    /// Bell label on qubits 1 and 2.
    pub outcome: CatLabel,
    pub probability: f64,
    /// State of qubits 0 and 3 (qubit 0 first); `None` for a zero-weight branch.
    pub residual_state: Option<StateVector>,
    pub residual_entropy: f64,
    /// Set when the residual is a Bell state.
    pub residual: Option<CatLabel>,
}

impl AmplitudeOutcome {
    /// Φ± outcomes (equal bits) are the successful ones.
    pub fn is_success(&self) -> bool {
        !self.outcome.pattern().0[1]
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, pi/2), got {theta}")));
    }
    Ok(())
}

/// `cosθ|01⟩ + sinθ|10⟩` on pairs (0, 1) and (2, 3).
pub fn amplitude_input(theta: f64) -> Result<StateVector> {
    check_theta(theta)?;
    let mut pair = vec![Complex64::new(0.0, 0.0); 4];
    pair[ket_index(&[false, true])] = Complex64::new(theta.cos(), 0.0);
    pair[ket_index(&[true, false])] = Complex64::new(theta.sin(), 0.0);
    let pair = StateVector::from_amplitudes(pair)?;
    pair.tensor(&pair)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// All four Bell-measurement branches.
pub fn amplitude_outcomes(theta: f64) -> Result<Vec<AmplitudeOutcome>> {
    let state = amplitude_input(theta)?;
    cat_basis_on(&[1, 2])
        .into_iter()
        .map(|outcome| {
            let projection = state.project_subset(&[1, 2], &cat_state(&outcome)?)?;
            let (residual_entropy, residual) = match &projection.residual {
                Some(r) => (
                    r.subsystem_entropy(&[0])?,
                    identify_cat(r, &[0, 3], PIPELINE_TOL)?.map(|i| i.label),
                ),
                None => (0.0, None),
            };
            Ok(AmplitudeOutcome {
                outcome,
                probability: projection.probability,
                residual_state: projection.residual,
                residual_entropy,
                residual,
            })
        })
        .collect()
}

/// Runs the protocol for one `θ` and checks the closed-form probabilities.
pub fn amplitude_swap_correct<R: Rng + ?Sized>(theta: f64, mode: Mode, rng: &mut R) -> Result<ProtocolReport> {
    mode.validate()?;
    let outcomes = amplitude_outcomes(theta)?;
    let input_entropy = amplitude_input(theta)?.subsystem_entropy(&[0])?;
    let s2 = (2.0 * theta).sin().powi(2);
    let c2 = (2.0 * theta).cos().powi(2);

    let mut report = ProtocolReport::new("amplitude", mode.to_string());
    report.value("theta", theta);
    report.value("input_entropy", sig12(input_entropy));

    let counts: Vec<Option<usize>> = match mode {
        Mode::Exhaustive => vec![None; outcomes.len()],
        Mode::Sampled { trials } => {
            let mut c = vec![0usize; outcomes.len()];
            for _ in 0..trials {
                let mut r = rng.gen::<f64>();
                let mut pick = outcomes.len() - 1;
                for (i, o) in outcomes.iter().enumerate() {
                    r -= o.probability;
                    if r < 0.0 {
                        pick = i;
                        break;
                    }
                }
                c[pick] += 1;
            }
            c.into_iter().map(Some).collect()
        }
    };
    for (o, count) in outcomes.iter().zip(&counts) {
        let mut rec = OutcomeRecord::new(Some(o.outcome.clone()), o.probability, o.residual.clone())
            .detail("success", o.is_success())
            .detail("residual_entropy", sig12(o.residual_entropy));
        rec.count = *count;
        report.outcomes.push(rec);
    }

    let success: f64 = outcomes.iter().filter(|o| o.is_success()).map(|o| o.probability).sum();
    let failure: f64 = outcomes.iter().filter(|o| !o.is_success()).map(|o| o.probability).sum();
    report.check(Check::close("success probability", s2 / 2.0, success, PIPELINE_TOL));
    report.check(Check::close("failure probability", (1.0 + c2) / 2.0, failure, PIPELINE_TOL));
    for o in outcomes.iter().filter(|o| o.is_success()) {
        report.check(Check::close(
            format!("P({})", o.outcome),
            s2 / 4.0,
            o.probability,
            PIPELINE_TOL,
        ));
        let expected = CatLabel::parse(vec![0, 3], "00", o.outcome.sign())?;
        let got = o.residual.as_ref().map(|r| r.to_string()).unwrap_or_else(|| "not a cat".into());
        report.check(Check::new(
            format!("residual after {}", o.outcome),
            expected.to_string(),
            got,
            o.residual.as_ref() == Some(&expected),
        ));
        report.check(Check::close(
            format!("residual entropy after {}", o.outcome),
            1.0,
            o.residual_entropy,
            PIPELINE_TOL,
        ));
    }
    let near_balanced = (theta - std::f64::consts::FRAC_PI_4).abs() < 1e-9;
    if !near_balanced {
        let worst = outcomes
            .iter()
            .filter(|o| !o.is_success())
            .map(|o| o.residual_entropy)
            .fold(0.0, f64::max);
        report.check(Check::new(
            "failed swap loses entanglement",
            format!("< {}", sig12(input_entropy)),
            sig12(worst),
            worst < input_entropy,
        ));
    }
    if let Mode::Sampled { trials } = mode {
        let hits: usize = outcomes
            .iter()
            .zip(&counts)
            .filter(|(o, _)| o.is_success())
            .map(|(_, c)| c.unwrap_or(0))
            .sum();
        let p = s2 / 2.0;
        let n = trials as f64;
        let sigma = (n * p * (1.0 - p)).sqrt().max(1.0);
        let dev = (hits as f64 - n * p).abs() / sigma;
        report.check(Check::new(
            "sampled success rate within 4 sigma",
            sig12(p),
            sig12(hits as f64 / n),
            dev <= 4.0,
        ));
    }
    Ok(report)
}
