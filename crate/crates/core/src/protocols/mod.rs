//! End-to-end protocols built on the state-vector and cat-label layers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalg::{cat_state_any, CatLabel};
use crate::error::{Error, Result};
use crate::qstate::StateVector;

mod amplitude;
mod conference;
mod exchange;
mod grow;
mod superdense;
mod swap;

pub use amplitude::{amplitude_input, amplitude_outcomes, amplitude_swap_correct, binary_entropy, AmplitudeOutcome};
pub use conference::{
    conference_key, stabilizer_check, MAX_ROUNDS, MAX_USERS, MIN_USERS, stabilizer_set, BasisMode, ConferenceOutcome, Eavesdropper,
};
pub use exchange::{exchange_entangle, exchange_outcomes, ExchangeOutcome, NetworkTopology, UserLink};
pub use grow::{ghz_from_three_bells, grow_cat, grow_chain, grow_step, Agreement, GrowOutcome, MAX_GROW, MIN_GROW};
pub use swap::swap_report;
pub(crate) use superdense::rates_from_circuits;
pub use superdense::{
    decode_message, encode_message, information_rates, superdense_exhaustive, superdense_roundtrip, OpSet,
    Rates, SuperdenseAssignment,
};

/// Whether a protocol enumerates every measurement branch or samples them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Mode {
    Exhaustive,
    Sampled { trials: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => f.write_str("exhaustive"),
            Mode::Sampled { trials } => write!(f, "sampled({trials})"),
        }
    }
}

impl Mode {
    pub fn validate(&self) -> Result<()> {
        match self {
            Mode::Sampled { trials: 0 } => Err(Error::InvalidParameter("sampled mode needs at least one trial".into())),
            _ => Ok(()),
        }
    }
}

/// `|⟨outcome ⊗ residual|state⟩|²`, where `layout[k]` is the qubit id held
/// by position `k` of `state`. Equals the outcome probability exactly when
/// the post-measurement state factorizes as `outcome ⊗ residual`.
pub(crate) fn joint_overlap(state: &StateVector, layout: &[usize], outcome: &CatLabel, residual: &CatLabel) -> Result<f64> {
    let joint = cat_state_any(outcome)?.tensor(&cat_state_any(residual)?)?;
    let order = outcome
        .qubits()
        .iter()
        .chain(residual.qubits())
        .map(|q| {
            layout
                .iter()
                .position(|x| x == q)
                .ok_or_else(|| Error::InvalidScenario(format!("qubit {q} is not in the layout")))
        })
        .collect::<Result<Vec<_>>>()?;
    joint.fidelity(&state.permute(&order)?)
}
