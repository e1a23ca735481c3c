//! Simulator and symbolic calculus for multiparticle entanglement swapping.
//!
//! * [`qstate`]: dense state vectors, gates, projections, entropies, Pauli expectations.
//! * [`catalg`]: cat-state labels and the generalized swapping law, predicted and simulated.
//! * [`circuits`]: cat generator/analyzer networks and the CNOT merge.
//! * [`protocols`]: exchange networks, cat growth, superdense coding, amplitude
//!   correction and conference keys.
//! * [`timing`]: relay latency model.
//! * [`scenario`] and [`report`]: declarative scenario files and their reports.

pub mod error;
pub mod qstate;
pub mod rng;
pub mod catalg;
pub mod circuits;
pub mod timing;
pub mod report;
pub mod protocols;
pub mod scenario;
pub mod acceptance;

pub use error::{Error, Result};
