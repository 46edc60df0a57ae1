//! Optimal and daemonic work extraction from bipartite quantum states for
//! agents described by a utility function over extracted work.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: density matrices, Hamiltonians, measurements, sampling.
//! - [`utility`]: utility families, risk aversion, the qubit moments (X, Y, Z).
//! - [`quasiprob`]: the work quasiprobability `p_q` and expected utilities.
//! - [`extraction`]: ergotropy and optimal expected utility of a single system.
//! - [`daemonic`]: measurement-conditioned extraction and the utility gain.
//! - [`correlations`]: concurrence, PPT, classical-quantum test, discord.
//! - [`zoo`]: named state families used throughout the tests and CLI.

pub mod correlations;
pub mod daemonic;
pub mod error;
pub mod extraction;
pub mod optimize;
pub mod quantum;
pub mod quasiprob;
pub mod utility;
pub mod zoo;

pub use error::{Error, Result};
