//! Burst-aware LDPC decoding over differentially coded M-QAM.
//!
//! The link model is a Wiener phase-noise process whose innovation variance is
//! switched by a two-state Gilbert-Elliott Markov chain, followed by AWGN.
//! Transmission uses phase-domain differential coding so the receiver never
//! recovers the carrier phase. Three receivers are provided:
//!
//! - a baseline that treats the phase noise as memoryless with an effective
//!   variance,
//! - a burst-aware (BA) receiver that estimates per-symbol channel-state
//!   probabilities (Viterbi, SOVA or windowed BCJR) and mixes the
//!   state-conditioned likelihoods before LDPC decoding,
//! - an iterative burst-aware (IBA) receiver that feeds the decoder output back
//!   as symbol priors for the estimator and the demapper.
//!
//! [`harness`] drives Monte Carlo sweeps over these receivers.

pub mod channel;
pub mod constellation;
mod error;
pub mod estimator;
pub mod harness;
pub mod ldpc;
pub mod likelihood;
pub mod pipeline;

pub use error::{Error, Result};
pub use num_complex::Complex64;
