//! Higher-order hidden Markov models (orders 1–3) with left-to-right and
//! circular topologies, a suprasegmental prosodic layer with weighted score
//! fusion, and a closed-set text-independent speaker-identification
//! pipeline.
//!
//! The crate is organized bottom-up:
//!
//! - [`hmm`]: model representation, validation and sampling.
//! - [`inference`]: forward, backward and Viterbi recursions, brute-force and
//!   order-reduction oracles, operation counts.
//! - [`training`]: k-means initialization and Baum-Welch re-estimation.
//! - [`features`]: WAV input, MFCC + delta features and prosodic tracks.
//! - [`supra`]: segment-level prosodic observations, speaker models and
//!   acoustic/prosodic score fusion.
//! - [`speaker_id`]: registry, identification, evaluation, statistics and
//!   the synthetic population harness.
//! - [`cli`]: the command surface behind the `supra-hmm` binary.

pub mod cli;
pub mod error;
pub mod features;
pub mod hmm;
pub mod inference;
pub mod numeric;
pub mod observation;
pub mod speaker_id;
pub mod supra;
pub mod training;

mod io_util;
#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use observation::ObservationSequence;
