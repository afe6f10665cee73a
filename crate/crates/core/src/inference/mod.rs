//! Log-space forward, backward and Viterbi recursions for orders 1–3,
//! exhaustive-enumeration oracles, order reduction and operation counts.

mod cost;
mod expand;
mod forward;
mod lattice;
mod oracle;
mod trellis;
mod viterbi;

pub use cost::{expected_mul_adds, mul_adds_per_step};
pub use expand::expand_to_first_order;
pub use forward::{
    backward, backward_with, combined_totals, forward, forward_with, BackwardResult, ForwardResult,
};
pub use lattice::{InferenceStats, Lattice, LatticeKind};
pub use oracle::{
    brute_force_likelihood, brute_force_viterbi, for_each_path, joint_log_prob, log_likelihood,
    BRUTE_FORCE_LIMIT,
};
pub use trellis::{EmissionTable, Kernel};
pub use viterbi::{viterbi, ViterbiPath};

pub(crate) use forward::{backward_pass, forward_pass};
pub(crate) use trellis::Trellis;

#[cfg(test)]
mod tests;
