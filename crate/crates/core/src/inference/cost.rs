//! Closed-form operation counts for the forward and backward recursions.

use super::trellis::Kernel;
use crate::hmm::Topology;

/// Multiply-adds in one recursion step: `N^(order+1)` for the dense kernel,
/// `N^(order-1) · Σ_s |succ(s)|` when only allowed arcs are visited.
pub fn mul_adds_per_step(topology: &Topology, n_states: usize, order: usize, kernel: Kernel) -> u64 {
    let n = n_states as u64;
    match kernel {
        Kernel::Dense => n.pow(order as u32 + 1),
        Kernel::Masked => {
            let arcs: u64 = (0..n_states)
                .map(|s| topology.successors(n_states, s).len() as u64)
                .sum();
            n.pow(order as u32 - 1) * arcs
        }
    }
}

/// Total multiply-adds for a length-`frames` sequence: `(T - order)` steps.
pub fn expected_mul_adds(
    topology: &Topology,
    n_states: usize,
    order: usize,
    frames: usize,
    kernel: Kernel,
) -> u64 {
    frames.saturating_sub(order) as u64 * mul_adds_per_step(topology, n_states, order, kernel)
}
