//! Operation counts of the forward recursion for orders 1-3, with the
//! dense kernel and with only the topology's allowed arcs.
//!
//! cargo run --release --example cost_law

use std::time::Instant;

use supra_hmm::hmm::{random_model, sample, Topology};
use supra_hmm::inference::{expected_mul_adds, forward_with, Kernel};

fn main() -> anyhow::Result<()> {
    let frames = 100;
    println!("N  order topology   kernel  per-step  total     closed-form  ms");
    for n in [3, 9] {
        for topology in [Topology::LeftToRight, Topology::Circular] {
            for order in 1..=3 {
                let model = random_model(order, topology.clone(), n, 1, 4, 1.0, 3)?;
                let (_, obs) = sample(&model, frames, 4)?;
                for kernel in [Kernel::Dense, Kernel::Masked] {
                    let start = Instant::now();
                    let stats = forward_with(&model, &obs, kernel)?.stats;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    println!(
                        "{n:<2} {order:<5} {topology:<10} {:<7} {:<9} {:<9} {:<12} {ms:.3}",
                        format!("{kernel:?}").to_lowercase(),
                        stats.mul_adds_per_step,
                        stats.mul_add_count,
                        expected_mul_adds(&topology, n, order, frames, kernel)
                    );
                }
            }
        }
    }
    Ok(())
}
