//! Forward, backward and Viterbi on small models, checked against
//! exhaustive enumeration of every state path.
//!
//! cargo run --example inference_oracles

use supra_hmm::hmm::{random_model, sample, Topology};
use supra_hmm::inference::{
    backward, brute_force_likelihood, brute_force_viterbi, combined_totals, forward, viterbi,
};

fn main() -> anyhow::Result<()> {
    println!("order topology  forward          exhaustive       viterbi path     matches");
    for order in 1..=3 {
        for topology in [Topology::LeftToRight, Topology::Circular] {
            let model = random_model(order, topology.clone(), 3, 2, 2, 1.5, order as u64)?;
            let (_, obs) = sample(&model, 6, 99)?;
            let f = forward(&model, &obs)?;
            let exhaustive = brute_force_likelihood(&model, &obs)?;
            let path = viterbi(&model, &obs)?;
            let (best, _) = brute_force_viterbi(&model, &obs)?;
            println!(
                "{order}     {topology:<9} {:<16.10} {:<16.10} {:<16} {}",
                f.log_likelihood,
                exhaustive,
                format!("{:?}", path.states),
                path.states == best
            );

            let b = backward(&model, &obs)?;
            let drift = combined_totals(&f.lattice, &b.lattice)
                .iter()
                .map(|t| (t - f.log_likelihood).abs())
                .fold(0.0, f64::max);
            println!("      forward-backward total drift over time: {drift:.2e}");
        }
    }
    Ok(())
}
