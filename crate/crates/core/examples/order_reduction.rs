//! Rewrites second- and third-order models as first-order models over
//! state histories and shows the likelihoods agree.
//!
//! cargo run --example order_reduction

use supra_hmm::hmm::{random_model, sample, Topology};
use supra_hmm::inference::{expand_to_first_order, forward, log_likelihood};

fn main() -> anyhow::Result<()> {
    for order in [2, 3] {
        let model = random_model(order, Topology::Circular, 3, 1, 2, 1.0, 5)?;
        let expanded = expand_to_first_order(&model)?;
        println!(
            "order {order}, N = {}: expanded first-order model has {} composite states",
            model.n_states, expanded.n_states
        );
        for len in [order, 10, 50] {
            let (_, obs) = sample(&model, len, len as u64)?;
            let a = forward(&model, &obs)?.log_likelihood;
            let b = log_likelihood(&expanded, &obs)?;
            println!("  T = {len:>2}: order-{order} {a:.12}  expanded {b:.12}  |diff| {:.1e}", (a - b).abs());
        }
    }
    Ok(())
}
