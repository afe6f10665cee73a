//! Baum-Welch training of a third-order circular model on sequences drawn
//! from a known model, printing the likelihood history and the learned
//! stay probabilities.
//!
//! cargo run --release --example training

use supra_hmm::hmm::{random_model, sample, Topology};
use supra_hmm::training::{train, TrainConfig};

fn main() -> anyhow::Result<()> {
    let truth = random_model(3, Topology::Circular, 4, 1, 3, 3.0, 11)?;
    let data = (0..20)
        .map(|i| sample(&truth, 200, i).map(|(_, obs)| obs))
        .collect::<Result<Vec<_>, _>>()?;

    let config = TrainConfig {
        n_components: 1,
        max_iterations: 100,
        ..TrainConfig::default()
    };
    let outcome = train(&data, 3, Topology::Circular, 4, &config)?;
    println!("{outcome}");
    for (i, ll) in outcome.ll_history.iter().enumerate() {
        println!("  iteration {i:>2}: {ll:.4}");
    }

    let model = &outcome.model;
    let n = model.n_states;
    println!("learned state means (first dimension):");
    for (s, g) in model.emissions.iter().enumerate() {
        println!("  state {s}: {:.3}", g.means[0][0]);
    }
    println!("steady self-transition probabilities by context:");
    for ctx in 0..model.transitions.n_contexts() {
        let last = ctx % n;
        let row = model.transitions.row(ctx);
        if row.iter().any(|&p| p > 1e-6) && (ctx / n) % n == last {
            println!("  context {ctx:>2}: stay {:.3}", row[last]);
        }
    }
    Ok(())
}
