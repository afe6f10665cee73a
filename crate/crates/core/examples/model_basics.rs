//! Builds third-order left-to-right and circular models, validates them,
//! samples a sequence and round-trips a model through its JSON file.
//!
//! cargo run --example model_basics

use supra_hmm::hmm::{random_model, sample, validate, HmmModel, Topology};

fn main() -> anyhow::Result<()> {
    for topology in [Topology::LeftToRight, Topology::Circular] {
        let model = random_model(3, topology.clone(), 4, 2, 3, 1.0, 42)?;
        let report = validate(&model);
        println!(
            "{topology}: {} contexts, {} tensor entries, valid = {}",
            model.transitions.n_contexts(),
            model.transitions.probs.len(),
            report.is_empty()
        );
        for s in 0..model.n_states {
            println!("  successors of {s}: {:?}", topology.successors(model.n_states, s));
        }
        let (states, obs) = sample(&model, 24, 7)?;
        println!("  sampled path {states:?} ({} frames of dim {})", obs.len(), obs.dim());
    }

    let model = random_model(2, Topology::Circular, 3, 1, 2, 1.0, 1)?;
    let path = std::env::temp_dir().join("supra-hmm-example-model.json");
    model.save(&path)?;
    let back = HmmModel::load(&path)?;
    println!("saved and reloaded {} -> identical: {}", path.display(), back == model);
    Ok(())
}
