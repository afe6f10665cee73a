//! Synthetic neutral/shouted identification experiment comparing model
//! families, in the shape of an accuracy table.
//!
//! cargo run --release --example stress_experiment -- [repetitions] [speaker_spread] [stress_shift_sd] [first_seed]

use std::time::Instant;

use supra_hmm::hmm::Topology;
use supra_hmm::speaker_id::{
    synth_population, Registry, ScoredTrials, StressTransform, SynthConfig, NEUTRAL, SHOUTED,
};
use supra_hmm::supra::PipelineConfig;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(1);
    let defaults = SynthConfig::default();
    let spread: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(defaults.speaker_spread);
    let shift: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(defaults.stress.mean_shift_sd);
    let first: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(0);
    let families = [(3, Topology::Circular), (1, Topology::LeftToRight)];

    println!("seed,model,alpha,neutral,shouted,seconds");
    for seed in first..first + reps {
        let pop = synth_population(&SynthConfig {
            speaker_spread: spread,
            stress: StressTransform {
                mean_shift_sd: shift,
                ..defaults.stress
            },
            seed,
            ..defaults.clone()
        })?;
        for (order, topology) in &families {
            let start = Instant::now();
            let config = PipelineConfig {
                order: *order,
                topology: topology.clone(),
                ..PipelineConfig::default()
            };
            let registry = Registry::enroll(&pop.train_items(), &config)?;
            let trials = ScoredTrials::score(&registry, &pop.test_items())?;
            for alpha in [0.0, 0.5, 1.0] {
                let r = trials.evaluate(alpha)?;
                println!(
                    "{seed},{},{alpha},{:.1},{:.1},{:.1}",
                    config.family(),
                    r.accuracy(NEUTRAL).unwrap_or(f64::NAN),
                    r.accuracy(SHOUTED).unwrap_or(f64::NAN),
                    start.elapsed().as_secs_f64()
                );
            }
        }
    }
    Ok(())
}
