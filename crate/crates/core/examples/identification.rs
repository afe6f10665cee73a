//! Closed-set identification on a synthetic 10-speaker population: enroll
//! on neutral clips, then report accuracy per condition over an alpha sweep
//! and the confusion matrix at the default weight.
//!
//! cargo run --release --example identification

use supra_hmm::speaker_id::{synth_population, Registry, ScoredTrials, SynthConfig};
use supra_hmm::supra::PipelineConfig;

fn main() -> anyhow::Result<()> {
    let pop = synth_population(&SynthConfig {
        order: 2,
        ..SynthConfig::default()
    })?;
    let config = PipelineConfig {
        order: 2,
        ..PipelineConfig::default()
    };
    let registry = Registry::enroll(&pop.train_items(), &config)?;
    let trials = ScoredTrials::score(&registry, &pop.test_items())?;

    for step in 0..=10 {
        let result = trials.evaluate(step as f64 / 10.0)?;
        let cells: Vec<String> = result
            .rows
            .iter()
            .filter(|r| r.gender == "all")
            .map(|r| format!("{} {:>5.1}%", r.condition, r.accuracy))
            .collect();
        println!("alpha {:.1}: {}", result.alpha, cells.join("  "));
    }

    let result = trials.evaluate(config.supra.alpha)?;
    println!("\n{} at alpha {}:", result.model, result.alpha);
    print!("{}", result.table().to_csv(&[])?);
    println!("\nconfusion (rows: true speaker, columns: predicted)");
    for (id, row) in result.speakers.iter().zip(&result.confusion) {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>3}")).collect();
        println!("{id} {}", cells.join(""));
    }
    Ok(())
}
