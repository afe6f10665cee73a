//! Two-sample t statistic on fold accuracies and five-subset
//! cross-validation on a small synthetic population.
//!
//! cargo run --release --example statistics

use supra_hmm::speaker_id::{cross_validate, partition, synth_population, t_test, SynthConfig, NEUTRAL, T_CRITICAL_05};
use supra_hmm::supra::PipelineConfig;

fn main() -> anyhow::Result<()> {
    let a = [85.0, 86.0, 85.0, 86.0, 86.0];
    let b = [83.0, 84.0, 83.0, 83.0, 84.0];
    let t = t_test(&a, &b)?;
    println!("t = {t:.4} (significant at 0.05: {})", t.abs() > T_CRITICAL_05);

    println!("partition of 12 items into 5 subsets: {:?}", partition(12, 5, 1)?);

    let pop = synth_population(&SynthConfig {
        n_speakers: 5,
        order: 1,
        frames_per_clip: 120,
        train_clips: 6,
        clips_per_condition: 6,
        ..SynthConfig::default()
    })?;
    let mut config = PipelineConfig {
        order: 1,
        ..PipelineConfig::default()
    };
    config.train.n_components = 2;
    let cv = cross_validate(&pop.items, 5, &config, 0.5, NEUTRAL, 3)?;
    for fold in &cv.folds {
        match &fold.invalid {
            Some(reason) => println!("fold {}: invalid ({reason})", fold.fold),
            None => println!("fold {}: train {} test {} {:?}", fold.fold, fold.train, fold.test, fold.accuracy),
        }
    }
    for s in &cv.summary {
        println!("{}: mean {:.1}% sd {:.1} over {} folds", s.condition, s.mean, s.sd, s.folds);
    }
    Ok(())
}
