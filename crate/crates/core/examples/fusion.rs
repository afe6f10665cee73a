//! Trains two speakers' acoustic + suprasegmental models on synthetic
//! utterances and shows how the fused score moves with alpha.
//!
//! cargo run --release --example fusion

use supra_hmm::speaker_id::{synth_population, SynthConfig, NEUTRAL};
use supra_hmm::supra::{score_utterance, train_speaker, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let pop = synth_population(&SynthConfig {
        n_speakers: 2,
        order: 2,
        frames_per_clip: 150,
        clips_per_condition: 1,
        ..SynthConfig::default()
    })?;
    let config = PipelineConfig {
        order: 2,
        ..PipelineConfig::default()
    };
    let models = pop
        .speakers
        .iter()
        .map(|truth| {
            let clips: Vec<_> = pop
                .train_items()
                .into_iter()
                .filter(|i| i.speaker == truth.speaker_id)
                .map(|i| i.utterance)
                .collect();
            train_speaker(&truth.speaker_id, &clips, &config)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let probe = pop
        .test_items()
        .into_iter()
        .find(|i| i.condition == NEUTRAL)
        .expect("population has neutral test clips");
    println!("probe clip from {}", probe.speaker);
    for model in &models {
        let score = score_utterance(model, &probe.utterance)?;
        println!(
            "  {}: acoustic {:.3}/frame over {} frames, supra {:.3}/segment over {} segments",
            model.speaker_id, score.acoustic, score.frames, score.supra, score.segments
        );
        let line: Vec<String> = (0..=4)
            .map(|i| {
                let alpha = i as f64 / 4.0;
                score.fused(alpha).map(|f| format!("a={alpha:.2}: {f:.3}"))
            })
            .collect::<Result<_, _>>()?;
        println!("    fused {}", line.join("  "));
    }
    Ok(())
}
