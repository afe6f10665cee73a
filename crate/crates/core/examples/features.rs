//! Writes a synthetic voiced WAV clip, reads it back and extracts the
//! 32-dimensional acoustic features and the pitch/energy track.
//!
//! cargo run --release --example features [clip.wav]

use std::f64::consts::TAU;

use supra_hmm::features::{extract, frame_count, AudioClip, FeatureFile, SAMPLE_RATE_HZ};

fn main() -> anyhow::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            // one second of a 180 Hz harmonic tone gliding to 220 Hz, then silence
            let sr = SAMPLE_RATE_HZ as f64;
            let mut phase = 0.0;
            let samples: Vec<f64> = (0..SAMPLE_RATE_HZ as usize + 4000)
                .map(|i| {
                    let t = i as f64 / sr;
                    if t > 1.0 {
                        return 0.0;
                    }
                    phase += TAU * (180.0 + 40.0 * t) / sr;
                    0.4 * phase.sin() + 0.2 * (2.0 * phase).sin() + 0.1 * (3.0 * phase).sin()
                })
                .collect();
            let path = std::env::temp_dir().join("supra-hmm-example.wav");
            AudioClip::new(samples, SAMPLE_RATE_HZ)?.write_wav(&path)?;
            path
        }
    };

    let clip = AudioClip::read_wav(&path)?;
    println!("{}: {} samples, {:.2} s", path.display(), clip.len(), clip.duration_secs());
    println!("expected frames: {}", frame_count(clip.len())?);

    let utterance = extract(&clip)?;
    println!(
        "acoustic features: {} frames x {} dims; voiced frames: {}",
        utterance.len(),
        utterance.acoustic.dim(),
        utterance.prosody.voiced_frames()
    );
    for t in (0..utterance.len()).step_by(25) {
        let frame = utterance.acoustic.frame(t);
        println!(
            "  frame {t:>3}: f0 {:>6.1} Hz  log energy {:>7.2}  c1 {:>6.2}  c2 {:>6.2}",
            utterance.prosody.f0_hz[t], utterance.prosody.log_energy[t], frame[0], frame[1]
        );
    }

    let json = FeatureFile::extracted(path.display().to_string(), utterance).to_json()?;
    println!("feature file: {} bytes of JSON", json.len());
    Ok(())
}
