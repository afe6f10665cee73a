//! Front end: pre-emphasis, Hamming framing, 16 static + 16 delta MFCCs and
//! frame-level pitch and energy tracks from 16 kHz mono PCM.

mod audio;
mod delta;
mod dsp;
mod mfcc;
mod prosody;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use audio::{AudioClip, SAMPLE_RATE_HZ};
pub use delta::delta;
pub use dsp::{frame_and_window, frame_count, frames, hamming, preemphasize};
pub use mfcc::{dct2_without_dc, hz_to_mel, mel_to_hz, mfcc, MelFilterbank, MfccExtractor};
pub use prosody::{estimate_f0, log_energy, prosodic_track, ProsodicTrack};

use crate::error::{Error, Result};
use crate::io_util::write_atomic;
use crate::observation::ObservationSequence;

/// Pre-emphasis coefficient.
pub const PREEMPHASIS: f64 = 0.95;
/// Analysis window: 30 ms at 16 kHz.
pub const WINDOW: usize = 480;
/// Frame hop: 5 ms at 16 kHz.
pub const HOP: usize = 80;
pub const FFT_SIZE: usize = 512;
pub const N_MELS: usize = 26;
/// Static cepstra kept per frame (c1..c16).
pub const N_CEPSTRA: usize = 16;
/// Acoustic feature dimension: static plus delta cepstra.
pub const ACOUSTIC_DIM: usize = 2 * N_CEPSTRA;
pub const DELTA_WINDOW: usize = 2;
pub const LOG_FLOOR: f64 = 1e-10;
pub const ENERGY_FLOOR: f64 = 1e-10;
pub const F0_MIN_HZ: f64 = 50.0;
pub const F0_MAX_HZ: f64 = 500.0;
pub const VOICING_THRESHOLD: f64 = 0.3;

/// Subtracts each column's mean and divides by its population standard
/// deviation; constant columns are only centered.
pub fn zscore_columns(frames: &mut [Vec<f64>]) {
    if frames.is_empty() {
        return;
    }
    let t = frames.len() as f64;
    for d in 0..frames[0].len() {
        let mean = frames.iter().map(|f| f[d]).sum::<f64>() / t;
        let var = frames.iter().map(|f| (f[d] - mean).powi(2)).sum::<f64>() / t;
        let sd = var.sqrt();
        for f in frames.iter_mut() {
            f[d] -= mean;
            if sd > 0.0 {
                f[d] /= sd;
            }
        }
    }
}

/// Unnormalized `T x 32` static + delta cepstra.
pub fn raw_acoustic_frames(clip: &AudioClip) -> Result<Vec<Vec<f64>>> {
    let emphasized = preemphasize(clip.samples());
    let windowed = frame_and_window(&emphasized)?;
    let mut extractor = MfccExtractor::new();
    let statics: Vec<Vec<f64>> = windowed.iter().map(|f| extractor.mfcc(f)).collect();
    let deltas = delta(&statics);
    Ok(statics
        .into_iter()
        .zip(deltas)
        .map(|(mut s, d)| {
            s.extend(d);
            s
        })
        .collect())
}

/// `T x 32` features (16 static + 16 delta cepstra), each column z-scored
/// within the utterance.
pub fn acoustic_features(clip: &AudioClip) -> Result<ObservationSequence> {
    let mut frames = raw_acoustic_frames(clip)?;
    zscore_columns(&mut frames);
    ObservationSequence::from_frames(&frames)
}

/// Acoustic features and prosodic track of one clip, on the same frame grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub acoustic: ObservationSequence,
    pub prosody: ProsodicTrack,
}

impl Utterance {
    pub fn new(acoustic: ObservationSequence, prosody: ProsodicTrack) -> Result<Self> {
        if acoustic.len() != prosody.len() || prosody.f0_hz.len() != prosody.log_energy.len() {
            return Err(Error::format(
                "utterance",
                format!(
                    "{} acoustic frames but {} pitch and {} energy values",
                    acoustic.len(),
                    prosody.f0_hz.len(),
                    prosody.log_energy.len()
                ),
            ));
        }
        if acoustic.is_empty() {
            return Err(Error::format("utterance", "no frames"));
        }
        Ok(Self { acoustic, prosody })
    }

    pub fn len(&self) -> usize {
        self.acoustic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acoustic.is_empty()
    }
}

/// Full front end for one clip.
pub fn extract(clip: &AudioClip) -> Result<Utterance> {
    let acoustic = acoustic_features(clip)?;
    let prosody = prosodic_track(clip.samples(), clip.sample_rate_hz() as f64)?;
    Utterance::new(acoustic, prosody)
}

/// Settings recorded alongside every feature dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionMetadata {
    pub sample_rate_hz: u32,
    pub preemphasis: f64,
    pub window_samples: usize,
    pub hop_samples: usize,
    pub window_function: String,
    pub fft_size: usize,
    pub mel_filters: usize,
    pub mel_range_hz: [f64; 2],
    pub cepstra: String,
    pub log_energy: String,
    pub delta_window: usize,
    pub normalization: String,
    pub f0_range_hz: [f64; 2],
    pub voicing_threshold: f64,
}

impl Default for ExtractionMetadata {
    fn default() -> Self {
        Self {
            sample_rate_hz: SAMPLE_RATE_HZ,
            preemphasis: PREEMPHASIS,
            window_samples: WINDOW,
            hop_samples: HOP,
            window_function: "hamming".into(),
            fft_size: FFT_SIZE,
            mel_filters: N_MELS,
            mel_range_hz: [0.0, SAMPLE_RATE_HZ as f64 / 2.0],
            cepstra: "DCT-II orthonormal, c1..c16 (c0 excluded), then 16 deltas".into(),
            log_energy: format!("ln(max(E_j / sum E, {LOG_FLOOR:e}))"),
            delta_window: DELTA_WINDOW,
            normalization: "per-utterance z-score of all 32 columns".into(),
            f0_range_hz: [F0_MIN_HZ, F0_MAX_HZ],
            voicing_threshold: VOICING_THRESHOLD,
        }
    }
}

pub const FEATURE_FORMAT: &str = "supra-hmm/features";
pub const FEATURE_VERSION: u32 = 1;

/// On-disk feature dump: JSON with the acoustic matrix as one array per
/// frame, the prosodic track, the source clip name and the extraction
/// settings (absent for generated features).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureFile {
    pub format: String,
    pub version: u32,
    pub source: String,
    pub metadata: Option<ExtractionMetadata>,
    pub frames: usize,
    pub acoustic: ObservationSequence,
    pub prosody: ProsodicTrack,
}

impl FeatureFile {
    /// Features extracted from audio with the default settings.
    pub fn extracted(source: impl Into<String>, utterance: Utterance) -> Self {
        Self {
            metadata: Some(ExtractionMetadata::default()),
            ..Self::generated(source, utterance)
        }
    }

    /// Features that did not come from the audio front end.
    pub fn generated(source: impl Into<String>, utterance: Utterance) -> Self {
        Self {
            format: FEATURE_FORMAT.into(),
            version: FEATURE_VERSION,
            source: source.into(),
            metadata: None,
            frames: utterance.len(),
            acoustic: utterance.acoustic,
            prosody: utterance.prosody,
        }
    }

    pub fn utterance(&self) -> Result<Utterance> {
        Utterance::new(self.acoustic.clone(), self.prosody.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::format("feature file", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::format("feature file", e))?;
        if file.format != FEATURE_FORMAT || file.version != FEATURE_VERSION {
            return Err(Error::format(
                "feature file",
                format!("unsupported format {} v{}", file.format, file.version),
            ));
        }
        if file.frames != file.acoustic.len() {
            return Err(Error::format("feature file", "frame count does not match the matrix"));
        }
        file.utterance()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone_clip(len: usize) -> AudioClip {
        let samples = (0..len)
            .map(|n| {
                let t = n as f64 / 16_000.0;
                0.4 * (2.0 * std::f64::consts::PI * 220.0 * t).sin()
                    + 0.2 * (2.0 * std::f64::consts::PI * 1375.0 * t * (1.0 + t)).sin()
            })
            .collect();
        AudioClip::new(samples, SAMPLE_RATE_HZ).unwrap()
    }

    #[test]
    fn one_second_gives_195_frames() {
        let obs = acoustic_features(&tone_clip(16_000)).unwrap();
        assert_eq!(obs.len(), 195);
        assert_eq!(obs.dim(), 32);
    }

    #[test]
    fn columns_are_standardized() {
        let obs = acoustic_features(&tone_clip(8000)).unwrap();
        let t = obs.len() as f64;
        for d in 0..32 {
            let col: Vec<f64> = obs.frames().map(|f| f[d]).collect();
            let mean = col.iter().sum::<f64>() / t;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t;
            assert!(mean.abs() < 1e-6);
            assert!(var == 0.0 || (var - 1.0).abs() < 1e-6, "column {d}: {var}");
        }
    }

    #[test]
    fn extraction_is_deterministic_and_gain_invariant() {
        let loud = tone_clip(4000);
        let clip = AudioClip::new(loud.samples().iter().map(|x| x * 0.5).collect(), SAMPLE_RATE_HZ).unwrap();
        let a = extract(&clip).unwrap();
        assert_eq!(a, extract(&clip).unwrap());
        let b = extract(&loud).unwrap();
        assert_eq!(raw_acoustic_frames(&clip).unwrap(), raw_acoustic_frames(&loud).unwrap());
        assert_eq!(a.acoustic, b.acoustic);
        assert_eq!(a.prosody.f0_hz, b.prosody.f0_hz);
    }

    #[test]
    fn short_clip_rejected() {
        let clip = AudioClip::new(vec![0.1; 479], SAMPLE_RATE_HZ).unwrap();
        assert!(matches!(extract(&clip), Err(Error::ClipTooShort { .. })));
    }

    #[test]
    fn feature_file_round_trip() {
        let file = FeatureFile::extracted("a.wav", extract(&tone_clip(2000)).unwrap());
        let back = FeatureFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(file, back);
    }
}
