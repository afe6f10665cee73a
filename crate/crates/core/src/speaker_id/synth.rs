use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{LabeledUtterance, Split};
use crate::error::{Error, Result};
use crate::features::{ProsodicTrack, Utterance};
use crate::hmm::{random_model, sample, GmmEmission, HmmModel, Topology, MAX_ORDER};

pub const NEUTRAL: &str = "neutral";
pub const SHOUTED: &str = "shouted";

/// Distribution shift applied to the emissions of shouted clips: every
/// mean moves up by `mean_shift_sd` pooled within-state standard deviations
/// in every dimension, and every variance is multiplied by
/// `variance_scale`. It applies to the acoustic emissions and, through
/// [`StressTransform::apply_prosody`], to the per-state pitch and energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressTransform {
    pub mean_shift_sd: f64,
    pub variance_scale: f64,
}

impl Default for StressTransform {
    fn default() -> Self {
        Self {
            mean_shift_sd: 0.75,
            variance_scale: 1.5,
        }
    }
}

impl StressTransform {
    pub fn identity() -> Self {
        Self {
            mean_shift_sd: 0.0,
            variance_scale: 1.0,
        }
    }

    /// Shifted per-state prosody: pitch and energy means move by
    /// `mean_shift_sd` pooled frame-level deviations, spreads scale by
    /// `sqrt(variance_scale)`.
    pub fn apply_prosody(&self, prosody: &[StateProsody]) -> Vec<StateProsody> {
        let n = prosody.len() as f64;
        let pooled_f0 = (prosody.iter().map(|p| p.f0_sd_hz * p.f0_sd_hz).sum::<f64>() / n).sqrt();
        let pooled_energy = (prosody.iter().map(|p| p.log_energy_sd * p.log_energy_sd).sum::<f64>() / n).sqrt();
        let sd_scale = self.variance_scale.sqrt();
        prosody
            .iter()
            .map(|p| StateProsody {
                f0_hz: p.f0_hz + self.mean_shift_sd * pooled_f0,
                f0_sd_hz: p.f0_sd_hz * sd_scale,
                voicing_prob: p.voicing_prob,
                log_energy: p.log_energy + self.mean_shift_sd * pooled_energy,
                log_energy_sd: p.log_energy_sd * sd_scale,
            })
            .collect()
    }

    /// The shifted model: same transitions, perturbed emissions.
    pub fn apply(&self, model: &HmmModel) -> Result<HmmModel> {
        let dim = model.feature_dim;
        let mut pooled = vec![0.0; dim];
        let mut count = 0.0;
        for e in &model.emissions {
            for (w, var) in e.weights.iter().zip(&e.variances) {
                for d in 0..dim {
                    pooled[d] += w * var[d];
                }
            }
            count += 1.0;
        }
        let shift: Vec<f64> = pooled.iter().map(|v| self.mean_shift_sd * (v / count).sqrt()).collect();
        let mut out = model.clone();
        for e in &mut out.emissions {
            for mean in &mut e.means {
                mean.iter_mut().zip(&shift).for_each(|(m, s)| *m += s);
            }
            for var in &mut e.variances {
                var.iter_mut().for_each(|v| *v *= self.variance_scale);
            }
        }
        Ok(out)
    }
}

/// Prosodic behavior of one state of a synthetic speaker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateProsody {
    pub f0_hz: f64,
    pub f0_sd_hz: f64,
    pub voicing_prob: f64,
    pub log_energy: f64,
    pub log_energy_sd: f64,
}

/// Generating model of one synthetic speaker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeakerTruth {
    pub speaker_id: String,
    /// Synthetic tag that only exercises per-gender reporting.
    pub gender: String,
    pub acoustic: HmmModel,
    pub prosody: Vec<StateProsody>,
}

/// Spreads of the synthetic prosody: between speakers, between a
/// speaker's states, and frame to frame within a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProsodySpread {
    pub speaker_f0_sd_hz: f64,
    pub state_f0_sd_hz: f64,
    pub frame_f0_sd_hz: f64,
    pub speaker_energy_sd: f64,
    pub state_energy_sd: f64,
    pub frame_energy_sd: f64,
}

impl Default for ProsodySpread {
    fn default() -> Self {
        Self {
            speaker_f0_sd_hz: 10.0,
            state_f0_sd_hz: 6.0,
            frame_f0_sd_hz: 15.0,
            speaker_energy_sd: 0.3,
            state_energy_sd: 0.5,
            frame_energy_sd: 0.8,
        }
    }
}

/// Shape of a synthetic population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_speakers: usize,
    pub order: usize,
    pub topology: Topology,
    pub n_states: usize,
    pub feature_dim: usize,
    pub frames_per_clip: usize,
    /// Neutral enrollment clips per speaker.
    pub train_clips: usize,
    /// Test clips per speaker and condition.
    pub clips_per_condition: usize,
    /// Per-dimension spread of shared state means.
    pub state_spread: f64,
    /// Per-dimension spread of each speaker's offsets from the shared means.
    pub speaker_spread: f64,
    pub prosody: ProsodySpread,
    pub stress: StressTransform,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_speakers: 10,
            order: 3,
            topology: Topology::Circular,
            n_states: 9,
            feature_dim: 32,
            frames_per_clip: 200,
            train_clips: 4,
            clips_per_condition: 10,
            state_spread: 1.0,
            speaker_spread: 0.25,
            prosody: ProsodySpread::default(),
            stress: StressTransform::default(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_speakers < 2 {
            return Err(Error::param("a population needs at least two speakers"));
        }
        if !(1..=MAX_ORDER).contains(&self.order) || self.topology.is_expanded() {
            return Err(Error::param("order must be 1-3 and topology ltr or circular"));
        }
        if self.n_states < 2 || self.feature_dim == 0 {
            return Err(Error::param("need at least two states and one feature dimension"));
        }
        if self.frames_per_clip < self.order || self.train_clips == 0 {
            return Err(Error::param("clips must cover the model order and training needs clips"));
        }
        if !(self.state_spread >= 0.0 && self.speaker_spread >= 0.0) {
            return Err(Error::param("spreads must be non-negative"));
        }
        if !(self.stress.variance_scale > 0.0 && self.stress.mean_shift_sd.is_finite()) {
            return Err(Error::param("stress variance scale must be positive"));
        }
        Ok(())
    }

    /// Manifest rows this configuration produces.
    pub fn clip_count(&self) -> usize {
        self.n_speakers * (self.train_clips + 2 * self.clips_per_condition)
    }
}

/// Labeled synthetic utterances plus the models that generated them.
#[derive(Clone, Debug)]
pub struct SynthPopulation {
    pub config: SynthConfig,
    pub speakers: Vec<SpeakerTruth>,
    pub items: Vec<LabeledUtterance>,
}

impl SynthPopulation {
    pub fn train_items(&self) -> Vec<LabeledUtterance> {
        self.items.iter().filter(|i| i.split == Split::Train).cloned().collect()
    }

    pub fn test_items(&self) -> Vec<LabeledUtterance> {
        self.items.iter().filter(|i| i.split == Split::Test).cloned().collect()
    }
}

fn make_speaker(
    index: usize,
    cfg: &SynthConfig,
    base_means: &[Vec<f64>],
    base_vars: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<SpeakerTruth> {
    let mut acoustic = random_model(cfg.order, cfg.topology.clone(), cfg.n_states, 1, cfg.feature_dim, 1.0, rng.random())?;
    acoustic.emissions = base_means
        .iter()
        .zip(base_vars)
        .map(|(mean, var)| {
            let m = mean
                .iter()
                .map(|&b| {
                    let z: f64 = StandardNormal.sample(rng);
                    b + cfg.speaker_spread * z
                })
                .collect();
            GmmEmission::single(m, var.clone())
        })
        .collect::<Result<_>>()?;

    let gender = if index % 2 == 0 { "female" } else { "male" };
    let base_f0 = if gender == "female" { 210.0 } else { 120.0 };
    let mut normal = |sd: f64| -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        sd * z
    };
    let speaker_f0 = base_f0 + normal(cfg.prosody.speaker_f0_sd_hz);
    let speaker_energy = -3.0 + normal(cfg.prosody.speaker_energy_sd);
    let prosody = (0..cfg.n_states)
        .map(|_| StateProsody {
            f0_hz: (speaker_f0 + normal(cfg.prosody.state_f0_sd_hz)).max(60.0),
            f0_sd_hz: cfg.prosody.frame_f0_sd_hz,
            voicing_prob: 0.3 + 0.65 * (0.5 + 0.5 * normal(1.0).tanh()),
            log_energy: speaker_energy + normal(cfg.prosody.state_energy_sd),
            log_energy_sd: cfg.prosody.frame_energy_sd,
        })
        .collect();
    Ok(SpeakerTruth {
        speaker_id: format!("spk{index:02}"),
        gender: gender.into(),
        acoustic,
        prosody,
    })
}

/// Samples one clip: acoustic frames from `model` and a prosodic track from
/// the per-state prosody along the same state path.
pub fn synth_utterance(model: &HmmModel, prosody: &[StateProsody], frames: usize, seed: u64) -> Result<Utterance> {
    let (states, acoustic) = sample(model, frames, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut f0_hz = Vec::with_capacity(frames);
    let mut log_energy = Vec::with_capacity(frames);
    for &s in &states {
        let p = &prosody[s];
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let voiced = rng.random::<f64>() < p.voicing_prob;
        f0_hz.push(if voiced { (p.f0_hz + p.f0_sd_hz * z1).max(F0_FLOOR_HZ) } else { 0.0 });
        log_energy.push(p.log_energy + p.log_energy_sd * z2);
    }
    Utterance::new(acoustic, ProsodicTrack { f0_hz, log_energy })
}

const F0_FLOOR_HZ: f64 = 50.0;

/// Generates a population: shared state means and variances, per-speaker
/// mean offsets and random order-k transitions, per-state prosody, and for
/// each speaker `train_clips` neutral enrollment clips followed by
/// `clips_per_condition` neutral and then shouted test clips. Shouted clips
/// come from the stress-transformed acoustic model and prosody.
/// Features are used as generated (no per-utterance normalization).
pub fn synth_population(cfg: &SynthConfig) -> Result<SynthPopulation> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base_means: Vec<Vec<f64>> = (0..cfg.n_states)
        .map(|_| {
            (0..cfg.feature_dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    cfg.state_spread * z
                })
                .collect()
        })
        .collect();
    let base_vars: Vec<Vec<f64>> = (0..cfg.n_states)
        .map(|_| (0..cfg.feature_dim).map(|_| rng.random_range(0.5..1.5)).collect())
        .collect();
    let speakers = (0..cfg.n_speakers)
        .map(|v| make_speaker(v, cfg, &base_means, &base_vars, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    struct Job {
        speaker: usize,
        condition: &'static str,
        split: Split,
        seed: u64,
    }
    let mut jobs = Vec::with_capacity(cfg.clip_count());
    for v in 0..cfg.n_speakers {
        let plan = [
            (NEUTRAL, Split::Train, cfg.train_clips),
            (NEUTRAL, Split::Test, cfg.clips_per_condition),
            (SHOUTED, Split::Test, cfg.clips_per_condition),
        ];
        for (condition, split, count) in plan {
            for _ in 0..count {
                jobs.push(Job {
                    speaker: v,
                    condition,
                    split,
                    seed: rng.random(),
                });
            }
        }
    }
    let stressed = speakers
        .iter()
        .map(|s| Ok((cfg.stress.apply(&s.acoustic)?, cfg.stress.apply_prosody(&s.prosody))))
        .collect::<Result<Vec<_>>>()?;

    let items = jobs
        .par_iter()
        .map(|job| {
            let truth = &speakers[job.speaker];
            let (model, prosody) = if job.condition == SHOUTED {
                (&stressed[job.speaker].0, &stressed[job.speaker].1[..])
            } else {
                (&truth.acoustic, &truth.prosody[..])
            };
            Ok(LabeledUtterance {
                speaker: truth.speaker_id.clone(),
                condition: job.condition.to_string(),
                split: job.split,
                gender: Some(truth.gender.clone()),
                utterance: synth_utterance(model, prosody, cfg.frames_per_clip, job.seed)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SynthPopulation {
        config: cfg.clone(),
        speakers,
        items,
    })
}
