use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{check_alpha, PipelineConfig, SupraConfig};
use super::segment::{segment_by_alignment, supra_observations, SEGMENT_DIM};
use crate::error::{Error, Result};
use crate::features::{extract, AudioClip, Utterance};
use crate::hmm::{validate, GmmEmission, HmmModel, InitialRamp, TransitionTensor};
use crate::inference::{forward, log_likelihood, viterbi};
use crate::io_util::write_atomic;
use crate::observation::ObservationSequence;
use crate::training::{baum_welch, train, TrainConfig};

pub const SPEAKER_FORMAT: &str = "supra-hmm/speaker";
pub const SPEAKER_VERSION: u32 = 1;

/// Log-likelihood histories of the two training runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub acoustic_ll: Vec<f64>,
    pub supra_ll: Vec<f64>,
}

/// A speaker's acoustic model over frame features and suprasegmental model
/// over segment observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeakerModel {
    pub speaker_id: String,
    pub acoustic: HmmModel,
    pub supra: HmmModel,
    pub config: SupraConfig,
    #[serde(default)]
    pub training: TrainingSummary,
}

#[derive(Serialize, Deserialize)]
struct SpeakerDoc {
    format: String,
    version: u32,
    speaker: SpeakerModel,
}

impl SpeakerModel {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("acoustic", &self.acoustic), ("suprasegmental", &self.supra)] {
            let report = validate(m);
            if !report.is_empty() {
                return Err(Error::format(format!("{name} model"), format!("{report:?}")));
            }
        }
        self.config.validate()?;
        if self.acoustic.order != self.supra.order
            || self.acoustic.topology.short_name() != self.supra.topology.short_name()
        {
            return Err(Error::format("speaker model", "acoustic and suprasegmental families differ"));
        }
        if self.acoustic.n_states != self.config.acoustic_states()
            || self.supra.n_states != self.config.n_supra_states
            || self.supra.feature_dim != SEGMENT_DIM
        {
            return Err(Error::format("speaker model", "state counts do not match the grouping"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&SpeakerDoc {
            format: SPEAKER_FORMAT.into(),
            version: SPEAKER_VERSION,
            speaker: self.clone(),
        })
        .map_err(|e| Error::format("speaker model", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpeakerDoc = serde_json::from_str(text).map_err(|e| Error::format("speaker model", e))?;
        if doc.format != SPEAKER_FORMAT || doc.version != SPEAKER_VERSION {
            return Err(Error::format(
                "speaker model",
                format!("unsupported format {} v{}", doc.format, doc.version),
            ));
        }
        doc.speaker.validate()?;
        Ok(doc.speaker)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// `(1 - alpha) * acoustic + alpha * supra`; the endpoints return the
/// corresponding input unchanged.
pub fn fused_score(log_p_acoustic: f64, log_p_supra: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha == 0.0 {
        log_p_acoustic
    } else if alpha == 1.0 {
        log_p_supra
    } else {
        (1.0 - alpha) * log_p_acoustic + alpha * log_p_supra
    })
}

/// Per-unit scores of one clip under one speaker: acoustic log-likelihood
/// per frame and suprasegmental log-likelihood per segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipScore {
    pub acoustic: f64,
    pub supra: f64,
    pub frames: usize,
    pub segments: usize,
}

impl ClipScore {
    pub fn fused(&self, alpha: f64) -> Result<f64> {
        fused_score(self.acoustic, self.supra, alpha)
    }
}

/// Segment observations of an utterance under the given acoustic model's
/// Viterbi alignment.
pub fn align_segments(acoustic: &HmmModel, utterance: &Utterance, group_size: usize) -> Result<(Vec<usize>, ObservationSequence)> {
    let path = viterbi(acoustic, &utterance.acoustic)?.states;
    let segments = segment_by_alignment(&path, group_size)?;
    let labels = segments.iter().map(|s| s.supra_state).collect();
    Ok((labels, supra_observations(&utterance.prosody, &segments)?))
}

/// Scores an utterance: forward total of the acoustic model, and the
/// suprasegmental likelihood of the segments from the acoustic model's own
/// alignment, each normalized per unit.
pub fn score_utterance(model: &SpeakerModel, utterance: &Utterance) -> Result<ClipScore> {
    let acoustic = forward(&model.acoustic, &utterance.acoustic)?.log_likelihood;
    let (_, segments) = align_segments(&model.acoustic, utterance, model.config.group_size)?;
    let supra = log_likelihood(&model.supra, &segments)?;
    Ok(ClipScore {
        acoustic: acoustic / utterance.len() as f64,
        supra: supra / segments.len() as f64,
        frames: utterance.len(),
        segments: segments.len(),
    })
}

/// Extracts features from a clip and scores it with the model's own alpha.
/// Returns `(fused, acoustic, supra)`.
pub fn score_clip(model: &SpeakerModel, clip: &AudioClip) -> Result<(f64, f64, f64)> {
    let s = score_utterance(model, &extract(clip)?)?;
    Ok((s.fused(model.config.alpha)?, s.acoustic, s.supra))
}

/// Segment-level starting model: each suprasegmental state's Gaussian is
/// fitted to the segments carrying its alignment label (all segments when
/// it has none); transitions and ramp start uniform.
fn init_supra(
    labeled: &[(Vec<usize>, ObservationSequence)],
    pipeline: &PipelineConfig,
    train_cfg: &TrainConfig,
) -> Result<HmmModel> {
    let n = pipeline.supra.n_supra_states;
    let all: Vec<&[f64]> = labeled.iter().flat_map(|(_, o)| o.frames()).collect();
    let fit = |rows: &[&[f64]]| -> Result<GmmEmission> {
        let k = rows.len() as f64;
        let mean: Vec<f64> = (0..SEGMENT_DIM).map(|d| rows.iter().map(|r| r[d]).sum::<f64>() / k).collect();
        let var = (0..SEGMENT_DIM)
            .map(|d| {
                let v = rows.iter().map(|r| (r[d] - mean[d]).powi(2)).sum::<f64>() / k;
                v.max(train_cfg.variance_floor)
            })
            .collect();
        GmmEmission::single(mean, var)
    };
    let pooled = fit(&all)?;
    let emissions = (0..n)
        .map(|s| {
            let rows: Vec<&[f64]> = labeled
                .iter()
                .flat_map(|(labels, o)| labels.iter().zip(o.frames()).filter(|(&l, _)| l == s).map(|(_, r)| r))
                .collect();
            if rows.is_empty() {
                Ok(pooled.clone())
            } else {
                fit(&rows)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    HmmModel::from_parts(
        pipeline.order,
        pipeline.topology.clone(),
        InitialRamp::uniform(pipeline.order, n, &pipeline.topology),
        TransitionTensor::uniform(pipeline.order, n, &pipeline.topology),
        emissions,
    )
}

/// Trains the acoustic model, aligns every training utterance with it,
/// and trains the suprasegmental model on the resulting segments.
pub fn train_speaker(speaker_id: &str, utterances: &[Utterance], config: &PipelineConfig) -> Result<SpeakerModel> {
    config.validate()?;
    if utterances.is_empty() {
        return Err(Error::param(format!("no training utterances for `{speaker_id}`")));
    }
    let acoustic_obs: Vec<ObservationSequence> = utterances.iter().map(|u| u.acoustic.clone()).collect();
    let acoustic = train(&acoustic_obs, config.order, config.topology.clone(), config.n_states, &config.train)
        .map_err(|e| e.at_stage("acoustic training"))?;

    let labeled = utterances
        .iter()
        .map(|u| align_segments(&acoustic.model, u, config.supra.group_size))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("alignment"))?;

    let supra_cfg = config.supra_train();
    let supra = init_supra(&labeled, config, &supra_cfg)
        .and_then(|init| {
            let obs: Vec<ObservationSequence> = labeled.into_iter().map(|(_, o)| o).collect();
            baum_welch(init, &obs, &supra_cfg)
        })
        .map_err(|e| e.at_stage("suprasegmental training"))?;

    let model = SpeakerModel {
        speaker_id: speaker_id.to_string(),
        acoustic: acoustic.model,
        supra: supra.model,
        config: config.supra.clone(),
        training: TrainingSummary {
            acoustic_ll: acoustic.ll_history,
            supra_ll: supra.ll_history,
        },
    };
    model.validate()?;
    Ok(model)
}
