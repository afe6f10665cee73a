use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{speakers_in_order, LabeledUtterance, Split};
use crate::error::{Error, Result};
use crate::features::Utterance;
use crate::io_util::write_atomic;
use crate::supra::{score_utterance, train_speaker, ClipScore, PipelineConfig, SpeakerModel};

pub const REGISTRY_FORMAT: &str = "supra-hmm/registry";
pub const REGISTRY_VERSION: u32 = 1;

/// Enrolled speakers in enrollment order, all trained with one pipeline
/// configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    config: PipelineConfig,
    speakers: Vec<SpeakerModel>,
}

#[derive(Serialize, Deserialize)]
struct RegistryDoc {
    format: String,
    version: u32,
    registry: Registry,
}

/// Indices of `scores` from best to worst; equal scores keep their order and
/// NaN ranks last.
pub fn rank(scores: &[f64]) -> Vec<usize> {
    let key = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| key(scores[b]).total_cmp(&key(scores[a])));
    order
}

impl Registry {
    pub fn new(config: PipelineConfig, speakers: Vec<SpeakerModel>) -> Result<Self> {
        if speakers.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        config.validate()?;
        for (i, s) in speakers.iter().enumerate() {
            if speakers[..i].iter().any(|o| o.speaker_id == s.speaker_id) {
                return Err(Error::DuplicateSpeaker(s.speaker_id.clone()));
            }
            s.validate().map_err(|e| e.for_speaker(&s.speaker_id))?;
            let a = &s.acoustic;
            if a.order != config.order
                || a.topology != config.topology
                || a.n_states != config.n_states
                || s.config != config.supra
                || a.feature_dim != speakers[0].acoustic.feature_dim
            {
                return Err(Error::format(
                    "registry",
                    format!("speaker `{}` does not match the shared configuration", s.speaker_id),
                ));
            }
        }
        Ok(Self { config, speakers })
    }

    /// Trains one speaker model per speaker from its training-split
    /// utterances, in parallel; speakers are enrolled in order of first
    /// appearance.
    pub fn enroll(items: &[LabeledUtterance], config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        let ids = speakers_in_order(items);
        if ids.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        let speakers = ids
            .par_iter()
            .map(|id| {
                let utts: Vec<Utterance> = items
                    .iter()
                    .filter(|i| &i.speaker == id && i.split == Split::Train)
                    .map(|i| i.utterance.clone())
                    .collect();
                train_speaker(id, &utts, config).map_err(|e| e.for_speaker(id))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(config.clone(), speakers)
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn speakers(&self) -> &[SpeakerModel] {
        &self.speakers
    }

    pub fn len(&self) -> usize {
        self.speakers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speakers.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.speakers.iter().map(|s| s.speaker_id.as_str()).collect()
    }

    pub fn position(&self, speaker_id: &str) -> Option<usize> {
        self.speakers.iter().position(|s| s.speaker_id == speaker_id)
    }

    pub fn feature_dim(&self) -> usize {
        self.speakers[0].acoustic.feature_dim
    }

    /// Per-unit scores of an utterance under every speaker, in enrollment
    /// order.
    pub fn score_all(&self, utterance: &Utterance) -> Result<Vec<ClipScore>> {
        self.speakers
            .par_iter()
            .map(|s| score_utterance(s, utterance).map_err(|e| e.for_speaker(&s.speaker_id)))
            .collect()
    }

    /// Speakers ranked by fused score, best first; ties keep enrollment
    /// order.
    pub fn identify(&self, utterance: &Utterance, alpha: f64) -> Result<Vec<(String, f64)>> {
        let fused = self
            .score_all(utterance)?
            .iter()
            .map(|s| s.fused(alpha))
            .collect::<Result<Vec<_>>>()?;
        Ok(rank(&fused)
            .into_iter()
            .map(|i| (self.speakers[i].speaker_id.clone(), fused[i]))
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&RegistryDoc {
            format: REGISTRY_FORMAT.into(),
            version: REGISTRY_VERSION,
            registry: self.clone(),
        })
        .map_err(|e| Error::format("registry", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RegistryDoc = serde_json::from_str(text).map_err(|e| Error::format("registry", e))?;
        if doc.format != REGISTRY_FORMAT || doc.version != REGISTRY_VERSION {
            return Err(Error::format(
                "registry",
                format!("unsupported format {} v{}", doc.format, doc.version),
            ));
        }
        Self::new(doc.registry.config, doc.registry.speakers)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
