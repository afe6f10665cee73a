//! Suprasegmental layer: prosodic segment observations from an acoustic
//! alignment, the segment-level model, and fusion of acoustic and prosodic
//! scores.

mod config;
mod segment;
mod speaker;

pub use config::{family_label, PipelineConfig, SupraConfig};
pub use segment::{
    check_tiling, segment_by_alignment, segment_observation, supra_observations, Segment, SEGMENT_DIM,
    SEGMENT_FIELDS,
};
pub use speaker::{
    align_segments, fused_score, score_clip, score_utterance, train_speaker, ClipScore, SpeakerModel,
    TrainingSummary, SPEAKER_FORMAT, SPEAKER_VERSION,
};

#[cfg(test)]
mod tests;
