//! Closed-set identification: enrollment registry, ranking, accuracy
//! tables, t-tests, cross-validation and the synthetic population harness.

mod crossval;
mod dataset;
mod eval;
mod registry;
mod stats;
mod synth;

pub use crossval::{cross_validate, partition, ConditionSummary, CrossValidation, FoldResult, TRAIN_FRACTION};
pub use dataset::{load_utterance, speakers_in_order, LabeledUtterance, Manifest, ManifestRow, Split};
pub use eval::{evaluate, AccuracyRow, EvalResult, EvalTable, ScoredTrials, Trial, ALL_GENDERS};
pub use registry::{rank, Registry, REGISTRY_FORMAT, REGISTRY_VERSION};
pub use stats::{mean_sd, t_test, T_CRITICAL_05};
pub use synth::{
    synth_population, synth_utterance, ProsodySpread, SpeakerTruth, StateProsody, StressTransform, SynthConfig,
    SynthPopulation, NEUTRAL, SHOUTED,
};
