use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::hmm::{Topology, MAX_ORDER};
use crate::speaker_id::SynthConfig;
use crate::supra::{PipelineConfig, SupraConfig};
use crate::training::TrainConfig;

use super::UsageError;

/// Settings shared by the commands, read from a TOML file and overridden by
/// flags. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub order: usize,
    pub topology: Topology,
    pub states: usize,
    pub supra_states: usize,
    pub alpha: f64,
    pub mixtures: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub supra_variance_floor: f64,
    pub folds: usize,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        let supra = SupraConfig::default();
        Self {
            order: 3,
            topology: Topology::Circular,
            states: 9,
            supra_states: supra.n_supra_states,
            alpha: supra.alpha,
            mixtures: train.n_components,
            seed: train.seed,
            max_iterations: train.max_iterations,
            tolerance: train.ll_rel_tolerance,
            supra_variance_floor: supra.variance_floor,
            folds: 5,
            synth: SynthConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    /// Provenance lines for output headers.
    pub fn comment_lines(&self) -> Vec<String> {
        self.to_toml().lines().filter(|l| !l.is_empty()).map(String::from).collect()
    }

    pub fn pipeline(&self) -> Result<PipelineConfig, UsageError> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(UsageError(format!("--order must be 1, 2 or 3 (got {})", self.order)));
        }
        if self.topology.is_expanded() {
            return Err(UsageError("--topology must be ltr or circular".into()));
        }
        if self.supra_states == 0 || self.states % self.supra_states != 0 {
            return Err(UsageError(format!(
                "--states ({}) must be a positive multiple of --supra-states ({})",
                self.states, self.supra_states
            )));
        }
        let config = PipelineConfig {
            order: self.order,
            topology: self.topology.clone(),
            n_states: self.states,
            train: TrainConfig {
                max_iterations: self.max_iterations,
                ll_rel_tolerance: self.tolerance,
                seed: self.seed,
                n_components: self.mixtures,
                ..TrainConfig::default()
            },
            supra: SupraConfig {
                group_size: self.states / self.supra_states,
                n_supra_states: self.supra_states,
                alpha: self.alpha,
                variance_floor: self.supra_variance_floor,
            },
        };
        config.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(c, back);
        let p = c.pipeline().unwrap();
        assert_eq!((p.order, p.n_states, p.supra.group_size), (3, 9, 3));
    }

    #[test]
    fn partial_file_and_aliases() {
        let c: RunConfig = toml::from_str("order = 1\ntopology = \"ltr\"\n[synth]\nn_speakers = 4\n").unwrap();
        assert_eq!(c.order, 1);
        assert_eq!(c.topology, Topology::LeftToRight);
        assert_eq!(c.synth.n_speakers, 4);
        assert_eq!(c.states, 9);
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }

    #[test]
    fn rejects_bad_layouts() {
        let bad = RunConfig {
            order: 4,
            ..RunConfig::default()
        };
        assert!(bad.pipeline().is_err());
        let bad = RunConfig {
            states: 8,
            ..RunConfig::default()
        };
        assert!(bad.pipeline().is_err());
    }
}
