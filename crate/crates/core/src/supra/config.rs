use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hmm::{Topology, MAX_ORDER};
use crate::training::TrainConfig;

/// How conventional states group into suprasegmental states, and the fusion
/// weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupraConfig {
    /// Conventional states per suprasegmental state.
    pub group_size: usize,
    pub n_supra_states: usize,
    /// Weight of the suprasegmental score in the fused score.
    pub alpha: f64,
    /// Variance floor for the segment-level Gaussians.
    pub variance_floor: f64,
}

impl Default for SupraConfig {
    fn default() -> Self {
        Self {
            group_size: 3,
            n_supra_states: 3,
            alpha: 0.5,
            variance_floor: 1e-2,
        }
    }
}

impl SupraConfig {
    pub fn validate(&self) -> Result<()> {
        if self.group_size == 0 || self.n_supra_states == 0 {
            return Err(Error::param("group size and suprasegmental state count must be positive"));
        }
        check_alpha(self.alpha)?;
        if !(self.variance_floor > 0.0) {
            return Err(Error::param("suprasegmental variance floor must be positive"));
        }
        Ok(())
    }

    /// Conventional state count implied by the grouping.
    pub fn acoustic_states(&self) -> usize {
        self.group_size * self.n_supra_states
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must lie in [0, 1] (got {alpha})")));
    }
    Ok(())
}

/// Everything needed to train one speaker: model family, conventional state
/// count, acoustic training settings and the suprasegmental layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub order: usize,
    pub topology: Topology,
    pub n_states: usize,
    pub train: TrainConfig,
    pub supra: SupraConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            order: 3,
            topology: Topology::Circular,
            n_states: 9,
            train: TrainConfig::default(),
            supra: SupraConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(Error::param(format!("order must be 1, 2 or 3 (got {})", self.order)));
        }
        if self.topology.is_expanded() {
            return Err(Error::param("topology must be ltr or circular"));
        }
        self.train.validate()?;
        self.supra.validate()?;
        if self.supra.acoustic_states() != self.n_states {
            return Err(Error::param(format!(
                "{} suprasegmental states of {} do not cover {} conventional states",
                self.supra.n_supra_states, self.supra.group_size, self.n_states
            )));
        }
        Ok(())
    }

    /// Training settings for the segment-level model: single Gaussians and
    /// the suprasegmental variance floor.
    pub fn supra_train(&self) -> TrainConfig {
        TrainConfig {
            n_components: 1,
            variance_floor: self.supra.variance_floor.max(self.train.variance_floor),
            ..self.train.clone()
        }
    }

    /// Family label such as `CSPHMM3` or `LTRSPHMM1`.
    pub fn family(&self) -> String {
        family_label(&self.topology, self.order)
    }
}

pub fn family_label(topology: &Topology, order: usize) -> String {
    match topology {
        Topology::LeftToRight => format!("LTRSPHMM{order}"),
        _ => format!("CSPHMM{order}"),
    }
}
