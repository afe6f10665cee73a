use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hmm::VARIANCE_FLOOR;

/// Probability floor applied to allowed transition and ramp entries after
/// each re-estimation.
pub const PROB_FLOOR: f64 = 1e-12;
/// Mixture weight below which a component is considered dead and re-seeded.
pub const DEAD_COMPONENT_WEIGHT: f64 = 1e-8;

/// Baum-Welch and initialization settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_iterations: usize,
    /// Stop once `(ll_new - ll_old) / |ll_old|` falls below this.
    pub ll_rel_tolerance: f64,
    pub seed: u64,
    pub n_components: usize,
    pub variance_floor: f64,
    pub prob_floor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iterations: 40,
            ll_rel_tolerance: 1e-5,
            seed: 0,
            n_components: 4,
            variance_floor: VARIANCE_FLOOR,
            prob_floor: PROB_FLOOR,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be at least 1"));
        }
        if !(self.ll_rel_tolerance > 0.0) {
            return Err(Error::param("ll_rel_tolerance must be positive"));
        }
        if !(self.variance_floor >= VARIANCE_FLOOR) {
            return Err(Error::param(format!(
                "variance_floor must be at least {VARIANCE_FLOOR}"
            )));
        }
        if !(self.prob_floor > 0.0 && self.prob_floor < 1e-3) {
            return Err(Error::param("prob_floor must lie in (0, 1e-3)"));
        }
        if self.n_components == 0 {
            return Err(Error::param("n_components must be positive"));
        }
        Ok(())
    }
}
