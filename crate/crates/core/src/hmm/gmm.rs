use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{ln_or_neg_inf, log_sum_exp};

/// Diagonal-covariance Gaussian mixture emission density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmmEmission {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

impl GmmEmission {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, variances: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("mixture needs at least one component"));
        }
        if means.len() != weights.len() || variances.len() != weights.len() {
            return Err(Error::param("mixture weights, means and variances disagree in length"));
        }
        let dim = means[0].len();
        if dim == 0 {
            return Err(Error::param("mixture feature dimension must be positive"));
        }
        for (m, v) in means.iter().zip(&variances) {
            if m.len() != dim || v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.len().min(v.len()),
                });
            }
        }
        Ok(Self {
            weights,
            means,
            variances,
        })
    }

    /// A single Gaussian component.
    pub fn single(mean: Vec<f64>, variance: Vec<f64>) -> Result<Self> {
        Self::new(vec![1.0], vec![mean], vec![variance])
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    /// Log density of one frame.
    pub fn log_density(&self, frame: &[f64]) -> Result<f64> {
        if frame.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: frame.len(),
            });
        }
        Ok(self.prepare().log_density(frame))
    }

    /// Precomputes per-component normalizers for repeated evaluation.
    pub fn prepare(&self) -> PreparedGmm {
        let components = self
            .weights
            .iter()
            .zip(&self.means)
            .zip(&self.variances)
            .map(|((w, mean), var)| {
                let log_norm: f64 = var.iter().map(|v| (2.0 * PI * v).ln()).sum::<f64>();
                PreparedComponent {
                    log_offset: ln_or_neg_inf(*w) - 0.5 * log_norm,
                    mean: mean.clone(),
                    inv_var: var.iter().map(|v| 1.0 / v).collect(),
                }
            })
            .collect();
        PreparedGmm { components }
    }
}

#[derive(Clone, Debug)]
pub struct PreparedComponent {
    log_offset: f64,
    mean: Vec<f64>,
    inv_var: Vec<f64>,
}

impl PreparedComponent {
    /// `ln w + ln N(x; mean, var)`.
    #[inline]
    pub fn weighted_log_density(&self, frame: &[f64]) -> f64 {
        let mut q = 0.0;
        for ((x, m), iv) in frame.iter().zip(&self.mean).zip(&self.inv_var) {
            let d = x - m;
            q += d * d * iv;
        }
        self.log_offset - 0.5 * q
    }
}

/// A mixture with its constants cached. Zero-weight components keep their
/// slot and contribute `-inf`.
#[derive(Clone, Debug)]
pub struct PreparedGmm {
    components: Vec<PreparedComponent>,
}

impl PreparedGmm {
    pub fn log_density(&self, frame: &[f64]) -> f64 {
        match self.components.as_slice() {
            [only] => only.weighted_log_density(frame),
            comps => {
                let parts: Vec<f64> = comps.iter().map(|c| c.weighted_log_density(frame)).collect();
                log_sum_exp(&parts)
            }
        }
    }

    /// `ln w_m + ln N_m(frame)` for every component, in order.
    pub fn component_log_densities(&self, frame: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.components.iter().map(|c| c.weighted_log_density(frame)));
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }
}

/// Log emission probability `ln b(frame)`.
pub fn log_emission(emission: &GmmEmission, frame: &[f64]) -> Result<f64> {
    emission.log_density(frame)
}
