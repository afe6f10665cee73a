use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use super::gmm::GmmEmission;
use super::tensor::{context_count, decode_context, InitialRamp, TransitionTensor};
use super::topology::Topology;
use crate::error::{Error, Result};

/// Lower bound on every diagonal variance.
pub const VARIANCE_FLOOR: f64 = 1e-4;
/// Tolerance for stochastic row sums.
pub const SUM_TOLERANCE: f64 = 1e-9;
pub const MAX_ORDER: usize = 3;

/// A hidden Markov model of order 1, 2 or 3 with GMM emissions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HmmModel {
    pub order: usize,
    pub topology: Topology,
    pub n_states: usize,
    pub feature_dim: usize,
    pub ramp: InitialRamp,
    pub transitions: TransitionTensor,
    pub emissions: Vec<GmmEmission>,
}

impl HmmModel {
    /// Assembles a model from parts, checking shapes (not probabilities; see
    /// [`validate`]).
    pub fn from_parts(
        order: usize,
        topology: Topology,
        ramp: InitialRamp,
        transitions: TransitionTensor,
        emissions: Vec<GmmEmission>,
    ) -> Result<Self> {
        let n_states = emissions.len();
        let feature_dim = emissions
            .first()
            .map(GmmEmission::dim)
            .ok_or_else(|| Error::param("model needs at least one state"))?;
        let model = Self {
            order,
            topology,
            n_states,
            feature_dim,
            ramp,
            transitions,
            emissions,
        };
        model.check_shapes()?;
        Ok(model)
    }

    pub(crate) fn check_shapes(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::format("model", msg));
        if !(1..=MAX_ORDER).contains(&self.order) && !self.topology.is_expanded() {
            return bad(format!("order {} outside 1..=3", self.order));
        }
        if self.order == 0 {
            return bad("order must be positive".into());
        }
        if self.n_states == 0 || self.emissions.len() != self.n_states {
            return bad(format!(
                "{} emissions for {} states",
                self.emissions.len(),
                self.n_states
            ));
        }
        if self.transitions.order != self.order || self.transitions.n_states != self.n_states {
            return bad("transition tensor order/state count disagree with model".into());
        }
        if self.transitions.probs.len() != context_count(self.n_states, self.order) * self.n_states {
            return bad("transition tensor has the wrong number of entries".into());
        }
        if self.ramp.levels.len() != self.order {
            return bad(format!(
                "ramp has {} levels for order {}",
                self.ramp.levels.len(),
                self.order
            ));
        }
        for (m, level) in self.ramp.levels.iter().enumerate() {
            if level.len() != context_count(self.n_states, m + 1) {
                return bad(format!("ramp level {} has {} entries", m + 1, level.len()));
            }
        }
        for (s, e) in self.emissions.iter().enumerate() {
            if e.dim() != self.feature_dim {
                return bad(format!("state {s} emission has dimension {}", e.dim()));
            }
            if e.means.len() != e.weights.len() || e.variances.len() != e.weights.len() {
                return bad(format!("state {s} mixture arrays disagree"));
            }
            if e.means.iter().chain(&e.variances).any(|v| v.len() != self.feature_dim) {
                return bad(format!("state {s} component has wrong dimension"));
            }
        }
        if let Topology::Expanded(e) = &self.topology {
            if e.composite_count() != self.n_states {
                return bad("expanded topology size disagrees with state count".into());
            }
        }
        Ok(())
    }

    pub fn log_emission(&self, state: usize, frame: &[f64]) -> Result<f64> {
        self.emissions[state].log_density(frame)
    }

    /// Serializes to the versioned JSON model document.
    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::format("model", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::format("model", e))?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::format("model", format!("unexpected format `{}`", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::format("model", format!("unsupported version {}", doc.version)));
        }
        doc.model.check_shapes()?;
        Ok(doc.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io_util::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub const MODEL_FORMAT: &str = "supra-hmm/model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    model: HmmModel,
}

/// Builds a model with uniform mask-respecting transitions and ramp, uniform
/// mixture weights, unit variances and seeded standard-normal means.
pub fn new_model(
    order: usize,
    topology: Topology,
    n_states: usize,
    n_components: usize,
    feature_dim: usize,
    seed: u64,
) -> Result<HmmModel> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::param(format!("order must be 1, 2 or 3 (got {order})")));
    }
    if topology.is_expanded() {
        return Err(Error::param("expanded topologies are produced by order reduction only"));
    }
    if n_states < 2 {
        return Err(Error::param(format!("need at least 2 states (got {n_states})")));
    }
    if n_components == 0 || feature_dim == 0 {
        return Err(Error::param("mixture components and feature dimension must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emissions = (0..n_states)
        .map(|_| {
            let means = (0..n_components)
                .map(|_| (0..feature_dim).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            GmmEmission::new(
                vec![1.0 / n_components as f64; n_components],
                means,
                vec![vec![1.0; feature_dim]; n_components],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    HmmModel::from_parts(
        order,
        topology.clone(),
        InitialRamp::uniform(order, n_states, &topology),
        TransitionTensor::uniform(order, n_states, &topology),
        emissions,
    )
}

/// One violated model invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    TransitionRowSum { context: Vec<usize>, sum: f64 },
    MaskedTransition { context: Vec<usize>, successor: usize, value: f64 },
    InvalidProbability { context: Vec<usize>, successor: usize, value: f64 },
    RampRowSum { level: usize, prefix: Vec<usize>, sum: f64 },
    MaskedRamp { level: usize, prefix: Vec<usize>, state: usize, value: f64 },
    MixtureWeights { state: usize, sum: f64 },
    NegativeWeight { state: usize, component: usize, value: f64 },
    VarianceBelowFloor { state: usize, component: usize, dim: usize, value: f64 },
    NonFiniteMean { state: usize, component: usize, dim: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TransitionRowSum { context, sum } => {
                write!(f, "transition row for context {context:?} sums to {sum}")
            }
            Violation::MaskedTransition { context, successor, value } => write!(
                f,
                "masked transition {context:?} -> {successor} has probability {value}"
            ),
            Violation::InvalidProbability { context, successor, value } => write!(
                f,
                "transition {context:?} -> {successor} has invalid probability {value}"
            ),
            Violation::RampRowSum { level, prefix, sum } => {
                write!(f, "ramp level {level} row for prefix {prefix:?} sums to {sum}")
            }
            Violation::MaskedRamp { level, prefix, state, value } => write!(
                f,
                "ramp level {level} prefix {prefix:?} -> {state} is masked but has {value}"
            ),
            Violation::MixtureWeights { state, sum } => {
                write!(f, "state {state} mixture weights sum to {sum}")
            }
            Violation::NegativeWeight { state, component, value } => {
                write!(f, "state {state} component {component} has weight {value}")
            }
            Violation::VarianceBelowFloor { state, component, dim, value } => write!(
                f,
                "state {state} component {component} dim {dim} variance {value} below floor"
            ),
            Violation::NonFiniteMean { state, component, dim } => {
                write!(f, "state {state} component {component} dim {dim} mean is not finite")
            }
        }
    }
}

/// Every invariant violation found in a model; empty iff the model is valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("model is valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_row(
    row: &[f64],
    allowed: impl Fn(usize) -> bool,
    mut on_masked: impl FnMut(usize, f64),
    mut on_invalid: impl FnMut(usize, f64),
) -> f64 {
    let mut sum = 0.0;
    for (w, &p) in row.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            on_invalid(w, p);
        }
        if allowed(w) {
            sum += p;
        } else if p != 0.0 {
            on_masked(w, p);
        }
    }
    sum
}

/// Lists every violated invariant: stochastic rows, mask zeros, mixture
/// simplex and the variance floor.
pub fn validate(model: &HmmModel) -> ValidationReport {
    let mut out = Vec::new();
    let n = model.n_states;
    let topo = &model.topology;

    for ctx in 0..model.transitions.n_contexts() {
        let last = ctx % n;
        let context = decode_context(ctx, model.order, n);
        let mut masked = Vec::new();
        let mut invalid = Vec::new();
        let sum = check_row(
            model.transitions.row(ctx),
            |w| topo.allows(n, last, w),
            |w, v| masked.push((w, v)),
            |w, v| invalid.push((w, v)),
        );
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            out.push(Violation::TransitionRowSum {
                context: context.clone(),
                sum,
            });
        }
        for (successor, value) in masked {
            out.push(Violation::MaskedTransition {
                context: context.clone(),
                successor,
                value,
            });
        }
        for (successor, value) in invalid {
            out.push(Violation::InvalidProbability {
                context: context.clone(),
                successor,
                value,
            });
        }
    }

    for (m, level) in model.ramp.levels.iter().enumerate() {
        let n_prefix = if m == 0 { 1 } else { context_count(n, m) };
        for prefix_code in 0..n_prefix {
            let prefix = if m == 0 {
                Vec::new()
            } else {
                decode_context(prefix_code, m, n)
            };
            let row = &level[prefix_code * n..(prefix_code + 1) * n];
            let mut masked = Vec::new();
            let mut invalid = Vec::new();
            let sum = check_row(
                row,
                |w| {
                    if m == 0 {
                        topo.allows_start(n, w)
                    } else {
                        topo.allows(n, prefix_code % n, w)
                    }
                },
                |w, v| masked.push((w, v)),
                |w, v| invalid.push((w, v)),
            );
            masked.extend(invalid);
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                out.push(Violation::RampRowSum {
                    level: m + 1,
                    prefix: prefix.clone(),
                    sum,
                });
            }
            for (state, value) in masked {
                out.push(Violation::MaskedRamp {
                    level: m + 1,
                    prefix: prefix.clone(),
                    state,
                    value,
                });
            }
        }
    }

    for (s, e) in model.emissions.iter().enumerate() {
        let sum: f64 = e.weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            out.push(Violation::MixtureWeights { state: s, sum });
        }
        for (c, &w) in e.weights.iter().enumerate() {
            if !(w >= 0.0) {
                out.push(Violation::NegativeWeight {
                    state: s,
                    component: c,
                    value: w,
                });
            }
        }
        for (c, (mean, var)) in e.means.iter().zip(&e.variances).enumerate() {
            for (d, (&mu, &v)) in mean.iter().zip(var).enumerate() {
                if !mu.is_finite() {
                    out.push(Violation::NonFiniteMean {
                        state: s,
                        component: c,
                        dim: d,
                    });
                }
                if !(v >= VARIANCE_FLOOR) || !v.is_finite() {
                    out.push(Violation::VarianceBelowFloor {
                        state: s,
                        component: c,
                        dim: d,
                        value: v,
                    });
                }
            }
        }
    }

    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_two_state_uniform() {
        let m = new_model(1, Topology::Circular, 2, 1, 1, 0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.transitions.get(i, j), 0.5);
            }
        }
        assert!(validate(&m).is_empty());
    }

    #[test]
    fn order3_ltr_nine_states_masked() {
        let m = new_model(3, Topology::LeftToRight, 9, 4, 32, 7).unwrap();
        for ctx in 0..729 {
            let k = ctx % 9;
            for w in 0..9 {
                if w != k && w != k + 1 {
                    assert_eq!(m.transitions.get(ctx, w), 0.0);
                }
            }
        }
        assert!(validate(&m).is_empty());
    }

    #[test]
    fn ltr_last_state_absorbs() {
        let m = new_model(1, Topology::LeftToRight, 3, 1, 1, 0).unwrap();
        assert_eq!(m.transitions.get(2, 2), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(new_model(0, Topology::Circular, 3, 1, 1, 0).is_err());
        assert!(new_model(4, Topology::Circular, 3, 1, 1, 0).is_err());
        assert!(new_model(1, Topology::LeftToRight, 1, 1, 1, 0).is_err());
        assert!(new_model(1, Topology::Circular, 3, 0, 1, 0).is_err());
    }

    #[test]
    fn seeded_construction_is_reproducible() {
        let a = new_model(2, Topology::Circular, 4, 3, 5, 42).unwrap();
        let b = new_model(2, Topology::Circular, 4, 3, 5, 42).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = new_model(2, Topology::Circular, 4, 3, 5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn report_names_short_row() {
        let mut m = new_model(2, Topology::Circular, 3, 1, 1, 0).unwrap();
        // context (1, 2) -> successors {2, 0}
        let ctx = 1 * 3 + 2;
        m.transitions.row_mut(ctx)[2] = 0.4;
        let report = validate(&m);
        assert_eq!(
            report.violations,
            vec![Violation::TransitionRowSum {
                context: vec![1, 2],
                sum: 0.9
            }]
        );
    }

    #[test]
    fn report_names_masked_entry() {
        let mut m = new_model(1, Topology::LeftToRight, 3, 1, 1, 0).unwrap();
        m.transitions.row_mut(0)[2] = 0.25;
        m.transitions.row_mut(0)[0] = 0.25;
        let report = validate(&m);
        assert!(report.violations.contains(&Violation::MaskedTransition {
            context: vec![0],
            successor: 2,
            value: 0.25
        }));
        assert!(report.to_string().contains("[0] -> 2"));
    }

    #[test]
    fn report_flags_weights_and_floor() {
        let mut m = new_model(1, Topology::Circular, 2, 2, 1, 0).unwrap();
        m.emissions[1].weights = vec![0.7, 0.7];
        m.emissions[0].variances[1][0] = 1e-6;
        let report = validate(&m);
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = new_model(3, Topology::Circular, 3, 2, 4, 5).unwrap();
        let text = m.to_json().unwrap();
        let back = HmmModel::from_json(&text).unwrap();
        assert_eq!(m, back);
        for (a, b) in m.emissions.iter().zip(&back.emissions) {
            for (x, y) in a.means.iter().flatten().zip(b.means.iter().flatten()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn json_rejects_wrong_version() {
        let m = new_model(1, Topology::Circular, 2, 1, 1, 0).unwrap();
        let text = m.to_json().unwrap().replace("\"version\": 1", "\"version\": 9");
        assert!(HmmModel::from_json(&text).is_err());
    }
}
