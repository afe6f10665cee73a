use std::fmt;

use super::accumulate::{accumulate_all, Accumulators, GmmStats};
use super::config::{TrainConfig, DEAD_COMPONENT_WEIGHT};
use super::init::init_model;
use crate::error::{Error, Result};
use crate::hmm::{GmmEmission, HmmModel, InitialRamp, Topology, TransitionTensor};
use crate::observation::ObservationSequence;

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: HmmModel,
    /// Total log-likelihood of the training set: entry 0 under the initial
    /// model, entry `i` after the `i`-th re-estimation.
    pub ll_history: Vec<f64>,
    pub iterations: usize,
    /// Sequences skipped in the final E-step.
    pub skipped: usize,
    /// Mixture components re-seeded over the whole run.
    pub reseeded: usize,
    pub converged: bool,
}

impl fmt::Display for TrainOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "order {} {} model, {} states, {} iterations ({})",
            self.model.order,
            self.model.topology,
            self.model.n_states,
            self.iterations,
            if self.converged { "converged" } else { "iteration limit" }
        )?;
        for (i, ll) in self.ll_history.iter().enumerate() {
            writeln!(f, "  iter {i:3}  log-likelihood {ll:.6}")?;
        }
        if self.skipped > 0 {
            writeln!(f, "  skipped sequences: {}", self.skipped)?;
        }
        if self.reseeded > 0 {
            writeln!(f, "  re-seeded components: {}", self.reseeded)?;
        }
        Ok(())
    }
}

/// Normalizes `counts` over the entries where `mask` is positive, floors
/// them at `floor` and renormalizes. Returns `None` when the row carries no
/// mass.
fn normalize_row(counts: &[f64], mask: &[f64], floor: f64) -> Option<Vec<f64>> {
    let total: f64 = counts.iter().zip(mask).filter(|(_, &m)| m > 0.0).map(|(c, _)| c).sum();
    if !(total > 0.0) {
        return None;
    }
    let mut row: Vec<f64> = counts
        .iter()
        .zip(mask)
        .map(|(&c, &m)| if m > 0.0 { (c / total).max(floor) } else { 0.0 })
        .collect();
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= sum);
    Some(row)
}

fn reestimate_table(old: &[f64], counts: &[f64], mask: &[f64], n: usize, floor: f64) -> Vec<f64> {
    let mut out = old.to_vec();
    for (row, chunk) in out.chunks_mut(n).enumerate() {
        let span = row * n..(row + 1) * n;
        if let Some(new) = normalize_row(&counts[span.clone()], &mask[span], floor) {
            chunk.copy_from_slice(&new);
        }
    }
    out
}

fn reestimate_mixture(old: &GmmEmission, stats: &GmmStats, config: &TrainConfig) -> Result<(GmmEmission, usize)> {
    let total = stats.total();
    if !(total > 0.0) {
        return Ok((old.clone(), 0));
    }
    let dim = old.dim();
    let mut weights = Vec::with_capacity(stats.occupancy.len());
    let mut means = Vec::with_capacity(stats.occupancy.len());
    let mut variances = Vec::with_capacity(stats.occupancy.len());
    for (c, &occ) in stats.occupancy.iter().enumerate() {
        weights.push(occ / total);
        if occ > 0.0 {
            let mean: Vec<f64> = stats.first[c].iter().map(|s| s / occ).collect();
            let var = (0..dim)
                .map(|d| (stats.second[c][d] / occ - mean[d] * mean[d]).max(config.variance_floor))
                .collect();
            means.push(mean);
            variances.push(var);
        } else {
            means.push(old.means[c].clone());
            variances.push(old.variances[c].clone());
        }
    }

    let mut reseeded = 0;
    if weights.len() > 1 {
        if let (Some(dead), Some((_, frame))) = (
            weights.iter().position(|&w| w < DEAD_COMPONENT_WEIGHT),
            stats.worst.as_ref(),
        ) {
            let heaviest = (0..weights.len())
                .max_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(b.cmp(&a)))
                .expect("non-empty mixture");
            let share = weights[heaviest] / 2.0;
            weights[heaviest] -= share;
            weights[dead] += share;
            means[dead] = frame.clone();
            variances[dead] = variances[heaviest].clone();
            reseeded = 1;
        }
    }
    let sum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= sum);
    Ok((GmmEmission::new(weights, means, variances)?, reseeded))
}

/// M-step: a new model from the expected counts. Rows and states that
/// received no mass keep their previous parameters; masked entries stay
/// zero. Returns the model and the number of re-seeded components.
pub fn reestimate(model: &HmmModel, acc: &Accumulators, config: &TrainConfig) -> Result<(HmmModel, usize)> {
    let n = model.n_states;
    let floor = config.prob_floor;
    let trans_mask = TransitionTensor::uniform(model.order, n, &model.topology);
    let ramp_mask = InitialRamp::uniform(model.order, n, &model.topology);

    let mut transitions = model.transitions.clone();
    transitions.probs = reestimate_table(&model.transitions.probs, &acc.transitions, &trans_mask.probs, n, floor);

    let levels = model
        .ramp
        .levels
        .iter()
        .zip(&acc.ramp)
        .zip(&ramp_mask.levels)
        .map(|((old, counts), mask)| reestimate_table(old, counts, mask, n, floor))
        .collect();

    let mut reseeded = 0;
    let mut emissions = Vec::with_capacity(n);
    for (old, stats) in model.emissions.iter().zip(&acc.gmm) {
        let (e, r) = reestimate_mixture(old, stats, config)?;
        reseeded += r;
        emissions.push(e);
    }

    let new = HmmModel::from_parts(
        model.order,
        model.topology.clone(),
        InitialRamp { levels },
        transitions,
        emissions,
    )?;
    Ok((new, reseeded))
}

fn e_step(model: &HmmModel, obs_set: &[ObservationSequence]) -> Result<Accumulators> {
    let acc = accumulate_all(model, obs_set)?;
    if acc.sequences == 0 {
        return Err(Error::TrainingFailed(
            "no training sequence has a finite likelihood".into(),
        ));
    }
    if !acc.log_likelihood.is_finite() {
        return Err(Error::TrainingFailed(format!(
            "training log-likelihood became {}",
            acc.log_likelihood
        )));
    }
    Ok(acc)
}

/// Baum-Welch re-estimation from `model` until the relative log-likelihood
/// improvement drops below the tolerance or the iteration limit is hit.
/// Without re-seeding the recorded log-likelihoods never decrease.
pub fn baum_welch(model: HmmModel, obs_set: &[ObservationSequence], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if obs_set.is_empty() {
        return Err(Error::param("empty training set"));
    }
    if model.topology.is_expanded() {
        return Err(Error::param("expanded models cannot be trained directly"));
    }
    let mut model = model;
    let mut acc = e_step(&model, obs_set)?;
    let mut ll_history = vec![acc.log_likelihood];
    let mut reseeded_total = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let (next, reseeded) = reestimate(&model, &acc, config)?;
        let next_acc = e_step(&next, obs_set)?;
        iterations += 1;
        reseeded_total += reseeded;
        let old_ll = acc.log_likelihood;
        let new_ll = next_acc.log_likelihood;
        ll_history.push(new_ll);
        model = next;
        acc = next_acc;
        if reseeded == 0 && (new_ll - old_ll) / old_ll.abs().max(f64::MIN_POSITIVE) < config.ll_rel_tolerance {
            converged = true;
            break;
        }
    }
    Ok(TrainOutcome {
        model,
        ll_history,
        iterations,
        skipped: acc.skipped,
        reseeded: reseeded_total,
        converged,
    })
}

/// Initializes with [`init_model`] and runs [`baum_welch`].
pub fn train(
    obs_set: &[ObservationSequence],
    order: usize,
    topology: Topology,
    n_states: usize,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let model = init_model(obs_set, order, topology, n_states, config)?;
    baum_welch(model, obs_set, config)
}
