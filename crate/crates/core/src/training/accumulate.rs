use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hmm::{context_count, decode_context, encode_context, HmmModel, PreparedGmm};
use crate::inference::{backward_pass, for_each_path, forward_pass, EmissionTable, Kernel, Trellis};
use crate::numeric::log_sum_exp;
use crate::observation::ObservationSequence;

/// Sufficient statistics of one state's mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct GmmStats {
    pub occupancy: Vec<f64>,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
    /// Frame with the largest occupancy-weighted squared distance to its
    /// nearest live component, and that score.
    pub worst: Option<(f64, Vec<f64>)>,
}

impl GmmStats {
    fn new(n_components: usize, dim: usize) -> Self {
        Self {
            occupancy: vec![0.0; n_components],
            first: vec![vec![0.0; dim]; n_components],
            second: vec![vec![0.0; dim]; n_components],
            worst: None,
        }
    }

    pub fn total(&self) -> f64 {
        self.occupancy.iter().sum()
    }

    fn merge(&mut self, other: GmmStats) {
        add_into(&mut self.occupancy, &other.occupancy);
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            add_into(a, b);
        }
        for (a, b) in self.second.iter_mut().zip(&other.second) {
            add_into(a, b);
        }
        if let Some((score, frame)) = other.worst {
            self.offer_worst(score, &frame);
        }
    }

    fn offer_worst(&mut self, score: f64, frame: &[f64]) {
        if self.worst.as_ref().is_none_or(|(s, _)| score > *s) {
            self.worst = Some((score, frame.to_vec()));
        }
    }
}

fn add_into(a: &mut [f64], b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// Expected counts gathered by the E-step over a set of sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct Accumulators {
    /// Expected `(context, successor)` transition counts, laid out like the
    /// transition tensor.
    pub transitions: Vec<f64>,
    /// Expected prefix counts, laid out like the ramp levels.
    pub ramp: Vec<Vec<f64>>,
    pub gmm: Vec<GmmStats>,
    /// Per sequence, `T x N` state posteriors (row-major).
    pub posteriors: Vec<Vec<f64>>,
    /// Sum of the per-sequence log-likelihoods that were accumulated.
    pub log_likelihood: f64,
    pub sequences: usize,
    /// Sequences left out because their likelihood was not finite.
    pub skipped: usize,
}

impl Accumulators {
    pub fn empty(model: &HmmModel) -> Self {
        let n = model.n_states;
        let k = model.order;
        Self {
            transitions: vec![0.0; context_count(n, k) * n],
            ramp: (0..k).map(|m| vec![0.0; context_count(n, m + 1)]).collect(),
            gmm: model
                .emissions
                .iter()
                .map(|e| GmmStats::new(e.n_components(), model.feature_dim))
                .collect(),
            posteriors: Vec::new(),
            log_likelihood: 0.0,
            sequences: 0,
            skipped: 0,
        }
    }

    /// Adds `other` after `self`; posteriors keep sequence order.
    pub fn merge(&mut self, other: Accumulators) {
        add_into(&mut self.transitions, &other.transitions);
        for (a, b) in self.ramp.iter_mut().zip(&other.ramp) {
            add_into(a, b);
        }
        for (a, b) in self.gmm.iter_mut().zip(other.gmm) {
            a.merge(b);
        }
        self.posteriors.extend(other.posteriors);
        self.log_likelihood += other.log_likelihood;
        self.sequences += other.sequences;
        self.skipped += other.skipped;
    }
}

fn add_frame_stats(
    stats: &mut GmmStats,
    gmm: &PreparedGmm,
    means: &[Vec<f64>],
    weights: &[f64],
    frame: &[f64],
    occupancy: f64,
    scratch: &mut Vec<f64>,
) {
    if occupancy <= 0.0 {
        return;
    }
    gmm.component_log_densities(frame, scratch);
    let total = log_sum_exp(scratch);
    let mut nearest = f64::INFINITY;
    for (c, &lp) in scratch.iter().enumerate() {
        let r = if total.is_finite() { occupancy * (lp - total).exp() } else { 0.0 };
        if r > 0.0 {
            stats.occupancy[c] += r;
            for (d, &x) in frame.iter().enumerate() {
                stats.first[c][d] += r * x;
                stats.second[c][d] += r * x * x;
            }
        }
        if weights[c] >= super::config::DEAD_COMPONENT_WEIGHT {
            let dist: f64 = frame.iter().zip(&means[c]).map(|(x, m)| (x - m) * (x - m)).sum();
            nearest = nearest.min(dist);
        }
    }
    if nearest.is_finite() {
        stats.offer_worst(occupancy * nearest, frame);
    }
}

fn gather_emissions(model: &HmmModel, obs: &ObservationSequence, posteriors: &[f64], acc: &mut Accumulators) {
    let n = model.n_states;
    let prepared: Vec<PreparedGmm> = model.emissions.iter().map(|e| e.prepare()).collect();
    let mut scratch = Vec::new();
    for (t, frame) in obs.frames().enumerate() {
        for s in 0..n {
            let e = &model.emissions[s];
            add_frame_stats(
                &mut acc.gmm[s],
                &prepared[s],
                &e.means,
                &e.weights,
                frame,
                posteriors[t * n + s],
                &mut scratch,
            );
        }
    }
}

/// E-step for sequences shorter than the model order: every prefix of
/// length `T` is enumerated under the ramp.
fn accumulate_short(model: &HmmModel, obs: &ObservationSequence, acc: &mut Accumulators) -> Result<f64> {
    let n = model.n_states;
    let t_len = obs.len();
    let emissions = EmissionTable::new(model, obs)?;
    let mut paths = Vec::new();
    let mut scores = Vec::new();
    for_each_path(n, t_len, |p| {
        let lp = model.ramp.prefix_log_prob(p, n)
            + p.iter().enumerate().map(|(t, &s)| emissions.get(t, s)).sum::<f64>();
        if lp > f64::NEG_INFINITY {
            paths.push(p.to_vec());
            scores.push(lp);
        }
    });
    let ll = log_sum_exp(&scores);
    if !ll.is_finite() {
        return Ok(ll);
    }
    let mut posteriors = vec![0.0; t_len * n];
    for (p, lp) in paths.iter().zip(&scores) {
        let w = (lp - ll).exp();
        for (t, &s) in p.iter().enumerate() {
            posteriors[t * n + s] += w;
            acc.ramp[t][encode_context(&p[..=t], n)] += w;
        }
    }
    gather_emissions(model, obs, &posteriors, acc);
    acc.posteriors.push(posteriors);
    Ok(ll)
}

fn accumulate_full(model: &HmmModel, obs: &ObservationSequence, acc: &mut Accumulators) -> Result<f64> {
    let n = model.n_states;
    let k = model.order;
    let t_len = obs.len();
    let emissions = EmissionTable::new(model, obs)?;
    let trellis = Trellis::new(model, Kernel::Masked);
    let (ll, alpha, _) = forward_pass(&trellis, &emissions);
    if !ll.is_finite() {
        return Ok(ll);
    }
    let (_, beta, _) = backward_pass(&trellis, &emissions);
    let n_ctx = trellis.n_contexts;
    let mut posteriors = vec![0.0; t_len * n];

    for ctx in 0..n_ctx {
        let post = (alpha.get(k - 1, ctx) + beta.get(k - 1, ctx) - ll).exp();
        if post == 0.0 {
            continue;
        }
        let states = decode_context(ctx, k, n);
        for (t, &s) in states.iter().enumerate() {
            acc.ramp[t][encode_context(&states[..=t], n)] += post;
            posteriors[t * n + s] += post;
        }
    }
    for t in k..t_len {
        let a = alpha.slice(t - 1);
        let b = beta.slice(t);
        for ctx in 0..n_ctx {
            if a[ctx] == f64::NEG_INFINITY {
                continue;
            }
            for arc in trellis.outgoing(ctx) {
                let w = arc.succ as usize;
                let lp = a[ctx]
                    + trellis.log_trans[arc.trans as usize]
                    + emissions.get(t, w)
                    + b[arc.next as usize]
                    - ll;
                let x = lp.exp();
                acc.transitions[arc.trans as usize] += x;
                posteriors[t * n + w] += x;
            }
        }
    }
    gather_emissions(model, obs, &posteriors, acc);
    acc.posteriors.push(posteriors);
    Ok(ll)
}

/// E-step for one sequence. Sequences at least `order` long use the
/// forward-backward lattices; shorter ones enumerate the ramp prefixes.
/// A sequence whose likelihood is not finite is counted as skipped and
/// contributes nothing.
pub fn accumulate(model: &HmmModel, obs: &ObservationSequence) -> Result<Accumulators> {
    if obs.dim() != model.feature_dim {
        return Err(Error::DimensionMismatch {
            expected: model.feature_dim,
            got: obs.dim(),
        });
    }
    if obs.is_empty() {
        return Err(Error::SequenceTooShort {
            len: 0,
            order: model.order,
        });
    }
    let mut acc = Accumulators::empty(model);
    let ll = if obs.len() >= model.order {
        accumulate_full(model, obs, &mut acc)?
    } else {
        accumulate_short(model, obs, &mut acc)?
    };
    if ll.is_finite() {
        acc.log_likelihood = ll;
        acc.sequences = 1;
        Ok(acc)
    } else {
        let mut skipped = Accumulators::empty(model);
        skipped.posteriors.push(vec![0.0; obs.len() * model.n_states]);
        skipped.skipped = 1;
        Ok(skipped)
    }
}

/// [`accumulate`] over a set, in parallel, merged in input order.
pub fn accumulate_all(model: &HmmModel, obs_set: &[ObservationSequence]) -> Result<Accumulators> {
    let parts: Vec<Accumulators> = obs_set
        .par_iter()
        .map(|obs| accumulate(model, obs))
        .collect::<Result<_>>()?;
    let mut total = Accumulators::empty(model);
    for part in parts {
        total.merge(part);
    }
    Ok(total)
}
