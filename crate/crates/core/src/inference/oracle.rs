//! Path-level evaluation and exhaustive enumeration over all state sequences.

use crate::error::{Error, Result};
use crate::hmm::{encode_context, HmmModel};
use crate::numeric::{ln_or_neg_inf, log_sum_exp};
use crate::observation::ObservationSequence;

/// Largest number of state sequences the brute-force routines will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

/// Joint log-probability of a state sequence and the observations: ramp
/// factors for the first `order` states, order-k transitions afterwards and
/// an emission at every frame. A masked transition on the path gives `-inf`.
pub fn joint_log_prob(model: &HmmModel, states: &[usize], obs: &ObservationSequence) -> Result<f64> {
    if states.len() != obs.len() {
        return Err(Error::param(format!(
            "{} states for {} observations",
            states.len(),
            obs.len()
        )));
    }
    if obs.dim() != model.feature_dim {
        return Err(Error::DimensionMismatch {
            expected: model.feature_dim,
            got: obs.dim(),
        });
    }
    if let Some(&bad) = states.iter().find(|&&s| s >= model.n_states) {
        return Err(Error::param(format!("state {bad} out of range")));
    }
    let n = model.n_states;
    let k = model.order;
    let mut lp = model.ramp.prefix_log_prob(&states[..k.min(states.len())], n);
    for t in k..states.len() {
        let ctx = encode_context(&states[t - k..t], n);
        lp += ln_or_neg_inf(model.transitions.get(ctx, states[t]));
    }
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    for (t, &s) in states.iter().enumerate() {
        lp += model.log_emission(s, obs.frame(t))?;
    }
    Ok(lp)
}

fn guard(model: &HmmModel, len: usize) -> Result<()> {
    let paths = (model.n_states as f64).powi(len as i32);
    if paths > BRUTE_FORCE_LIMIT as f64 {
        return Err(Error::InstanceTooLarge {
            paths,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}

/// Calls `visit` with every state sequence of length `len` in lexicographic
/// order.
pub fn for_each_path(n_states: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut path = vec![0usize; len];
    loop {
        visit(&path);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            path[i] += 1;
            if path[i] < n_states {
                break;
            }
            path[i] = 0;
        }
    }
}

/// Log-sum of [`joint_log_prob`] over all `N^T` state sequences.
pub fn brute_force_likelihood(model: &HmmModel, obs: &ObservationSequence) -> Result<f64> {
    guard(model, obs.len())?;
    let mut scores = Vec::new();
    let mut err = None;
    for_each_path(model.n_states, obs.len(), |p| match joint_log_prob(model, p, obs) {
        Ok(v) => scores.push(v),
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(log_sum_exp(&scores))
}

/// Exhaustive argmax; the first (lexicographically smallest) maximizer wins.
pub fn brute_force_viterbi(model: &HmmModel, obs: &ObservationSequence) -> Result<(Vec<usize>, f64)> {
    guard(model, obs.len())?;
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    let mut err = None;
    for_each_path(model.n_states, obs.len(), |p| match joint_log_prob(model, p, obs) {
        Ok(v) if v > best.1 || best.0.is_empty() => best = (p.to_vec(), v),
        Ok(_) => {}
        Err(e) => err = Some(e),
    });
    match err {
        Some(e) => Err(e),
        None if best.1 == f64::NEG_INFINITY => Err(Error::NoValidPath),
        None => Ok(best),
    }
}

/// Log-likelihood of any observation length: the forward total when the
/// sequence covers a full context, otherwise the ramp marginal over the
/// `N^T` possible prefixes.
pub fn log_likelihood(model: &HmmModel, obs: &ObservationSequence) -> Result<f64> {
    if obs.len() >= model.order {
        return Ok(super::forward(model, obs)?.log_likelihood);
    }
    if obs.is_empty() {
        return Err(Error::SequenceTooShort { len: 0, order: model.order });
    }
    brute_force_likelihood(model, obs)
}
