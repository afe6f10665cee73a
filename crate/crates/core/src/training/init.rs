use super::config::TrainConfig;
use super::kmeans::kmeans;
use crate::error::{Error, Result};
use crate::hmm::{GmmEmission, HmmModel, InitialRamp, Topology, TransitionTensor, MAX_ORDER};
use crate::observation::ObservationSequence;

const KMEANS_ITERATIONS: usize = 100;

/// Orders clusters along the chain: start from the cluster that most often
/// opens a sequence, then repeatedly follow the most frequent change of
/// cluster to one not yet placed.
fn chain_order(labels: &[Vec<usize>], k: usize) -> Vec<usize> {
    let mut first = vec![0usize; k];
    let mut moves = vec![vec![0usize; k]; k];
    for seq in labels {
        if let Some(&c) = seq.first() {
            first[c] += 1;
        }
        for w in seq.windows(2) {
            if w[0] != w[1] {
                moves[w[0]][w[1]] += 1;
            }
        }
    }
    let argmax = |scores: &dyn Fn(usize) -> usize, used: &[bool]| {
        (0..k)
            .filter(|&c| !used[c])
            .fold(None, |best: Option<(usize, usize)>, c| match best {
                Some((_, s)) if s >= scores(c) => best,
                _ => Some((c, scores(c))),
            })
            .map(|(c, _)| c)
    };
    let mut used = vec![false; k];
    let mut order = Vec::with_capacity(k);
    let mut current = argmax(&|c| first[c], &used).unwrap_or(0);
    loop {
        used[current] = true;
        order.push(current);
        if order.len() == k {
            break;
        }
        let from = current;
        current = if (0..k).any(|c| !used[c] && moves[from][c] > 0) {
            argmax(&|c| moves[from][c], &used)
        } else {
            argmax(&|c| (0..k).map(|u| moves[u][c]).sum(), &used)
        }
        .expect("unplaced cluster remains");
    }
    order
}

fn fit_state_mixture(
    frames: &[&[f64]],
    dim: usize,
    n_components: usize,
    floor: f64,
    seed: u64,
    fallback: &[f64],
) -> Result<GmmEmission> {
    if frames.is_empty() {
        return GmmEmission::new(
            vec![1.0 / n_components as f64; n_components],
            vec![fallback.to_vec(); n_components],
            vec![vec![1.0; dim]; n_components],
        );
    }
    let km = kmeans(frames, n_components, seed, KMEANS_ITERATIONS);
    let mut weights = Vec::with_capacity(n_components);
    let mut means = Vec::with_capacity(n_components);
    let mut variances = Vec::with_capacity(n_components);
    for c in 0..n_components {
        let members: Vec<&[f64]> = frames
            .iter()
            .zip(&km.assignments)
            .filter(|(_, &a)| a == c)
            .map(|(f, _)| *f)
            .collect();
        let pool = if members.is_empty() { frames } else { &members[..] };
        let n = pool.len() as f64;
        let mean: Vec<f64> = (0..dim).map(|d| pool.iter().map(|f| f[d]).sum::<f64>() / n).collect();
        let var: Vec<f64> = (0..dim)
            .map(|d| {
                let v = pool.iter().map(|f| (f[d] - mean[d]).powi(2)).sum::<f64>() / n;
                v.max(floor)
            })
            .collect();
        weights.push(members.len().max(1) as f64);
        means.push(if members.is_empty() { km.centroids[c].clone() } else { mean });
        variances.push(var);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    GmmEmission::new(weights, means, variances)
}

/// Initial model for Baum-Welch: global k-means over the pooled frames
/// assigns one cluster per state (ordered along the chain by observed
/// cluster changes); each state's mixture comes from k-means within its
/// cluster. Transitions and ramp start uniform over the topology mask.
pub fn init_model(
    obs_set: &[ObservationSequence],
    order: usize,
    topology: Topology,
    n_states: usize,
    config: &TrainConfig,
) -> Result<HmmModel> {
    config.validate()?;
    if obs_set.is_empty() {
        return Err(Error::param("empty training set"));
    }
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::param(format!("order must be 1, 2 or 3 (got {order})")));
    }
    if n_states == 0 || topology.is_expanded() {
        return Err(Error::param("invalid state count or topology for training"));
    }
    let dim = obs_set[0].dim();
    for obs in obs_set {
        if obs.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: obs.dim(),
            });
        }
        if obs.is_empty() {
            return Err(Error::SequenceTooShort { len: 0, order });
        }
    }

    let pooled: Vec<&[f64]> = obs_set.iter().flat_map(|o| o.frames()).collect();
    let km = kmeans(&pooled, n_states, config.seed, KMEANS_ITERATIONS);
    let mut labels = Vec::with_capacity(obs_set.len());
    let mut offset = 0;
    for obs in obs_set {
        labels.push(km.assignments[offset..offset + obs.len()].to_vec());
        offset += obs.len();
    }
    let order_of_clusters = chain_order(&labels, n_states);

    let emissions = order_of_clusters
        .iter()
        .enumerate()
        .map(|(state, &cluster)| {
            let members: Vec<&[f64]> = pooled
                .iter()
                .zip(&km.assignments)
                .filter(|(_, &a)| a == cluster)
                .map(|(f, _)| *f)
                .collect();
            fit_state_mixture(
                &members,
                dim,
                config.n_components,
                config.variance_floor,
                config.seed.wrapping_add(1 + state as u64),
                &km.centroids[cluster],
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
