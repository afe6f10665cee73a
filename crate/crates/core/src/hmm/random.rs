use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::gmm::GmmEmission;
use super::model::{HmmModel, MAX_ORDER};
use super::tensor::{InitialRamp, TransitionTensor};
use super::topology::Topology;
use crate::error::{Error, Result};

/// Replaces every allowed entry of `row` with a random positive weight and
/// renormalizes; masked entries stay zero.
fn randomize_row<R: Rng>(row: &mut [f64], rng: &mut R) {
    let mut total = 0.0;
    for p in row.iter_mut() {
        if *p > 0.0 {
            *p = rng.random_range(0.05..1.0);
            total += *p;
        }
    }
    for p in row.iter_mut() {
        *p /= total;
    }
}

/// A valid model with random (non-uniform) transitions, ramp and mixtures.
///
/// Means are standard normal scaled by `mean_scale`; variances are uniform in
/// `[0.5, 1.5)`.
pub fn random_model(
    order: usize,
    topology: Topology,
    n_states: usize,
    n_components: usize,
    feature_dim: usize,
    mean_scale: f64,
    seed: u64,
) -> Result<HmmModel> {
    if !(1..=MAX_ORDER).contains(&order) || n_states == 0 || n_components == 0 || feature_dim == 0 {
        return Err(Error::param("invalid random model shape"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transitions = TransitionTensor::uniform(order, n_states, &topology);
    for ctx in 0..transitions.n_contexts() {
        randomize_row(transitions.row_mut(ctx), &mut rng);
    }
    let mut ramp = InitialRamp::uniform(order, n_states, &topology);
    for level in ramp.levels.iter_mut() {
        for row in level.chunks_mut(n_states) {
            randomize_row(row, &mut rng);
        }
    }
    let emissions = (0..n_states)
        .map(|_| {
            let mut weights: Vec<f64> = (0..n_components).map(|_| rng.random_range(0.2..1.0)).collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let means = (0..n_components)
                .map(|_| {
                    (0..feature_dim)
                        .map(|_| { let z: f64 = StandardNormal.sample(&mut rng); mean_scale * z })
                        .collect()
                })
                .collect();
            let variances = (0..n_components)
                .map(|_| (0..feature_dim).map(|_| rng.random_range(0.5..1.5)).collect())
                .collect();
            GmmEmission::new(weights, means, variances)
        })
        .collect::<Result<Vec<_>>>()?;
    HmmModel::from_parts(order, topology, ramp, transitions, emissions)
}
