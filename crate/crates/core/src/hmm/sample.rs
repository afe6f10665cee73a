use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::model::HmmModel;
use super::tensor::encode_context;
use crate::error::{Error, Result};
use crate::numeric::sample_categorical;
use crate::observation::ObservationSequence;

/// Draws a state sequence (ramp, then order-k transitions) and one
/// observation per state from its mixture. Reproducible given `seed`.
pub fn sample(
    model: &HmmModel,
    length: usize,
    seed: u64,
) -> Result<(Vec<usize>, ObservationSequence)> {
    if length < model.order || length == 0 {
        return Err(Error::SequenceTooShort {
            len: length,
            order: model.order,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = sample_states(model, length, &mut rng);
    let mut data = Vec::with_capacity(length * model.feature_dim);
    for &s in &states {
        let g = &model.emissions[s];
        let c = sample_categorical(&g.weights, &mut rng);
        for (mu, var) in g.means[c].iter().zip(&g.variances[c]) {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(mu + var.sqrt() * z);
        }
    }
    Ok((states, ObservationSequence::new(model.feature_dim, data)?))
}

fn sample_states<R: rand::Rng>(model: &HmmModel, length: usize, rng: &mut R) -> Vec<usize> {
    let n = model.n_states;
    let k = model.order;
    let mut states = Vec::with_capacity(length);
    for m in 0..k.min(length) {
        let prefix = encode_context(&states, n);
        let row = &model.ramp.levels[m][prefix * n..(prefix + 1) * n];
        states.push(sample_categorical(row, rng));
    }
    while states.len() < length {
        let ctx = encode_context(&states[states.len() - k..], n);
        states.push(sample_categorical(model.transitions.row(ctx), rng));
    }
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmm::{new_model, GmmEmission, InitialRamp, Topology, TransitionTensor};

    fn single_state() -> HmmModel {
        HmmModel::from_parts(
            1,
            Topology::Circular,
            InitialRamp::uniform(1, 1, &Topology::Circular),
            TransitionTensor::uniform(1, 1, &Topology::Circular),
            vec![GmmEmission::single(vec![0.0], vec![1.0]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn single_state_stays_put() {
        let (states, obs) = sample(&single_state(), 5, 1).unwrap();
        assert_eq!(states, vec![0; 5]);
        assert_eq!(obs.len(), 5);
    }

    #[test]
    fn deterministic_cycle_repeats() {
        let (states, _) = sample(&crate::test_support::deterministic_cycle(), 8, 9).unwrap();
        assert_eq!(states, vec![0, 1, 2, 0, 1, 2, 0, 1]);
    }

    #[test]
    fn too_short_is_rejected() {
        let m = new_model(3, Topology::Circular, 3, 1, 1, 0).unwrap();
        assert!(matches!(sample(&m, 2, 0), Err(Error::SequenceTooShort { .. })));
    }

    #[test]
    fn empirical_frequencies_match_tensor() {
        // order-2 circular model with distinct, non-uniform rows
        let topo = Topology::Circular;
        let mut m = new_model(2, topo.clone(), 3, 1, 1, 4).unwrap();
        for ctx in 0..9 {
            let k = ctx % 3;
            let stay = 0.2 + 0.07 * ctx as f64;
            let row = m.transitions.row_mut(ctx);
            row.fill(0.0);
            row[k] = stay;
            row[(k + 1) % 3] = 1.0 - stay;
        }
        let (states, _) = sample(&m, 100_001, 77).unwrap();
        let mut counts = vec![0usize; 27];
        let mut totals = vec![0usize; 9];
        for w in states.windows(3) {
            let ctx = w[0] * 3 + w[1];
            counts[ctx * 3 + w[2]] += 1;
            totals[ctx] += 1;
        }
        for ctx in 0..9 {
            if totals[ctx] < 2000 {
                continue;
            }
            for s in 0..3 {
                let freq = counts[ctx * 3 + s] as f64 / totals[ctx] as f64;
                assert!((freq - m.transitions.get(ctx, s)).abs() < 0.01, "ctx {ctx} succ {s}");
            }
        }
    }

    #[test]
    fn never_takes_masked_transition() {
        let m = new_model(3, Topology::LeftToRight, 4, 1, 1, 2).unwrap();
        let mut total = 0;
        for seed in 0..100 {
            let (states, _) = sample(&m, 120, seed).unwrap();
            assert_eq!(states[0], 0);
            for w in states.windows(2) {
                assert!(m.topology.allows(4, w[0], w[1]));
                total += 1;
            }
        }
        assert!(total >= 10_000);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let m = new_model(2, Topology::Circular, 4, 2, 3, 1).unwrap();
        let a = sample(&m, 50, 5).unwrap();
        let b = sample(&m, 50, 5).unwrap();
        assert_eq!(a, b);
    }
}
