use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hmm::{GmmEmission, HmmModel, InitialRamp, Topology, TransitionTensor};
use crate::observation::ObservationSequence;

/// Order-3 circular ring over 3 states that always advances 0, 1, 2, 0, …
pub fn deterministic_cycle() -> HmmModel {
    let topo = Topology::Circular;
    let n = 3;
    let mut t = TransitionTensor::uniform(3, n, &topo);
    for ctx in 0..27 {
        let row = t.row_mut(ctx);
        row.fill(0.0);
        row[(ctx % n + 1) % n] = 1.0;
    }
    let mut ramp = InitialRamp::uniform(3, n, &topo);
    ramp.levels[0] = vec![1.0, 0.0, 0.0];
    for level in ramp.levels.iter_mut().skip(1) {
        for (prefix, row) in level.chunks_mut(n).enumerate() {
            row.fill(0.0);
            row[(prefix % n + 1) % n] = 1.0;
        }
    }
    let emissions = (0..n)
        .map(|s| GmmEmission::single(vec![s as f64 * 10.0], vec![1.0]).unwrap())
        .collect();
    HmmModel::from_parts(3, topo, ramp, t, emissions).unwrap()
}

pub fn single_state(order: usize) -> HmmModel {
    let topo = Topology::Circular;
    HmmModel::from_parts(
        order,
        topo.clone(),
        InitialRamp::uniform(order, 1, &topo),
        TransitionTensor::uniform(order, 1, &topo),
        vec![GmmEmission::single(vec![0.5, -0.5], vec![1.0, 2.0]).unwrap()],
    )
    .unwrap()
}

pub fn random_obs(len: usize, dim: usize, seed: u64) -> ObservationSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..len * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    ObservationSequence::new(dim, data).unwrap()
}
