use super::*;
use crate::hmm::{encode_context, random_model, sample, validate, HmmModel, Topology};
use crate::inference::{for_each_path, joint_log_prob, log_likelihood};
use crate::numeric::log_sum_exp;
use crate::observation::ObservationSequence;
use crate::test_support::{random_obs, single_state};

/// Posteriors by enumerating every state sequence: state occupancies,
/// transition counts and ramp prefix counts.
fn enumerate_posteriors(model: &HmmModel, obs: &ObservationSequence) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let n = model.n_states;
    let k = model.order;
    let t_len = obs.len();
    let mut paths = Vec::new();
    for_each_path(n, t_len, |p| {
        paths.push((p.to_vec(), joint_log_prob(model, p, obs).unwrap()));
    });
    let scores: Vec<f64> = paths.iter().map(|(_, s)| *s).collect();
    let ll = log_sum_exp(&scores);
    let mut posteriors = vec![0.0; t_len * n];
    let mut transitions = vec![0.0; model.transitions.probs.len()];
    let mut ramp: Vec<Vec<f64>> = model.ramp.levels.iter().map(|l| vec![0.0; l.len()]).collect();
    for (p, s) in &paths {
        let w = (s - ll).exp();
        for (t, &st) in p.iter().enumerate() {
            posteriors[t * n + st] += w;
        }
        for t in k..t_len {
            transitions[encode_context(&p[t - k..t], n) * n + p[t]] += w;
        }
        for m in 0..k.min(t_len) {
            ramp[m][encode_context(&p[..=m], n)] += w;
        }
    }
    (posteriors, transitions, ramp)
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() < tol, "index {i}: {x} vs {y}");
    }
}

#[test]
fn single_state_posteriors_are_certain() {
    let m = single_state(2);
    let obs = random_obs(6, 2, 3);
    let acc = accumulate(&m, &obs).unwrap();
    assert!(acc.posteriors[0].iter().all(|&g| (g - 1.0).abs() < 1e-12));
    assert!((acc.transitions[0] - 4.0).abs() < 1e-12);
    assert!((acc.ramp[0][0] - 1.0).abs() < 1e-12);
    assert!((acc.ramp[1][0] - 1.0).abs() < 1e-12);
}

#[test]
fn posteriors_match_enumeration_order3() {
    for topology in [Topology::Circular, Topology::LeftToRight] {
        let m = random_model(3, topology, 2, 2, 2, 1.0, 17).unwrap();
        let obs = random_obs(5, 2, 18);
        let acc = accumulate(&m, &obs).unwrap();
        let (posteriors, transitions, ramp) = enumerate_posteriors(&m, &obs);
        assert_close(&acc.posteriors[0], &posteriors, 1e-8);
        assert_close(&acc.transitions, &transitions, 1e-8);
        for (a, b) in acc.ramp.iter().zip(&ramp) {
            assert_close(a, b, 1e-8);
        }
        let ll = log_likelihood(&m, &obs).unwrap();
        assert!((acc.log_likelihood - ll).abs() < 1e-10);
    }
}

#[test]
fn short_sequence_posteriors_match_enumeration() {
    let m = random_model(3, Topology::LeftToRight, 3, 1, 2, 1.0, 4).unwrap();
    for len in 1..3 {
        let obs = random_obs(len, 2, 40 + len as u64);
        let acc = accumulate(&m, &obs).unwrap();
        let (posteriors, _, ramp) = enumerate_posteriors(&m, &obs);
        assert_close(&acc.posteriors[0], &posteriors, 1e-10);
        for (a, b) in acc.ramp.iter().zip(&ramp) {
            assert_close(a, b, 1e-10);
        }
        assert!(acc.transitions.iter().all(|&x| x == 0.0));
    }
}

#[test]
fn transition_counts_agree_with_occupancies() {
    let m = random_model(2, Topology::Circular, 3, 2, 2, 1.0, 8).unwrap();
    let obs = random_obs(12, 2, 9);
    let acc = accumulate(&m, &obs).unwrap();
    let n = 3;
    for s in 0..n {
        let out: f64 = (0..acc.transitions.len() / n)
            .filter(|ctx| ctx % n == s)
            .map(|ctx| acc.transitions[ctx * n..(ctx + 1) * n].iter().sum::<f64>())
            .sum();
        let occ: f64 = (1..11).map(|t| acc.posteriors[0][t * n + s]).sum();
        assert!((out - occ).abs() < 1e-9, "state {s}: {out} vs {occ}");
    }
    for t in 0..12 {
        let total: f64 = acc.posteriors[0][t * n..(t + 1) * n].iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

fn training_data(order: usize, topology: Topology, seed: u64) -> Vec<ObservationSequence> {
    let truth = random_model(order, topology, 3, 2, 2, 3.0, seed).unwrap();
    (0..4).map(|i| sample(&truth, 30, seed * 10 + i).unwrap().1).collect()
}

#[test]
fn em_never_decreases_likelihood() {
    for order in 1..=3 {
        for topology in [Topology::LeftToRight, Topology::Circular] {
            let data = training_data(order, topology.clone(), order as u64);
            let cfg = TrainConfig {
                n_components: 2,
                max_iterations: 15,
                ..TrainConfig::default()
            };
            let mut model = init_model(&data, order, topology.clone(), 3, &cfg).unwrap();
            let mut acc = accumulate_all(&model, &data).unwrap();
            for _ in 0..cfg.max_iterations {
                let (next, reseeded) = reestimate(&model, &acc, &cfg).unwrap();
                let next_acc = accumulate_all(&next, &data).unwrap();
                let (old, new) = (acc.log_likelihood, next_acc.log_likelihood);
                if reseeded == 0 {
                    assert!(new >= old - 1e-8 * old.abs(), "order {order} {topology}: {old} -> {new}");
                }
                model = next;
                acc = next_acc;
            }
            assert!(validate(&model).is_empty());
        }
    }
}

#[test]
fn masked_transitions_stay_zero() {
    let data = training_data(2, Topology::LeftToRight, 5);
    let out = train(&data, 2, Topology::LeftToRight, 3, &TrainConfig::default()).unwrap();
    let m = &out.model;
    for ctx in 0..m.transitions.n_contexts() {
        for w in 0..3 {
            if !m.topology.allows(3, ctx % 3, w) {
                assert_eq!(m.transitions.get(ctx, w), 0.0);
            }
        }
    }
    assert_eq!(&m.ramp.start_probs()[1..], &[0.0, 0.0]);
}

#[test]
fn zero_iterations_rejected() {
    let data = training_data(1, Topology::Circular, 2);
    let cfg = TrainConfig {
        max_iterations: 0,
        ..TrainConfig::default()
    };
    assert!(train(&data, 1, Topology::Circular, 2, &cfg).is_err());
}

#[test]
fn training_is_deterministic() {
    let data = training_data(2, Topology::Circular, 3);
    let cfg = TrainConfig::default();
    let a = train(&data, 2, Topology::Circular, 3, &cfg).unwrap();
    let b = train(&data, 2, Topology::Circular, 3, &cfg).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.ll_history, b.ll_history);
}

#[test]
fn mixes_short_and_long_sequences() {
    let mut data = training_data(3, Topology::LeftToRight, 6);
    data.push(random_obs(1, 2, 100));
    data.push(random_obs(2, 2, 101));
    let out = train(&data, 3, Topology::LeftToRight, 3, &TrainConfig::default()).unwrap();
    assert!(validate(&out.model).is_empty());
    assert_eq!(out.skipped, 0);
}

#[test]
fn dead_component_is_reseeded() {
    let frames = [[0.0, 0.0], [0.1, 0.0], [5.0, 0.0], [5.1, 0.0], [0.05, 0.0], [5.05, 0.0]];
    let data = vec![ObservationSequence::from_frames(&frames).unwrap()];
    let mut model = single_state(1);
    model.emissions[0] = crate::hmm::GmmEmission::new(
        vec![0.5, 0.5],
        vec![vec![2.5, 0.0], vec![1000.0, 0.0]],
        vec![vec![1.0, 1.0], vec![1.0, 1.0]],
    )
    .unwrap();
    let cfg = TrainConfig {
        n_components: 2,
        max_iterations: 1,
        ..TrainConfig::default()
    };
    let out = baum_welch(model, &data, &cfg).unwrap();
    assert_eq!(out.reseeded, 1);
    let e = &out.model.emissions[0];
    assert!(e.weights.iter().all(|&w| w > 0.1));
    assert!(e.means.iter().any(|m| m[0] == 0.0 || m[0] == 5.1));
}
