use super::*;
use crate::hmm::{random_model, Topology};
use crate::numeric::log_sum_exp;
use crate::observation::ObservationSequence;
use crate::test_support::{deterministic_cycle, random_obs, single_state};

fn topologies() -> [Topology; 2] {
    [Topology::LeftToRight, Topology::Circular]
}

#[test]
fn single_state_forward_is_emission_sum() {
    let m = single_state(1);
    let obs = random_obs(3, 2, 1);
    let expected: f64 = obs.frames().map(|f| m.log_emission(0, f).unwrap()).sum();
    let f = forward(&m, &obs).unwrap();
    assert!((f.log_likelihood - expected).abs() < 1e-12);
}

#[test]
fn single_state_backward_is_suffix_sum() {
    let m = single_state(1);
    let obs = random_obs(4, 2, 2);
    let b = backward(&m, &obs).unwrap();
    for t in b.lattice.times() {
        let suffix: f64 = (t + 1..4).map(|u| m.log_emission(0, obs.frame(u)).unwrap()).sum();
        assert!((b.lattice.get(t, 0) - suffix).abs() < 1e-12);
    }
}

#[test]
fn forward_matches_enumeration_order3() {
    let m = random_model(3, Topology::Circular, 3, 2, 2, 1.0, 5).unwrap();
    let obs = random_obs(6, 2, 6);
    let f = forward(&m, &obs).unwrap().log_likelihood;
    let bf = brute_force_likelihood(&m, &obs).unwrap();
    assert!((f - bf).abs() < 1e-9, "{f} vs {bf}");
}

#[test]
fn forward_backward_identity_all_families() {
    for order in 1..=3 {
        for topo in topologies() {
            let m = random_model(order, topo, 3, 2, 2, 1.0, order as u64).unwrap();
            let obs = random_obs(9, 2, 10 + order as u64);
            let f = forward(&m, &obs).unwrap();
            let b = backward(&m, &obs).unwrap();
            assert!((f.log_likelihood - b.log_likelihood).abs() < 1e-9);
            for total in combined_totals(&f.lattice, &b.lattice) {
                assert!((total - f.log_likelihood).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn dual_direction_totals_order3() {
    let m = random_model(3, Topology::LeftToRight, 2, 1, 3, 1.0, 17).unwrap();
    let obs = random_obs(5, 3, 18);
    let f = forward(&m, &obs).unwrap().log_likelihood;
    let b = backward(&m, &obs).unwrap().log_likelihood;
    assert!((f - b).abs() < 1e-9);
}

#[test]
fn viterbi_recovers_deterministic_cycle() {
    let m = deterministic_cycle();
    let obs = ObservationSequence::new(1, vec![0.0, 10.0, 20.0, 0.0, 10.0, 20.0, 0.0]).unwrap();
    let v = viterbi(&m, &obs).unwrap();
    assert_eq!(v.states, vec![0, 1, 2, 0, 1, 2, 0]);
}

#[test]
fn viterbi_matches_exhaustive_argmax() {
    for seed in 0..5 {
        let m = random_model(3, Topology::Circular, 3, 2, 2, 1.0, 100 + seed).unwrap();
        let obs = random_obs(6, 2, 200 + seed);
        let v = viterbi(&m, &obs).unwrap();
        let (path, score) = brute_force_viterbi(&m, &obs).unwrap();
        assert_eq!(v.states, path);
        assert!((v.log_joint - score).abs() < 1e-9);
        let joint = joint_log_prob(&m, &v.states, &obs).unwrap();
        assert!((joint - v.log_joint).abs() < 1e-9);
    }
}

#[test]
fn viterbi_single_state() {
    let m = single_state(2);
    let obs = random_obs(5, 2, 3);
    let v = viterbi(&m, &obs).unwrap();
    assert_eq!(v.states, vec![0; 5]);
    let f = forward(&m, &obs).unwrap().log_likelihood;
    assert!((v.log_joint - f).abs() < 1e-12);
}

#[test]
fn viterbi_ties_take_smallest_sequence() {
    // Two states with identical emissions and uniform circular transitions:
    // every path scores the same, so the all-zero path must win.
    let mut m = random_model(2, Topology::Circular, 2, 1, 1, 1.0, 1).unwrap();
    m.emissions[1] = m.emissions[0].clone();
    m.transitions = crate::hmm::TransitionTensor::uniform(2, 2, &Topology::Circular);
    m.ramp = crate::hmm::InitialRamp::uniform(2, 2, &Topology::Circular);
    let obs = random_obs(6, 1, 4);
    assert_eq!(viterbi(&m, &obs).unwrap().states, vec![0; 6]);
    assert_eq!(brute_force_viterbi(&m, &obs).unwrap().0, vec![0; 6]);
}

#[test]
fn viterbi_reports_no_valid_path() {
    let mut m = single_state(1);
    m.ramp.levels[0][0] = 0.0;
    let obs = random_obs(3, 2, 1);
    assert!(matches!(viterbi(&m, &obs), Err(crate::Error::NoValidPath)));
}

#[test]
fn joint_log_prob_rejects_masked_path() {
    let m = random_model(1, Topology::LeftToRight, 3, 1, 1, 1.0, 2).unwrap();
    let obs = random_obs(3, 1, 2);
    assert_eq!(joint_log_prob(&m, &[0, 2, 2], &obs).unwrap(), f64::NEG_INFINITY);
    assert_eq!(joint_log_prob(&m, &[1, 1, 1], &obs).unwrap(), f64::NEG_INFINITY);
    assert!(joint_log_prob(&m, &[0, 1], &obs).is_err());
    assert!(joint_log_prob(&m, &[0, 1, 3], &obs).is_err());
}

#[test]
fn joint_log_prob_single_state() {
    let m = single_state(3);
    let obs = random_obs(4, 2, 9);
    let expected: f64 = obs.frames().map(|f| m.log_emission(0, f).unwrap()).sum();
    assert!((joint_log_prob(&m, &[0; 4], &obs).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn total_probability_identity() {
    let m = random_model(2, Topology::LeftToRight, 3, 1, 2, 1.0, 21).unwrap();
    let obs = random_obs(5, 2, 22);
    let mut scores = Vec::new();
    for_each_path(3, 5, |p| scores.push(joint_log_prob(&m, p, &obs).unwrap()));
    assert_eq!(scores.len(), 243);
    let f = forward(&m, &obs).unwrap().log_likelihood;
    assert!((log_sum_exp(&scores) - f).abs() < 1e-9);
}

#[test]
fn brute_force_guard_and_short_sequences() {
    let m = random_model(1, Topology::Circular, 4, 1, 1, 1.0, 3).unwrap();
    let obs = random_obs(11, 1, 3);
    assert!(matches!(
        brute_force_likelihood(&m, &obs),
        Err(crate::Error::InstanceTooLarge { .. })
    ));

    // length exactly `order`: ramp plus emissions, no recursion step
    let m = random_model(3, Topology::Circular, 2, 1, 1, 1.0, 4).unwrap();
    let obs = random_obs(3, 1, 5);
    let f = forward(&m, &obs).unwrap();
    assert_eq!(f.stats.steps, 0);
    let mut terms = Vec::new();
    for_each_path(2, 3, |p| {
        let mut v = m.ramp.prefix_log_prob(p, 2);
        for (t, &s) in p.iter().enumerate() {
            v += m.log_emission(s, obs.frame(t)).unwrap();
        }
        terms.push(v);
    });
    assert!((f.log_likelihood - log_sum_exp(&terms)).abs() < 1e-12);
    assert!((brute_force_likelihood(&m, &obs).unwrap() - f.log_likelihood).abs() < 1e-12);
}

#[test]
fn too_short_sequences_are_rejected() {
    let m = random_model(3, Topology::Circular, 2, 1, 1, 1.0, 4).unwrap();
    let obs = random_obs(2, 1, 5);
    assert!(matches!(forward(&m, &obs), Err(crate::Error::SequenceTooShort { len: 2, order: 3 })));
    assert!(backward(&m, &obs).is_err());
    assert!(viterbi(&m, &obs).is_err());
    // the general likelihood falls back to the ramp marginal
    let ll = log_likelihood(&m, &obs).unwrap();
    assert!((ll - brute_force_likelihood(&m, &obs).unwrap()).abs() < 1e-12);
}

#[test]
fn expansion_preserves_likelihood() {
    for order in 2..=3 {
        for topo in topologies() {
            let m = random_model(order, topo, 2, 2, 2, 1.0, 31 + order as u64).unwrap();
            let big = expand_to_first_order(&m).unwrap();
            assert_eq!(big.order, 1);
            assert!(crate::hmm::validate(&big).is_empty());
            for s in 0..5 {
                let obs = random_obs(7, 2, s);
                let a = forward(&m, &obs).unwrap().log_likelihood;
                let b = forward(&big, &obs).unwrap().log_likelihood;
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn expansion_counts_and_identity() {
    let m = random_model(3, Topology::Circular, 2, 1, 1, 1.0, 8).unwrap();
    let big = expand_to_first_order(&m).unwrap();
    match &big.topology {
        Topology::Expanded(e) => {
            assert_eq!(e.steady_count(), 8);
            assert_eq!(e.composite_count(), 14);
        }
        other => panic!("unexpected topology {other}"),
    }
    let first = random_model(1, Topology::Circular, 3, 1, 1, 1.0, 8).unwrap();
    assert_eq!(expand_to_first_order(&first).unwrap(), first);
}

#[test]
fn dense_and_masked_kernels_agree() {
    let m = random_model(3, Topology::LeftToRight, 3, 2, 2, 1.0, 12).unwrap();
    let obs = random_obs(12, 2, 13);
    let a = forward_with(&m, &obs, Kernel::Masked).unwrap();
    let b = forward_with(&m, &obs, Kernel::Dense).unwrap();
    assert!((a.log_likelihood - b.log_likelihood).abs() < 1e-12);
    assert!(a.stats.mul_add_count < b.stats.mul_add_count);
    assert_eq!(b.stats.mul_adds_per_step, 81);
    // LTR: N^(k-1) * (2N - 1) arcs per step
    assert_eq!(a.stats.mul_adds_per_step, 9 * 5);
    assert_eq!(a.stats.mul_add_count, 9 * 5 * 9);
}

#[test]
fn counts_match_closed_form() {
    for order in 1..=3 {
        for topo in topologies() {
            for kernel in [Kernel::Masked, Kernel::Dense] {
                let m = random_model(order, topo.clone(), 4, 1, 1, 1.0, 5).unwrap();
                let obs = random_obs(20, 1, 6);
                let f = forward_with(&m, &obs, kernel).unwrap();
                let b = backward_with(&m, &obs, kernel).unwrap();
                let expected = expected_mul_adds(&topo, 4, order, 20, kernel);
                assert_eq!(f.stats.mul_add_count, expected);
                assert_eq!(b.stats.mul_add_count, expected);
                assert_eq!(f.stats.peak_context_cells, 4u64.pow(order as u32));
            }
        }
    }
}

#[test]
fn order_three_nests_order_one() {
    let base = random_model(1, Topology::Circular, 3, 2, 2, 1.0, 40).unwrap();
    let mut m3 = random_model(3, Topology::Circular, 3, 2, 2, 1.0, 41).unwrap();
    m3.emissions = base.emissions.clone();
    for ctx in 0..27 {
        let last = ctx % 3;
        m3.transitions.row_mut(ctx).copy_from_slice(base.transitions.row(last));
    }
    m3.ramp.levels[0] = base.ramp.levels[0].clone();
    for m in 1..3 {
        for (prefix, row) in m3.ramp.levels[m].chunks_mut(3).enumerate() {
            row.copy_from_slice(base.transitions.row(prefix % 3));
        }
    }
    let obs = random_obs(15, 2, 42);
    let a = forward(&base, &obs).unwrap().log_likelihood;
    let b = forward(&m3, &obs).unwrap().log_likelihood;
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

#[test]
fn viterbi_never_exceeds_forward() {
    for seed in 0..10 {
        let m = random_model(2, Topology::Circular, 4, 2, 2, 1.0, seed).unwrap();
        let obs = random_obs(30, 2, seed + 50);
        let v = viterbi(&m, &obs).unwrap().log_joint;
        let f = forward(&m, &obs).unwrap().log_likelihood;
        assert!(v <= f);
    }
}

#[test]
fn lattices_are_bit_deterministic() {
    let m = random_model(3, Topology::Circular, 3, 2, 2, 1.0, 70).unwrap();
    let obs = random_obs(25, 2, 71);
    let a = forward(&m, &obs).unwrap();
    let b = forward(&m, &obs).unwrap();
    assert_eq!(a.lattice, b.lattice);
    assert_eq!(a.log_likelihood.to_bits(), b.log_likelihood.to_bits());
}
