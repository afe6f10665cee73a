use super::*;
use crate::features::{ProsodicTrack, Utterance};
use crate::hmm::{random_model, sample, HmmModel, Topology};
use crate::training::TrainConfig;

fn utterance_from(model: &HmmModel, len: usize, seed: u64) -> Utterance {
    let (states, acoustic) = sample(model, len, seed).unwrap();
    let prosody = ProsodicTrack {
        f0_hz: states.iter().map(|&s| if s % 3 == 2 { 0.0 } else { 100.0 + 15.0 * s as f64 }).collect(),
        log_energy: states.iter().map(|&s| -4.0 + 0.3 * s as f64).collect(),
    };
    Utterance::new(acoustic, prosody).unwrap()
}

fn small_config(order: usize, topology: Topology) -> PipelineConfig {
    PipelineConfig {
        order,
        topology,
        n_states: 6,
        train: TrainConfig {
            n_components: 1,
            max_iterations: 8,
            ..TrainConfig::default()
        },
        supra: SupraConfig {
            group_size: 2,
            ..SupraConfig::default()
        },
    }
}

fn speaker_data(order: usize, topology: Topology, seed: u64) -> (HmmModel, Vec<Utterance>) {
    let truth = random_model(order, topology, 6, 1, 4, 2.0, seed).unwrap();
    let utts = (0..4).map(|i| utterance_from(&truth, 80, seed * 100 + i)).collect();
    (truth, utts)
}

#[test]
fn fusion_examples() {
    assert_eq!(fused_score(-10.0, -20.0, 0.5).unwrap(), -15.0);
    assert_eq!(fused_score(-1.234, f64::NEG_INFINITY, 0.0).unwrap(), -1.234);
    assert_eq!(fused_score(f64::NEG_INFINITY, -7.5, 1.0).unwrap(), -7.5);
    assert!(fused_score(0.0, 0.0, 1.5).is_err());
    assert!(fused_score(0.0, 0.0, -0.1).is_err());
    assert!(fused_score(0.0, 0.0, f64::NAN).is_err());
}

#[test]
fn trained_speaker_is_valid_and_reproducible() {
    for (order, topology) in [(1, Topology::LeftToRight), (3, Topology::Circular), (3, Topology::LeftToRight)] {
        let (_, utts) = speaker_data(order, topology.clone(), 3);
        let cfg = small_config(order, topology);
        let a = train_speaker("s1", &utts, &cfg).unwrap();
        a.validate().unwrap();
        assert_eq!(a.supra.n_states, 3);
        assert_eq!(a.supra.feature_dim, SEGMENT_DIM);
        assert_eq!(a.supra.order, order);
        let b = train_speaker("s1", &utts, &cfg).unwrap();
        assert_eq!(a, b);
        let back = SpeakerModel::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(a, back);
    }
}

#[test]
fn grouping_must_cover_states() {
    let (_, utts) = speaker_data(1, Topology::Circular, 1);
    let mut cfg = small_config(1, Topology::Circular);
    cfg.n_states = 7;
    assert!(train_speaker("s", &utts, &cfg).is_err());
    assert!(train_speaker("s", &[], &small_config(1, Topology::Circular)).is_err());
}

#[test]
fn own_speaker_outscores_random_model() {
    let cfg = small_config(2, Topology::Circular);
    let (truth, utts) = speaker_data(2, Topology::Circular, 9);
    let own = train_speaker("own", &utts, &cfg).unwrap();
    let mut wins = 0;
    for trial in 0..100u64 {
        let other_truth = random_model(2, Topology::Circular, 6, 1, 4, 2.0, 1000 + trial).unwrap();
        let mut other = own.clone();
        other.acoustic = other_truth;
        other.speaker_id = format!("rand{trial}");
        let clip = utterance_from(&truth, 80, 7000 + trial);
        let a = score_utterance(&own, &clip).unwrap().fused(0.5).unwrap();
        let b = score_utterance(&other, &clip).unwrap().fused(0.5).unwrap();
        if a >= b {
            wins += 1;
        }
    }
    assert!(wins >= 95, "{wins}/100");
}

#[test]
fn fused_score_is_affine_in_alpha() {
    let cfg = small_config(1, Topology::Circular);
    let (truth, utts) = speaker_data(1, Topology::Circular, 4);
    let model = train_speaker("s", &utts, &cfg).unwrap();
    let s = score_utterance(&model, &utterance_from(&truth, 50, 77)).unwrap();
    assert_eq!(s.fused(0.0).unwrap(), s.acoustic);
    assert_eq!(s.fused(1.0).unwrap(), s.supra);
    for i in 0..=10 {
        let a = i as f64 / 10.0;
        let lerp = s.acoustic + a * (s.supra - s.acoustic);
        assert!((s.fused(a).unwrap() - lerp).abs() <= 1e-12 * (1.0 + lerp.abs()));
    }
    assert_eq!(s, score_utterance(&model, &utterance_from(&truth, 50, 77)).unwrap());
}
