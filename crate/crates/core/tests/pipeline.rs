use std::fs;

use noisy_lstar::automaton::{fixtures, random_dfa};
use noisy_lstar::experiment::{
    build_noisy_oracle, classify_gain, generate_target, records_csv, run_experiment,
    trajectory_run, write_experiment_outputs, ExperimentConfig, ExperimentRecord, NoiseKind,
    Profile, RECORDS_HEADER,
};
use noisy_lstar::oracle::CounterDfaOracle;
use noisy_lstar::{estimate_distance, Dfa, MuDistribution, RngKey};

fn tiny(kind: NoiseKind, p: &[f64]) -> ExperimentConfig {
    ExperimentConfig {
        p_values: p.to_vec(),
        num_dfas: 3,
        maxround: 25,
        max_states: 15,
        max_alphabet: 5,
        alpha: 0.01,
        gamma: 0.05,
        mu: 0.05,
        record_timing: false,
        master_seed: 11,
        ..ExperimentConfig::new(kind, Profile::Desk)
    }
}

fn check_triangle(records: &[ExperimentRecord], alpha: f64) {
    for r in records {
        assert!(
            r.d_a_ae <= r.d_a_mn + r.d_mn_ae + 2.0 * alpha,
            "triangle violated: {r:?}"
        );
        assert_eq!(r.gain_class, classify_gain(r.gain).unwrap());
    }
}

#[test]
fn triangle_holds_for_every_device() {
    for (kind, p) in [
        (NoiseKind::NoisyOutput, vec![0.02, 0.005]),
        (NoiseKind::NoisyInput, vec![0.01]),
        (NoiseKind::Counter, vec![]),
    ] {
        let cfg = tiny(kind, &p);
        check_triangle(&run_experiment(&cfg).unwrap(), cfg.alpha);
    }
}

#[test]
fn zero_noise_hook_learns_the_target() {
    let cfg = ExperimentConfig {
        allow_zero_noise: true,
        maxround: 200,
        ..tiny(NoiseKind::NoisyOutput, &[0.0])
    };
    for r in run_experiment(&cfg).unwrap() {
        assert_eq!(r.d_a_mn, 0.0);
        assert_eq!(r.d_a_ae, r.d_mn_ae);
        assert!(r.d_a_ae <= cfg.alpha, "{r:?}");
    }
}

#[test]
fn records_csv_matches_golden_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/records_tiny.csv");
    let csv = records_csv(&run_experiment(&tiny(NoiseKind::NoisyInput, &[0.01, 0.002])).unwrap());
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(path, &csv).unwrap();
    }
    let golden = fs::read_to_string(path).expect("golden file; regenerate with UPDATE_GOLDEN=1");
    assert_eq!(csv.lines().next(), Some(RECORDS_HEADER));
    assert_eq!(csv, golden);
}

#[test]
fn equivalence_check_agrees_with_sampling() {
    for i in 0..40u64 {
        let a = random_dfa(RngKey::new(i), 10, 3).unwrap();
        // Even indices compare a DFA with itself, odd ones two unrelated DFAs.
        let b = if i % 2 == 0 {
            a.clone()
        } else {
            random_dfa(RngKey::new(i + 500), 10, 3).unwrap()
        };
        if a.alphabet() != b.alphabet() {
            continue;
        }
        let dist = MuDistribution::new(0.1, a.alphabet()).unwrap();
        let d = estimate_distance(&a, &b, &dist, 0.02, 0.01, RngKey::new(i)).unwrap();
        match a.equivalent(&b).unwrap() {
            None => assert_eq!(d.value, 0.0),
            Some(w) => assert_ne!(a.accepts(&w).unwrap(), b.accepts(&w).unwrap()),
        }
    }
}

#[test]
fn trajectory_respects_the_round_budget() {
    let cfg = ExperimentConfig {
        maxround: 250,
        ..tiny(NoiseKind::NoisyOutput, &[0.005])
    };
    let dfa = generate_target(&cfg, 0).unwrap();
    let noisy = build_noisy_oracle(&cfg, 0, &dfa, 0, Some(0.005)).unwrap();
    let points = trajectory_run(&cfg, &dfa, &*noisy, RngKey::new(3)).unwrap();
    assert!(points.len() <= 12);
    for (i, p) in points.iter().enumerate() {
        assert_eq!(p.round, 20 * (i + 1));
        assert!(p.round <= 250);
        assert!((0.0..=1.0).contains(&p.d_a_ae));
    }
}

#[test]
fn outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        trajectory: true,
        maxround: 40,
        ..tiny(NoiseKind::Counter, &[])
    };
    let (records, traj) = noisy_lstar::experiment::run_experiment_with_trajectories(&cfg).unwrap();
    write_experiment_outputs(dir.path(), &cfg, &records, &traj).unwrap();

    let back: ExperimentConfig =
        serde_json::from_str(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(back, cfg);
    let csv = fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), records.len() + 1);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("group,count,"));
    assert!(dir.path().join("trajectory.csv").exists());
    for id in 0..cfg.num_dfas {
        let text = fs::read_to_string(dir.path().join(format!("dfas/dfa_{id:03}.txt"))).unwrap();
        let o = CounterDfaOracle::parse(&text).unwrap();
        assert_eq!(o.base(), &generate_target(&cfg, id).unwrap());
    }
}

#[test]
fn fixture_distances() {
    let a = fixtures::a_until_b();
    let c: Dfa = a.complement();
    let dist = MuDistribution::new(0.05, a.alphabet()).unwrap();
    let d = estimate_distance(&a, &c, &dist, 0.01, 0.05, RngKey::new(0)).unwrap();
    assert_eq!(d.value, 1.0);
}
