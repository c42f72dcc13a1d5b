use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, NoiseKind};
use super::record::{classify_gain, information_gain, ExperimentRecord};
use crate::automaton::{random_dfa, Dfa};
use crate::distribution::{estimate_distance, MuDistribution};
use crate::error::Result;
use crate::lstar::{learn, LearnerConfig};
use crate::oracle::{
    CounterDfaOracle, CounterFunction, LanguageOracle, NoisyInputOracle, NoisyOutputOracle,
};
use crate::seed::RngKey;
use crate::structure::is_equal_length_distinguishing;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub round: usize,
    pub d_a_ae: f64,
}

/// Root of every seed used for one DFA of an experiment.
fn dfa_key(cfg: &ExperimentConfig, dfa_id: usize) -> RngKey {
    RngKey::new(cfg.master_seed)
        .derive("experiment")
        .index(dfa_id as u64)
}

/// Role key: `mix(master_seed, dfa_id, role)`, further indexed by noise level.
fn role_key(cfg: &ExperimentConfig, dfa_id: usize, role: &str, level: usize) -> RngKey {
    dfa_key(cfg, dfa_id).derive(role).index(level as u64)
}

pub fn generate_target(cfg: &ExperimentConfig, dfa_id: usize) -> Result<Dfa> {
    random_dfa(
        dfa_key(cfg, dfa_id).derive("dfa-gen"),
        cfg.max_states,
        cfg.max_alphabet,
    )
}

pub fn counter_function_for(cfg: &ExperimentConfig, dfa_id: usize, dfa: &Dfa) -> CounterFunction {
    CounterFunction::random(dfa_key(cfg, dfa_id).derive("noise"), dfa.alphabet())
}

/// The noisy device `M_N` for one DFA and noise level.
pub fn build_noisy_oracle(
    cfg: &ExperimentConfig,
    dfa_id: usize,
    dfa: &Dfa,
    level: usize,
    p: Option<f64>,
) -> Result<Box<dyn LanguageOracle>> {
    let key = role_key(cfg, dfa_id, "noise", level).language(cfg.noise_kind.as_str());
    let p = p.unwrap_or(0.0);
    Ok(match cfg.noise_kind {
        NoiseKind::NoisyOutput if cfg.allow_zero_noise => Box::new(
            NoisyOutputOracle::with_probability_unchecked(dfa.clone(), p, key)?,
        ),
        NoiseKind::NoisyOutput => Box::new(NoisyOutputOracle::new(dfa.clone(), p, key)?),
        NoiseKind::NoisyInput if cfg.allow_zero_noise => Box::new(
            NoisyInputOracle::with_probability_unchecked(dfa.clone(), p, key)?,
        ),
        NoiseKind::NoisyInput => Box::new(NoisyInputOracle::new(dfa.clone(), p, key)?),
        NoiseKind::Counter => Box::new(CounterDfaOracle::new(
            dfa.clone(),
            counter_function_for(cfg, dfa_id, dfa),
        )?),
    })
}

fn learner_config(
    cfg: &ExperimentConfig,
    dfa: &Dfa,
    dfa_id: usize,
    level: usize,
) -> Result<LearnerConfig> {
    let dist = MuDistribution::new(cfg.mu, dfa.alphabet())?;
    Ok(LearnerConfig::new(
        cfg.epsilon,
        cfg.delta,
        cfg.maxround,
        dist,
        role_key(cfg, dfa_id, "learner-sampling", level),
    )?
    .with_trajectory(cfg.trajectory))
}

fn snapshot_distances(
    cfg: &ExperimentConfig,
    dfa: &Dfa,
    snapshots: &[(usize, Dfa)],
    key: RngKey,
) -> Result<Vec<TrajectoryPoint>> {
    let dist = MuDistribution::new(cfg.mu, dfa.alphabet())?;
    snapshots
        .iter()
        .map(|(round, h)| {
            let d = estimate_distance(
                dfa,
                h,
                &dist,
                cfg.alpha,
                cfg.gamma,
                key.index(*round as u64),
            )?;
            Ok(TrajectoryPoint {
                round: *round,
                d_a_ae: d.value,
            })
        })
        .collect()
}

/// One learning run with snapshots every 20 rounds, returning the distance
/// of each snapshot to `dfa`.
pub fn trajectory_run(
    cfg: &ExperimentConfig,
    dfa: &Dfa,
    oracle: &dyn LanguageOracle,
    key: RngKey,
) -> Result<Vec<TrajectoryPoint>> {
    let dist = MuDistribution::new(cfg.mu, dfa.alphabet())?;
    let lc = LearnerConfig::new(
        cfg.epsilon,
        cfg.delta,
        cfg.maxround,
        dist,
        key.derive("learner-sampling"),
    )?
    .with_trajectory(true);
    let result = learn(oracle, &lc)?;
    snapshot_distances(cfg, dfa, &result.trajectory, key.derive("trajectory"))
}

/// Runs the full pipeline for one DFA at one noise level. The same oracle
/// instance serves the learner and the distance measurements.
pub fn run_single(
    cfg: &ExperimentConfig,
    dfa_id: usize,
    dfa: &Dfa,
    level: usize,
    p: Option<f64>,
) -> Result<(ExperimentRecord, Vec<TrajectoryPoint>)> {
    let start = Instant::now();
    let noisy = build_noisy_oracle(cfg, dfa_id, dfa, level, p)?;
    let lc = learner_config(cfg, dfa, dfa_id, level)?;
    let result = learn(&*noisy, &lc)?;
    let learned = &result.hypothesis;

    let dist = MuDistribution::new(cfg.mu, dfa.alphabet())?;
    let measure = |a: &dyn LanguageOracle, b: &dyn LanguageOracle, role: &str| {
        estimate_distance(
            a,
            b,
            &dist,
            cfg.alpha,
            cfg.gamma,
            role_key(cfg, dfa_id, role, level),
        )
        .map(|d| d.value)
    };
    let d_a_mn = measure(dfa, &*noisy, "distance-A-MN")?;
    let d_a_ae = measure(dfa, learned, "distance-A-AE")?;
    let d_mn_ae = measure(&*noisy, learned, "distance-MN-AE")?;
    let gain = information_gain(d_a_mn, d_a_ae);

    let trajectory = if cfg.trajectory {
        snapshot_distances(
            cfg,
            dfa,
            &result.trajectory,
            role_key(cfg, dfa_id, "trajectory", level),
        )?
    } else {
        Vec::new()
    };
    let eld = cfg
        .eld_partition
        .then(|| is_equal_length_distinguishing(dfa).is_some());
    let wall_ms = if cfg.record_timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let record = ExperimentRecord {
        dfa_id,
        noise_kind: cfg.noise_kind,
        p,
        d_a_mn,
        d_a_ae,
        d_mn_ae,
        gain,
        gain_class: classify_gain(gain)?,
        rounds: result.rounds_used,
        terminated_by: result.terminated_by,
        eld,
        wall_ms,
    };
    Ok((record, trajectory))
}

/// Trajectory of one `(dfa_id, p)` run.
pub type Trajectory = (usize, Option<f64>, Vec<TrajectoryPoint>);

/// Like [`run_experiment`], also returning the per-run trajectories when
/// `cfg.trajectory` is set.
pub fn run_experiment_with_trajectories(
    cfg: &ExperimentConfig,
) -> Result<(Vec<ExperimentRecord>, Vec<Trajectory>)> {
    cfg.validate()?;
    let levels = cfg.noise_levels();
    let per_dfa: Vec<Vec<(ExperimentRecord, Vec<TrajectoryPoint>)>> = (0..cfg.num_dfas)
        .into_par_iter()
        .map(|id| {
            let dfa = generate_target(cfg, id)?;
            levels
                .iter()
                .enumerate()
                .map(|(level, &p)| run_single(cfg, id, &dfa, level, p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut trajectories = Vec::new();
    for (record, traj) in per_dfa.into_iter().flatten() {
        if cfg.trajectory {
            trajectories.push((record.dfa_id, record.p, traj));
        }
        records.push(record);
    }
    Ok((records, trajectories))
}

/// One record per generated DFA and noise level, ordered by DFA id then
/// level. Fully determined by the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run_experiment_with_trajectories(cfg).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::Profile;
    use crate::lstar::Termination;

    fn tiny(kind: NoiseKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, Profile::Desk);
        c.num_dfas = 2;
        c.max_states = 12;
        c.max_alphabet = 4;
        c.maxround = 15;
        c.alpha = 0.02;
        c.gamma = 0.05;
        c.mu = 0.05;
        c.record_timing = false;
        c.master_seed = 5;
        c
    }

    #[test]
    fn zero_noise_output_learns_the_dfa_itself() {
        let mut c = tiny(NoiseKind::NoisyOutput);
        c.allow_zero_noise = true;
        c.p_values = vec![0.0];
        c.maxround = 60;
        let records = run_experiment(&c).unwrap();
        for r in &records {
            assert_eq!(r.d_a_mn, 0.0);
            assert_eq!(r.d_a_ae, r.d_mn_ae);
        }
    }

    #[test]
    fn records_are_ordered_and_complete() {
        let mut c = tiny(NoiseKind::NoisyInput);
        c.p_values = vec![0.01, 0.05];
        c.eld_partition = true;
        let records = run_experiment(&c).unwrap();
        let keys: Vec<(usize, Option<f64>)> = records.iter().map(|r| (r.dfa_id, r.p)).collect();
        assert_eq!(
            keys,
            vec![
                (0, Some(0.01)),
                (0, Some(0.05)),
                (1, Some(0.01)),
                (1, Some(0.05))
            ]
        );
        for r in &records {
            assert!(r.eld.is_some());
            assert!(r.rounds <= c.maxround);
            assert_eq!(r.gain_class, classify_gain(r.gain).unwrap());
            assert_eq!(r.wall_ms, 0);
            if r.terminated_by == Termination::Maxround {
                assert_eq!(r.rounds, c.maxround);
            }
        }
    }

    #[test]
    fn counter_runs_once_per_dfa() {
        let c = tiny(NoiseKind::Counter);
        let records = run_experiment(&c).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.p.is_none()));
    }

    #[test]
    fn trajectory_points_are_distances() {
        let mut c = tiny(NoiseKind::NoisyOutput);
        c.p_values = vec![0.05];
        c.maxround = 45;
        let dfa = generate_target(&c, 0).unwrap();
        let oracle = build_noisy_oracle(&c, 0, &dfa, 0, Some(0.05)).unwrap();
        let points = trajectory_run(&c, &dfa, &*oracle, RngKey::new(1)).unwrap();
        assert!(points.len() <= 2);
        for (i, p) in points.iter().enumerate() {
            assert_eq!(p.round, 20 * (i + 1));
            assert!((0.0..=1.0).contains(&p.d_a_ae));
        }
    }
}
