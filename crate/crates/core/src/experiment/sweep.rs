use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, NoiseKind};
use super::record::ExperimentRecord;
use super::run::run_experiment;
use super::summary::{bucket_records, group_by_p, table3_ranges, Bucketing, GroupStats};
use crate::error::{Error, Result};

/// Aggregated gain of one `(p, parameter)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: f64,
    pub param: f64,
    pub gain: f64,
    pub count: usize,
}

pub const MU_GRID: [f64; 5] = [0.001, 0.005, 0.01, 0.05, 0.1];
pub const EPSDELTA_GRID: [f64; 5] = [0.05, 0.01, 0.005, 0.001, 0.0005];

/// One cell per noise level. With `trim`, the records with the smallest and
/// largest gain are dropped first (when at least three remain).
fn cells(records: &[ExperimentRecord], param: f64, trim: bool) -> Vec<SweepCell> {
    group_by_p(records)
        .into_iter()
        .map(|(p, _)| {
            let mut group: Vec<&ExperimentRecord> =
                records.iter().filter(|r| r.p == Some(p)).collect();
            if trim && group.len() >= 3 {
                group.sort_by(|a, b| a.gain.total_cmp(&b.gain));
                group = group[1..group.len() - 1].to_vec();
            }
            let stats = GroupStats::of(group);
            SweepCell {
                p,
                param,
                gain: stats.gain,
                count: stats.count,
            }
        })
        .collect()
}

fn require_probability(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.noise_kind == NoiseKind::Counter {
        return Err(Error::config(
            "sweeps need a noise probability; counter has none",
        ));
    }
    Ok(())
}

/// Gain per `(p, mu)` with the best and worst record of each cell dropped.
pub fn sweep_mu(cfg: &ExperimentConfig, mus: &[f64]) -> Result<Vec<SweepCell>> {
    require_probability(cfg)?;
    let mut out = Vec::new();
    for &mu in mus {
        let c = ExperimentConfig { mu, ..cfg.clone() };
        out.extend(cells(&run_experiment(&c)?, mu, true));
    }
    Ok(out)
}

/// Gain per `(p, epsilon = delta)`.
pub fn sweep_epsdelta(cfg: &ExperimentConfig, values: &[f64]) -> Result<Vec<SweepCell>> {
    require_probability(cfg)?;
    let mut out = Vec::new();
    for &e in values {
        let c = ExperimentConfig {
            epsilon: e,
            delta: e,
            ..cfg.clone()
        };
        out.extend(cells(&run_experiment(&c)?, e, false));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EldSweep {
    pub records: Vec<ExperimentRecord>,
    pub eld: Bucketing,
    pub non_eld: Bucketing,
}

/// Noisy-input experiment over three-letter DFAs, split by the ELD flag.
pub fn eld_sweep(cfg: &ExperimentConfig) -> Result<EldSweep> {
    if cfg.noise_kind != NoiseKind::NoisyInput {
        return Err(Error::config("eld-sweep requires noisy-input noise"));
    }
    let c = ExperimentConfig {
        max_alphabet: 3,
        eld_partition: true,
        ..cfg.clone()
    };
    let records = run_experiment(&c)?;
    let (yes, no): (Vec<ExperimentRecord>, Vec<ExperimentRecord>) =
        records.iter().cloned().partition(|r| r.eld == Some(true));
    let ranges = table3_ranges();
    Ok(EldSweep {
        eld: bucket_records(&yes, &ranges)?,
        non_eld: bucket_records(&no, &ranges)?,
        records,
    })
}
