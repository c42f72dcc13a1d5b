use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, NoiseKind};
use super::record::ExperimentRecord;
use super::run::{counter_function_for, generate_target, Trajectory};
use super::summary::{
    bucket_records, group_by_p, table3_ranges, table4_ranges, Bucketing, GroupStats,
};
use crate::error::{Error, Result};
use crate::oracle::CounterDfaOracle;

pub const RECORDS_HEADER: &str =
    "dfa_id,noise_kind,p,d_A_MN,d_A_AE,d_MN_AE,gain,gain_class,rounds,terminated_by,eld,wall_ms";
pub const SUMMARY_HEADER: &str =
    "group,count,mean_d_A_MN,mean_d_A_AE,mean_d_MN_AE,gain,mean_record_gain,std_d_A_AE";
pub const TRAJECTORY_HEADER: &str = "dfa_id,p,round,d_A_AE";

/// One aggregated line of `summary.csv`. `group` is the noise probability
/// for noisy-output and the `d(A, M_N)` range otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub group: String,
    pub stats: GroupStats,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut s = String::from(RECORDS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.dfa_id,
            r.noise_kind.as_str(),
            opt(r.p),
            r.d_a_mn,
            r.d_a_ae,
            r.d_mn_ae,
            r.gain,
            r.gain_class.as_str(),
            r.rounds,
            r.terminated_by.as_str(),
            opt(r.eld),
            r.wall_ms,
        );
    }
    s
}

/// Noisy-output rows are keyed by `p`; the other devices are bucketed by the
/// measured `d(A, M_N)`. Records outside every range get an `outside` row.
pub fn summary_rows(kind: NoiseKind, records: &[ExperimentRecord]) -> Result<Vec<SummaryRow>> {
    if kind == NoiseKind::NoisyOutput {
        return Ok(group_by_p(records)
            .into_iter()
            .map(|(p, stats)| SummaryRow {
                group: p.to_string(),
                stats,
            })
            .collect());
    }
    let ranges = if kind == NoiseKind::NoisyInput {
        table3_ranges()
    } else {
        table4_ranges()
    };
    let b = bucket_records(records, &ranges)?;
    let mut rows: Vec<SummaryRow> = b
        .buckets
        .into_iter()
        .map(|x| SummaryRow {
            group: x.range.to_string(),
            stats: x.stats,
        })
        .collect();
    if b.outside > 0 {
        let outside = records
            .iter()
            .filter(|r| !ranges.iter().any(|iv| iv.contains(r.d_a_mn)));
        rows.push(SummaryRow {
            group: "outside".into(),
            stats: GroupStats::of(outside),
        });
    }
    Ok(rows)
}

pub fn summary_csv(kind: NoiseKind, records: &[ExperimentRecord]) -> Result<String> {
    Ok(rows_csv(summary_rows(kind, records)?))
}

/// A bucketed table in the `summary.csv` layout, followed by an `outside`
/// row when some records matched no range.
pub fn bucketing_csv(b: &Bucketing) -> String {
    let mut rows: Vec<SummaryRow> = b
        .buckets
        .iter()
        .map(|x| SummaryRow {
            group: x.range.to_string(),
            stats: x.stats,
        })
        .collect();
    if b.outside > 0 {
        rows.push(SummaryRow {
            group: "outside".into(),
            stats: GroupStats {
                count: b.outside,
                ..GroupStats::default()
            },
        });
    }
    rows_csv(rows)
}

fn rows_csv(rows: Vec<SummaryRow>) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for row in rows {
        let g = row.stats;
        // Ranges contain a comma, so the group column is quoted.
        let _ = writeln!(
            s,
            "\"{}\",{},{},{},{},{},{},{}",
            row.group,
            g.count,
            g.mean_d_a_mn,
            g.mean_d_a_ae,
            g.mean_d_mn_ae,
            g.gain,
            g.mean_record_gain,
            g.std_d_a_ae
        );
    }
    s
}

pub fn trajectory_csv(trajectories: &[Trajectory]) -> String {
    let mut s = String::from(TRAJECTORY_HEADER);
    s.push('\n');
    for (id, p, points) in trajectories {
        for pt in points {
            let _ = writeln!(s, "{},{},{},{}", id, opt(*p), pt.round, pt.d_a_ae);
        }
    }
    s
}

/// Writes `records.csv`, `summary.csv`, `config.json`, `trajectory.csv` (when
/// enabled) and one DFA file per generated target under `dir`.
pub fn write_experiment_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    records: &[ExperimentRecord],
    trajectories: &[Trajectory],
) -> Result<()> {
    fs::create_dir_all(dir.join("dfas"))?;
    fs::write(dir.join("records.csv"), records_csv(records))?;
    fs::write(
        dir.join("summary.csv"),
        summary_csv(cfg.noise_kind, records)?,
    )?;
    let json = serde_json::to_string_pretty(cfg).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("config.json"), json + "\n")?;
    if cfg.trajectory {
        fs::write(dir.join("trajectory.csv"), trajectory_csv(trajectories))?;
    }
    for id in 0..cfg.num_dfas {
        let dfa = generate_target(cfg, id)?;
        let text = match cfg.noise_kind {
            NoiseKind::Counter => {
                let counter = counter_function_for(cfg, id, &dfa);
                CounterDfaOracle::new(dfa, counter)?.to_text()
            }
            _ => dfa.to_text(),
        };
        fs::write(dir.join("dfas").join(format!("dfa_{id:03}.txt")), text)?;
    }
    Ok(())
}
