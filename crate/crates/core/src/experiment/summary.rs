use std::fmt;

use serde::{Deserialize, Serialize};

use super::record::{information_gain, ExperimentRecord};
use crate::error::{Error, Result};

/// `[lo, hi)` on the measured `d(A, M_N)`; an upper end of 1 is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::config(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && (x < self.hi || (self.hi >= 1.0 && x <= self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.hi >= 1.0 { ']' } else { ')' };
        write!(f, "[{}, {}{close}", self.lo, self.hi)
    }
}

fn intervals(bounds: &[(f64, f64)]) -> Vec<Interval> {
    bounds.iter().map(|&(lo, hi)| Interval { lo, hi }).collect()
}

/// Ranges used for the noisy-input table.
pub fn table3_ranges() -> Vec<Interval> {
    intervals(&[
        (0.025, 1.0),
        (0.005, 0.025),
        (0.002, 0.005),
        (0.001, 0.002),
        (0.0005, 0.001),
    ])
}

/// Ranges used for the counter table.
pub fn table4_ranges() -> Vec<Interval> {
    intervals(&[
        (0.005, 0.025),
        (0.002, 0.005),
        (0.001, 0.002),
        (0.0005, 0.001),
        (0.0001, 0.0005),
    ])
}

/// Aggregates over a group of records. `gain` is the information gain of the
/// mean distances, which is how the published tables aggregate; the mean of
/// the per-record gains is kept alongside. The standard deviation is the
/// population one (divisor `n`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupStats {
    pub count: usize,
    pub mean_d_a_mn: f64,
    pub mean_d_a_ae: f64,
    pub mean_d_mn_ae: f64,
    pub gain: f64,
    pub mean_record_gain: f64,
    pub std_d_a_ae: f64,
}

impl GroupStats {
    pub fn of<'a>(records: impl IntoIterator<Item = &'a ExperimentRecord>) -> Self {
        let records: Vec<&ExperimentRecord> = records.into_iter().collect();
        let n = records.len();
        if n == 0 {
            return GroupStats::default();
        }
        let mean = |f: &dyn Fn(&ExperimentRecord) -> f64| {
            records.iter().map(|r| f(r)).sum::<f64>() / n as f64
        };
        let mean_d_a_ae = mean(&|r| r.d_a_ae);
        let mean_d_a_mn = mean(&|r| r.d_a_mn);
        let var = mean(&|r| (r.d_a_ae - mean_d_a_ae).powi(2));
        GroupStats {
            count: n,
            mean_d_a_mn,
            mean_d_a_ae,
            mean_d_mn_ae: mean(&|r| r.d_mn_ae),
            gain: information_gain(mean_d_a_mn, mean_d_a_ae),
            mean_record_gain: mean(&|r| r.gain),
            std_d_a_ae: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub range: Interval,
    pub stats: GroupStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bucketing {
    pub buckets: Vec<BucketSummary>,
    /// Records whose `d(A, M_N)` falls in none of the ranges.
    pub outside: usize,
}

/// Groups records by which range contains their `d(A, M_N)`. Ranges must be
/// pairwise disjoint; output order follows the input order.
pub fn bucket_records(records: &[ExperimentRecord], ranges: &[Interval]) -> Result<Bucketing> {
    let mut sorted: Vec<&Interval> = ranges.iter().collect();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    for w in sorted.windows(2) {
        if w[0].hi > w[1].lo {
            return Err(Error::config(format!(
                "ranges {} and {} overlap",
                w[0], w[1]
            )));
        }
    }
    let mut outside = 0;
    let mut groups: Vec<Vec<&ExperimentRecord>> = vec![Vec::new(); ranges.len()];
    for r in records {
        match ranges.iter().position(|iv| iv.contains(r.d_a_mn)) {
            Some(i) => groups[i].push(r),
            None => outside += 1,
        }
    }
    let buckets = ranges
        .iter()
        .zip(groups)
        .map(|(range, g)| BucketSummary {
            range: *range,
            stats: GroupStats::of(g),
        })
        .collect();
    Ok(Bucketing { buckets, outside })
}

/// Groups records by noise probability, in first-seen order.
pub fn group_by_p(records: &[ExperimentRecord]) -> Vec<(f64, GroupStats)> {
    let mut keys: Vec<f64> = Vec::new();
    for r in records {
        if let Some(p) = r.p {
            if !keys.contains(&p) {
                keys.push(p);
            }
        }
    }
    keys.into_iter()
        .map(|p| (p, GroupStats::of(records.iter().filter(|r| r.p == Some(p)))))
        .collect()
}

/// Mean after dropping one smallest and one largest value (when at least
/// three values are present).
pub fn mean_trimmed(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let kept = if v.len() >= 3 {
        &v[1..v.len() - 1]
    } else {
        &v[..]
    };
    kept.iter().sum::<f64>() / kept.len() as f64
}
