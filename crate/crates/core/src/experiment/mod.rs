//! The generate → perturb → learn → measure pipeline and its aggregations.

mod config;
mod output;
mod record;
mod run;
mod summary;
mod sweep;

pub use config::{ExperimentConfig, NoiseKind, Profile};
pub use output::{
    bucketing_csv, records_csv, summary_csv, summary_rows, trajectory_csv,
    write_experiment_outputs, SummaryRow, RECORDS_HEADER,
};
pub use record::{classify_gain, information_gain, ExperimentRecord, GainClass};
pub use run::{
    build_noisy_oracle, counter_function_for, generate_target, run_experiment,
    run_experiment_with_trajectories, run_single, trajectory_run, Trajectory, TrajectoryPoint,
};
pub use summary::{
    bucket_records, group_by_p, mean_trimmed, table3_ranges, table4_ranges, BucketSummary,
    Bucketing, GroupStats, Interval,
};
pub use sweep::{eld_sweep, sweep_epsdelta, sweep_mu, EldSweep, SweepCell, EPSDELTA_GRID, MU_GRID};
