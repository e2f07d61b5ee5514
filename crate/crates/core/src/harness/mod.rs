//! Configuration, experiment orchestration, metrics, timing, aggregation
//! and checkpoints.

mod checkpoint;
mod config;
mod experiment;
mod metrics;
mod seeds;
mod stats;
mod timing;

pub use checkpoint::{Checkpoint, CheckpointHeader, FORMAT_VERSION, MAGIC};
pub use config::{Algorithm, EnvKind, Precision, TrainConfig};
pub use experiment::{
    bench, build_agent, compare, counts_of, env_dims, eval_curriculum, evaluate, evaluate_checkpoint,
    evaluate_untrained, make_env, model_counts, train, BenchReport, CompareReport, EnvDims, EvalReport,
    MetricSummary, ModelCounts, ModelSeeds, Run, SeedOutcome, TrainSummary, COMPARE_METRICS,
};
pub use metrics::{
    episode_means, read_metrics, strip_timing, EpisodeMeans, EpisodeWindow, IterationRecord, MetricsWriter,
    EPISODE_WINDOW, TIMING_COLUMNS,
};
pub use seeds::{derive_seed, splitmix64, Stream};
pub use stats::{mean, relative_std, sample_std, t_interval, Interval};
pub use timing::Profiler;

/// Environment variable naming the root directory for run outputs.
pub const OUT_DIR_ENV: &str = "RANDPOL_OUT_DIR";
