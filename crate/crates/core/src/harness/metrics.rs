//! Per-iteration metrics CSV.
//!
//! Columns, in order: `iteration, mean_episode_reward, episodes,
//! lin_track_reward, yaw_track_reward, vel_error, yaw_error, value_loss,
//! surrogate_loss, entropy, kl, clip_fraction, actor_grad_norm,
//! critic_grad_norm, lr, v_cmd_max, w_cmd_max, diverged, collect_time_s,
//! learn_time_s`.
//!
//! Episode columns are means over the last 100 completed episodes (`NaN`
//! until one completes); tracking columns are `NaN` for tasks without
//! commands. `episodes` counts episodes completed during the iteration.
//! The two timing columns come last and are the only ones that vary
//! between identical runs.

use std::collections::VecDeque;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::envs::EpisodeSummary;
use crate::error::Result;

pub const EPISODE_WINDOW: usize = 100;
pub const TIMING_COLUMNS: [&str; 2] = ["collect_time_s", "learn_time_s"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub mean_episode_reward: f64,
    pub episodes: usize,
    pub lin_track_reward: f64,
    pub yaw_track_reward: f64,
    /// m/s
    pub vel_error: f64,
    /// rad/s
    pub yaw_error: f64,
    pub value_loss: f64,
    pub surrogate_loss: f64,
    pub entropy: f64,
    pub kl: f64,
    pub clip_fraction: f64,
    pub actor_grad_norm: f64,
    pub critic_grad_norm: f64,
    pub lr: f64,
    pub v_cmd_max: f64,
    pub w_cmd_max: f64,
    pub diverged: bool,
    pub collect_time_s: f64,
    pub learn_time_s: f64,
}

/// Rolling window over the most recent completed episodes.
#[derive(Clone, Debug, Default)]
pub struct EpisodeWindow {
    eps: VecDeque<EpisodeSummary>,
}

/// Means over a set of episodes; tracking fields are `NaN` when absent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeMeans {
    pub reward: f64,
    pub lin_track_reward: f64,
    pub yaw_track_reward: f64,
    pub vel_error: f64,
    pub yaw_error: f64,
    pub score: f64,
}

pub fn episode_means<'a>(eps: impl IntoIterator<Item = &'a EpisodeSummary>) -> EpisodeMeans {
    let (mut n, mut nt) = (0usize, 0usize);
    let mut acc = [0.0f64; 6];
    for e in eps {
        n += 1;
        acc[0] += e.total_reward;
        if let Some(t) = e.tracking {
            nt += 1;
            acc[1] += t.lin_track_reward;
            acc[2] += t.yaw_track_reward;
            acc[3] += t.vel_error;
            acc[4] += t.yaw_error;
            acc[5] += t.score;
        }
    }
    let div = |x: f64, k: usize| if k == 0 { f64::NAN } else { x / k as f64 };
    EpisodeMeans {
        reward: div(acc[0], n),
        lin_track_reward: div(acc[1], nt),
        yaw_track_reward: div(acc[2], nt),
        vel_error: div(acc[3], nt),
        yaw_error: div(acc[4], nt),
        score: div(acc[5], nt),
    }
}

impl EpisodeWindow {
    pub fn push(&mut self, ep: EpisodeSummary) {
        if self.eps.len() == EPISODE_WINDOW {
            self.eps.pop_front();
        }
        self.eps.push_back(ep);
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn means(&self) -> EpisodeMeans {
        episode_means(&self.eps)
    }
}

/// Appends records to a CSV file, flushing after each one so a halted run
/// keeps everything written so far.
pub struct MetricsWriter {
    w: csv::Writer<File>,
}

impl MetricsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            w: csv::Writer::from_path(path)?,
        })
    }

    pub fn write(&mut self, r: &IterationRecord) -> Result<()> {
        self.w.serialize(r)?;
        self.w.flush()?;
        Ok(())
    }
}

pub fn read_metrics(path: &Path) -> Result<Vec<IterationRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// The CSV text with the timing columns removed, for run-to-run comparison.
pub fn strip_timing(csv_text: &str) -> Result<String> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(csv_text.as_bytes());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut keep: Option<Vec<bool>> = None;
    for rec in r.records() {
        let rec = rec?;
        let k = keep.get_or_insert_with(|| rec.iter().map(|c| !TIMING_COLUMNS.contains(&c)).collect());
        w.write_record(rec.iter().zip(k.iter()).filter(|(_, &k)| k).map(|(c, _)| c))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}
