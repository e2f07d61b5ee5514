//! Desk-scale vectorizable control tasks.
//!
//! Physics runs in `f64` regardless of the learner's scalar type.

mod curriculum;
mod pendulum;
mod velocity;

pub use curriculum::{Command, CurriculumConfig, CurriculumState};
pub use pendulum::{PendulumConfig, PendulumEnv};
pub use velocity::{reward_of, BodyState, RewardBreakdown, RewardWeights, VelocityEnv, VelocityTaskConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("non-finite action component {index}: {value}")]
    NonFiniteAction { index: usize, value: f64 },
    #[error("action has {got} components, expected {expected}")]
    ActionDim { expected: usize, got: usize },
}

/// Actor observation plus the critic-only extension. `actor` is always a
/// prefix of `privileged`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub actor: Vec<f64>,
    pub privileged: Vec<f64>,
}

/// Per-episode tracking quality for velocity tasks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrackingStats {
    /// Mean weighted linear tracking reward per step.
    pub lin_track_reward: f64,
    /// Mean weighted yaw tracking reward per step.
    pub yaw_track_reward: f64,
    /// Mean `|v - v_cmd|` in m/s.
    pub vel_error: f64,
    /// Mean `|w - w_cmd|` in rad/s.
    pub yaw_error: f64,
    /// Mean unweighted linear tracking kernel, the curriculum score.
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeSummary {
    /// Undiscounted sum of raw rewards.
    pub total_reward: f64,
    pub length: usize,
    pub tracking: Option<TrackingStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub obs: Observation,
    pub reward: f64,
    pub done: bool,
    /// Episode ended by the time limit rather than failure.
    pub truncated: bool,
    /// Present on the step that ends an episode.
    pub episode: Option<EpisodeSummary>,
}

/// A single environment instance. Each instance owns its random stream, so
/// a batch is a pure function of its seeds and the actions applied.
pub trait Environment: Send {
    fn obs_dim(&self) -> usize;
    fn privileged_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn reset(&mut self) -> Observation;
    fn observe(&self) -> Observation;
    /// Advances one control step. Does not auto-reset.
    fn step(&mut self, action: &[f64]) -> Result<StepOutcome, EnvError>;
    /// Pushes new command ranges; tasks without commands ignore it.
    fn apply_curriculum(&mut self, _state: &CurriculumState) {}
}

pub(crate) fn validate_action(action: &[f64], expected: usize) -> Result<(), EnvError> {
    if action.len() != expected {
        return Err(EnvError::ActionDim {
            expected,
            got: action.len(),
        });
    }
    if let Some((index, &value)) = action.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(EnvError::NonFiniteAction { index, value });
    }
    Ok(())
}

/// Wraps an angle into `[-pi, pi)`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    (a + PI).rem_euclid(2.0 * PI) - PI
}
