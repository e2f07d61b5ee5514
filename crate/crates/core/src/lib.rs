//! Actor-critic learning over frozen random features, alongside a fully
//! trainable dense baseline.
//!
//! Numerical code is generic over [`Real`]; the `*64` and `*32` aliases
//! below fix the scalar type.

pub mod actor_critic;
pub mod envs;
pub mod error;
pub mod function_approx;
pub mod harness;
pub mod learner;
pub mod normalize;
pub mod rollout;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type RandomBasis64 = function_approx::RandomBasis<f64>;
pub type RandomBasis32 = function_approx::RandomBasis<f32>;
pub type DenseNet64 = function_approx::DenseNet<f64>;
pub type DenseNet32 = function_approx::DenseNet<f32>;
pub type GaussianPolicy64 = actor_critic::GaussianPolicy<f64>;
pub type GaussianPolicy32 = actor_critic::GaussianPolicy<f32>;
pub type ValueHead64 = actor_critic::ValueHead<f64>;
pub type ValueHead32 = actor_critic::ValueHead<f32>;
pub type RolloutBuffer64 = rollout::RolloutBuffer<f64>;
pub type RolloutBuffer32 = rollout::RolloutBuffer<f32>;
