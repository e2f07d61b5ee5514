//! The update step: critic regression, clipped surrogate with an entropy
//! bonus, Adam, gradient-norm clipping and the KL-adaptive learning rate.

mod adam;
mod losses;
mod train;

pub use adam::{adam_apply, clip_grad_norm, kl_adaptive_lr, AdamState, LR_MAX, LR_MIN};
pub use losses::{clipped_term, surrogate_loss_and_grad, value_loss_and_grad, SurrogateStats};
pub use train::{train_iteration, Agent, LearnerConfig, UpdateReport};
