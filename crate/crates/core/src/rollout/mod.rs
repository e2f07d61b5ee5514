//! On-policy trajectory collection, advantage estimation and minibatching.

mod buffer;
mod collect;
mod gae;
mod minibatch;

pub use buffer::{BufferLayout, Minibatch, RolloutBuffer, Transition};
pub use collect::{CollectorConfig, RolloutCollector};
pub use gae::{gae_stream, normalize_in_place, GaeStream};
pub use minibatch::minibatch_iter;
