//! Gaussian policy and state-value heads over either a frozen random basis
//! with linear readouts or a fully trainable dense network.

mod policy;
mod representation;
mod value;

pub use policy::{gaussian_entropy, gaussian_log_prob, GaussianPolicy, LogStdBounds};
pub use representation::{BatchInput, ForwardCache, Representation, Variant};
pub use value::ValueHead;
