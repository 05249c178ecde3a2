//! Tight tail-probability bounds for distributions with known support, mean
//! and mean absolute deviation, and robust decisions built on them.
//!
//! The [`ambiguity`] module defines the sets of distributions; [`tail_bounds`]
//! gives the closed-form bounds and the distributions attaining them;
//! [`lp_oracle`] discretises the underlying moment problem so every closed form
//! can be checked numerically. The remaining modules apply the bounds to the
//! newsvendor, monopoly pricing, stop-loss reinsurance, sums of risks and
//! chance-constrained optimisation.

pub mod ambiguity;
pub mod chance;
pub mod cli;
pub mod error;
pub mod format;
pub mod interval;
pub mod lp_oracle;
pub mod newsvendor;
pub mod pricing;
pub mod stoploss;
pub mod sums;
pub mod tail_bounds;

pub use ambiguity::{estimate_from_samples, AmbiguitySet, SampleMoments, Violation};
pub use error::{Error, Result};
pub use interval::Interval;
