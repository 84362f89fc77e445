//! Reliability of k-out-of-n systems equipped with one cold standby unit,
//! for independent component lifetimes on the nonnegative integers.
//!
//! The system lifetime is `T = min(X_{n-k+1:n} + Z, X_{n-k+2:n})` where
//! `X_{r:n}` are the order statistics of the active lifetimes and `Z` is the
//! standby lifetime (with `X_{n+1:n} = ∞`, so `T = X_{n:n} + Z` when `k = 1`).
//! Infinite sums are truncated at indices whose discarded tail is bounded by
//! a user budget `d`, so every mean comes with a certified error.

pub mod distributions;
pub mod error;
pub mod lifetime;
pub mod oracle;
pub mod orders;
pub mod orderstats;
pub mod reproduce;
pub mod residual;
pub mod spec_file;
pub mod special;

pub use distributions::{DiscreteLifetime, Family};
pub use error::{Error, Result};
pub use lifetime::{expected_T, reliability_T, AccuracyBudget};
pub use orderstats::SystemSpec;
