//! Opponent-FIP distribution analysis and schedule-adjusted FIP (aFIP).
//!
//! The pipeline: parse team batting and pitching game logs, join them into
//! per-game matched records with opponent innings totals, compute each
//! game's opponent FIP, build a hypothetical league-average sample from the
//! pooled per-team distributions, and renormalize pitcher FIP against that
//! sample with the equipercentile and slope-intercept methods. A home/away
//! split check with a permutation null is included as a tampering indicator,
//! and a synthetic-season generator provides exact ground truth for testing.

pub mod equate;
pub mod error;
pub mod fip;
pub mod gamelog;
pub mod qq;
pub mod report;
pub mod sample;
pub mod synth;
pub mod tamper;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
