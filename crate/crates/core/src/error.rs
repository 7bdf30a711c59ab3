//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A runtime input (irradiance, demand, purchase amount, ...) broke a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The storage cycle cost is too large for the price series.
    #[error(
        "cycle cost {cycle_cost} cents/kWh must stay strictly below \
         min((grid_sell - sfc_sell)/2) = {limit} cents/kWh, first violated at slot {slot}"
    )]
    CycleCostBound {
        slot: usize,
        limit: f64,
        cycle_cost: f64,
    },

    /// A denominator reached zero (state of charge at or below zero).
    #[error("singular state: {0}")]
    Singular(String),

    /// An internal invariant failed; signals a clamping or settlement bug upstream.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A ratio metric was requested against a zero reference.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Scenario or config-file level problem.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent CSV content.
    #[error("csv error in {path}: {msg}")]
    Csv { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
