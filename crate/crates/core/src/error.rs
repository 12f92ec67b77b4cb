use std::fmt;

use thiserror::Error;

/// Which player a bid belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    And,
    Or,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::And => f.write_str("AND"),
            Player::Or => f.write_str("OR"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{player} bid on item {item} is {value}, outside [0, {cap}]")]
    BidOutOfRange {
        player: Player,
        item: usize,
        value: f64,
        cap: f64,
    },

    #[error("tie-break probability {value} for item {item} at bid {bid} is outside [0, 1]")]
    InvalidTieProbability { item: usize, bid: f64, value: f64 },

    #[error("OR value v = {v} admits no mixed equilibrium of the closed form (requires v > 1/2; for v <= 1/2 a Walrasian price in [v, 1/2] gives a pure equilibrium)")]
    Regime { v: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("marginals differ on item {item} at bid {at}: {left} vs {right}")]
    MarginalMismatch {
        item: usize,
        at: f64,
        left: f64,
        right: f64,
    },

    #[error("unknown figure id '{id}' (valid ids: {valid})")]
    UnknownFigure { id: String, valid: String },

    #[error("malformed profile: {0}")]
    Profile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
