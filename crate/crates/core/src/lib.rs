//! Mixed Nash equilibrium of the two-item simultaneous first-price auction
//! between a single-minded AND bidder and a unit-demand OR bidder.
//!
//! The AND bidder values the bundle of both items at 1 and nothing less; the
//! OR bidder values any nonempty set at `v`. For `v > 1/2` there is no pure
//! equilibrium, and the mixed one is known in closed form. This crate
//! evaluates that closed form, verifies candidate strategy pairs against it,
//! rediscovers it on discretized games, and tabulates the resulting
//! revenue, welfare and price-of-anarchy curves.

pub mod analytics;
pub mod distribution;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod verifier;

pub use error::{Error, Player, Result};
pub use model::{
    AllocationDistribution, Auction, BidCap, BidPair, Item, OrValue, RealizedOutcome, TieBreakRule,
    TieProbability,
};
