//! Best-response gaps over a grid of pure deviations.

use rayon::prelude::*;
use serde::Serialize;

use super::outcome::{and_vs_or, or_vs_and, profile_outcome};
use crate::distribution::JointBidDistribution;
use crate::error::{Error, Result};
use crate::model::{Auction, BidPair, Item};

/// Upper limit on deviation levels per coordinate.
pub const MAX_LEVELS: usize = 8_192;

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub v: f64,
    /// Best deviation utility minus the profile utility, per player.
    pub eps_and: f64,
    pub eps_or: f64,
    pub u_and_star: f64,
    pub u_or_star: f64,
    pub epsilon: f64,
    pub is_eps_nash: bool,
    pub grid_step: f64,
    /// Deviation levels per coordinate; each player tries all pairs of them.
    pub levels: usize,
    pub best_and_bid: BidPair,
    pub best_or_bid: BidPair,
}

impl EquilibriumReport {
    /// Re-evaluates the verdict at another tolerance.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self.is_eps_nash = self.eps_and.max(self.eps_or) <= epsilon;
        self
    }

    pub fn exploitability(&self) -> f64 {
        self.eps_and.max(self.eps_or)
    }
}

/// Bid levels tried on each coordinate: multiples of `step` in `[0, H]`,
/// the landmarks 0, 1/2 and H, and for every opponent atom level `c` both
/// `c` and the next double above it (approximating bids just above an atom,
/// including `0+`).
pub fn deviation_levels(
    cap: f64,
    step: f64,
    opponent: &dyn JointBidDistribution,
) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid step must be positive, got {step}"
        )));
    }
    let n = (cap / step).floor();
    if n + 1.0 > MAX_LEVELS as f64 {
        return Err(Error::Precondition(format!(
            "grid step {step} gives more than {MAX_LEVELS} levels on [0, {cap}]"
        )));
    }
    let mut levels: Vec<f64> = (0..=n as usize).map(|k| k as f64 * step).collect();
    levels.extend([0.0, 0.5, cap]);
    for item in Item::BOTH {
        for c in opponent.marginal_breaks(item) {
            levels.push(c);
            levels.push(c.next_up());
        }
    }
    levels.retain(|&t| (0.0..=cap).contains(&t));
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    Ok(levels)
}

/// Largest utility over all pairs of `levels`, ties going to the first pair
/// in row-major order so the answer does not depend on thread scheduling.
fn best_pair(levels: &[f64], utility: impl Fn(BidPair) -> f64 + Sync) -> (f64, BidPair) {
    let (u, i, j) = levels
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut best = (f64::NEG_INFINITY, i, 0);
            for (j, &y) in levels.iter().enumerate() {
                let u = utility(BidPair::new(x, y));
                if u > best.0 {
                    best = (u, i, j);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );
    (u, BidPair::new(levels[i], levels[j]))
}

/// Gains from the best pure deviation of each player against the profile
/// `(f_and, f_or)`. The verdict uses `epsilon = grid_step`.
pub fn best_response_gap(
    f_and: &dyn JointBidDistribution,
    f_or: &dyn JointBidDistribution,
    auction: &Auction,
    grid_step: f64,
) -> Result<EquilibriumReport> {
    let star = profile_outcome(f_and, f_or, auction)?;
    let cap = auction.cap().get();
    let tie = auction.tie();
    let v = auction.v().get();

    let and_levels = deviation_levels(cap, grid_step, f_or)?;
    let or_levels = deviation_levels(cap, grid_step, f_and)?;
    for levels in [&and_levels, &or_levels] {
        for &t in levels {
            for item in Item::BOTH {
                tie.and_share(item, t)?;
            }
        }
    }

    let (best_and, best_and_bid) = best_pair(&and_levels, |b| and_vs_or(f_or, b, tie, v).u_and);
    let (best_or, best_or_bid) = best_pair(&or_levels, |b| or_vs_and(f_and, b, tie, v).u_or);

    let report = EquilibriumReport {
        v,
        eps_and: best_and - star.u_and,
        eps_or: best_or - star.u_or,
        u_and_star: star.u_and,
        u_or_star: star.u_or,
        epsilon: grid_step,
        is_eps_nash: false,
        grid_step,
        levels: and_levels.len().max(or_levels.len()),
        best_and_bid,
        best_or_bid,
    };
    Ok(report.with_epsilon(grid_step))
}
