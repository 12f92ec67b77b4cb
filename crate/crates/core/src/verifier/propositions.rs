//! Properties of strategies with identical marginals and of the maximally
//! correlated transform.

use std::cmp::Ordering;

use serde::Serialize;

use super::outcome::{or_bid_vs_mixed_and, profile_outcome};
use crate::distribution::{
    evaluation_points, max_correlate, JointBidDistribution, SharedDistribution,
};
use crate::error::{Error, Result};
use crate::model::{AllocationDistribution, Auction, BidPair, Item};

/// Tolerance for marginal equality.
pub const MARGINAL_TOL: f64 = 1e-12;
/// Differences below this count as equal when comparing outcomes.
pub const OUTCOME_TOL: f64 = 1e-9;

fn default_points(a: &dyn JointBidDistribution, b: &dyn JointBidDistribution) -> Vec<f64> {
    let top = a.upper_bound().max(b.upper_bound());
    let mut landmarks = Vec::new();
    for d in [a, b] {
        for item in Item::BOTH {
            for c in d.marginal_breaks(item) {
                landmarks.push(c);
                landmarks.push(c.next_down());
            }
        }
    }
    evaluation_points(top, 200, &landmarks)
}

/// Fails with a mismatch error at the first point where an item marginal of
/// `a` and `b` differ by more than [`MARGINAL_TOL`].
pub fn check_identical_marginals(
    a: &dyn JointBidDistribution,
    b: &dyn JointBidDistribution,
    points: &[f64],
) -> Result<()> {
    for item in Item::BOTH {
        for &t in points {
            let (l, r) = (a.marginal(item, t), b.marginal(item, t));
            if (l - r).abs() > MARGINAL_TOL {
                return Err(Error::MarginalMismatch {
                    item: item.number(),
                    at: t,
                    left: l,
                    right: r,
                });
            }
        }
    }
    Ok(())
}

/// Largest excess `F(x, y) - bF(x, y)` over the grid `points x points`;
/// never positive for a valid distribution.
pub fn stochastic_dominance_excess(f: &dyn JointBidDistribution, points: &[f64]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for &x in points {
        for &y in points {
            let b = f.marginal(Item::One, x).min(f.marginal(Item::Two, y));
            worst = worst.max(f.cdf(x, y) - b);
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakDominance {
    pub holds: bool,
    /// Smallest `u_and(bF) - u_and(F)` over the bids, with the bid attaining it.
    pub min_gain: f64,
    pub worst_bid: BidPair,
}

/// Whether the maximally correlated version of `f` earns AND at least as
/// much as `f` against every given pure OR bid (tolerance 1e-10).
pub fn weak_dominance_check(
    f: &SharedDistribution,
    auction: &Auction,
    pure_or_bids: &[BidPair],
) -> Result<WeakDominance> {
    let bf = max_correlate(f);
    let mut out = WeakDominance {
        holds: true,
        min_gain: f64::INFINITY,
        worst_bid: BidPair::ZERO,
    };
    for &bid in pure_or_bids {
        let gain = or_bid_vs_mixed_and(bf.as_ref(), bid, auction)?.u_and
            - or_bid_vs_mixed_and(f.as_ref(), bid, auction)?.u_and;
        if gain < out.min_gain {
            out.min_gain = gain;
            out.worst_bid = bid;
        }
    }
    out.holds = out.min_gain >= -1e-10;
    Ok(out)
}

/// One of the five quantities ordered consistently across two AND strategies.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub name: &'static str,
    pub first: f64,
    pub second: f64,
    /// Ordering of `second` against `first`, flipped for quantities that
    /// move against AND's chance of winning both, so all five agree.
    #[serde(serialize_with = "ser_ordering")]
    pub direction: Ordering,
}

fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_i8(*o as i8)
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub first: AllocationDistribution,
    pub second: AllocationDistribution,
    pub quantities: Vec<Comparison>,
    pub consistent: bool,
    /// Largest difference in either player's expected payment.
    pub payment_gap: f64,
    /// Largest difference in AND's per-item win probabilities.
    pub item_win_gap: f64,
}

fn direction(first: f64, second: f64, aligned: bool) -> Ordering {
    let d = second - first;
    let o = if d.abs() <= OUTCOME_TOL {
        Ordering::Equal
    } else if d > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    };
    if aligned {
        o
    } else {
        o.reverse()
    }
}

/// Compares `(f, f_or)` with `(f_prime, f_or)` for two AND strategies with
/// identical marginals.
pub fn identical_marginal_equivalences(
    f: &dyn JointBidDistribution,
    f_prime: &dyn JointBidDistribution,
    f_or: &dyn JointBidDistribution,
    auction: &Auction,
) -> Result<EquivalenceReport> {
    check_identical_marginals(f, f_prime, &default_points(f, f_prime))?;
    let a = profile_outcome(f, f_or, auction)?;
    let b = profile_outcome(f_prime, f_or, auction)?;
    let rows: [(&'static str, f64, f64, bool); 5] = [
        ("u_and", a.u_and, b.u_and, true),
        ("u_or", a.u_or, b.u_or, false),
        ("p_and_both", a.p_and_both, b.p_and_both, true),
        (
            "p_or_wins_item",
            a.p_or_wins_any(),
            b.p_or_wins_any(),
            false,
        ),
        ("p_and_none", a.p_and_none, b.p_and_none, true),
    ];
    let quantities: Vec<Comparison> = rows
        .iter()
        .map(|&(name, x, y, aligned)| Comparison {
            name,
            first: x,
            second: y,
            direction: direction(x, y, aligned),
        })
        .collect();
    let consistent = quantities
        .iter()
        .all(|c| c.direction == quantities[0].direction);
    let payment_gap = (a.pay_and - b.pay_and)
        .abs()
        .max((a.pay_or - b.pay_or).abs());
    let item_win_gap = Item::BOTH
        .iter()
        .map(|&i| (a.p_and_wins_item(i) - b.p_and_wins_item(i)).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        first: a,
        second: b,
        quantities,
        consistent,
        payment_gap,
        item_win_gap,
    })
}
