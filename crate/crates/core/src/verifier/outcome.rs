//! Expected outcomes when one or both players mix.
//!
//! Against a mixed opponent the outcome of a pure bid is exact: every
//! probability is a rectangle probability of the opponent's CDF, and every
//! payment a partial mean of one of its marginals. Ties at the pure bid are
//! split by the tie rule, which only ever matters where the opponent has an
//! atom.

use serde::Serialize;

use crate::distribution::{prob_marginal, prob_region, JointBidDistribution, Side};
use crate::error::{Player, Result};
use crate::model::{AllocationDistribution, Auction, BidPair, Item, TieBreakRule};

/// Outcome of a pure OR bid against a mixed AND strategy.
pub fn or_bid_vs_mixed_and(
    f_and: &dyn JointBidDistribution,
    or_bid: BidPair,
    auction: &Auction,
) -> Result<AllocationDistribution> {
    or_bid.validate(Player::Or, auction.cap())?;
    check_ties(auction.tie(), or_bid)?;
    Ok(or_vs_and(f_and, or_bid, auction.tie(), auction.v().get()))
}

/// Outcome of a pure AND bid against a mixed OR strategy.
pub fn and_bid_vs_mixed_or(
    f_or: &dyn JointBidDistribution,
    and_bid: BidPair,
    auction: &Auction,
) -> Result<AllocationDistribution> {
    and_bid.validate(Player::And, auction.cap())?;
    check_ties(auction.tie(), and_bid)?;
    Ok(and_vs_or(f_or, and_bid, auction.tie(), auction.v().get()))
}

fn check_ties(tie: &TieBreakRule, bid: BidPair) -> Result<()> {
    for item in Item::BOTH {
        tie.and_share(item, bid.get(item))?;
    }
    Ok(())
}

fn mean(d: &dyn JointBidDistribution, item: Item) -> f64 {
    d.partial_mean(item, d.upper_bound())
}

pub(crate) fn or_vs_and(
    f_and: &dyn JointBidDistribution,
    or_bid: BidPair,
    tie: &TieBreakRule,
    v: f64,
) -> AllocationDistribution {
    let q = [tie.q(Item::One, or_bid.x1), tie.q(Item::Two, or_bid.x2)];
    // AND takes an item when its bid is above OR's, or ties and wins the coin.
    let wins = |item: Item| {
        let t = or_bid.get(item);
        [(Side::Above(t), 1.0), (Side::At(t), q[item.index()])]
    };
    let mut both = 0.0;
    for (s1, w1) in wins(Item::One) {
        for (s2, w2) in wins(Item::Two) {
            if w1 * w2 > 0.0 {
                both += w1 * w2 * prob_region(f_and, s1, s2);
            }
        }
    }
    let mut win = [0.0; 2];
    let mut pay_and = 0.0;
    for item in Item::BOTH {
        let (t, qi) = (or_bid.get(item), q[item.index()]);
        let at = prob_marginal(f_and, item, Side::At(t));
        win[item.index()] = prob_marginal(f_and, item, Side::Above(t)) + qi * at;
        pay_and += mean(f_and, item) - f_and.partial_mean(item, t) + qi * t * at;
    }
    let pay_or = or_bid.x1 * (1.0 - win[0]) + or_bid.x2 * (1.0 - win[1]);
    AllocationDistribution::from_joint(win, both.min(win[0]).min(win[1]), pay_and, pay_or, v)
}

pub(crate) fn and_vs_or(
    f_or: &dyn JointBidDistribution,
    and_bid: BidPair,
    tie: &TieBreakRule,
    v: f64,
) -> AllocationDistribution {
    let q = [tie.q(Item::One, and_bid.x1), tie.q(Item::Two, and_bid.x2)];
    let wins = |item: Item| {
        let t = and_bid.get(item);
        [(Side::Below(t), 1.0), (Side::At(t), q[item.index()])]
    };
    let mut both = 0.0;
    for (s1, w1) in wins(Item::One) {
        for (s2, w2) in wins(Item::Two) {
            if w1 * w2 > 0.0 {
                both += w1 * w2 * prob_region(f_or, s1, s2);
            }
        }
    }
    let mut win = [0.0; 2];
    let mut pay_or = 0.0;
    for item in Item::BOTH {
        let (t, qi) = (and_bid.get(item), q[item.index()]);
        let at = prob_marginal(f_or, item, Side::At(t));
        win[item.index()] = prob_marginal(f_or, item, Side::Below(t)) + qi * at;
        pay_or += mean(f_or, item) - f_or.partial_mean(item, t) + (1.0 - qi) * t * at;
    }
    let pay_and = and_bid.x1 * win[0] + and_bid.x2 * win[1];
    AllocationDistribution::from_joint(win, both.min(win[0]).min(win[1]), pay_and, pay_or, v)
}

fn jumps_at(d: &dyn JointBidDistribution, item: Item, t: f64) -> bool {
    d.marginal_breaks(item).contains(&t)
}

/// OR's expected utility from the pure bid `(x, y)` against `f_and`.
///
/// With both coordinates positive and no AND atom at them this is
/// `F(x,H)(v-x) + F(H,y)(v-y) - F(x,y) v`; otherwise ties are split by the
/// auction's rule.
pub fn or_utility_of_bid(
    f_and: &dyn JointBidDistribution,
    auction: &Auction,
    bid: BidPair,
) -> Result<f64> {
    bid.validate(Player::Or, auction.cap())?;
    let (x, y) = (bid.x1, bid.x2);
    let v = auction.v().get();
    if x > 0.0 && y > 0.0 && !jumps_at(f_and, Item::One, x) && !jumps_at(f_and, Item::Two, y) {
        return Ok(
            f_and.marginal(Item::One, x) * (v - x) + f_and.marginal(Item::Two, y) * (v - y)
                - f_and.cdf(x, y) * v,
        );
    }
    Ok(or_bid_vs_mixed_and(f_and, bid, auction)?.u_or)
}

/// True when OR never bids positively on both items and has no origin atom.
pub fn is_axis_supported(f_or: &dyn JointBidDistribution) -> bool {
    f_or.cdf(0.0, 0.0) == 0.0 && prob_region(f_or, Side::Above(0.0), Side::Above(0.0)) == 0.0
}

/// AND's expected utility from the pure bid `(x, y)` against `f_or`.
///
/// For an axis-supported OR strategy and positive bids off its atoms this is
/// `g1(x) + g2(y)` with `g1(x) = F(x,0)(1-x) - a x`, `g2(y) = F(0,y)(1-y) - (1-a) y`
/// and `a = F(0,H)`; otherwise the direct expectation.
pub fn and_utility_of_bid(
    f_or: &dyn JointBidDistribution,
    auction: &Auction,
    bid: BidPair,
) -> Result<f64> {
    bid.validate(Player::And, auction.cap())?;
    let (x, y) = (bid.x1, bid.x2);
    if x > 0.0
        && y > 0.0
        && !jumps_at(f_or, Item::One, x)
        && !jumps_at(f_or, Item::Two, y)
        && is_axis_supported(f_or)
    {
        let alpha = f_or.marginal(Item::One, 0.0);
        let g1 = f_or.cdf(x, 0.0) * (1.0 - x) - alpha * x;
        let g2 = f_or.cdf(0.0, y) * (1.0 - y) - (1.0 - alpha) * y;
        return Ok(g1 + g2);
    }
    Ok(and_bid_vs_mixed_or(f_or, bid, auction)?.u_and)
}

/// Which player's strategy is integrated out when both mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Expectation over OR's bids of the exact outcome against AND's mix.
    OverOr,
    /// Expectation over AND's bids of the exact outcome against OR's mix.
    OverAnd,
}

impl Route {
    /// Sums over a discrete side when possible so quadrature never meets a jump.
    pub fn choose(f_and: &dyn JointBidDistribution, f_or: &dyn JointBidDistribution) -> Self {
        if f_or.as_discrete().is_some() || f_and.as_discrete().is_none() {
            Route::OverOr
        } else {
            Route::OverAnd
        }
    }
}

/// Expected allocation, payments and utilities when both players mix.
pub fn profile_outcome(
    f_and: &dyn JointBidDistribution,
    f_or: &dyn JointBidDistribution,
    auction: &Auction,
) -> Result<AllocationDistribution> {
    profile_outcome_via(Route::choose(f_and, f_or), f_and, f_or, auction)
}

pub fn profile_outcome_via(
    route: Route,
    f_and: &dyn JointBidDistribution,
    f_or: &dyn JointBidDistribution,
    auction: &Auction,
) -> Result<AllocationDistribution> {
    let tie = auction.tie();
    // Ties have positive probability only at atoms, so that is where the rule must be valid.
    for d in [f_and, f_or] {
        for item in Item::BOTH {
            for t in d.marginal_breaks(item) {
                tie.and_share(item, t)?;
            }
        }
    }
    let v = auction.v().get();
    let values = match route {
        Route::OverOr => f_or.expect(
            AllocationDistribution::LEN,
            &|o: BidPair, out: &mut [f64]| {
                out.copy_from_slice(&or_vs_and(f_and, o, tie, v).to_array())
            },
        ),
        Route::OverAnd => f_and.expect(
            AllocationDistribution::LEN,
            &|a: BidPair, out: &mut [f64]| {
                out.copy_from_slice(&and_vs_or(f_or, a, tie, v).to_array())
            },
        ),
    };
    Ok(AllocationDistribution::from_slice(&values))
}
