//! Valuations, bids, tie-breaking and the resolution of a single round of
//! two simultaneous first-price auctions between the AND and OR bidders.
//!
//! AND values the bundle of both items at 1 and anything less at 0. OR values
//! any nonempty set at `v`. Each item goes to its higher bidder, who pays
//! their own bid; equal bids are split by a [`TieBreakRule`] that looks only
//! at the tied item's bid.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Player, Result};

/// One of the two items on sale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Item {
    One,
    Two,
}

impl Item {
    pub const BOTH: [Item; 2] = [Item::One, Item::Two];

    pub fn index(self) -> usize {
        match self {
            Item::One => 0,
            Item::Two => 1,
        }
    }

    /// 1-based label used in messages and file formats.
    pub fn number(self) -> usize {
        self.index() + 1
    }
}

/// The OR bidder's value for any nonempty set of items.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrValue(f64);

impl OrValue {
    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() && v > 0.0 {
            Ok(Self(v))
        } else {
            Err(Error::InvalidParameter(format!(
                "OR value must be positive and finite, got {v}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `v > 1/2`: no Walrasian (and no pure Nash) equilibrium exists.
    pub fn is_mixed_regime(self) -> bool {
        self.0 > 0.5
    }

    /// Returns the value if it lies in the mixed regime, a regime error otherwise.
    pub fn require_mixed_regime(self) -> Result<f64> {
        if self.is_mixed_regime() {
            Ok(self.0)
        } else {
            Err(Error::Regime { v: self.0 })
        }
    }
}

impl fmt::Display for OrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Maximum allowed bid `H`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BidCap(f64);

impl BidCap {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 {
            Ok(Self(h))
        } else {
            Err(Error::InvalidParameter(format!(
                "bid cap must be positive and finite, got {h}"
            )))
        }
    }

    /// `max(1, v)`: no bid above either player's highest value is ever useful.
    pub fn default_for(v: OrValue) -> Self {
        Self(v.get().max(1.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A pure strategy: one bid per item.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BidPair {
    pub x1: f64,
    pub x2: f64,
}

impl BidPair {
    pub const ZERO: BidPair = BidPair { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub const fn diagonal(y: f64) -> Self {
        Self { x1: y, x2: y }
    }

    pub fn get(self, item: Item) -> f64 {
        match item {
            Item::One => self.x1,
            Item::Two => self.x2,
        }
    }

    pub fn validate(self, player: Player, cap: BidCap) -> Result<()> {
        for item in Item::BOTH {
            let value = self.get(item);
            // NaN fails both comparisons and is rejected here too.
            if !(value >= 0.0 && value <= cap.get()) {
                return Err(Error::BidOutOfRange {
                    player,
                    item: item.number(),
                    value,
                    cap: cap.get(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for BidPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// Probability that AND wins a tie on one item, as a function of the tied bid.
#[derive(Clone)]
pub enum TieProbability {
    Constant(f64),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TieProbability {
    pub fn at(&self, bid: f64) -> f64 {
        match self {
            TieProbability::Constant(q) => *q,
            TieProbability::Function(f) => f(bid),
        }
    }
}

impl fmt::Debug for TieProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieProbability::Constant(q) => write!(f, "Constant({q})"),
            TieProbability::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Per-item tie-breaking rule.
#[derive(Clone, Debug)]
pub struct TieBreakRule {
    items: [TieProbability; 2],
    label: String,
}

impl Default for TieBreakRule {
    /// A fair coin on each item.
    fn default() -> Self {
        Self::constant(0.5).expect("1/2 is a probability")
    }
}

impl TieBreakRule {
    /// Same constant probability `q` on both items, at every bid.
    pub fn constant(q: f64) -> Result<Self> {
        check_probability(q, 1, f64::NAN)?;
        Ok(Self {
            items: [TieProbability::Constant(q), TieProbability::Constant(q)],
            label: format!("constant:{q}"),
        })
    }

    pub fn and_wins() -> Self {
        Self {
            items: [TieProbability::Constant(1.0), TieProbability::Constant(1.0)],
            label: "and-wins".into(),
        }
    }

    pub fn or_wins() -> Self {
        Self {
            items: [TieProbability::Constant(0.0), TieProbability::Constant(0.0)],
            label: "or-wins".into(),
        }
    }

    /// Arbitrary per-item rules. Values outside [0, 1] are reported by
    /// [`TieBreakRule::and_share`] at the bid where they occur.
    pub fn per_item(
        item1: TieProbability,
        item2: TieProbability,
        label: impl Into<String>,
    ) -> Self {
        Self {
            items: [item1, item2],
            label: label.into(),
        }
    }

    /// Overrides both items' probability at a tied bid of exactly 0.
    pub fn with_zero_bid(self, q0: f64) -> Result<Self> {
        check_probability(q0, 1, 0.0)?;
        let label = format!("{};zero:{q0}", self.label);
        let [a, b] = self.items;
        let wrap = |rule: TieProbability| -> TieProbability {
            TieProbability::Function(Arc::new(
                move |bid| if bid == 0.0 { q0 } else { rule.at(bid) },
            ))
        };
        Ok(Self {
            items: [wrap(a), wrap(b)],
            label,
        })
    }

    /// Parses `and-wins`, `or-wins`, or a constant probability such as `0.5`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim() {
            "and-wins" => Ok(Self::and_wins()),
            "or-wins" => Ok(Self::or_wins()),
            other => {
                let q: f64 = other.parse().map_err(|_| {
                    Error::InvalidParameter(format!(
                        "tie rule must be 'and-wins', 'or-wins' or a probability, got '{other}'"
                    ))
                })?;
                Self::constant(q)
            }
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Probability that AND wins a tie on `item` at `bid`.
    pub fn and_share(&self, item: Item, bid: f64) -> Result<f64> {
        let q = self.items[item.index()].at(bid);
        check_probability(q, item.number(), bid)?;
        Ok(q)
    }

    /// Unchecked variant of [`TieBreakRule::and_share`], for hot loops over
    /// rules already validated by a [`TieBreakRule::and_share`] call.
    pub fn q(&self, item: Item, bid: f64) -> f64 {
        self.items[item.index()].at(bid)
    }
}

fn check_probability(q: f64, item: usize, bid: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidTieProbability {
            item,
            bid,
            value: q,
        })
    }
}

/// Distribution over allocations for fixed bids, together with expected
/// payments and utilities. For mixed strategies the same struct holds the
/// expectations over both players' bids.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AllocationDistribution {
    pub p_and_both: f64,
    pub p_and_1_only: f64,
    pub p_and_2_only: f64,
    pub p_and_none: f64,
    pub pay_and: f64,
    pub pay_or: f64,
    pub u_and: f64,
    pub u_or: f64,
}

impl AllocationDistribution {
    pub const LEN: usize = 8;

    /// Builds the allocation from AND's per-item win probabilities, which
    /// are independent across items, and the expected payments.
    pub fn from_item_wins(win: [f64; 2], pay_and: f64, pay_or: f64, v: f64) -> Self {
        Self::from_joint(win, win[0] * win[1], pay_and, pay_or, v)
    }

    /// Builds the allocation from AND's marginal per-item win probabilities
    /// and the joint probability of winning both.
    pub fn from_joint(win: [f64; 2], both: f64, pay_and: f64, pay_or: f64, v: f64) -> Self {
        let one_only = win[0] - both;
        let two_only = win[1] - both;
        Self {
            p_and_both: both,
            p_and_1_only: one_only,
            p_and_2_only: two_only,
            p_and_none: 1.0 - both - one_only - two_only,
            pay_and,
            pay_or,
            u_and: both - pay_and,
            u_or: v * (1.0 - both) - pay_or,
        }
    }

    pub fn p_and_wins_item(&self, item: Item) -> f64 {
        match item {
            Item::One => self.p_and_both + self.p_and_1_only,
            Item::Two => self.p_and_both + self.p_and_2_only,
        }
    }

    /// Probability that OR wins at least one item.
    pub fn p_or_wins_any(&self) -> f64 {
        1.0 - self.p_and_both
    }

    pub fn to_array(&self) -> [f64; Self::LEN] {
        [
            self.p_and_both,
            self.p_and_1_only,
            self.p_and_2_only,
            self.p_and_none,
            self.pay_and,
            self.pay_or,
            self.u_and,
            self.u_or,
        ]
    }

    pub fn from_slice(values: &[f64]) -> Self {
        assert_eq!(values.len(), Self::LEN, "allocation vector has 8 fields");
        Self {
            p_and_both: values[0],
            p_and_1_only: values[1],
            p_and_2_only: values[2],
            p_and_none: values[3],
            pay_and: values[4],
            pay_or: values[5],
            u_and: values[6],
            u_or: values[7],
        }
    }

    /// Largest absolute field-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A realized draw of one auction round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedOutcome {
    pub and_wins: [bool; 2],
    pub pay_and: f64,
    pub pay_or: f64,
    pub u_and: f64,
    pub u_or: f64,
    /// Realized social welfare: 1 when AND takes both items, `v` otherwise.
    pub welfare: f64,
}

impl RealizedOutcome {
    pub fn and_wins_both(&self) -> bool {
        self.and_wins[0] && self.and_wins[1]
    }
}

/// Everything needed to resolve a round: OR's value, the bid cap and the
/// tie-breaking rule.
#[derive(Debug, Clone)]
pub struct Auction {
    v: OrValue,
    cap: BidCap,
    tie: TieBreakRule,
}

impl Auction {
    /// Default cap `max(1, v)` and fair-coin ties.
    pub fn new(v: OrValue) -> Self {
        Self {
            v,
            cap: BidCap::default_for(v),
            tie: TieBreakRule::default(),
        }
    }

    pub fn with_tie(mut self, tie: TieBreakRule) -> Self {
        self.tie = tie;
        self
    }

    pub fn with_cap(mut self, cap: BidCap) -> Self {
        self.cap = cap;
        self
    }

    pub fn v(&self) -> OrValue {
        self.v
    }

    pub fn cap(&self) -> BidCap {
        self.cap
    }

    pub fn tie(&self) -> &TieBreakRule {
        &self.tie
    }

    /// AND's probability of winning each item against fixed bids.
    fn and_item_wins(&self, and_bid: BidPair, or_bid: BidPair) -> Result<[f64; 2]> {
        and_bid.validate(Player::And, self.cap)?;
        or_bid.validate(Player::Or, self.cap)?;
        let mut win = [0.0; 2];
        for item in Item::BOTH {
            let (a, o) = (and_bid.get(item), or_bid.get(item));
            win[item.index()] = if a > o {
                1.0
            } else if a < o {
                0.0
            } else {
                self.tie.and_share(item, a)?
            };
        }
        Ok(win)
    }

    /// Exact allocation distribution for fixed pure bids; the only randomness
    /// is tie-breaking, independent across items.
    pub fn resolve(&self, and_bid: BidPair, or_bid: BidPair) -> Result<AllocationDistribution> {
        let win = self.and_item_wins(and_bid, or_bid)?;
        let pay_and = and_bid.x1 * win[0] + and_bid.x2 * win[1];
        let pay_or = or_bid.x1 * (1.0 - win[0]) + or_bid.x2 * (1.0 - win[1]);
        Ok(AllocationDistribution::from_item_wins(
            win,
            pay_and,
            pay_or,
            self.v.get(),
        ))
    }

    /// One realized round. Randomness is consumed only for tied items.
    pub fn sample_outcome<R: Rng + ?Sized>(
        &self,
        and_bid: BidPair,
        or_bid: BidPair,
        rng: &mut R,
    ) -> Result<RealizedOutcome> {
        let win = self.and_item_wins(and_bid, or_bid)?;
        let mut and_wins = [false; 2];
        for (slot, p) in and_wins.iter_mut().zip(win) {
            *slot = if p == 1.0 {
                true
            } else if p == 0.0 {
                false
            } else {
                rng.random::<f64>() < p
            };
        }
        let mut pay_and = 0.0;
        let mut pay_or = 0.0;
        for item in Item::BOTH {
            if and_wins[item.index()] {
                pay_and += and_bid.get(item);
            } else {
                pay_or += or_bid.get(item);
            }
        }
        let both = and_wins[0] && and_wins[1];
        let v = self.v.get();
        Ok(RealizedOutcome {
            and_wins,
            pay_and,
            pay_or,
            u_and: if both { 1.0 } else { 0.0 } - pay_and,
            u_or: if both { 0.0 } else { v } - pay_or,
            welfare: if both { 1.0 } else { v },
        })
    }
}
