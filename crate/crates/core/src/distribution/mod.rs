//! Joint bid distributions over `[0, H]^2`.
//!
//! A distribution is described by its joint CDF `F(x, y) = P[b1 <= x, b2 <= y]`,
//! which every implementation must define for all real arguments (0 when a
//! coordinate is negative, the marginal once the other coordinate exceeds the
//! support). Probabilities of open, closed and degenerate rectangles are
//! derived from the CDF and its left limits, so ties and atoms are handled
//! uniformly for parametric, grid and empirical representations.

mod correlated;
mod coupled;
mod discrete;
mod equilibrium;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::{BidPair, Item};
use crate::quadrature::{integrate_vec, QuadOptions};

pub use correlated::{comonotone_coupling, max_correlate, MaxCorrelated};
pub use coupled::{Checkerboard, CoupledAnd, Coupling};
pub use discrete::{Atom, DiscreteDistribution};
pub use equilibrium::{
    and_bid_from_uniform, and_joint_cdf, or_bid_from_uniforms, or_joint_cdf, sample_and, sample_or,
    AndEquilibrium, AndMarginal, OrEquilibrium,
};

/// How a distribution is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Parametric,
    Grid,
    Empirical,
}

/// Integrand for [`JointBidDistribution::expect`]: writes `dim` values for a bid.
pub type Integrand<'a> = dyn Fn(BidPair, &mut [f64]) + Sync + 'a;

pub type SharedDistribution = Arc<dyn JointBidDistribution>;

/// Per-item support bounds and the mass at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportDiagnostics {
    pub low: [f64; 2],
    pub high: [f64; 2],
    pub atom_at_origin: f64,
}

pub trait JointBidDistribution: fmt::Debug + Send + Sync {
    /// `P[b1 <= x, b2 <= y]`, total on the reals.
    fn cdf(&self, x: f64, y: f64) -> f64;

    fn representation(&self) -> Representation;

    /// No bid in the support exceeds this value.
    fn upper_bound(&self) -> f64;

    /// `E[f(b)]`, one entry per output component.
    fn expect(&self, dim: usize, f: &Integrand<'_>) -> Vec<f64>;

    /// Point masses. Parametric distributions list only their explicit atoms.
    fn atoms(&self) -> Vec<Atom> {
        Vec::new()
    }

    fn marginal(&self, item: Item, t: f64) -> f64 {
        match item {
            Item::One => self.cdf(t, f64::INFINITY),
            Item::Two => self.cdf(f64::INFINITY, t),
        }
    }

    /// `E[b_item ; b_item <= t]`. The default integrates the marginal by parts.
    fn partial_mean(&self, item: Item, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let t = t.min(self.upper_bound());
        let breaks = self.marginal_breaks(item);
        let area = integrate_vec(
            &|s: f64, out: &mut [f64]| out[0] = self.marginal(item, s),
            1,
            0.0,
            t,
            &breaks,
            QuadOptions::default(),
        );
        t * self.marginal(item, t) - area.value[0]
    }

    /// Bid levels where the marginal on `item` may jump.
    fn marginal_breaks(&self, item: Item) -> Vec<f64> {
        let mut v: Vec<f64> = self.atoms().iter().map(|a| a.bid.get(item)).collect();
        v.push(0.0);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn support(&self) -> SupportDiagnostics {
        let mut low = [0.0; 2];
        let mut high = [0.0; 2];
        let top = self.upper_bound();
        for item in Item::BOTH {
            let i = item.index();
            low[i] = if self.marginal(item, 0.0) > 0.0 {
                0.0
            } else {
                bisect(0.0, top, |t| self.marginal(item, t) > 0.0)
            };
            high[i] = bisect(0.0, top, |t| self.marginal(item, t) >= 1.0 - 1e-12);
        }
        SupportDiagnostics {
            low,
            high,
            atom_at_origin: self.cdf(0.0, 0.0),
        }
    }

    /// Discrete distributions expose their atom table for exact algorithms.
    fn as_discrete(&self) -> Option<&DiscreteDistribution> {
        None
    }
}

/// Smallest `t` in `[lo, hi]` with `pred(t)`, assuming `pred` is monotone
/// and true at `hi`.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(lo) {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// One coordinate of a rectangle event relative to a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Below(f64),
    At(f64),
    Above(f64),
    Any,
}

impl Side {
    /// Expresses the event as a signed sum of `{b <= point}` events.
    fn terms(self) -> ([(f64, f64); 2], usize) {
        match self {
            Side::Below(t) => ([(1.0, t.next_down()), (0.0, 0.0)], 1),
            Side::At(t) => ([(1.0, t), (-1.0, t.next_down())], 2),
            Side::Above(t) => ([(1.0, f64::INFINITY), (-1.0, t)], 2),
            Side::Any => ([(1.0, f64::INFINITY), (0.0, 0.0)], 1),
        }
    }
}

/// `P[b1 in side1, b2 in side2]` by inclusion–exclusion on the CDF.
///
/// Left limits are evaluated one ulp below the threshold, which is exact for
/// jumps and accurate to rounding for the continuous part.
pub fn prob_region(d: &(impl JointBidDistribution + ?Sized), side1: Side, side2: Side) -> f64 {
    let (t1, n1) = side1.terms();
    let (t2, n2) = side2.terms();
    let mut p = 0.0;
    for &(c1, x) in &t1[..n1] {
        for &(c2, y) in &t2[..n2] {
            p += c1 * c2 * d.cdf(x, y);
        }
    }
    p.max(0.0)
}

/// `P[b_item in side]` from the marginal.
pub fn prob_marginal(d: &(impl JointBidDistribution + ?Sized), item: Item, side: Side) -> f64 {
    match item {
        Item::One => prob_region(d, side, Side::Any),
        Item::Two => prob_region(d, Side::Any, side),
    }
}

/// A one-dimensional marginal CDF `t -> F(t, H)` or `t -> F(H, t)`.
#[derive(Clone, Copy)]
pub struct Marginal<'a> {
    dist: &'a dyn JointBidDistribution,
    item: Item,
}

impl Marginal<'_> {
    pub fn cdf(&self, t: f64) -> f64 {
        self.dist.marginal(self.item, t)
    }

    pub fn item(&self) -> Item {
        self.item
    }
}

impl fmt::Debug for Marginal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Marginal({:?} of {:?})", self.item, self.dist)
    }
}

pub fn marginals(d: &dyn JointBidDistribution) -> (Marginal<'_>, Marginal<'_>) {
    (
        Marginal {
            dist: d,
            item: Item::One,
        },
        Marginal {
            dist: d,
            item: Item::Two,
        },
    )
}

/// Largest marginal CDF difference between two distributions over the
/// given evaluation points, as `(difference, item, point)`.
pub fn marginal_distance(
    a: &dyn JointBidDistribution,
    b: &dyn JointBidDistribution,
    points: &[f64],
) -> (f64, Item, f64) {
    let mut worst = (0.0, Item::One, 0.0);
    for item in Item::BOTH {
        for &t in points {
            let d = (a.marginal(item, t) - b.marginal(item, t)).abs();
            if d > worst.0 {
                worst = (d, item, t);
            }
        }
    }
    worst
}

/// `n + 1` evenly spaced points on `[0, top]`, plus the given landmarks.
pub fn evaluation_points(top: f64, n: usize, landmarks: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=n).map(|k| top * k as f64 / n as f64).collect();
    pts.extend(
        landmarks
            .iter()
            .copied()
            .filter(|&p| (0.0..=top).contains(&p)),
    );
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
