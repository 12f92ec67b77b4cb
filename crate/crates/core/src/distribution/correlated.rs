//! The maximally correlated version of a joint distribution,
//! `bF(x, y) = min(F(x, H), F(H, y))`: the comonotone coupling of its marginals.

use std::sync::Arc;

use super::{
    prob_region, Atom, DiscreteDistribution, Integrand, JointBidDistribution, Representation,
    SharedDistribution, Side, SupportDiagnostics,
};
use crate::model::{BidPair, Item};
use crate::quadrature::{integrate_vec, QuadOptions};

/// Pairs equal quantiles of two discrete marginals given as sorted
/// `(value, mass)` lists. The result has exactly those marginals.
pub fn comonotone_coupling(first: &[(f64, f64)], second: &[(f64, f64)]) -> Vec<Atom> {
    const DUST: f64 = 1e-15;
    let mut out = Vec::with_capacity(first.len() + second.len());
    let (mut i, mut j) = (0, 0);
    let mut left = first.first().map_or(0.0, |p| p.1);
    let mut right = second.first().map_or(0.0, |p| p.1);
    while i < first.len() && j < second.len() {
        let m = left.min(right);
        if m > 0.0 {
            out.push(Atom::new(BidPair::new(first[i].0, second[j].0), m));
        }
        left -= m;
        right -= m;
        if left <= DUST {
            i += 1;
            if i < first.len() {
                // Carry leftover dust so the total is preserved.
                left += first[i].1;
            }
        }
        if right <= DUST {
            j += 1;
            if j < second.len() {
                right += second[j].1;
            }
        }
    }
    out
}

/// Returns the maximally correlated distribution with the same marginals as `d`.
///
/// Discrete inputs are materialized as a grid distribution by pairing equal
/// quantiles; anything else is wrapped lazily.
pub fn max_correlate(d: &SharedDistribution) -> SharedDistribution {
    if let Some(disc) = d.as_discrete() {
        let atoms = comonotone_coupling(
            &disc.marginal_atoms(Item::One),
            &disc.marginal_atoms(Item::Two),
        );
        // The coupling preserves the total mass of a validated input.
        let grid = DiscreteDistribution::grid(atoms).expect("coupling of valid marginals");
        return Arc::new(grid);
    }
    Arc::new(MaxCorrelated::new(d.clone()))
}

/// Lazy `min(F(x, H), F(H, y))` over an arbitrary inner distribution.
#[derive(Debug, Clone)]
pub struct MaxCorrelated {
    inner: SharedDistribution,
}

impl MaxCorrelated {
    pub fn new(inner: SharedDistribution) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &SharedDistribution {
        &self.inner
    }

    fn quantile(&self, item: Item, u: f64) -> f64 {
        if self.inner.marginal(item, 0.0) >= u {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, self.inner.upper_bound());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.inner.marginal(item, mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

impl JointBidDistribution for MaxCorrelated {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        if x < 0.0 || y < 0.0 {
            return 0.0;
        }
        self.inner
            .marginal(Item::One, x)
            .min(self.inner.marginal(Item::Two, y))
    }

    fn representation(&self) -> Representation {
        Representation::Parametric
    }

    fn upper_bound(&self) -> f64 {
        self.inner.upper_bound()
    }

    /// Integrates along the quantile curve `u -> (Q1(u), Q2(u))`.
    fn expect(&self, dim: usize, f: &Integrand<'_>) -> Vec<f64> {
        let mut breaks = Vec::new();
        for item in Item::BOTH {
            for c in self.inner.marginal_breaks(item) {
                breaks.push(self.inner.marginal(item, c));
                breaks.push(self.inner.marginal(item, c.next_down()));
            }
        }
        integrate_vec(
            &|u: f64, out: &mut [f64]| {
                let bid = BidPair::new(self.quantile(Item::One, u), self.quantile(Item::Two, u));
                f(bid, out);
            },
            dim,
            0.0,
            1.0,
            &breaks,
            QuadOptions::default(),
        )
        .value
    }

    fn atoms(&self) -> Vec<Atom> {
        let xs = self.inner.marginal_breaks(Item::One);
        let ys = self.inner.marginal_breaks(Item::Two);
        let mut out = Vec::new();
        for &x in &xs {
            for &y in &ys {
                let m = prob_region(self, Side::At(x), Side::At(y));
                if m > 1e-15 {
                    out.push(Atom::new(BidPair::new(x, y), m));
                }
            }
        }
        out
    }

    fn marginal(&self, item: Item, t: f64) -> f64 {
        self.inner.marginal(item, t)
    }

    fn partial_mean(&self, item: Item, t: f64) -> f64 {
        self.inner.partial_mean(item, t)
    }

    fn marginal_breaks(&self, item: Item) -> Vec<f64> {
        self.inner.marginal_breaks(item)
    }

    fn support(&self) -> SupportDiagnostics {
        SupportDiagnostics {
            atom_at_origin: self.cdf(0.0, 0.0),
            ..self.inner.support()
        }
    }
}
