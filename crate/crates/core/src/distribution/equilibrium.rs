//! The closed-form equilibrium strategies and their inverse-transform samplers.
//!
//! AND bids `(y, y)` with `P[y <= t] = (v - 1/2) / (v - t)` on `[0, 1/2]`, which
//! leaves an atom of mass `1 - 1/(2v)` at the origin. OR tosses a fair coin
//! for the item it contests and bids `x` there (0 on the other item), with
//! `P[x <= t] = t / (1 - t)` on `[0, 1/2]`.

use rand::Rng;

use super::{Atom, Integrand, JointBidDistribution, Representation, SupportDiagnostics};
use crate::error::Result;
use crate::model::{BidPair, Item, OrValue};
use crate::quadrature::{integrate_vec, QuadOptions};
use crate::rng::open_unit;

/// One item's marginal of AND's equilibrium bid, optionally stretched so its
/// support ends at `top` instead of 1/2 (a perturbation used in diagnostics).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndMarginal {
    v: f64,
    top: f64,
}

impl AndMarginal {
    pub fn new(v: f64) -> Result<Self> {
        let v = OrValue::new(v)?.require_mixed_regime()?;
        Ok(Self { v, top: 0.5 })
    }

    /// Same origin atom, continuous part stretched onto `(0, top]`.
    pub fn stretched(v: f64, top: f64) -> Result<Self> {
        let mut m = Self::new(v)?;
        if !(top.is_finite() && top > 0.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "support top must be positive, got {top}"
            )));
        }
        m.top = top;
        Ok(m)
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    /// Mass of the bid 0.
    pub fn atom(&self) -> f64 {
        1.0 - 1.0 / (2.0 * self.v)
    }

    fn standardize(&self, t: f64) -> f64 {
        (t.min(self.top) * (0.5 / self.top)).max(0.0)
    }

    fn unstandardize(&self, s: f64) -> f64 {
        (s * (self.top / 0.5)).clamp(0.0, self.top)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let s = self.standardize(t);
        (self.v - 0.5) / (self.v - s)
    }

    /// CDF of the bid conditional on it being positive.
    pub fn continuous_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let a = self.atom();
        ((self.cdf(t) - a) / (1.0 - a)).clamp(0.0, 1.0)
    }

    /// Inverse of [`AndMarginal::continuous_cdf`] on `[0, 1]`.
    pub fn continuous_quantile(&self, w: f64) -> f64 {
        let a = self.atom();
        self.quantile(a + (1.0 - a) * w.clamp(0.0, 1.0))
    }

    /// Generalized inverse of the full marginal CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= self.atom() {
            return 0.0;
        }
        let s = self.v - (self.v - 0.5) / u.min(1.0);
        self.unstandardize(s)
    }

    /// `E[b ; b <= t]`.
    pub fn partial_mean(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let v = self.v;
        let s = self.standardize(t);
        // Antiderivative of s (v - 1/2) / (v - s)^2 is (v - 1/2)(v / (v - s) + ln(v - s)).
        let standard = (v - 0.5) * (v / (v - s) - 1.0 + (-s / v).ln_1p());
        standard * (self.top / 0.5)
    }

    /// Density of the continuous part in standardized coordinates `s in (0, 1/2)`.
    fn standard_density(&self, s: f64) -> f64 {
        (self.v - 0.5) / ((self.v - s) * (self.v - s))
    }
}

/// AND's maximally correlated equilibrium strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct AndEquilibrium {
    marginal: AndMarginal,
}

impl AndEquilibrium {
    /// Fails with a regime error for `v <= 1/2`.
    pub fn new(v: f64) -> Result<Self> {
        Ok(Self {
            marginal: AndMarginal::new(v)?,
        })
    }

    pub fn v(&self) -> f64 {
        self.marginal.v
    }

    pub fn origin_atom(&self) -> f64 {
        self.marginal.atom()
    }

    pub fn item_marginal(&self) -> AndMarginal {
        self.marginal
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BidPair {
        and_bid_from_uniform(self.v(), open_unit(rng))
    }
}

impl JointBidDistribution for AndEquilibrium {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        self.marginal.cdf(x.min(y))
    }

    fn representation(&self) -> Representation {
        Representation::Parametric
    }

    fn upper_bound(&self) -> f64 {
        0.5
    }

    fn expect(&self, dim: usize, f: &Integrand<'_>) -> Vec<f64> {
        let m = self.marginal;
        let mut acc = vec![0.0; dim];
        f(BidPair::ZERO, &mut acc);
        let a = m.atom();
        acc.iter_mut().for_each(|z| *z *= a);
        let cont = integrate_vec(
            &|s: f64, out: &mut [f64]| {
                f(BidPair::diagonal(s), out);
                let w = m.standard_density(s);
                out.iter_mut().for_each(|z| *z *= w);
            },
            dim,
            0.0,
            0.5,
            &[],
            QuadOptions::default(),
        );
        for (z, c) in acc.iter_mut().zip(cont.value) {
            *z += c;
        }
        acc
    }

    fn atoms(&self) -> Vec<Atom> {
        vec![Atom::new(BidPair::ZERO, self.origin_atom())]
    }

    fn marginal(&self, _item: Item, t: f64) -> f64 {
        self.marginal.cdf(t)
    }

    fn partial_mean(&self, _item: Item, t: f64) -> f64 {
        self.marginal.partial_mean(t)
    }

    fn support(&self) -> SupportDiagnostics {
        SupportDiagnostics {
            low: [0.0; 2],
            high: [0.5; 2],
            atom_at_origin: self.origin_atom(),
        }
    }
}

/// OR's equilibrium strategy: a fair mixture of `(x, 0)` and `(0, x)`.
///
/// [`OrEquilibrium::rescaled`] compresses the support to `(0, top]`; that
/// variant is not an equilibrium and exists for negative checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrEquilibrium {
    top: f64,
}

impl Default for OrEquilibrium {
    fn default() -> Self {
        Self::new()
    }
}

impl OrEquilibrium {
    pub fn new() -> Self {
        Self { top: 0.5 }
    }

    pub fn rescaled(top: f64) -> Result<Self> {
        if !(top.is_finite() && top > 0.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "support top must be positive, got {top}"
            )));
        }
        Ok(Self { top })
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    fn scale(&self) -> f64 {
        0.5 / self.top
    }

    /// CDF of the positive coordinate, `t / (1 - t)` on `[0, 1/2]`.
    pub fn axis_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let s = (t * self.scale()).min(0.5);
        s / (1.0 - s)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BidPair {
        let first = rng.random::<bool>();
        let b = or_bid_from_uniforms(first, open_unit(rng));
        BidPair::new(b.x1 / self.scale(), b.x2 / self.scale())
    }
}

impl JointBidDistribution for OrEquilibrium {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        if x < 0.0 || y < 0.0 {
            return 0.0;
        }
        0.5 * self.axis_cdf(x) + 0.5 * self.axis_cdf(y)
    }

    fn representation(&self) -> Representation {
        Representation::Parametric
    }

    fn upper_bound(&self) -> f64 {
        self.top
    }

    fn expect(&self, dim: usize, f: &Integrand<'_>) -> Vec<f64> {
        let c = self.scale();
        integrate_vec(
            &|s: f64, out: &mut [f64]| {
                let x = s / c;
                let w = 0.5 / ((1.0 - s) * (1.0 - s));
                let mut other = vec![0.0; out.len()];
                f(BidPair::new(x, 0.0), out);
                f(BidPair::new(0.0, x), &mut other);
                for (o, b) in out.iter_mut().zip(other) {
                    *o = (*o + b) * w;
                }
            },
            dim,
            0.0,
            0.5,
            &[],
            QuadOptions::default(),
        )
        .value
    }

    fn marginal(&self, _item: Item, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        0.5 * self.axis_cdf(t) + 0.5
    }

    fn partial_mean(&self, _item: Item, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let c = self.scale();
        let s = (t * c).min(0.5);
        // Antiderivative of s / (1 - s)^2 is 1 / (1 - s) + ln(1 - s).
        0.5 * (1.0 / (1.0 - s) - 1.0 + (-s).ln_1p()) / c
    }

    fn support(&self) -> SupportDiagnostics {
        SupportDiagnostics {
            low: [0.0; 2],
            high: [self.top; 2],
            atom_at_origin: 0.0,
        }
    }
}

/// Inverse-transform draw of AND's equilibrium bid from `u` in `(0, 1]`.
pub fn and_bid_from_uniform(v: f64, u: f64) -> BidPair {
    if u <= 1.0 - 1.0 / (2.0 * v) {
        return BidPair::ZERO;
    }
    let y = (v - (v - 0.5) / u).clamp(0.0, 0.5);
    BidPair::diagonal(y)
}

/// Inverse-transform draw of OR's equilibrium bid: `first_axis` picks the
/// contested item and `u` in `(0, 1]` the bid `u / (1 + u)`.
pub fn or_bid_from_uniforms(first_axis: bool, u: f64) -> BidPair {
    let x = u / (1.0 + u);
    if first_axis {
        BidPair::new(x, 0.0)
    } else {
        BidPair::new(0.0, x)
    }
}

pub fn sample_and<R: Rng + ?Sized>(v: f64, rng: &mut R) -> Result<BidPair> {
    Ok(AndEquilibrium::new(v)?.sample(rng))
}

pub fn sample_or<R: Rng + ?Sized>(rng: &mut R) -> BidPair {
    OrEquilibrium::new().sample(rng)
}

/// `(v - 1/2) / (v - min(x, y))` with the minimum clamped to `[0, 1/2]`.
pub fn and_joint_cdf(v: f64, x: f64, y: f64) -> Result<f64> {
    Ok(AndEquilibrium::new(v)?.cdf(x, y))
}

/// `x/(2(1-x)) + y/(2(1-y))` with both coordinates clamped to `[0, 1/2]`.
pub fn or_joint_cdf(x: f64, y: f64) -> f64 {
    OrEquilibrium::new().cdf(x, y)
}
