//! AND strategies sharing the equilibrium marginals but coupling the two
//! items differently.
//!
//! Every variant except [`Coupling::Product`] keeps the origin atom
//! `a = 1 - 1/(2v)` and joins the continuous parts `G` of the two marginals
//! through a copula `C`: `F(x, y) = a + (1 - a) C(G(x), G(y))` for `x, y >= 0`.

use super::{
    AndMarginal, Atom, Integrand, JointBidDistribution, Representation, SupportDiagnostics,
};
use crate::error::{Error, Result};
use crate::model::{BidPair, Item};
use crate::quadrature::{integrate_vec, QuadOptions};

/// A checkerboard copula: the unit square cut into `k x k` cells, cell
/// `(i, j)` carrying mass `P[i][j]` spread uniformly. Rows and columns each
/// sum to `1/k`, which keeps both margins uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkerboard {
    k: usize,
    mass: Vec<f64>,
}

impl Checkerboard {
    pub fn new(k: usize, mass: Vec<f64>) -> Result<Self> {
        if k == 0 || mass.len() != k * k {
            return Err(Error::InvalidParameter(format!(
                "checkerboard needs k >= 1 and k*k cell masses, got k={k} with {} cells",
                mass.len()
            )));
        }
        if mass.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidParameter(
                "checkerboard masses must be nonnegative".into(),
            ));
        }
        let target = 1.0 / k as f64;
        for i in 0..k {
            let row: f64 = mass[i * k..(i + 1) * k].iter().sum();
            let col: f64 = (0..k).map(|r| mass[r * k + i]).sum();
            if (row - target).abs() > 1e-12 || (col - target).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "checkerboard row/column {i} sums to {row}/{col}, expected {target}"
                )));
            }
        }
        Ok(Self { k, mass })
    }

    /// Cell `(i, (i + shift) mod k)` carries `1/k`: a shuffled permutation copula.
    pub fn shifted(k: usize, shift: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("checkerboard needs k >= 1".into()));
        }
        let mut mass = vec![0.0; k * k];
        for i in 0..k {
            mass[i * k + (i + shift) % k] = 1.0 / k as f64;
        }
        Self::new(k, mass)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn copula(&self, u: f64, w: f64) -> f64 {
        let k = self.k as f64;
        let mut c = 0.0;
        for i in 0..self.k {
            let fu = (k * u - i as f64).clamp(0.0, 1.0);
            if fu == 0.0 {
                continue;
            }
            for j in 0..self.k {
                let fw = (k * w - j as f64).clamp(0.0, 1.0);
                c += self.mass[i * self.k + j] * fu * fw;
            }
        }
        c
    }
}

/// How the continuous parts of the two item bids are joined.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// `C(u, w) = min(u, w)`: the maximally correlated strategy.
    Comonotone,
    /// `C(u, w) = u w`: independent above the shared origin atom.
    IndependentAboveOrigin,
    Checkerboard(Checkerboard),
    /// Independent items including their atoms, `F(x, y) = M(x) M(y)`.
    /// Mass at the origin drops to `a^2`.
    Product,
}

/// An AND strategy whose item marginals are given by an [`AndMarginal`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledAnd {
    marginal: AndMarginal,
    coupling: Coupling,
}

impl CoupledAnd {
    pub fn new(marginal: AndMarginal, coupling: Coupling) -> Self {
        Self { marginal, coupling }
    }

    pub fn equilibrium(v: f64, coupling: Coupling) -> Result<Self> {
        Ok(Self::new(AndMarginal::new(v)?, coupling))
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn item_marginal(&self) -> AndMarginal {
        self.marginal
    }

    /// `E[f(Q(u), Q(w))]` for `(u, w)` uniform on a rectangle of the unit
    /// square, scaled by `weight`, where `Q` is the continuous-part quantile.
    fn rectangle(
        &self,
        dim: usize,
        f: &Integrand<'_>,
        u: (f64, f64),
        w: (f64, f64),
        weight: f64,
        acc: &mut [f64],
    ) {
        let m = self.marginal;
        let area = (u.1 - u.0) * (w.1 - w.0);
        let opts = QuadOptions::default();
        let outer = integrate_vec(
            &|s: f64, out: &mut [f64]| {
                let x = m.continuous_quantile(s);
                let inner = integrate_vec(
                    &|t: f64, o: &mut [f64]| f(BidPair::new(x, m.continuous_quantile(t)), o),
                    dim,
                    w.0,
                    w.1,
                    &[],
                    opts,
                );
                out.copy_from_slice(&inner.value);
            },
            dim,
            u.0,
            u.1,
            &[],
            opts,
        );
        for (z, val) in acc.iter_mut().zip(outer.value) {
            *z += weight * val / area;
        }
    }

    /// `E[f(b)]` over one coordinate continuous and the other fixed at 0.
    fn axis(&self, dim: usize, f: &Integrand<'_>, item: Item, weight: f64, acc: &mut [f64]) {
        let m = self.marginal;
        let r = integrate_vec(
            &|s: f64, out: &mut [f64]| {
                let t = m.continuous_quantile(s);
                let bid = match item {
                    Item::One => BidPair::new(t, 0.0),
                    Item::Two => BidPair::new(0.0, t),
                };
                f(bid, out);
            },
            dim,
            0.0,
            1.0,
            &[],
            QuadOptions::default(),
        );
        for (z, val) in acc.iter_mut().zip(r.value) {
            *z += weight * val;
        }
    }
}

impl JointBidDistribution for CoupledAnd {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        if x < 0.0 || y < 0.0 {
            return 0.0;
        }
        let m = &self.marginal;
        let a = m.atom();
        let (u, w) = (m.continuous_cdf(x), m.continuous_cdf(y));
        let c = match &self.coupling {
            Coupling::Comonotone => u.min(w),
            Coupling::IndependentAboveOrigin => u * w,
            Coupling::Checkerboard(cb) => cb.copula(u, w),
            Coupling::Product => return m.cdf(x) * m.cdf(y),
        };
        a + (1.0 - a) * c
    }

    fn representation(&self) -> Representation {
        Representation::Parametric
    }

    fn upper_bound(&self) -> f64 {
        self.marginal.top()
    }

    fn expect(&self, dim: usize, f: &Integrand<'_>) -> Vec<f64> {
        let a = self.marginal.atom();
        let mut acc = vec![0.0; dim];
        let origin = match self.coupling {
            Coupling::Product => a * a,
            _ => a,
        };
        f(BidPair::ZERO, &mut acc);
        acc.iter_mut().for_each(|z| *z *= origin);
        let cont = 1.0 - a;
        match &self.coupling {
            Coupling::Comonotone => {
                let m = self.marginal;
                let r = integrate_vec(
                    &|s: f64, out: &mut [f64]| f(BidPair::diagonal(m.continuous_quantile(s)), out),
                    dim,
                    0.0,
                    1.0,
                    &[],
                    QuadOptions::default(),
                );
                for (z, val) in acc.iter_mut().zip(r.value) {
                    *z += cont * val;
                }
            }
            Coupling::IndependentAboveOrigin => {
                self.rectangle(dim, f, (0.0, 1.0), (0.0, 1.0), cont, &mut acc);
            }
            Coupling::Checkerboard(cb) => {
                let k = cb.k;
                let h = 1.0 / k as f64;
                for i in 0..k {
                    for j in 0..k {
                        let p = cb.mass[i * k + j];
                        if p > 0.0 {
                            let u = (i as f64 * h, (i + 1) as f64 * h);
                            let w = (j as f64 * h, (j + 1) as f64 * h);
                            self.rectangle(dim, f, u, w, cont * p, &mut acc);
                        }
                    }
                }
            }
            Coupling::Product => {
                self.axis(dim, f, Item::One, cont * a, &mut acc);
                self.axis(dim, f, Item::Two, a * cont, &mut acc);
                self.rectangle(dim, f, (0.0, 1.0), (0.0, 1.0), cont * cont, &mut acc);
            }
        }
        acc
    }

    fn atoms(&self) -> Vec<Atom> {
        vec![Atom::new(BidPair::ZERO, self.cdf(0.0, 0.0))]
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
            high: [self.marginal.top(); 2],
            atom_at_origin: self.cdf(0.0, 0.0),
        }
    }
}
