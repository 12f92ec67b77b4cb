use serde::{Deserialize, Serialize};

use super::{Integrand, JointBidDistribution, Representation, SupportDiagnostics};
use crate::error::{Error, Result};
use crate::model::{BidPair, Item};

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub bid: BidPair,
    pub mass: f64,
}

impl Atom {
    pub fn new(bid: BidPair, mass: f64) -> Self {
        Self { bid, mass }
    }
}

// Cumulative table over the distinct coordinates; only built when small.
const MAX_TABLE_CELLS: usize = 4_000_000;

#[derive(Debug, Clone)]
struct CdfTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    cum: Vec<f64>,
}

impl CdfTable {
    fn build(atoms: &[Atom]) -> Option<Self> {
        let mut xs: Vec<f64> = atoms.iter().map(|a| a.bid.x1).collect();
        let mut ys: Vec<f64> = atoms.iter().map(|a| a.bid.x2).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let (nx, ny) = (xs.len(), ys.len());
        if nx.checked_mul(ny)? > MAX_TABLE_CELLS {
            return None;
        }
        let mut cum = vec![0.0; nx * ny];
        for a in atoms {
            let i = xs.partition_point(|&x| x < a.bid.x1);
            let j = ys.partition_point(|&y| y < a.bid.x2);
            cum[i * ny + j] += a.mass;
        }
        for i in 0..nx {
            for j in 0..ny {
                let mut c = cum[i * ny + j];
                if i > 0 {
                    c += cum[(i - 1) * ny + j];
                }
                if j > 0 {
                    c += cum[i * ny + j - 1];
                }
                if i > 0 && j > 0 {
                    c -= cum[(i - 1) * ny + j - 1];
                }
                cum[i * ny + j] = c;
            }
        }
        Some(Self { xs, ys, cum })
    }

    fn cdf(&self, x: f64, y: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v <= x);
        let j = self.ys.partition_point(|&v| v <= y);
        if i == 0 || j == 0 {
            0.0
        } else {
            self.cum[(i - 1) * self.ys.len() + (j - 1)]
        }
    }
}

/// Finitely many bids with probabilities: a grid strategy or an empirical sample.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
    representation: Representation,
    table: Option<CdfTable>,
}

impl DiscreteDistribution {
    /// Validates and merges the atoms. Masses must be nonnegative and sum to
    /// 1 within 1e-9; zero-mass atoms are dropped.
    pub fn from_atoms(atoms: Vec<Atom>, representation: Representation) -> Result<Self> {
        let mut total = 0.0;
        for a in &atoms {
            let ok = a.mass.is_finite()
                && a.mass >= 0.0
                && a.bid.x1.is_finite()
                && a.bid.x2.is_finite()
                && a.bid.x1 >= 0.0
                && a.bid.x2 >= 0.0;
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "invalid atom {:?}: masses and bids must be finite and nonnegative",
                    a
                )));
            }
            total += a.mass;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "atom masses sum to {total}, expected 1"
            )));
        }
        let mut atoms: Vec<Atom> = atoms.into_iter().filter(|a| a.mass > 0.0).collect();
        atoms.sort_by(|a, b| {
            a.bid
                .x1
                .total_cmp(&b.bid.x1)
                .then(a.bid.x2.total_cmp(&b.bid.x2))
        });
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.bid == a.bid => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        let table = CdfTable::build(&merged);
        Ok(Self {
            atoms: merged,
            representation,
            table,
        })
    }

    pub fn grid(atoms: Vec<Atom>) -> Result<Self> {
        Self::from_atoms(atoms, Representation::Grid)
    }

    /// Equal weights on the given draws.
    pub fn empirical(samples: &[BidPair]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter(
                "empirical distribution needs samples".into(),
            ));
        }
        let w = 1.0 / samples.len() as f64;
        let atoms = samples.iter().map(|&b| Atom::new(b, w)).collect();
        // Sums of many equal weights drift; the 1e-9 check still holds for n < 1e6.
        Self::from_atoms(atoms, Representation::Empirical)
    }

    pub fn point_mass(bid: BidPair) -> Self {
        Self::grid(vec![Atom::new(bid, 1.0)]).expect("a single unit atom is valid")
    }

    /// Independent product of two one-dimensional discrete laws given as
    /// `(value, mass)` pairs.
    pub fn product(first: &[(f64, f64)], second: &[(f64, f64)]) -> Result<Self> {
        let atoms = first
            .iter()
            .flat_map(|&(x, p)| {
                second
                    .iter()
                    .map(move |&(y, q)| Atom::new(BidPair::new(x, y), p * q))
            })
            .collect();
        Self::grid(atoms)
    }

    pub fn atoms_slice(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mass_at(&self, bid: BidPair) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.bid == bid)
            .map(|a| a.mass)
            .sum()
    }

    /// Sorted `(value, mass)` pairs of one item's marginal.
    pub fn marginal_atoms(&self, item: Item) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|a| (a.bid.get(item), a.mass))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for (x, m) in pts {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += m,
                _ => merged.push((x, m)),
            }
        }
        merged
    }
}

impl JointBidDistribution for DiscreteDistribution {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        match &self.table {
            Some(t) => t.cdf(x, y),
            None => self
                .atoms
                .iter()
                .filter(|a| a.bid.x1 <= x && a.bid.x2 <= y)
                .map(|a| a.mass)
                .sum(),
        }
    }

    fn representation(&self) -> Representation {
        self.representation
    }

    fn upper_bound(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.bid.x1.max(a.bid.x2))
            .fold(0.0, f64::max)
    }

    fn expect(&self, dim: usize, f: &Integrand<'_>) -> Vec<f64> {
        let mut acc = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        for a in &self.atoms {
            f(a.bid, &mut buf);
            for (z, b) in acc.iter_mut().zip(&buf) {
                *z += a.mass * b;
            }
        }
        acc
    }

    fn atoms(&self) -> Vec<Atom> {
        self.atoms.clone()
    }

    fn partial_mean(&self, item: Item, t: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.bid.get(item) <= t)
            .map(|a| a.mass * a.bid.get(item))
            .sum()
    }

    fn support(&self) -> SupportDiagnostics {
        let mut low = [f64::INFINITY; 2];
        let mut high = [0.0f64; 2];
        for a in &self.atoms {
            for item in Item::BOTH {
                let i = item.index();
                low[i] = low[i].min(a.bid.get(item));
                high[i] = high[i].max(a.bid.get(item));
            }
        }
        SupportDiagnostics {
            low,
            high,
            atom_at_origin: self.mass_at(BidPair::ZERO),
        }
    }

    fn as_discrete(&self) -> Option<&DiscreteDistribution> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DiscreteDistribution {
        DiscreteDistribution::grid(vec![
            Atom::new(BidPair::new(0.1, 0.4), 0.25),
            Atom::new(BidPair::new(0.3, 0.2), 0.5),
            Atom::new(BidPair::new(0.1, 0.4), 0.25),
        ])
        .unwrap()
    }

    #[test]
    fn merges_duplicates_and_evaluates_cdf() {
        let d = sample();
        assert_eq!(d.atoms_slice().len(), 2);
        assert_eq!(d.cdf(0.1, 0.4), 0.5);
        assert_eq!(d.cdf(0.3, 0.3), 0.5);
        assert_eq!(d.cdf(0.29, 1.0), 0.5);
        assert_eq!(d.cdf(1.0, 1.0), 1.0);
        assert_eq!(d.cdf(-1.0, 1.0), 0.0);
    }

    #[test]
    fn table_and_scan_agree() {
        let d = sample();
        let scan = |x: f64, y: f64| -> f64 {
            d.atoms_slice()
                .iter()
                .filter(|a| a.bid.x1 <= x && a.bid.x2 <= y)
                .map(|a| a.mass)
                .sum()
        };
        for x in [0.0, 0.1, 0.2, 0.3, 0.5] {
            for y in [0.0, 0.2, 0.3, 0.4, 0.5] {
                assert_eq!(d.cdf(x, y), scan(x, y));
            }
        }
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(DiscreteDistribution::grid(vec![Atom::new(BidPair::ZERO, 0.5)]).is_err());
        assert!(DiscreteDistribution::grid(vec![
            Atom::new(BidPair::ZERO, 1.5),
            Atom::new(BidPair::diagonal(0.1), -0.5)
        ])
        .is_err());
        assert!(DiscreteDistribution::empirical(&[]).is_err());
    }

    #[test]
    fn support_and_partial_mean() {
        let d = sample();
        let s = d.support();
        assert_eq!(s.low, [0.1, 0.2]);
        assert_eq!(s.high, [0.3, 0.4]);
        assert_eq!(s.atom_at_origin, 0.0);
        assert!((d.partial_mean(Item::One, 0.2) - 0.05).abs() < 1e-15);
        assert_eq!(d.marginal_atoms(Item::Two), vec![(0.2, 0.5), (0.4, 0.5)]);
    }
}
