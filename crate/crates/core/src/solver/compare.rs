//! Distances between solver profiles and the closed-form equilibrium.

use serde::Serialize;

use super::game::GridGame;
use super::profile::MixedProfile;
use crate::distribution::{AndMarginal, DiscreteDistribution, JointBidDistribution, OrEquilibrium};
use crate::error::{Error, Result};
use crate::model::{BidPair, Item};

/// Kolmogorov–Smirnov distances over the grid levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticComparison {
    /// Per-item AND marginal against the closed-form AND marginal.
    pub ks_and: [f64; 2],
    /// Per-item OR marginal against the closed-form OR marginal.
    pub ks_or: [f64; 2],
    /// OR's larger coordinate against `x / (1 - x)`.
    pub ks_or_axis: f64,
    pub and_origin_mass: f64,
    /// `|and_origin_mass - (1 - 1/(2v))|`.
    pub origin_atom_deviation: f64,
}

impl AnalyticComparison {
    /// Largest of all reported distances.
    pub fn max_distance(&self) -> f64 {
        self.ks_and
            .iter()
            .chain(&self.ks_or)
            .copied()
            .chain([self.ks_or_axis, self.origin_atom_deviation])
            .fold(0.0, f64::max)
    }
}

fn sup_gap(levels: &[f64], a: impl Fn(f64) -> f64, b: impl Fn(f64) -> f64) -> f64 {
    levels
        .iter()
        .map(|&t| (a(t) - b(t)).abs())
        .fold(0.0, f64::max)
}

pub fn compare_to_analytic(game: &GridGame, profile: &MixedProfile) -> Result<AnalyticComparison> {
    let and = game.and_distribution(&profile.and_probs)?;
    let or = game.or_distribution(&profile.or_probs)?;
    let marginal = AndMarginal::new(game.v)?;
    let or_star = OrEquilibrium::new();
    let levels = &game.grid;
    let ks = |d: &DiscreteDistribution, star: &dyn Fn(f64) -> f64| {
        Item::BOTH.map(|item| sup_gap(levels, |t| d.marginal(item, t), star))
    };
    let ks_and = ks(&and, &|t| marginal.cdf(t));
    let ks_or = ks(&or, &|t| or_star.marginal(Item::One, t));
    let axis_cdf = |t: f64| -> f64 {
        or.atoms_slice()
            .iter()
            .filter(|a| a.bid.x1.max(a.bid.x2) <= t)
            .map(|a| a.mass)
            .sum()
    };
    let ks_or_axis = sup_gap(levels, axis_cdf, |t| or_star.axis_cdf(t));
    let and_origin_mass = and.mass_at(BidPair::ZERO);
    Ok(AnalyticComparison {
        ks_and,
        ks_or,
        ks_or_axis,
        and_origin_mass,
        origin_atom_deviation: (and_origin_mass - marginal.atom()).abs(),
    })
}

/// The closed-form equilibrium rounded up onto the grid: each level receives
/// the closed-form mass of the cell ending at it. AND uses diagonal bids and
/// OR axis bids, which exist in both grid modes.
pub fn project_closed_forms(game: &GridGame) -> Result<MixedProfile> {
    let marginal = AndMarginal::new(game.v)?;
    let or_star = OrEquilibrium::new();
    let mut p = vec![0.0; game.and_strategies.len()];
    let mut q = vec![0.0; game.or_strategies.len()];
    let missing = |bid: BidPair| Error::Precondition(format!("grid game has no strategy {bid}"));
    let mut prev = (0.0, 0.0);
    for (k, &t) in game.grid.iter().enumerate() {
        let (fa, fo) = (marginal.cdf(t), or_star.axis_cdf(t));
        let (da, dor) = if k == 0 {
            (fa, fo)
        } else {
            (fa - prev.0, fo - prev.1)
        };
        prev = (fa, fo);
        let d = BidPair::diagonal(t);
        p[game.and_index(d).ok_or_else(|| missing(d))?] += da;
        if dor > 0.0 {
            for bid in [BidPair::new(t, 0.0), BidPair::new(0.0, t)] {
                q[game.or_index(bid).ok_or_else(|| missing(bid))?] += 0.5 * dor;
            }
        }
    }
    let normalize = |v: &mut Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
    };
    normalize(&mut p);
    normalize(&mut q);
    MixedProfile::evaluate(&game.payoffs, p, q)
}
