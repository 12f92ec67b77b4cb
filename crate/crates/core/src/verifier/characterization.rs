//! Necessary and sufficient conditions for an equilibrium: OR plays the
//! closed-form strategy exactly, AND has the closed-form item marginals, and
//! AND bids `(0, 0)` with probability `1 - 1/(2v)`.

use std::fmt;

use serde::Serialize;

use super::gap::{best_response_gap, EquilibriumReport};
use crate::distribution::{
    evaluation_points, AndMarginal, JointBidDistribution, OrEquilibrium, SupportDiagnostics,
};
use crate::error::{Error, Result};
use crate::model::{Auction, BidPair, Item, OrValue};

/// Evaluation levels per coordinate used by [`check_characterization`].
pub const CHECK_LEVELS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// OR's joint CDF equals the closed form.
    #[serde(rename = "i")]
    OrStrategy,
    /// AND's item marginals equal the closed form.
    #[serde(rename = "ii")]
    AndMarginals,
    /// AND's mass at the origin is `1 - 1/(2v)`.
    #[serde(rename = "iii")]
    OriginAtom,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::OrStrategy => "(i) OR strategy",
            Clause::AndMarginals => "(ii) AND marginals",
            Clause::OriginAtom => "(iii) AND origin atom",
        })
    }
}

/// The worst failure of one clause.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub clause: Clause,
    /// Item number for marginal clauses.
    pub item: Option<usize>,
    pub location: BidPair,
    pub expected: f64,
    pub actual: f64,
    pub magnitude: f64,
    /// Number of evaluation points that exceeded the tolerance.
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Characterization {
    pub v: f64,
    pub tol: f64,
    pub holds: bool,
    pub violations: Vec<Violation>,
}

impl Characterization {
    pub fn violates(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }
}

#[derive(Default)]
struct Worst {
    best: Option<(BidPair, f64, f64)>,
    points: usize,
}

impl Worst {
    fn record(&mut self, at: BidPair, expected: f64, actual: f64, tol: f64) {
        let d = (actual - expected).abs();
        if d > tol {
            self.points += 1;
        }
        if self.best.is_none_or(|(_, e, a)| d > (a - e).abs()) {
            self.best = Some((at, expected, actual));
        }
    }

    fn into_violation(self, clause: Clause, item: Option<usize>) -> Option<Violation> {
        let (location, expected, actual) = self.best?;
        (self.points > 0).then(|| Violation {
            clause,
            item,
            location,
            expected,
            actual,
            magnitude: (actual - expected).abs(),
            points: self.points,
        })
    }
}

/// Checks the three clauses on a grid over `[0, max(1, v)]`.
pub fn check_characterization(
    f_and: &dyn JointBidDistribution,
    f_or: &dyn JointBidDistribution,
    v: f64,
    tol: f64,
) -> Result<Characterization> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let value = OrValue::new(v)?;
    let marginal = AndMarginal::new(v)?;
    let or_star = OrEquilibrium::new();
    let cap = v.max(1.0).max(f_and.upper_bound()).max(f_or.upper_bound());
    let points = evaluation_points(cap, CHECK_LEVELS, &[0.5, value.get().min(cap)]);

    let mut violations = Vec::new();

    let mut or_worst = Worst::default();
    for &x in &points {
        for &y in &points {
            or_worst.record(BidPair::new(x, y), or_star.cdf(x, y), f_or.cdf(x, y), tol);
        }
    }
    violations.extend(or_worst.into_violation(Clause::OrStrategy, None));

    for item in Item::BOTH {
        let mut w = Worst::default();
        for &t in &points {
            let at = match item {
                Item::One => BidPair::new(t, cap),
                Item::Two => BidPair::new(cap, t),
            };
            w.record(at, marginal.cdf(t), f_and.marginal(item, t), tol);
        }
        violations.extend(w.into_violation(Clause::AndMarginals, Some(item.number())));
    }

    let mut atom = Worst::default();
    atom.record(BidPair::ZERO, marginal.atom(), f_and.cdf(0.0, 0.0), tol);
    violations.extend(atom.into_violation(Clause::OriginAtom, None));

    Ok(Characterization {
        v,
        tol,
        holds: violations.is_empty(),
        violations,
    })
}

/// Best-response gaps together with the characterization.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub equilibrium: EquilibriumReport,
    pub characterization: Characterization,
}

pub fn check_equilibrium(
    f_and: &dyn JointBidDistribution,
    f_or: &dyn JointBidDistribution,
    auction: &Auction,
    grid_step: f64,
    tol: f64,
) -> Result<VerificationReport> {
    Ok(VerificationReport {
        equilibrium: best_response_gap(f_and, f_or, auction, grid_step)?,
        characterization: check_characterization(f_and, f_or, auction.v().get(), tol)?,
    })
}

/// Support bounds and origin atom of a strategy.
pub fn support_diagnostics(f: &dyn JointBidDistribution) -> SupportDiagnostics {
    f.support()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{AndEquilibrium, CoupledAnd, Coupling, DiscreteDistribution};
    use crate::rng::seeded;

    #[test]
    fn closed_forms_pass() {
        for v in [0.6, 1.0, 2.5] {
            let c = check_characterization(
                &AndEquilibrium::new(v).unwrap(),
                &OrEquilibrium::new(),
                v,
                1e-12,
            )
            .unwrap();
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn product_coupling_fails_only_the_atom_clause() {
        let f = CoupledAnd::equilibrium(1.5, Coupling::Product).unwrap();
        let c = check_characterization(&f, &OrEquilibrium::new(), 1.5, 1e-9).unwrap();
        assert!(!c.holds);
        assert_eq!(c.violations.len(), 1);
        assert!(c.violates(Clause::OriginAtom));
    }

    #[test]
    fn compressed_or_fails_clause_one() {
        let f_or = OrEquilibrium::rescaled(0.4).unwrap();
        let c =
            check_characterization(&AndEquilibrium::new(1.0).unwrap(), &f_or, 1.0, 1e-9).unwrap();
        assert!(c.violates(Clause::OrStrategy));
        assert!(!c.violates(Clause::AndMarginals));
        assert!((f_or.cdf(0.45, 0.0) - OrEquilibrium::new().cdf(0.45, 0.0)).abs() > 1e-9);
    }

    #[test]
    fn stretched_marginal_fails_clause_two() {
        let f = CoupledAnd::new(
            AndMarginal::stretched(1.0, 0.45).unwrap(),
            Coupling::Comonotone,
        );
        let c = check_characterization(&f, &OrEquilibrium::new(), 1.0, 1e-9).unwrap();
        assert!(c.violates(Clause::AndMarginals));
        assert!(!c.violates(Clause::OriginAtom));
        assert!(check_characterization(&f, &OrEquilibrium::new(), 1.0, 0.0).is_err());
    }

    #[test]
    fn support_of_closed_forms_and_samples() {
        let s = support_diagnostics(&AndEquilibrium::new(1.0).unwrap());
        assert_eq!((s.low, s.high, s.atom_at_origin), ([0.0; 2], [0.5; 2], 0.5));
        let s = support_diagnostics(&OrEquilibrium::new());
        assert_eq!((s.low, s.high, s.atom_at_origin), ([0.0; 2], [0.5; 2], 0.0));
        let mut rng = seeded(5);
        let draws: Vec<BidPair> = (0..100_000)
            .map(|_| OrEquilibrium::new().sample(&mut rng))
            .collect();
        let s = support_diagnostics(&DiscreteDistribution::empirical(&draws).unwrap());
        assert!(s.high.iter().all(|h| (h - 0.5).abs() < 0.01), "{s:?}");
        assert_eq!(s.low, [0.0; 2]);
    }
}
