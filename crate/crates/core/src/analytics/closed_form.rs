//! Win probability and revenue in the closed-form equilibrium.
//!
//! Both quantities are integrals over `[0, 1/2]` against the equilibrium
//! laws. Their antiderivatives divide by `(v - 1)^2`, which loses about eight
//! digits within `1e-4` of `v = 1`; there the integral is evaluated by
//! quadrature instead.

use serde::Serialize;

use crate::error::Result;
use crate::model::OrValue;
use crate::quadrature::{integrate, QuadOptions};

/// Half-width of the band around `v = 1` evaluated by quadrature.
pub const EPS_SWITCH: f64 = 1e-4;

fn quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-14,
        max_intervals: 2_000,
    }
}

fn mixed(v: f64) -> Result<f64> {
    OrValue::new(v)?.require_mixed_regime()
}

/// `[(v - 1/2) ln(2 - 1/v) - (v - 1)/2] / (v - 1)^2`.
pub fn prob_and_wins_closed_form(v: f64) -> Result<f64> {
    let v = mixed(v)?;
    let d = v - 1.0;
    Ok(((v - 0.5) * (1.0 - 1.0 / v).ln_1p() - 0.5 * d) / (d * d))
}

/// `int_0^{1/2} (v - 1/2)/(v - x)^2 * x/(1 - x) dx`: AND's continuous bid
/// density against OR's probability of bidding below it. The AND atom at 0
/// contributes nothing because OR never bids 0.
pub fn prob_and_wins_quadrature(v: f64) -> Result<f64> {
    let v = mixed(v)?;
    let r = integrate(
        |x| (v - 0.5) / ((v - x) * (v - x)) * x / (1.0 - x),
        0.0,
        0.5,
        quad_options(),
    );
    Ok(r.value[0])
}

/// Probability that AND wins both items in equilibrium.
pub fn prob_and_wins(v: f64) -> Result<f64> {
    if (v - 1.0).abs() > EPS_SWITCH {
        prob_and_wins_closed_form(v)
    } else {
        prob_and_wins_quadrature(v)
    }
}

/// `(v - 1/2)/(v - 1)^2 * [v - 1 - v ln 2 + v ln(v/(v - 1/2))]`.
pub fn revenue_or_closed_form(v: f64) -> Result<f64> {
    let v = mixed(v)?;
    let d = v - 1.0;
    let log_ratio = -(-0.5 / v).ln_1p();
    Ok((v - 0.5) / (d * d) * (d - v * std::f64::consts::LN_2 + v * log_ratio))
}

/// `int_0^{1/2} x/(1 - x)^2 * (v - 1/2)/(v - x) dx`: OR's payment density
/// times the probability that AND bids below it.
pub fn revenue_or_quadrature(v: f64) -> Result<f64> {
    let v = mixed(v)?;
    let r = integrate(
        |x| x / ((1.0 - x) * (1.0 - x)) * (v - 0.5) / (v - x),
        0.0,
        0.5,
        quad_options(),
    );
    Ok(r.value[0])
}

/// OR's expected payment in equilibrium.
pub fn revenue_or(v: f64) -> Result<f64> {
    if (v - 1.0).abs() > EPS_SWITCH {
        revenue_or_closed_form(v)
    } else {
        revenue_or_quadrature(v)
    }
}

/// Welfare expansion for large `v`, accurate to `O(1/v^2)`.
pub fn asymptotic_welfare(v: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    v - ln2 + 0.5 + (1.0 - ln2) / (2.0 * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticsReport {
    pub v: f64,
    pub p_and_wins: f64,
    /// Equal to `p_and_wins`: AND's equilibrium utility is 0.
    pub revenue_and: f64,
    pub revenue_or: f64,
    pub revenue_total: f64,
    pub welfare: f64,
    pub optimal_welfare: f64,
    pub poa: f64,
    pub welfare_loss: f64,
    /// `welfare - asymptotic_welfare(v)`, of order `1/v^2` for large `v`.
    pub asymptotic_residual: f64,
}

impl AnalyticsReport {
    /// Assembles the derived fields from the win probability and OR revenue.
    pub fn from_parts(v: f64, p_and_wins: f64, revenue_or: f64) -> Self {
        let welfare = p_and_wins + (1.0 - p_and_wins) * v;
        let optimal_welfare = v.max(1.0);
        Self {
            v,
            p_and_wins,
            revenue_and: p_and_wins,
            revenue_or,
            revenue_total: p_and_wins + revenue_or,
            welfare,
            optimal_welfare,
            poa: welfare / optimal_welfare,
            welfare_loss: optimal_welfare - welfare,
            asymptotic_residual: welfare - asymptotic_welfare(v),
        }
    }
}

pub fn report(v: f64) -> Result<AnalyticsReport> {
    Ok(AnalyticsReport::from_parts(
        v,
        prob_and_wins(v)?,
        revenue_or(v)?,
    ))
}

/// Price of anarchy at `v`.
pub fn poa(v: f64) -> Result<f64> {
    Ok(report(v)?.poa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_one() {
        assert!((prob_and_wins(1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((revenue_or(1.0).unwrap() - 0.25).abs() < 1e-12);
        let r = report(1.0).unwrap();
        assert!((r.welfare - 1.0).abs() < 1e-12);
        assert!((r.poa - 1.0).abs() < 1e-12);
        assert!(r.welfare_loss.abs() < 1e-12);
        assert!((r.revenue_total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn values_at_two() {
        assert!((prob_and_wins(2.0).unwrap() - 0.108_197_662_162_246_6).abs() < 1e-12);
        assert!((revenue_or(2.0).unwrap() - 0.283_604_675_675_506_9).abs() < 1e-12);
        assert!((prob_and_wins(0.6).unwrap() - 0.563_367_319_582_431_4).abs() < 1e-12);
        assert!((revenue_or(0.6).unwrap() - 0.161_979_608_250_541_1).abs() < 1e-12);
    }

    #[test]
    fn paths_agree_away_from_one() {
        for v in [0.6, 0.75, 0.9, 0.99, 1.01, 1.5, 2.0, 5.0, 10.0] {
            let (a, b) = (
                prob_and_wins_closed_form(v).unwrap(),
                prob_and_wins_quadrature(v).unwrap(),
            );
            assert!((a - b).abs() <= 1e-8, "v={v}: {a} vs {b}");
            let (a, b) = (
                revenue_or_closed_form(v).unwrap(),
                revenue_or_quadrature(v).unwrap(),
            );
            assert!((a - b).abs() <= 1e-8, "v={v}: {a} vs {b}");
        }
    }

    #[test]
    fn accounting_identity() {
        for v in [0.55, 0.8, 1.0, 1.3, 3.0, 50.0] {
            let r = report(v).unwrap();
            assert!(
                (r.welfare - r.revenue_total - (v - 0.5)).abs() < 1e-9,
                "v={v}"
            );
        }
    }

    #[test]
    fn asymptotics() {
        let v = 1e4;
        let r = report(v).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((v * r.p_and_wins - (ln2 - 0.5)).abs() < 1e-3);
        assert!((r.revenue_or - (1.0 - ln2)).abs() < 1e-3);
        assert!((r.welfare_loss - (ln2 - 0.5)).abs() < 1e-3);
        // The residual shrinks like 1/v^2.
        let small = report(100.0).unwrap().asymptotic_residual;
        let large = report(1000.0).unwrap().asymptotic_residual;
        assert!(
            small.abs() < 1e-4 && large.abs() < small.abs() / 50.0,
            "{small} {large}"
        );
    }

    #[test]
    fn regime_errors() {
        assert!(prob_and_wins(0.5).is_err());
        assert!(revenue_or(0.3).is_err());
        assert!(report(-1.0).is_err());
    }
}
