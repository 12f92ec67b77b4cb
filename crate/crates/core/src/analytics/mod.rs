//! Equilibrium quantities as functions of OR's value `v`: win probability,
//! revenue, welfare and price of anarchy, plus simulation and figure data.

mod closed_form;
mod figures;
mod monte_carlo;
mod search;

pub use closed_form::{
    asymptotic_welfare, poa, prob_and_wins, prob_and_wins_closed_form, prob_and_wins_quadrature,
    report, revenue_or, revenue_or_closed_form, revenue_or_quadrature, AnalyticsReport, EPS_SWITCH,
};
pub use figures::{figure_series, format_sig, v_grid, FigureId, FigureSeries};
pub use monte_carlo::{monte_carlo_report, Estimate, MonteCarloReport, BATCH};
pub use search::{find_poa_minima, golden_section, Minimum, PoaMinimum, POA_BRACKETS, POA_TOL};
