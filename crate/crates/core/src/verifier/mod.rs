//! Utilities of pure bids against mixed strategies, best-response gaps and
//! the equilibrium characterization.

mod characterization;
mod gap;
mod outcome;
mod propositions;

pub use characterization::{
    check_characterization, check_equilibrium, support_diagnostics, Characterization, Clause,
    VerificationReport, Violation, CHECK_LEVELS,
};
pub use gap::{best_response_gap, deviation_levels, EquilibriumReport, MAX_LEVELS};
pub use outcome::{
    and_bid_vs_mixed_or, and_utility_of_bid, is_axis_supported, or_bid_vs_mixed_and,
    or_utility_of_bid, profile_outcome, profile_outcome_via, Route,
};
pub use propositions::{
    check_identical_marginals, identical_marginal_equivalences, stochastic_dominance_excess,
    weak_dominance_check, Comparison, EquivalenceReport, WeakDominance, MARGINAL_TOL, OUTCOME_TOL,
};
