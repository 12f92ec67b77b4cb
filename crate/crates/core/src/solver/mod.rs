//! The auction on a finite bid grid, solved as a bimatrix game.

mod compare;
mod fictitious;
mod game;
mod profile;
mod pure;
mod support;

pub use compare::{compare_to_analytic, project_closed_forms, AnalyticComparison};
pub use fictitious::{solve_fictitious_play, FictitiousPlayRun, TieBreaking};
pub use game::{bid_grid, build_grid_game, BimatrixGame, GridGame, GridMode};
pub use profile::{read_profile_csv, write_profile_csv, MixedProfile, ProfileStrategies};
pub use pure::{enumerate_pure_nash, pure_nash_profiles, PureProfile, PURE_TOL};
pub use support::{solve_support_enumeration, SupportEnumeration};
