//! Exhaustive search for pure equilibria.

use serde::Serialize;

use super::game::{BimatrixGame, GridGame};
use crate::model::BidPair;

/// Slack below which a deviation does not count as strictly improving.
pub const PURE_TOL: f64 = 1e-12;

/// All `(row, col)` cells where neither player has a strictly better pure reply.
pub fn enumerate_pure_nash(game: &BimatrixGame) -> Vec<(usize, usize)> {
    let col_best: Vec<f64> = (0..game.cols())
        .map(|j| {
            (0..game.rows())
                .map(|i| game.a(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let row_best: Vec<f64> = (0..game.rows())
        .map(|i| {
            (0..game.cols())
                .map(|j| game.b(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mut out = Vec::new();
    for (i, &rb) in row_best.iter().enumerate() {
        for (j, &cb) in col_best.iter().enumerate() {
            if game.a(i, j) >= cb - PURE_TOL && game.b(i, j) >= rb - PURE_TOL {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureProfile {
    pub and_bid: BidPair,
    pub or_bid: BidPair,
    pub u_and: f64,
    pub u_or: f64,
}

/// Pure equilibria of a grid game, as bids.
pub fn pure_nash_profiles(game: &GridGame) -> Vec<PureProfile> {
    enumerate_pure_nash(&game.payoffs)
        .into_iter()
        .map(|(i, j)| PureProfile {
            and_bid: game.and_strategies[i],
            or_bid: game.or_strategies[j],
            u_and: game.payoffs.a(i, j),
            u_or: game.payoffs.b(i, j),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TieBreakRule;
    use crate::rng::seeded;
    use crate::solver::{build_grid_game, GridMode};
    use rand::seq::SliceRandom;

    #[test]
    fn prisoners_dilemma() {
        let g =
            BimatrixGame::new(2, 2, vec![3.0, 0.0, 5.0, 1.0], vec![3.0, 5.0, 0.0, 1.0]).unwrap();
        assert_eq!(enumerate_pure_nash(&g), vec![(1, 1)]);
    }

    #[test]
    fn order_invariance() {
        let g = build_grid_game(0.4, 6, GridMode::Full, &TieBreakRule::and_wins()).unwrap();
        let found = enumerate_pure_nash(&g.payoffs);
        assert!(!found.is_empty());
        let mut rng = seeded(5);
        let mut rows: Vec<usize> = (0..g.payoffs.rows()).collect();
        let mut cols: Vec<usize> = (0..g.payoffs.cols()).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let p = g.payoffs.permuted(&rows, &cols);
        let mut mapped: Vec<(usize, usize)> = enumerate_pure_nash(&p)
            .into_iter()
            .map(|(i, j)| (rows[i], cols[j]))
            .collect();
        mapped.sort();
        assert_eq!(mapped, found);
    }

    #[test]
    fn walrasian_prices_are_pure_equilibria() {
        let g = build_grid_game(0.4, 11, GridMode::Full, &TieBreakRule::and_wins()).unwrap();
        let found = pure_nash_profiles(&g);
        for p in [0.4, 0.5] {
            let d = BidPair::diagonal(p);
            assert!(
                found.iter().any(|e| e.and_bid == d && e.or_bid == d),
                "price {p}"
            );
        }
    }

    #[test]
    fn no_pure_equilibrium_above_one_half() {
        for v in [0.6, 1.0, 2.0] {
            for n in [6, 11, 21] {
                let g = build_grid_game(v, n, GridMode::Full, &TieBreakRule::default()).unwrap();
                assert!(enumerate_pure_nash(&g.payoffs).is_empty(), "v={v} n={n}");
            }
        }
    }

    #[test]
    fn coarse_grid_has_a_weak_pure_equilibrium() {
        // With levels {0, 1/4, 1/2, 3/4, 1} both bidding 1/4 everywhere is
        // an equilibrium: OR's best deviation (1/2, 0) only ties.
        let g = build_grid_game(1.0, 5, GridMode::Full, &TieBreakRule::default()).unwrap();
        let found = pure_nash_profiles(&g);
        assert_eq!(found.len(), 1);
        let e = found[0];
        assert_eq!(
            (e.and_bid, e.or_bid),
            (BidPair::diagonal(0.25), BidPair::diagonal(0.25))
        );
        assert_eq!((e.u_and, e.u_or), (0.0, 0.5));
        let dev = g.or_index(BidPair::new(0.5, 0.0)).unwrap();
        let row = g.and_index(e.and_bid).unwrap();
        assert_eq!(g.payoffs.b(row, dev), 0.5);
    }
}
