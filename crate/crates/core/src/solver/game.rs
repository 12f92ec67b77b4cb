//! Finite discretizations of the auction.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{Atom, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::model::{Auction, BidCap, BidPair, OrValue, TieBreakRule};

/// A two-player game in normal form: payoffs `a` to the row player and `b`
/// to the column player, both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl BimatrixGame {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || a.len() != rows * cols || b.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "payoff matrices must both be {rows} x {cols} and nonempty"
            )));
        }
        Ok(Self { rows, cols, a, b })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.cols + j]
    }

    /// Row player's payoff for each row against the column mix `q`.
    pub fn row_payoffs(&self, q: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.a(i, j) * q[j]).sum())
            .collect()
    }

    /// Column player's payoff for each column against the row mix `p`.
    pub fn col_payoffs(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, &pi) in p.iter().enumerate() {
            if pi != 0.0 {
                for (j, o) in out.iter_mut().enumerate() {
                    *o += pi * self.b(i, j);
                }
            }
        }
        out
    }

    /// Returns the game with rows and columns reordered: row `k` of the
    /// result is row `row_order[k]` of `self`.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        let mut a = Vec::with_capacity(self.a.len());
        let mut b = Vec::with_capacity(self.b.len());
        for &i in row_order {
            for &j in col_order {
                a.push(self.a(i, j));
                b.push(self.b(i, j));
            }
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            a,
            b,
        }
    }
}

/// Which bids each player may use in a grid game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// Every pair of grid levels, for both players.
    Full,
    /// AND on the diagonal, OR on the axes.
    Structured,
}

impl FromStr for GridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(GridMode::Full),
            "structured" => Ok(GridMode::Structured),
            other => Err(Error::InvalidParameter(format!(
                "grid mode must be 'full' or 'structured', got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for GridMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridMode::Full => "full",
            GridMode::Structured => "structured",
        })
    }
}

/// The auction restricted to bids on a finite grid. AND is the row player.
#[derive(Debug, Clone)]
pub struct GridGame {
    pub v: f64,
    pub cap: f64,
    pub grid: Vec<f64>,
    pub mode: GridMode,
    pub tie: TieBreakRule,
    pub and_strategies: Vec<BidPair>,
    pub or_strategies: Vec<BidPair>,
    pub payoffs: BimatrixGame,
}

/// `{0, H/(n-1), ..., H}` with 1/2 added when missing.
pub fn bid_grid(cap: f64, n_levels: usize) -> Result<Vec<f64>> {
    if n_levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 grid levels, got {n_levels}"
        )));
    }
    let last = (n_levels - 1) as f64;
    let mut g: Vec<f64> = (0..n_levels).map(|k| cap * k as f64 / last).collect();
    if !g.contains(&0.5) && 0.5 <= cap {
        let at = g.partition_point(|&x| x < 0.5);
        g.insert(at, 0.5);
    }
    Ok(g)
}

pub fn build_grid_game(
    v: f64,
    n_levels: usize,
    mode: GridMode,
    tie: &TieBreakRule,
) -> Result<GridGame> {
    let value = OrValue::new(v)?;
    let cap = BidCap::default_for(value);
    let grid = bid_grid(cap.get(), n_levels)?;
    let (and_strategies, or_strategies) = match mode {
        GridMode::Full => {
            let all: Vec<BidPair> = grid
                .iter()
                .flat_map(|&x| grid.iter().map(move |&y| BidPair::new(x, y)))
                .collect();
            (all.clone(), all)
        }
        GridMode::Structured => {
            let diag = grid.iter().map(|&y| BidPair::diagonal(y)).collect();
            let positive = || grid.iter().copied().filter(|&x| x > 0.0);
            let axes = std::iter::once(BidPair::ZERO)
                .chain(positive().map(|x| BidPair::new(x, 0.0)))
                .chain(positive().map(|x| BidPair::new(0.0, x)))
                .collect();
            (diag, axes)
        }
    };
    let auction = Auction::new(value).with_cap(cap).with_tie(tie.clone());
    let cols = or_strategies.len();
    let cells: Vec<(f64, f64)> = and_strategies
        .par_iter()
        .map(|&a| {
            or_strategies
                .iter()
                .map(|&o| auction.resolve(a, o).map(|r| (r.u_and, r.u_or)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let (a, b) = cells.into_iter().unzip();
    let payoffs = BimatrixGame::new(and_strategies.len(), cols, a, b)?;
    Ok(GridGame {
        v,
        cap: cap.get(),
        grid,
        mode,
        tie: tie.clone(),
        and_strategies,
        or_strategies,
        payoffs,
    })
}

impl GridGame {
    fn distribution(strategies: &[BidPair], probs: &[f64]) -> Result<DiscreteDistribution> {
        if probs.len() != strategies.len() {
            return Err(Error::Profile(format!(
                "{} probabilities for {} strategies",
                probs.len(),
                strategies.len()
            )));
        }
        let atoms = strategies
            .iter()
            .zip(probs)
            .map(|(&b, &p)| Atom::new(b, p))
            .collect();
        DiscreteDistribution::grid(atoms)
    }

    pub fn and_distribution(&self, probs: &[f64]) -> Result<DiscreteDistribution> {
        Self::distribution(&self.and_strategies, probs)
    }

    pub fn or_distribution(&self, probs: &[f64]) -> Result<DiscreteDistribution> {
        Self::distribution(&self.or_strategies, probs)
    }

    pub fn and_index(&self, bid: BidPair) -> Option<usize> {
        self.and_strategies.iter().position(|&b| b == bid)
    }

    pub fn or_index(&self, bid: BidPair) -> Option<usize> {
        self.or_strategies.iter().position(|&b| b == bid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn grid_levels() {
        assert_eq!(bid_grid(1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(
            bid_grid(1.0, 6).unwrap(),
            vec![0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0]
        );
        assert!(bid_grid(1.0, 1).is_err());
    }

    #[test]
    fn strategy_counts() {
        let tie = TieBreakRule::default();
        let g = build_grid_game(1.0, 6, GridMode::Full, &tie).unwrap();
        // 0.5 is added to the six levels.
        assert_eq!(g.and_strategies.len(), 49);
        let g = build_grid_game(1.0, 5, GridMode::Full, &tie).unwrap();
        assert_eq!((g.payoffs.rows(), g.payoffs.cols()), (25, 25));
        let g = build_grid_game(1.0, 3, GridMode::Structured, &tie).unwrap();
        assert_eq!(
            g.and_strategies,
            vec![
                BidPair::ZERO,
                BidPair::diagonal(0.5),
                BidPair::diagonal(1.0)
            ]
        );
        assert_eq!(g.or_strategies.len(), 5);
        assert_eq!(g.or_strategies[0], BidPair::ZERO);
    }

    #[test]
    fn entries_match_resolve() {
        let tie = TieBreakRule::default();
        let g = build_grid_game(2.0, 7, GridMode::Full, &tie).unwrap();
        let auction = Auction::new(OrValue::new(2.0).unwrap());
        let mut rng = seeded(8);
        for _ in 0..200 {
            let i = rng.random_range(0..g.payoffs.rows());
            let j = rng.random_range(0..g.payoffs.cols());
            let r = auction
                .resolve(g.and_strategies[i], g.or_strategies[j])
                .unwrap();
            assert_eq!(g.payoffs.a(i, j), r.u_and);
            assert_eq!(g.payoffs.b(i, j), r.u_or);
        }
    }

    #[test]
    fn matrix_vector_products() {
        let g = BimatrixGame::new(2, 2, vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0])
            .unwrap();
        assert_eq!(g.row_payoffs(&[0.25, 0.75]), vec![-0.5, 0.5]);
        assert_eq!(g.col_payoffs(&[1.0, 0.0]), vec![-1.0, 1.0]);
        assert!(BimatrixGame::new(2, 2, vec![0.0; 3], vec![0.0; 4]).is_err());
    }
}
