//! Mixed profiles of a bimatrix game and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::game::{BimatrixGame, GridGame};
use crate::distribution::{Atom, DiscreteDistribution};
use crate::error::{Error, Player, Result};
use crate::model::BidPair;

/// A mixed strategy for each player with its exploitability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedProfile {
    pub and_probs: Vec<f64>,
    pub or_probs: Vec<f64>,
    pub u_and: f64,
    pub u_or: f64,
    /// Best pure deviation gain of each player.
    pub eps_and: f64,
    pub eps_or: f64,
    pub eps: f64,
}

impl MixedProfile {
    /// Evaluates `(p, q)` exactly against the payoff matrices.
    pub fn evaluate(game: &BimatrixGame, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        for (name, probs, n) in [("AND", &p, game.rows()), ("OR", &q, game.cols())] {
            let total: f64 = probs.iter().sum();
            if probs.len() != n
                || probs.iter().any(|x| x.is_nan() || *x < 0.0)
                || (total - 1.0).abs() > 1e-12
            {
                return Err(Error::Profile(format!(
                    "{name} probabilities must be {n} nonnegative numbers summing to 1 (sum {total})"
                )));
            }
        }
        let rows = game.row_payoffs(&q);
        let cols = game.col_payoffs(&p);
        let u_and: f64 = p.iter().zip(&rows).map(|(a, b)| a * b).sum();
        let u_or: f64 = q.iter().zip(&cols).map(|(a, b)| a * b).sum();
        let best_and = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_or = cols.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let eps_and = (best_and - u_and).max(0.0);
        let eps_or = (best_or - u_or).max(0.0);
        Ok(Self {
            and_probs: p,
            or_probs: q,
            u_and,
            u_or,
            eps_and,
            eps_or,
            eps: eps_and.max(eps_or),
        })
    }

    /// Pure profile `(i, j)`.
    pub fn pure(game: &BimatrixGame, i: usize, j: usize) -> Result<Self> {
        let mut p = vec![0.0; game.rows()];
        let mut q = vec![0.0; game.cols()];
        p[i] = 1.0;
        q[j] = 1.0;
        Self::evaluate(game, p, q)
    }

    pub fn and_support(&self) -> Vec<usize> {
        support(&self.and_probs)
    }

    pub fn or_support(&self) -> Vec<usize> {
        support(&self.or_probs)
    }
}

fn support(p: &[f64]) -> Vec<usize> {
    p.iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProfileRow {
    player: Player,
    x1: f64,
    x2: f64,
    probability: f64,
}

/// Both players' strategies read from a profile file.
#[derive(Debug, Clone)]
pub struct ProfileStrategies {
    pub and: DiscreteDistribution,
    pub or: DiscreteDistribution,
}

/// Writes the support of a profile as CSV with columns
/// `player,x1,x2,probability`.
pub fn write_profile_csv<W: Write>(game: &GridGame, profile: &MixedProfile, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let sides = [
        (Player::And, &game.and_strategies, &profile.and_probs),
        (Player::Or, &game.or_strategies, &profile.or_probs),
    ];
    for (player, strategies, probs) in sides {
        for (b, &p) in strategies.iter().zip(probs.iter()) {
            if p > 0.0 {
                w.serialize(ProfileRow {
                    player,
                    x1: b.x1,
                    x2: b.x2,
                    probability: p,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a profile CSV. Each player's probabilities must sum to 1.
pub fn read_profile_csv<R: Read>(input: R) -> Result<ProfileStrategies> {
    let mut and = Vec::new();
    let mut or = Vec::new();
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    for (line, row) in r.deserialize::<ProfileRow>().enumerate() {
        let row = row.map_err(|e| Error::Profile(format!("row {}: {e}", line + 1)))?;
        let atom = Atom::new(BidPair::new(row.x1, row.x2), row.probability);
        match row.player {
            Player::And => and.push(atom),
            Player::Or => or.push(atom),
        }
    }
    let build = |name: &str, atoms: Vec<Atom>| {
        if atoms.is_empty() {
            return Err(Error::Profile(format!("no rows for player {name}")));
        }
        DiscreteDistribution::grid(atoms)
            .map_err(|e| Error::Profile(format!("{name} strategy: {e}")))
    };
    Ok(ProfileStrategies {
        and: build("and", and)?,
        or: build("or", or)?,
    })
}
