//! Support enumeration for equal-size supports.
//!
//! For supports `I` (rows) and `J` (columns) of size `k`, the column mix must
//! make every row in `I` equally good and the row mix every column in `J`.
//! Each condition is a `(k + 1) x (k + 1)` linear system; a solution is kept
//! when both mixes are nonnegative and no strategy outside the supports does
//! better.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::game::BimatrixGame;
use super::profile::MixedProfile;
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-10;
const PAYOFF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SupportEnumeration {
    pub equilibria: Vec<MixedProfile>,
    /// Support pairs tried.
    pub candidates: usize,
    /// Support pairs skipped because an indifference system was singular.
    pub singular: usize,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Solves for a mix over `support` making the opponent's `targets` indifferent.
/// `payoff(t, s)` is the opponent's payoff for target `t` against `s`.
fn indifference(
    targets: &[usize],
    support: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
) -> Option<Vec<f64>> {
    let k = support.len();
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (r, &t) in targets.iter().enumerate() {
        for (c, &s) in support.iter().enumerate() {
            m[(r, c)] = payoff(t, s);
        }
        m[(r, k)] = -1.0;
    }
    for c in 0..k {
        m[(k, c)] = 1.0;
    }
    rhs[k] = 1.0;
    let lu = m.full_piv_lu();
    if !lu.is_invertible() {
        return None;
    }
    let x = lu.solve(&rhs)?;
    Some(x.iter().take(k).copied().collect())
}

/// Row and column probabilities of a candidate equilibrium.
type Mix = (Vec<f64>, Vec<f64>);

enum Outcome {
    Singular,
    Rejected,
    Found(Vec<f64>, Vec<f64>),
}

fn try_supports(game: &BimatrixGame, rows: &[usize], cols: &[usize]) -> Outcome {
    // Column mix that makes AND indifferent across `rows`.
    let Some(q_s) = indifference(rows, cols, |i, j| game.a(i, j)) else {
        return Outcome::Singular;
    };
    let Some(p_s) = indifference(cols, rows, |j, i| game.b(i, j)) else {
        return Outcome::Singular;
    };
    if q_s.iter().chain(&p_s).any(|&x| x < -PROB_TOL) {
        return Outcome::Rejected;
    }
    let mut p = vec![0.0; game.rows()];
    let mut q = vec![0.0; game.cols()];
    for (&i, &x) in rows.iter().zip(&p_s) {
        p[i] = x.max(0.0);
    }
    for (&j, &x) in cols.iter().zip(&q_s) {
        q[j] = x.max(0.0);
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    p.iter_mut().for_each(|x| *x /= sp);
    q.iter_mut().for_each(|x| *x /= sq);
    let rp = game.row_payoffs(&q);
    let cp = game.col_payoffs(&p);
    let u = rows
        .iter()
        .map(|&i| rp[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let w = cols
        .iter()
        .map(|&j| cp[j])
        .fold(f64::NEG_INFINITY, f64::max);
    if rp.iter().any(|&x| x > u + PAYOFF_TOL) || cp.iter().any(|&x| x > w + PAYOFF_TOL) {
        return Outcome::Rejected;
    }
    Outcome::Found(p, q)
}

pub fn solve_support_enumeration(
    game: &BimatrixGame,
    max_support_size: usize,
) -> Result<SupportEnumeration> {
    if max_support_size == 0 {
        return Err(Error::Precondition(
            "max_support_size must be at least 1".into(),
        ));
    }
    let mut equilibria: Vec<MixedProfile> = Vec::new();
    let mut candidates = 0;
    let mut singular = 0;
    for k in 1..=max_support_size.min(game.rows()).min(game.cols()) {
        let row_sets = subsets(game.rows(), k);
        let col_sets = subsets(game.cols(), k);
        candidates += row_sets.len() * col_sets.len();
        let results: Vec<(usize, Vec<Mix>)> = row_sets
            .par_iter()
            .map(|rows| {
                let mut sing = 0;
                let mut found = Vec::new();
                for cols in &col_sets {
                    match try_supports(game, rows, cols) {
                        Outcome::Singular => sing += 1,
                        Outcome::Rejected => {}
                        Outcome::Found(p, q) => found.push((p, q)),
                    }
                }
                (sing, found)
            })
            .collect();
        for (sing, found) in results {
            singular += sing;
            for (p, q) in found {
                let m = MixedProfile::evaluate(game, p, q)?;
                let duplicate = equilibria.iter().any(|e| {
                    e.and_probs
                        .iter()
                        .zip(&m.and_probs)
                        .all(|(a, b)| (a - b).abs() < 1e-9)
                        && e.or_probs
                            .iter()
                            .zip(&m.or_probs)
                            .all(|(a, b)| (a - b).abs() < 1e-9)
                });
                if !duplicate {
                    equilibria.push(m);
                }
            }
        }
    }
    Ok(SupportEnumeration {
        equilibria,
        candidates,
        singular,
    })
}
