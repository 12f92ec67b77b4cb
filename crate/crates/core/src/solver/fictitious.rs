//! Simultaneous fictitious play.
//!
//! Each round both players best-respond to the opponent's empirical mix of
//! past plays. Payoffs against the history are kept as running sums, so a
//! round costs one matrix row and one column.

use rand::Rng;
use serde::Serialize;

use super::game::BimatrixGame;
use super::profile::MixedProfile;
use crate::error::{Error, Result};
use crate::rng::{seeded, SimRng};

/// How to choose among equally good best responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TieBreaking {
    LowestIndex,
    /// Uniform over the tied indices, from a generator seeded with `seed`.
    Randomized {
        seed: u64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct FictitiousPlayRun {
    pub profile: MixedProfile,
    pub iterations: usize,
    /// Exploitability of the running averages at geometrically spaced rounds.
    pub trace: Vec<(usize, f64)>,
}

struct Chooser {
    rng: Option<SimRng>,
}

impl Chooser {
    fn argmax(&mut self, values: &[f64]) -> usize {
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * best.abs().max(1.0);
        match &mut self.rng {
            None => values
                .iter()
                .position(|&x| x >= best - tol)
                .expect("nonempty"),
            Some(rng) => {
                // Reservoir sampling over the tied indices.
                let mut pick = 0;
                let mut seen = 0u32;
                for (k, &x) in values.iter().enumerate() {
                    if x >= best - tol {
                        seen += 1;
                        if rng.random_range(0..seen) == 0 {
                            pick = k;
                        }
                    }
                }
                pick
            }
        }
    }
}

pub fn solve_fictitious_play(
    game: &BimatrixGame,
    iterations: usize,
    tie_breaking: TieBreaking,
) -> Result<FictitiousPlayRun> {
    if iterations == 0 {
        return Err(Error::InvalidParameter(
            "fictitious play needs at least 1 iteration".into(),
        ));
    }
    let (m, n) = (game.rows(), game.cols());
    // Column-major copy of the row player's payoffs for cache-friendly updates.
    let a_cols: Vec<f64> = (0..n)
        .flat_map(|j| (0..m).map(move |i| game.a(i, j)))
        .collect();
    let mut chooser = Chooser {
        rng: match tie_breaking {
            TieBreaking::LowestIndex => None,
            TieBreaking::Randomized { seed } => Some(seeded(seed)),
        },
    };

    let mut and_counts = vec![0u64; m];
    let mut or_counts = vec![0u64; n];
    let mut and_vs_history = vec![0.0; m];
    let mut or_vs_history = vec![0.0; n];
    let mut trace = Vec::new();
    let mut next_checkpoint = 1;

    for t in 1..=iterations {
        let (i, j) = if t == 1 {
            (chooser.argmax(&vec![0.0; m]), chooser.argmax(&vec![0.0; n]))
        } else {
            (
                chooser.argmax(&and_vs_history),
                chooser.argmax(&or_vs_history),
            )
        };
        and_counts[i] += 1;
        or_counts[j] += 1;
        for (h, &a) in and_vs_history.iter_mut().zip(&a_cols[j * m..(j + 1) * m]) {
            *h += a;
        }
        for (k, h) in or_vs_history.iter_mut().enumerate() {
            *h += game.b(i, k);
        }
        if t == next_checkpoint || t == iterations {
            let p = averages(&and_counts, t);
            let q = averages(&or_counts, t);
            trace.push((t, MixedProfile::evaluate(game, p, q)?.eps));
            next_checkpoint = (next_checkpoint * 2).max(t + 1);
        }
    }
    let profile = MixedProfile::evaluate(
        game,
        averages(&and_counts, iterations),
        averages(&or_counts, iterations),
    )?;
    Ok(FictitiousPlayRun {
        profile,
        iterations,
        trace,
    })
}

fn averages(counts: &[u64], t: usize) -> Vec<f64> {
    let mut p: Vec<f64> = counts.iter().map(|&c| c as f64 / t as f64).collect();
    // Renormalize so the sum is 1 to rounding.
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> BimatrixGame {
        BimatrixGame::new(2, 2, vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]).unwrap()
    }

    #[test]
    fn matching_pennies_converges_to_uniform() {
        let r = solve_fictitious_play(&pennies(), 20_000, TieBreaking::LowestIndex).unwrap();
        for p in r.profile.and_probs.iter().chain(&r.profile.or_probs) {
            assert!((p - 0.5).abs() < 0.01, "{:?}", r.profile);
        }
        assert!(r.profile.eps < 0.02);
        assert_eq!(r.trace.last().unwrap().0, 20_000);
    }

    #[test]
    fn reproducible_under_seed() {
        let g = pennies();
        let a = solve_fictitious_play(&g, 1_000, TieBreaking::Randomized { seed: 3 }).unwrap();
        let b = solve_fictitious_play(&g, 1_000, TieBreaking::Randomized { seed: 3 }).unwrap();
        assert_eq!(a.profile, b.profile);
        assert!(solve_fictitious_play(&g, 0, TieBreaking::LowestIndex).is_err());
    }
}
