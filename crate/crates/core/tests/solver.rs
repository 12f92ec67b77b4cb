use andor_core::model::TieBreakRule;
use andor_core::solver::*;

fn structured(v: f64, n: usize) -> GridGame {
    build_grid_game(v, n, GridMode::Structured, &TieBreakRule::default()).unwrap()
}

#[test]
fn fictitious_play_approaches_the_closed_forms() {
    let g = structured(1.0, 51);
    let run =
        solve_fictitious_play(&g.payoffs, 100_000, TieBreaking::Randomized { seed: 7 }).unwrap();
    let c = compare_to_analytic(&g, &run.profile).unwrap();
    assert!(run.profile.eps < 0.01, "{run:?}");
    for ks in c.ks_and.iter().chain(&c.ks_or) {
        assert!(*ks < 0.05, "{c:?}");
    }
    assert!(c.origin_atom_deviation < 0.05, "{c:?}");
    // The trace ends at the final round with the reported exploitability.
    assert_eq!(run.trace.last().copied(), Some((100_000, run.profile.eps)));
    assert!(run.trace.first().unwrap().1 > run.profile.eps);
}

#[test]
fn refinement_does_not_increase_distance() {
    let mut last = f64::INFINITY;
    for n in [11, 51, 101] {
        let g = structured(1.0, n);
        let run = solve_fictitious_play(&g.payoffs, 100_000, TieBreaking::Randomized { seed: 7 })
            .unwrap();
        let c = compare_to_analytic(&g, &run.profile).unwrap();
        let d = c.max_distance();
        assert!(d <= last, "n={n}: {d} after {last}");
        last = d;
        if n == 101 {
            assert!(c.ks_or_axis < 0.05, "{c:?}");
        }
    }
}

#[test]
fn fictitious_play_is_reproducible() {
    let g = structured(2.0, 21);
    let a = solve_fictitious_play(&g.payoffs, 5_000, TieBreaking::Randomized { seed: 11 }).unwrap();
    let b = solve_fictitious_play(&g.payoffs, 5_000, TieBreaking::Randomized { seed: 11 }).unwrap();
    assert_eq!(a.profile, b.profile);
    assert_eq!(a.trace, b.trace);
    let c = solve_fictitious_play(&g.payoffs, 5_000, TieBreaking::LowestIndex).unwrap();
    let d = solve_fictitious_play(&g.payoffs, 5_000, TieBreaking::LowestIndex).unwrap();
    assert_eq!(c.profile, d.profile);
}

#[test]
fn lowest_index_ties_put_or_on_one_axis() {
    let g = structured(1.0, 21);
    let run = solve_fictitious_play(&g.payoffs, 20_000, TieBreaking::LowestIndex).unwrap();
    let on_second_axis: f64 = g
        .or_strategies
        .iter()
        .zip(&run.profile.or_probs)
        .filter(|(b, _)| b.x2 > 0.0)
        .map(|(_, p)| p)
        .sum();
    assert_eq!(on_second_axis, 0.0);
}

#[test]
fn full_mode_fictitious_play_runs() {
    let g = build_grid_game(1.0, 11, GridMode::Full, &TieBreakRule::default()).unwrap();
    let run =
        solve_fictitious_play(&g.payoffs, 20_000, TieBreaking::Randomized { seed: 2 }).unwrap();
    assert!(run.profile.eps < 0.05, "{}", run.profile.eps);
    let total: f64 = run.profile.and_probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn support_enumeration_on_six_levels() {
    let g = structured(1.0, 6);
    let s = solve_support_enumeration(&g.payoffs, 7).unwrap();
    assert!(!s.equilibria.is_empty());
    assert!(s.singular > 0 && s.singular < s.candidates);
    // Every equilibrium found uses the same AND strategy on {0, 0.2, 0.4}.
    for e in &s.equilibria {
        assert!(e.eps < 1e-12);
        let expected = [7.0 / 12.0, 1.0 / 12.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0];
        for (p, q) in e.and_probs.iter().zip(expected) {
            assert!((p - q).abs() < 1e-12, "{:?}", e.and_probs);
        }
        let c = compare_to_analytic(&g, e).unwrap();
        // Grid-restricted distance is exactly one sixth at these levels.
        assert!((c.ks_and[0] - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.origin_atom_deviation - 1.0 / 12.0).abs() < 1e-12);
    }
}

#[test]
fn support_enumeration_recovers_pure_equilibria() {
    let g = build_grid_game(0.4, 6, GridMode::Structured, &TieBreakRule::and_wins()).unwrap();
    let pure = enumerate_pure_nash(&g.payoffs);
    assert!(!pure.is_empty());
    let s = solve_support_enumeration(&g.payoffs, 1).unwrap();
    let mut found: Vec<(usize, usize)> = s
        .equilibria
        .iter()
        .map(|e| (e.and_support()[0], e.or_support()[0]))
        .collect();
    found.sort();
    assert_eq!(found, pure);
    assert!(s.equilibria.iter().all(|e| e.eps < 1e-12));
}

#[test]
fn profile_csv_round_trip_through_a_solver() {
    let g = structured(1.0, 11);
    let run =
        solve_fictitious_play(&g.payoffs, 2_000, TieBreaking::Randomized { seed: 1 }).unwrap();
    let mut buf = Vec::new();
    write_profile_csv(&g, &run.profile, &mut buf).unwrap();
    let s = read_profile_csv(buf.as_slice()).unwrap();
    for (b, &p) in g.and_strategies.iter().zip(&run.profile.and_probs) {
        assert_eq!(s.and.mass_at(*b), p);
    }
}
