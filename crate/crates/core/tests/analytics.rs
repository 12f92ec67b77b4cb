use andor_core::analytics::*;
use andor_core::model::TieBreakRule;

#[test]
fn monte_carlo_coverage_over_seeds() {
    for v in [1.0, 2.0] {
        let exact = report(v).unwrap();
        let mut covered = 0;
        for seed in 0..100 {
            let r = monte_carlo_report(v, 100_000, &TieBreakRule::default(), seed).unwrap();
            let ok = r.p_and_wins.covers(exact.p_and_wins, 3.0)
                && r.revenue_or.covers(exact.revenue_or, 3.0)
                && r.welfare.covers(exact.welfare, 3.0);
            covered += ok as usize;
        }
        assert!(covered >= 99, "v={v}: {covered} of 100 seeds within 3 SE");
    }
}

#[test]
fn monte_carlo_does_not_depend_on_thread_count() {
    let a = monte_carlo_report(1.5, 300_000, &TieBreakRule::default(), 4).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = pool.install(|| monte_carlo_report(1.5, 300_000, &TieBreakRule::default(), 4).unwrap());
    assert_eq!(a.p_and_wins, b.p_and_wins);
    assert_eq!(a.revenue_total, b.revenue_total);
}

#[test]
fn win_probability_decreases_above_one() {
    let mut last = 1.0;
    for k in 0..200 {
        let v = 1.0 + 0.05 * k as f64;
        let p = prob_and_wins(v).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert!(p < last, "v={v}");
        last = p;
    }
}

#[test]
fn values_are_continuous_through_the_switch_band() {
    for f in [
        prob_and_wins as fn(f64) -> andor_core::Result<f64>,
        revenue_or,
    ] {
        let mut prev = f(1.0 - 2.0 * EPS_SWITCH).unwrap();
        for k in 1..=40 {
            let v = 1.0 - 2.0 * EPS_SWITCH + k as f64 * EPS_SWITCH / 10.0;
            let x = f(v).unwrap();
            // Slopes near 1 are below 1/2, so a step of 1e-5 moves the value by at most 5e-6.
            assert!((x - prev).abs() < 5e-6 + 1e-9, "v={v}");
            prev = x;
        }
    }
}

#[test]
fn figure_series_shape() {
    for id in FigureId::ALL {
        let s = figure_series(id, 0.51, 3.0, 0.01).unwrap();
        assert!(s.rows.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(s.rows.iter().all(|r| r.0 > 0.5 && r.1.is_finite()));
        assert!(s.rows.iter().any(|r| r.0 == 1.0));
        let csv = s.to_csv_string().unwrap();
        assert_eq!(csv.lines().next().unwrap(), format!("v,{}", id.quantity()));
    }
    let s = figure_series(FigureId::RevenueOr, 0.51, 3.0, 0.01).unwrap();
    assert!(s
        .rows
        .iter()
        .any(|&(v, x)| v == 1.0 && (x - 0.25).abs() < 1e-9));
    let (v_star, _) = figure_series(FigureId::Poa, 0.51, 0.99, 0.01)
        .unwrap()
        .min_row()
        .unwrap();
    assert!((v_star - 0.643).abs() <= 0.01);
}

#[test]
fn accounting_identity_across_values() {
    for v in [0.55, 0.8, 1.0, 1.7, 4.0, 50.0] {
        let r = report(v).unwrap();
        assert!(
            (r.welfare - r.revenue_total - (v - 0.5)).abs() < 1e-9,
            "v={v}"
        );
        assert!(r.poa > 0.0 && r.poa <= 1.0 && r.welfare_loss >= 0.0);
    }
}
