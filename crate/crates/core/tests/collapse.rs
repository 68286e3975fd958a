use critquench::collapse::{
    build_common_grid, collapse_cost, crossing_spread, estimate_w, optimize_w, prepare_curves, AnalysisParams, CollapseWindow, LogLogInterpolant,
};
use critquench::scaling::{rescale_curve, CriticalConstants, RescaledCurve};
use critquench::synthetic::{covering_times, make_synthetic, ScalingFunction, SyntheticSpec};
use critquench::{EnsembleSeries, Error, ExecMode, Family, TimeUnit};
use proptest::prelude::*;

const SIZES: [usize; 4] = [8, 12, 16, 24];
const FIELDS: [f64; 3] = [0.01, 0.02, 0.04];

fn constants() -> CriticalConstants {
    CriticalConstants::defaults(Family::Classical, 3).unwrap()
}

fn fixture(w_star: f64, noise: f64, function: ScalingFunction, ppd: usize) -> Vec<EnsembleSeries> {
    let c = constants();
    let times = covering_times(&c, &SIZES, &FIELDS, w_star, (1e-4, 1e2), ppd).unwrap();
    let spec = SyntheticSpec {
        sizes: SIZES.to_vec(),
        fields: FIELDS.to_vec(),
        w_star,
        function,
        noise,
        seed: 17,
        times,
    };
    make_synthetic(&spec, &c).unwrap()
}

fn rational() -> ScalingFunction {
    ScalingFunction::Rational { scale: 1.0 }
}

fn rescaled(series: &[EnsembleSeries], w: f64) -> Vec<RescaledCurve> {
    series.iter().map(|s| rescale_curve(s, &constants(), w).unwrap().restrict(0.0, f64::INFINITY)).collect()
}

fn cost_at(series: &[EnsembleSeries], w: f64) -> f64 {
    let curves = rescaled(series, w);
    let interps: Vec<_> = curves.iter().map(LogLogInterpolant::from_curve).collect();
    let grid = build_common_grid(&interps, 100, 2).unwrap();
    collapse_cost(&curves, &grid).unwrap()
}

#[test]
fn exact_family_has_vanishing_cost_at_the_generating_exponent() {
    let series = fixture(1.0, 0.0, rational(), 100);
    let c_star = cost_at(&series, 1.0);
    assert!(c_star < 1e-6, "C(w*) = {c_star}");
    assert!(cost_at(&series, 0.8) > c_star);
    assert!(cost_at(&series, 1.2) > c_star);
}

#[test]
fn identical_curves_cost_nothing_and_are_not_informative() {
    let one = fixture(1.0, 0.0, rational(), 20).remove(0);
    let series = vec![one.clone(), one];
    for w in [0.5, 1.0, 2.0] {
        assert_eq!(cost_at(&series, w), 0.0);
    }
    let params = AnalysisParams::default();
    let curves = prepare_curves(&series, &constants(), &params).unwrap();
    let est = optimize_w(&curves, CollapseWindow::new(0.2, 0.8).unwrap(), &params);
    assert!(!est.accepted);
    assert!(est.reason.unwrap().contains("flat"));
}

#[test]
fn single_window_recovers_w_within_refine_tolerance() {
    let series = fixture(1.5, 0.0, rational(), 40);
    let params = AnalysisParams::default();
    let curves = prepare_curves(&series, &constants(), &params).unwrap();
    let est = optimize_w(&curves, CollapseWindow::new(0.2, 0.9).unwrap(), &params);
    assert!(est.accepted, "{:?}", est.reason);
    assert!((est.w_opt - 1.5).abs() <= params.search.refine_tol, "w_opt = {}", est.w_opt);
}

#[test]
fn noiseless_windows_agree() {
    let series = fixture(0.8, 0.0, rational(), 40);
    let r = estimate_w(&series, &constants(), &AnalysisParams::default(), ExecMode::available()).unwrap();
    assert!((r.w_rep - 0.8).abs() < 1e-3);
    assert!(r.sigma_sys < 1e-3, "sigma = {}", r.sigma_sys);
    assert!(r.accepted().count() >= 3);
}

#[test]
fn sigmoid_family_is_recovered() {
    let f = ScalingFunction::Sigmoid { floor: 0.05, ceiling: 5.0, scale: 1.0, power: 2.0 };
    let series = fixture(1.2, 0.0, f, 40);
    let r = estimate_w(&series, &constants(), &AnalysisParams::default(), ExecMode::available()).unwrap();
    assert!((r.w_rep - 1.2).abs() < 1e-2, "w_rep = {}", r.w_rep);
}

#[test]
fn parallel_and_sequential_estimates_agree() {
    let series = fixture(1.0, 0.01, rational(), 20);
    let a = estimate_w(&series, &constants(), &AnalysisParams::default(), ExecMode::Parallel).unwrap();
    let b = estimate_w(&series, &constants(), &AnalysisParams::default(), ExecMode::Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn precondition_errors() {
    let series = fixture(1.0, 0.0, rational(), 20);
    let params = AnalysisParams::default();
    assert!(matches!(estimate_w(&series[..1], &constants(), &params, ExecMode::Sequential), Err(Error::Argument(_))));
    let few = AnalysisParams { windows: CollapseWindow::default_grid()[..2].to_vec(), ..AnalysisParams::default() };
    assert!(estimate_w(&series, &constants(), &few, ExecMode::Sequential).is_err());
    let mut mixed = series.clone();
    mixed[1].time_unit = TimeUnit::Jt;
    let err = estimate_w(&mixed, &constants(), &params, ExecMode::Sequential).unwrap_err();
    assert!(err.to_string().contains("time unit"), "{err}");
}

#[test]
fn crossing_of_logarithmic_offsets_matches_closed_form() {
    // y_L(x) = x + c ln L: Δ = c (ln L_max − ln L_min) / (x + c·mean ln L).
    let c = 0.3;
    let sizes = [10usize, 20, 40];
    let xs: Vec<f64> = (0..=60).map(|k| 10f64.powf(-1.0 + k as f64 / 20.0)).collect();
    let curves: Vec<RescaledCurve> = sizes
        .iter()
        .map(|&l| RescaledCurve {
            label: critquench::SeriesLabel { family: Family::Classical, dim: 2, size: l, field: 0.3 },
            times: (1..=xs.len()).map(|k| k as f64).collect(),
            x: xs.clone(),
            y: xs.iter().map(|x| x + c * (l as f64).ln()).collect(),
            y_err: vec![0.0; xs.len()],
            w: 1.0,
        })
        .collect();
    let d = crossing_spread(&curves, 20).unwrap();
    let mean_ln = sizes.iter().map(|&l| (l as f64).ln()).sum::<f64>() / 3.0;
    let spread = c * (40f64.ln() - 10f64.ln());
    for (x, delta) in d.x.iter().zip(&d.delta) {
        let expected = spread / (x + c * mean_ln);
        // Linear interpolation in log-log of a non-power-law curve.
        assert!((delta / expected - 1.0).abs() < 2e-3, "x = {x}");
    }
    // Spread shrinks as x dominates, so the minimum sits at the right edge.
    assert_eq!(d.argmin(), d.x.len() - 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cost_ignores_order_and_common_scale(w in 0.5f64..2.0, scale in 0.01f64..100.0, rot in 0usize..12) {
        let series = fixture(1.0, 0.01, rational(), 10);
        let curves = rescaled(&series, w);
        let interps: Vec<_> = curves.iter().map(LogLogInterpolant::from_curve).collect();
        let grid = build_common_grid(&interps, 50, 2).unwrap();
        let base = collapse_cost(&curves, &grid).unwrap();

        let mut scaled = curves.clone();
        for c in &mut scaled {
            c.y.iter_mut().for_each(|y| *y *= scale);
        }
        prop_assert!((collapse_cost(&scaled, &grid).unwrap() - base).abs() <= 1e-9 * base.max(1e-12));

        let mut rotated = curves.clone();
        rotated.rotate_left(rot);
        let interps: Vec<_> = rotated.iter().map(LogLogInterpolant::from_curve).collect();
        let grid = build_common_grid(&interps, 50, 2).unwrap();
        prop_assert!((collapse_cost(&rotated, &grid).unwrap() - base).abs() <= 1e-9 * base.max(1e-12));
    }

    #[test]
    fn crossing_spread_is_scale_free(scale in 1e-3f64..1e3) {
        let series: Vec<_> = fixture(0.9, 0.01, rational(), 10).into_iter().filter(|s| s.label.field == 0.02).collect();
        let curves = rescaled(&series, 0.9);
        let base = crossing_spread(&curves, 30).unwrap();
        let mut scaled = curves.clone();
        for c in &mut scaled {
            c.y.iter_mut().for_each(|y| *y *= scale);
        }
        let other = crossing_spread(&scaled, 30).unwrap();
        for (a, b) in base.delta.iter().zip(&other.delta) {
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-12));
        }
        prop_assert!(base.delta.iter().all(|&d| d >= 0.0));
        prop_assert_eq!(base.x_min, base.x[base.argmin()]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    // Data built on x' = ĥ t̂^{c w*} collapse at c·w*; composing F with a power
    // of its argument does not move the optimum.
    #[test]
    fn reparameterized_variable_rescales_the_exponent(c in 0.6f64..1.8, p in 0.5f64..2.0) {
        let base = 1.0;
        let series = fixture(c * base, 0.0, rational(), 30);
        let r = estimate_w(&series, &constants(), &AnalysisParams::default(), ExecMode::available()).unwrap();
        prop_assert!((r.w_rep - c * base).abs() < 1e-2, "c = {}, w_rep = {}", c, r.w_rep);

        let f = ScalingFunction::Sigmoid { floor: 0.05, ceiling: 5.0, scale: 1.0, power: 2.0 * p };
        let series = fixture(base, 0.0, f, 30);
        let r = estimate_w(&series, &constants(), &AnalysisParams::default(), ExecMode::available()).unwrap();
        prop_assert!((r.w_rep - base).abs() < 1e-2, "p = {}, w_rep = {}", p, r.w_rep);
    }
}
