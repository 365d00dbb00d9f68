use blochlab::applications::{hyperbolic_ratio, RadialMeasure, SelfMap};
use blochlab::means::{bloch_norm_estimate, hardy_bloch_norm_estimate, integral_mean, MeanOptions, RadialGrid};
use blochlab::stochastic::{MomentMode, RademacherFamily};
use blochlab::verify::{verify_lemma31, verify_phi_doubling};
use blochlab::{Complex64, ExponentRule, GapSeries, Gauge, Holomorphic, Polynomial};
use proptest::prelude::*;

fn gauge() -> impl Strategy<Value = Gauge> {
    prop_oneof![
        Just(Gauge::constant()),
        (0.05f64..0.95).prop_map(|a| Gauge::power(a).unwrap()),
        (-0.95f64..0.0).prop_map(|b| Gauge::log(b).unwrap()),
    ]
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)
        .prop_map(|c| Polynomial::new(c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_means_grow_with_radius(f in polynomial(), p in prop_oneof![Just(1.0), Just(2.0), Just(3.0)]) {
        let opts = MeanOptions::default();
        let radii = [0.1, 0.3, 0.5, 0.7, 0.9, 0.97];
        let means: Vec<f64> = radii.iter().map(|&r| integral_mean(&f, p, r, &opts).unwrap().value).collect();
        for w in means.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-9), "{means:?}");
        }
    }

    #[test]
    fn gap_series_mean_square_is_orthogonal(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..14),
        r in 0.05f64..0.999,
        minus_one in any::<bool>(),
    ) {
        let rule = if minus_one { ExponentRule::PowersOfTwoMinusOne } else { ExponentRule::PowersOfTwo };
        let f = GapSeries::new(coeffs.clone(), rule).unwrap();
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * a * r.powf(2.0 * rule.exponent(k) as f64))
            .sum();
        let m = integral_mean(&f, 2.0, r, &MeanOptions::default()).unwrap();
        prop_assert!((m.value * m.value - exact).abs() <= 1e-8 * exact.max(1e-300));
    }

    #[test]
    fn hardy_bloch_norm_is_below_bloch_norm(f in polynomial(), g in gauge()) {
        let grid = RadialGrid::new(1, 10, 64).unwrap();
        let b = bloch_norm_estimate(&f, &g, &grid).value;
        let hb = hardy_bloch_norm_estimate(&f, &g, 2.0, &grid, &MeanOptions::default()).unwrap().value;
        prop_assert!(hb <= b * (1.0 + 1e-9) + 1e-12, "{hb} > {b}");
    }

    #[test]
    fn sign_average_is_flip_invariant_and_dominates(
        coeffs in prop::collection::vec(0.1f64..2.0, 1..9),
        flips in prop::collection::vec(any::<bool>(), 9),
        r in 0.5f64..0.99,
        theta in 0.0f64..6.28,
        p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0)],
    ) {
        let base = GapSeries::new(coeffs.clone(), ExponentRule::PowersOfTwoMinusOne).unwrap();
        let signs: Vec<f64> = flips.iter().take(coeffs.len()).map(|&b| if b { -1.0 } else { 1.0 }).collect();
        let z = Complex64::from_polar(r, theta);
        let a = RademacherFamily::new(base.clone()).unwrap();
        let b = RademacherFamily::new(base.with_signs(&signs)).unwrap();
        let ma = a.moment_integral(z, p, MomentMode::Exact).unwrap().value;
        let mb = b.moment_integral(z, p, MomentMode::Exact).unwrap().value;
        prop_assert!((ma - mb).abs() <= 1e-12 * ma);
        let s = a.quadratic_sum(z).unwrap();
        prop_assert!(ma >= s.powf(p) * (1.0 - 1e-12));
    }

    #[test]
    fn phi_doubles_at_most_by_four(g in gauge(), x in 1e-12f64..(1.0 / 3.0)) {
        let report = verify_phi_doubling(&g, &[1.0 - x]).unwrap();
        prop_assert!(report.verdict.holds());
        prop_assert!(report.extremal_constant >= 1.0);
    }

    #[test]
    fn dsl_round_trips(g in gauge(), beta in -3.0f64..3.0, r0 in 0.0f64..0.99, c in 0.01f64..5.0) {
        let text = g.to_string();
        prop_assert_eq!(text.parse::<Gauge>().unwrap(), g);
        let m = RadialMeasure::mixture(vec![
            RadialMeasure::power(beta).unwrap(),
            RadialMeasure::atom(r0, c).unwrap(),
        ]).unwrap();
        prop_assert_eq!(m.to_string().parse::<RadialMeasure>().unwrap(), m);
        let map = SelfMap::Atomic(c);
        prop_assert_eq!(map.to_string().parse::<SelfMap>().unwrap(), map);
    }

    #[test]
    fn identity_hyperbolic_ratio_is_one(r in 0.0f64..0.999_999) {
        let v = hyperbolic_ratio(&SelfMap::identity(), &Gauge::constant(), Complex64::new(r, 0.0)).unwrap();
        prop_assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_series_derivative_matches_difference_quotient(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..8),
        r in 0.1f64..0.9,
        theta in 0.0f64..6.28,
    ) {
        let f = GapSeries::new(coeffs, ExponentRule::PowersOfTwo).unwrap();
        let z = Complex64::from_polar(r, theta);
        let h = 1e-6;
        let numeric = z * (f.value(z + h) - f.value(z - h)) / (2.0 * h);
        let exact = f.radial_derivative(z);
        prop_assert!((numeric - exact).norm() <= 1e-6 * exact.norm().max(1.0));
    }
}

#[test]
fn lemma31_minimum_is_nonincreasing_in_depth() {
    for g in Gauge::builtins() {
        let mins: Vec<f64> = (4..=24)
            .step_by(4)
            .map(|m| verify_lemma31(&g, m).unwrap().extremal_constant)
            .collect();
        assert!(mins.windows(2).all(|w| w[1] <= w[0]), "{g}: {mins:?}");
        assert!(mins.iter().all(|&m| m > 0.0));
    }
}
