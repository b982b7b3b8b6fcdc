use proptest::prelude::*;
use wavedeconv::filters::{
    calibrate_c_alpha, check_conditions, compute_level_stats, gamma_filter, identity_filter,
    sampler_ks_distance, ConditionConfig, FilterSource, FixedGamma, IdentitySource,
};
use wavedeconv::rng::seeded_rng;
use wavedeconv::{Error, FilterRealization, RandomFilterSpec};

#[test]
fn gamma_coefficients_closed_form() {
    let f = gamma_filter(2.5, 40.0, 512).unwrap();
    for l in [-256i64, -17, -1, 0, 1, 3, 100, 255] {
        let w = 2.0 * std::f64::consts::PI * l as f64 / 40.0;
        let want = (1.0 + w * w).powf(-2.5 / 2.0);
        let got = f.coeff(l).norm();
        assert!((got - want).abs() <= 1e-13 * want.max(1e-300), "l = {l}");
    }
    assert_eq!(f.coeff(0).re, 1.0);
    assert_eq!(f.lambda(), Some(40.0));
}

#[test]
fn periodized_density_matches_direct_sum() {
    // Y(t) = λ^ν/Γ(ν) Σ_m (t+m)^{ν−1} e^{−λ(t+m)}; Γ(3) = 2.
    let (nu, lambda, n) = (3.0, 50.0, 4096);
    let f = gamma_filter(nu, lambda, n).unwrap();
    let samples = f.samples();
    let peak = samples.iter().cloned().fold(0.0, f64::max);
    for i in (0..n).step_by(37) {
        let t = i as f64 / n as f64;
        let direct: f64 = (0..20)
            .map(|m| {
                let x = t + m as f64;
                x * x * (-lambda * x).exp()
            })
            .sum::<f64>()
            * lambda.powi(3)
            / 2.0;
        assert!((samples[i] - direct).abs() < 1e-3 * peak, "t = {t}: {} vs {direct}", samples[i]);
    }
    // unit mass
    let mass: f64 = samples.iter().sum::<f64>() / n as f64;
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn level_stats_by_direct_sums() {
    let f = gamma_filter(1.5, 20.0, 1024).unwrap();
    let (u, l) = compute_level_stats(f.y_hat(), 8).unwrap();
    for j in 0..=8usize {
        let m = 1usize << j;
        let uu: f64 = (0..2 * m).map(|q| f.coeff(q as i64).norm_sqr().recip()).sum::<f64>() / m as f64;
        let ll: f64 = (m..2 * m).map(|q| f.coeff(q as i64).norm_sqr()).sum::<f64>() / m as f64;
        assert!((u[j] - uu).abs() <= 1e-10 * uu);
        assert!((l[j] - ll).abs() <= 1e-12 * ll);
    }
    assert_eq!(f.u_stats(), &u[..]);
}

#[test]
fn identity_filter_stats() {
    let f = identity_filter(256).unwrap();
    assert!(f.u_stats().iter().all(|&u| u == 2.0));
    assert!(f.l_stats().iter().all(|&l| l == 1.0));
    assert_eq!(f.lambda(), None);
}

#[test]
fn u_grows_like_two_to_the_two_nu_j() {
    let nu = 2.0;
    let f = gamma_filter(nu, 150.0, 1 << 14).unwrap();
    let r: Vec<f64> = (6..=12)
        .map(|j| f.u(j).unwrap() / 2f64.powf(2.0 * nu * j as f64))
        .collect();
    let hi = r.iter().cloned().fold(0.0, f64::max);
    let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 1.5, "{r:?}");
}

#[test]
fn calibration_gives_mean_150() {
    for alpha in [0.5, 0.8, 1.0, 2.0, 3.0] {
        let c = calibrate_c_alpha(alpha, 150.0).unwrap();
        let spec = RandomFilterSpec::new(1.0, alpha, 150.0).unwrap();
        assert_eq!(spec.c_alpha(), c);
        // E λ = ∫ (1 − F) over the bounded support, by midpoint rule
        let end = spec.support_end();
        let m = 400_000;
        let h = end / m as f64;
        let mean: f64 = (0..m).map(|i| 1.0 - spec.cdf((i as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((mean / 150.0 - 1.0).abs() < 1e-6, "alpha {alpha}: {mean}");
    }
}

#[test]
fn sampler_mean_and_ks() {
    let mut rng = seeded_rng(21);
    for alpha in [0.5, 1.0, 2.0] {
        let spec = RandomFilterSpec::with_default_mean(1.0, alpha).unwrap();
        let ks = sampler_ks_distance(&spec, 20_000, &mut rng);
        assert!(ks < 0.015, "alpha {alpha}: KS {ks}");
        let mean: f64 = (0..20_000).map(|_| spec.sample_lambda(&mut rng)).sum::<f64>() / 20_000.0;
        assert!((mean / 150.0 - 1.0).abs() < 0.02, "alpha {alpha}: {mean}");
    }
}

#[test]
fn drawn_filters_record_their_scale() {
    let spec = RandomFilterSpec::new(2.0, 1.0, 150.0).unwrap();
    let mut rng = seeded_rng(4);
    let f = spec.realize(256, &mut rng).unwrap();
    let lambda = f.lambda().unwrap();
    assert_eq!(f, gamma_filter(2.0, lambda, 256).unwrap());
    assert!(lambda > 0.0 && lambda <= spec.support_end());
    assert_eq!(spec.nominal_nu(), 2.0);
    assert_eq!(spec.nominal_alpha(), Some(1.0));
}

#[test]
fn invalid_specs() {
    assert!(RandomFilterSpec::new(0.0, 1.0, 150.0).is_err());
    assert!(RandomFilterSpec::new(f64::INFINITY, 1.0, 150.0).is_err());
    assert!(RandomFilterSpec::new(1.0, 0.0, 150.0).is_err());
    assert!(RandomFilterSpec::new(1.0, 1.0, -3.0).is_err());
    assert!(gamma_filter(1.0, 0.0, 256).is_err());
    assert!(gamma_filter(1.0, 10.0, 100).is_err());
}

#[test]
fn json_round_trip_and_tamper_detection() {
    let f = gamma_filter(1.0, 33.0, 128).unwrap();
    let text = serde_json::to_string(&f).unwrap();
    let back: FilterRealization = serde_json::from_str(&text).unwrap();
    assert_eq!(back, f);
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["u_stats"][2] = serde_json::json!(1.0);
    assert!(serde_json::from_value::<FilterRealization>(v).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["y_hat"][0] = serde_json::json!([0.5, 0.0]);
    assert!(serde_json::from_value::<FilterRealization>(v).is_err());
}

#[test]
fn conditions_hold_for_gamma_laws() {
    let mut rng = seeded_rng(9);
    let spec = RandomFilterSpec::with_default_mean(1.0, 1.0).unwrap();
    let r = check_conditions(&spec, 10_000, 10, &ConditionConfig::default(), &mut rng).unwrap();
    assert!(r.c_low_pass, "slope {}", r.c_low_slope);
    assert_eq!(r.tail_expected, Some(1.0));
    let g = r.tail_exponent.unwrap();
    assert!((g - 1.0).abs() < 0.25, "tail exponent {g}");
    assert!(r.passed());
}

#[test]
fn conditions_for_deterministic_sources() {
    let mut rng = seeded_rng(1);
    let r = check_conditions(&IdentitySource, 100, 6, &ConditionConfig::default(), &mut rng).unwrap();
    assert_eq!(r.c_low_slope, 0.0);
    assert!(r.c_low_pass && r.c_up_pass.is_none() && r.passed());
    let r = check_conditions(
        &FixedGamma { nu: 2.0, lambda: 150.0 },
        100,
        10,
        &ConditionConfig::default(),
        &mut rng,
    )
    .unwrap();
    assert!((r.c_low_slope + 4.0).abs() < 0.5);
    assert!(r.tail_exponent.is_none());
}

#[test]
fn conditions_reject_small_runs() {
    let mut rng = seeded_rng(1);
    let spec = RandomFilterSpec::with_default_mean(1.0, 1.0).unwrap();
    let err = check_conditions(&spec, 99, 8, &ConditionConfig::default(), &mut rng).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modulus_decreases_in_frequency(nu in 0.1f64..10.0, lambda in 1.0f64..500.0) {
        let f = gamma_filter(nu, lambda, 256).unwrap();
        for l in 1..128i64 {
            prop_assert!(f.coeff(l + 1).norm() < f.coeff(l).norm());
            prop_assert!((f.coeff(-l) - f.coeff(l).conj()).norm() == 0.0);
        }
    }

    #[test]
    fn modulus_increases_with_scale(nu in 0.1f64..10.0, lambda in 1.0f64..400.0, l in 1i64..128) {
        let a = gamma_filter(nu, lambda, 256).unwrap();
        let b = gamma_filter(nu, lambda * 1.25, 256).unwrap();
        prop_assert!(b.coeff(l).norm() > a.coeff(l).norm());
    }

    #[test]
    fn quantile_inverts_cdf(alpha in 0.3f64..3.0, u in 0.001f64..0.999) {
        let spec = RandomFilterSpec::new(1.0, alpha, 150.0).unwrap();
        let t = spec.quantile(u);
        prop_assert!((spec.cdf(t) - u).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_a_distribution(alpha in 0.3f64..3.0, a in 0.0f64..400.0, b in 0.0f64..400.0) {
        let spec = RandomFilterSpec::new(1.0, alpha, 150.0).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(spec.cdf(lo) <= spec.cdf(hi));
        prop_assert!((0.0..=1.0).contains(&spec.cdf(lo)));
        prop_assert_eq!(spec.cdf(spec.support_end() * 1.0001), 1.0);
        prop_assert_eq!(spec.cdf(0.0), 0.0);
    }

    #[test]
    fn lower_moment_stats_bounded_by_one(nu in 0.1f64..6.0, lambda in 1.0f64..300.0) {
        let f = gamma_filter(nu, lambda, 512).unwrap();
        for (&l, &u) in f.l_stats().iter().zip(f.u_stats()) {
            prop_assert!(l > 0.0 && l <= 1.0);
            prop_assert!(u >= 2.0);
        }
    }
}
