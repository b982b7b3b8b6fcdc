use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use wavedeconv::forward_model::make_test_signal;
use wavedeconv::meyer::{meyer_aux, mother_wavelet_ft, mother_wavelet_profile, scaling_ft, support_set};
use wavedeconv::rng::seeded_rng;
use wavedeconv::{MeyerBasis, Spectrum, TestSignal, WaveletCoeffs};

/// Σ_l a_l conj(b_l) over the full spectrum, i.e. the L²[0,1] inner product.
fn inner(a: &Spectrum, b: &Spectrum) -> f64 {
    let (fa, fb) = (a.to_full(), b.to_full());
    fa.iter().zip(&fb).map(|(x, y)| (x * y.conj()).re).sum()
}

fn spike(basis: &MeyerBasis, j: i32, k: usize) -> Spectrum {
    let mut c = WaveletCoeffs::zeros(basis.max_level());
    c.set(j, k, 1.0);
    basis.inverse(&c).unwrap()
}

fn random_band_limited(n: usize, band: usize, seed: u64) -> Spectrum {
    let mut rng = seeded_rng(seed);
    let mut half = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
    half[0] = Complex64::new(rng.sample(StandardNormal), 0.0);
    for c in half.iter_mut().take(band + 1).skip(1) {
        *c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    Spectrum::from_half(n, half).unwrap()
}

#[test]
fn aux_polynomial_shape() {
    assert_eq!(meyer_aux(-1.0), 0.0);
    assert_eq!(meyer_aux(0.0), 0.0);
    assert_eq!(meyer_aux(1.0), 1.0);
    assert_eq!(meyer_aux(3.0), 1.0);
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        assert!((meyer_aux(x) + meyer_aux(1.0 - x) - 1.0).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn gram_matrix_is_identity() {
    // n = 64: 32 basis functions, full Gram matrix from the synthesized spectra.
    let basis = MeyerBasis::new(64).unwrap();
    let sites: Vec<(i32, usize)> = WaveletCoeffs::zeros(basis.max_level())
        .iter()
        .map(|(j, k, _)| (j, k))
        .collect();
    assert_eq!(sites.len(), 32);
    let spectra: Vec<Spectrum> = sites.iter().map(|&(j, k)| spike(&basis, j, k)).collect();
    for (a, sa) in spectra.iter().enumerate() {
        for (b, sb) in spectra.iter().enumerate() {
            let g = inner(sa, sb);
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((g - want).abs() < 1e-12, "<{:?},{:?}> = {g}", sites[a], sites[b]);
        }
    }
}

#[test]
fn analysis_of_a_single_wavelet() {
    let basis = MeyerBasis::new(512).unwrap();
    let c = basis.forward(&spike(&basis, 3, 2)).unwrap();
    for (j, k, v) in c.iter() {
        let want = if (j, k) == (3, 2) { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-12, "beta[{j},{k}] = {v}");
    }
}

#[test]
fn wavelet_norm_by_quadrature() {
    // ‖ψ‖² = (1/2π) ∫ |ψ̂|², support 2π/3 ≤ |w| ≤ 8π/3
    let (a, b) = (2.0 * PI / 3.0, 8.0 * PI / 3.0);
    let m = 200_000;
    let h = (b - a) / m as f64;
    let s: f64 = (0..m)
        .map(|i| mother_wavelet_ft(a + (i as f64 + 0.5) * h).norm_sqr())
        .sum::<f64>()
        * h;
    assert!((2.0 * s / (2.0 * PI) - 1.0).abs() < 1e-9);
}

#[test]
fn fourier_partition_of_unity() {
    // |φ̂(w)|² + Σ_{j≥0} |ψ̂(2^{−j} w)|² = 1
    for i in 0..2000 {
        let w = i as f64 * 0.05;
        let mut s = scaling_ft(w).powi(2);
        for j in 0..30 {
            s += mother_wavelet_profile(w / 2f64.powi(j)).powi(2);
        }
        assert!((s - 1.0).abs() < 1e-12, "w = {w}: {s}");
    }
}

#[test]
fn wavelet_profile_support() {
    assert_eq!(mother_wavelet_profile(2.0 * PI / 3.0 - 1e-9), 0.0);
    assert_eq!(mother_wavelet_profile(8.0 * PI / 3.0 + 1e-9), 0.0);
    assert!((mother_wavelet_profile(4.0 * PI / 3.0) - 1.0).abs() < 1e-12);
    assert_eq!(scaling_ft(4.0 * PI / 3.0 + 1e-9), 0.0);
    assert_eq!(scaling_ft(0.5), 1.0);
}

#[test]
fn low_frequencies_absent_from_level_five() {
    let basis = MeyerBasis::new(1024).unwrap();
    for (l, c) in basis.wavelet_fourier_coeffs(5, 0).unwrap() {
        if l.abs() < 8 {
            assert!(c.norm() < 1e-15, "Psi_5,0,{l} = {c}");
        }
    }
    for l in support_set(5) {
        assert!((11..=42).contains(&l.abs()), "support_set(5) holds {l}");
    }
}

#[test]
fn translation_is_modulation() {
    let basis = MeyerBasis::new(1024).unwrap();
    for j in [1, 2, 5, 7] {
        let base = basis.wavelet_fourier_coeffs(j, 0).unwrap();
        let m = 1usize << j;
        for k in [1, m / 2, m - 1] {
            let shifted = basis.wavelet_fourier_coeffs(j, k).unwrap();
            assert_eq!(shifted.len(), base.len());
            for (&(l, a), &(l2, b)) in shifted.iter().zip(&base) {
                assert_eq!(l, l2);
                let phase = Complex64::from_polar(1.0, -2.0 * PI * l as f64 * k as f64 / m as f64);
                assert!((a - phase * b).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn wavelets_have_uniform_sup_norm_scaling() {
    // sup |Ψ_{j,k}| ≍ 2^{j/2}
    let basis = MeyerBasis::new(4096).unwrap();
    let ratios: Vec<f64> = (1..=8)
        .map(|j| {
            let s = spike(&basis, j, 0).to_samples();
            s.iter().fold(0.0f64, |m, v| m.max(v.abs())) / 2f64.powf(j as f64 / 2.0)
        })
        .collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    // coarse levels wrap around the torus, so only a bracket is expected
    assert!(hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn single_level_norm_equivalence() {
    // ‖Σ_k c_k Ψ_{j,k}‖_ρ ≍ 2^{j(1/2−1/ρ)} ‖c‖_ρ with a j-independent bracket.
    const K: f64 = 3.0;
    let n = 4096;
    let basis = MeyerBasis::new(n).unwrap();
    let mut rng = seeded_rng(77);
    for rho in [1.0, 2.0, 4.0] {
        for j in 1..=8 {
            let mut c = WaveletCoeffs::zeros(basis.max_level());
            for v in c.level_mut(j) {
                *v = rng.sample(StandardNormal);
            }
            let f = basis.inverse_signal(&c).unwrap();
            let norm_f = (f.samples().iter().map(|v| v.abs().powf(rho)).sum::<f64>() / n as f64)
                .powf(1.0 / rho);
            let norm_c = c.level(j).iter().map(|v| v.abs().powf(rho)).sum::<f64>().powf(1.0 / rho);
            let r = norm_f / (2f64.powf(j as f64 * (0.5 - 1.0 / rho)) * norm_c);
            assert!((1.0 / K..=K).contains(&r), "rho {rho}, j {j}: ratio {r}");
        }
    }
}

#[test]
fn low_passed_doppler_round_trip() {
    let n = 2048;
    let basis = MeyerBasis::new(n).unwrap();
    let d = make_test_signal(TestSignal::Doppler, n).unwrap();
    let band = (2usize << basis.max_level()) / 3;
    let half: Vec<Complex64> = d
        .spectrum()
        .half()
        .iter()
        .enumerate()
        .map(|(l, &c)| if l <= band { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    let f = Spectrum::from_half(n, half).unwrap();
    let back = basis.inverse(&basis.forward(&f).unwrap()).unwrap();
    let err = f
        .to_samples()
        .iter()
        .zip(back.to_samples())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-10, "{err}");
}

#[test]
fn scaling_space_equals_coarse_wavelet_levels() {
    let n = 1024;
    let basis = MeyerBasis::new(n).unwrap();
    let f = make_test_signal(TestSignal::Bumps, n).unwrap();
    let w = basis.forward(f.spectrum()).unwrap();
    for j in 0..=basis.max_level() + 1 {
        let alpha = basis.scaling_forward(f.spectrum(), j).unwrap();
        let via_scaling = basis.scaling_inverse(&alpha, j).unwrap();
        let via_wavelets = basis.inverse(&w.truncated(j - 1)).unwrap();
        let diff: f64 = via_scaling
            .to_samples()
            .iter()
            .zip(via_wavelets.to_samples())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-10, "level {j}: {diff}");
    }
}

#[test]
fn scaling_functions_are_orthonormal() {
    let basis = MeyerBasis::new(256).unwrap();
    for j in [0, 2, 4] {
        let m = 1usize << j;
        let spectra: Vec<Spectrum> = (0..m)
            .map(|k| {
                let mut a = vec![0.0; m];
                a[k] = 1.0;
                basis.scaling_inverse(&a, j).unwrap()
            })
            .collect();
        for a in 0..m {
            for b in 0..m {
                let g = inner(&spectra[a], &spectra[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "j {j}: <{a},{b}> = {g}");
            }
        }
    }
}

#[test]
fn rejects_bad_grids_and_levels() {
    assert!(MeyerBasis::new(1000).is_err());
    assert!(MeyerBasis::new(2).is_err());
    let basis = MeyerBasis::new(64).unwrap();
    assert!(basis.wavelet_fourier_coeffs(5, 0).is_err());
    assert!(basis.wavelet_fourier_coeffs(2, 4).is_err());
    assert!(basis.forward(&Spectrum::zeros(128).unwrap()).is_err());
}

#[test]
fn coefficient_json_round_trip_and_validation() {
    let basis = MeyerBasis::new(256).unwrap();
    let f = make_test_signal(TestSignal::HeaviSine, 256).unwrap();
    let c = basis.forward(f.spectrum()).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    let back: WaveletCoeffs = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
    // level sizes must be 1, 1, 2, 4, ...
    assert!(serde_json::from_str::<WaveletCoeffs>(r#"{"max_level":1,"levels":[[0.0],[1.0],[1.0]]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_and_round_trip(log_n in 4u32..=11, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let basis = MeyerBasis::new(n).unwrap();
        let band = (2usize << basis.max_level()) / 3;
        let f = random_band_limited(n, band, seed);
        let c = basis.forward(&f).unwrap();
        prop_assert!((c.energy() - f.energy()).abs() <= 1e-10 * f.energy());
        let back = basis.inverse(&c).unwrap();
        for (a, b) in f.half().iter().zip(back.half()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_is_isometric_on_coefficients(log_n in 4u32..=10, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let basis = MeyerBasis::new(n).unwrap();
        let mut rng = seeded_rng(seed);
        let mut c = WaveletCoeffs::zeros(basis.max_level());
        for j in -1..=basis.max_level() {
            for v in c.level_mut(j) {
                *v = rng.sample(StandardNormal);
            }
        }
        let f = basis.inverse(&c).unwrap();
        prop_assert!((f.energy() - c.energy()).abs() <= 1e-10 * c.energy());
        let again = basis.forward(&f).unwrap();
        for ((_, _, a), (_, _, b)) in again.iter().zip(c.iter()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn forward_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let n = 256;
        let basis = MeyerBasis::new(n).unwrap();
        let f = random_band_limited(n, 100, seed);
        let g = random_band_limited(n, 100, seed ^ 1);
        let h: Vec<Complex64> = f.half().iter().zip(g.half()).map(|(x, y)| x * a + y).collect();
        let h = Spectrum::from_half(n, h).unwrap();
        let (cf, cg, ch) = (basis.forward(&f).unwrap(), basis.forward(&g).unwrap(), basis.forward(&h).unwrap());
        for (((_, _, x), (_, _, y)), (_, _, z)) in cf.iter().zip(cg.iter()).zip(ch.iter()) {
            prop_assert!((a * x + y - z).abs() < 1e-10);
        }
    }
}
