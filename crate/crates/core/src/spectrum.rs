//! Half-spectrum storage for real 1-periodic signals.
//!
//! A real signal sampled at `t_i = i/n` is represented by its Fourier
//! coefficients `c_l = (1/n) Σ_i x_i e^{-2πi l t_i}` for `l = 0..=n/2`.
//! Negative frequencies follow from `c_{-l} = conj(c_l)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// Tolerance on the imaginary part of the DC coefficient of a real signal.
pub const HERMITIAN_TOL: f64 = 1e-10;

type PlanKey = (usize, bool);

fn plans() -> &'static Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

/// Cached FFT plan. `inverse` selects the `e^{+2πi}` kernel. Both are unnormalized.
pub(crate) fn fft_plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut guard = plans().lock().expect("fft planner poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n >= 2 && n.is_power_of_two()
}

/// Fourier coefficients `c_0..=c_{n/2}` of a real signal on an `n`-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    half: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(n: usize) -> Result<Self> {
        if !is_power_of_two(n) {
            return validation(format!("grid size {n} is not a power of two >= 2"));
        }
        Ok(Self {
            n,
            half: vec![Complex64::new(0.0, 0.0); n / 2 + 1],
        })
    }

    /// Builds a spectrum from `n/2 + 1` non-negative frequency coefficients.
    pub fn from_half(n: usize, half: Vec<Complex64>) -> Result<Self> {
        if !is_power_of_two(n) {
            return validation(format!("grid size {n} is not a power of two >= 2"));
        }
        if half.len() != n / 2 + 1 {
            return validation(format!(
                "expected {} coefficients for n = {n}, got {}",
                n / 2 + 1,
                half.len()
            ));
        }
        if half.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return validation("non-finite Fourier coefficient");
        }
        if half[0].im.abs() > HERMITIAN_TOL * (1.0 + half[0].re.abs()) {
            return validation(format!(
                "DC coefficient has imaginary part {} (signal is not real)",
                half[0].im
            ));
        }
        Ok(Self { n, half })
    }

    /// Builds a spectrum from a full coefficient vector in FFT order
    /// (`l = 0, 1, …, n/2−1, −n/2, …, −1`), checking Hermitian symmetry.
    pub fn from_full(full: &[Complex64]) -> Result<Self> {
        let n = full.len();
        if !is_power_of_two(n) {
            return validation(format!("length {n} is not a power of two >= 2"));
        }
        let scale = full.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        for l in 1..n / 2 {
            let diff = (full[l] - full[n - l].conj()).norm();
            if diff > HERMITIAN_TOL * scale {
                return validation(format!(
                    "coefficients are not Hermitian at l = {l} (mismatch {diff:e})"
                ));
            }
        }
        if full[0].im.abs() > HERMITIAN_TOL * scale || full[n / 2].im.abs() > HERMITIAN_TOL * scale
        {
            return validation("DC or Nyquist coefficient is not real");
        }
        Self::from_half(n, full[..=n / 2].to_vec())
    }

    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if !is_power_of_two(n) {
            return validation(format!("sample count {n} is not a power of two >= 2"));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_plan(n, false).process(&mut buf);
        let inv_n = 1.0 / n as f64;
        let mut half: Vec<Complex64> = buf[..=n / 2].iter().map(|c| c * inv_n).collect();
        half[0].im = 0.0;
        half[n / 2].im = 0.0;
        Ok(Self { n, half })
    }

    /// Samples on the grid `t_i = i/n`. The Nyquist coefficient contributes its real part.
    pub fn to_samples(&self) -> Vec<f64> {
        let n = self.n;
        let mut buf = self.to_full();
        buf[n / 2] = Complex64::new(self.half[n / 2].re, 0.0);
        fft_plan(n, true).process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// Full coefficient vector in FFT order.
    pub fn to_full(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut full = vec![Complex64::new(0.0, 0.0); n];
        full[..=n / 2].copy_from_slice(&self.half);
        for l in 1..n / 2 {
            full[n - l] = self.half[l].conj();
        }
        full
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> &[Complex64] {
        &self.half
    }

    pub(crate) fn half_mut(&mut self) -> &mut [Complex64] {
        &mut self.half
    }

    /// Coefficient at frequency `l`, `|l| ≤ n/2`.
    pub fn get(&self, l: i64) -> Complex64 {
        let idx = l.unsigned_abs() as usize;
        assert!(idx <= self.n / 2, "frequency {l} outside |l| <= {}", self.n / 2);
        if l >= 0 {
            self.half[idx]
        } else {
            self.half[idx].conj()
        }
    }

    /// `Σ_{l=-n/2}^{n/2-1} |c_l|²`, which equals the mean of the squared samples.
    pub fn energy(&self) -> f64 {
        let n = self.n;
        let inner: f64 = self.half[1..n / 2].iter().map(|c| c.norm_sqr()).sum();
        self.half[0].norm_sqr() + 2.0 * inner + self.half[n / 2].re.powi(2)
    }

    /// Pointwise product with another spectrum on the same grid.
    pub fn multiply(&self, other: &Spectrum) -> Result<Spectrum> {
        if self.n != other.n {
            return crate::error::domain(format!(
                "grid size mismatch: {} vs {}",
                self.n, other.n
            ));
        }
        Ok(Spectrum {
            n: self.n,
            half: self
                .half
                .iter()
                .zip(&other.half)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

/// Serialized form: `[[re, im], …]` for `l = 0..=n/2`.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub(crate) struct PairList(pub Vec<[f64; 2]>);

impl PairList {
    pub(crate) fn from_spectrum(s: &Spectrum) -> Self {
        PairList(s.half.iter().map(|c| [c.re, c.im]).collect())
    }

    pub(crate) fn into_spectrum(self, n: usize) -> Result<Spectrum> {
        Spectrum::from_half(
            n,
            self.0.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_round_trip() {
        let x: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let s = Spectrum::from_samples(&x).unwrap();
        let y = s.to_samples();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_matches_mean_square() {
        let x: Vec<f64> = (0..32).map(|i| (i as f64 * 0.7).cos() + 0.1 * i as f64).collect();
        let s = Spectrum::from_samples(&x).unwrap();
        let ms = x.iter().map(|v| v * v).sum::<f64>() / 32.0;
        assert!((s.energy() - ms).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut full = vec![Complex64::new(0.0, 0.0); 8];
        full[1] = Complex64::new(1.0, 0.5);
        full[7] = Complex64::new(1.0, 0.5);
        assert!(Spectrum::from_full(&full).is_err());
        full[7] = full[1].conj();
        assert!(Spectrum::from_full(&full).is_ok());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Spectrum::zeros(12).is_err());
        assert!(Spectrum::from_half(8, vec![Complex64::new(0.0, 0.0); 4]).is_err());
        assert!(Spectrum::from_half(8, vec![Complex64::new(0.0, 1.0); 5]).is_err());
    }

    #[test]
    fn negative_frequencies_conjugate() {
        let mut s = Spectrum::zeros(16).unwrap();
        s.half_mut()[3] = Complex64::new(0.2, -0.4);
        assert_eq!(s.get(-3), Complex64::new(0.2, 0.4));
    }
}
