//! Periodized Meyer wavelets, analysed and synthesised entirely in the Fourier domain.
//!
//! With the Fourier convention `e_l(t) = exp(2πi l t)`, the periodized wavelet
//! `Ψ_{j,k}` has coefficients
//!
//! ```text
//! Ψ_{j,k,l} = 2^{-j/2} e^{-2πi l k / 2^j} ψ̂(2π l / 2^j)
//! ```
//!
//! so a whole level is one FFT of length `2^j` after folding the frequencies of
//! `C_j` modulo `2^j`. Level `−1` is the constant function (the periodized
//! scaling function at level 0).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Result};
use crate::signal::PeriodicSignal;
use crate::spectrum::{fft_plan, is_power_of_two, Spectrum};

/// Degree-3 Meyer auxiliary polynomial `x⁴(35 − 84x + 70x² − 20x³)`, clamped to `[0, 1]`.
pub fn meyer_aux(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x.powi(4) * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x.powi(3))
    }
}

/// Real, even profile `|ψ̂(w)|` of the Meyer wavelet. Zero outside `2π/3 ≤ |w| ≤ 8π/3`.
pub fn mother_wavelet_profile(w: f64) -> f64 {
    let a = w.abs();
    if !(2.0 * PI / 3.0..=8.0 * PI / 3.0).contains(&a) {
        0.0
    } else if a <= 4.0 * PI / 3.0 {
        (PI / 2.0 * meyer_aux(3.0 * a / (2.0 * PI) - 1.0)).sin()
    } else {
        (PI / 2.0 * meyer_aux(3.0 * a / (4.0 * PI) - 1.0)).cos()
    }
}

/// Meyer mother wavelet Fourier transform `ψ̂(w) = e^{iw/2} |ψ̂(w)|`.
///
/// The half-sample phase is what makes dilates at different levels orthogonal;
/// the phase-free profile alone is not an orthonormal wavelet.
pub fn mother_wavelet_ft(w: f64) -> Complex64 {
    let m = mother_wavelet_profile(w);
    if m == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(m, w / 2.0)
    }
}

/// Meyer scaling function Fourier transform, supported on `|w| ≤ 4π/3`.
pub fn scaling_ft(w: f64) -> f64 {
    let a = w.abs();
    if a <= 2.0 * PI / 3.0 {
        1.0
    } else if a <= 4.0 * PI / 3.0 {
        (PI / 2.0 * meyer_aux(3.0 * a / (2.0 * PI) - 1.0)).cos()
    } else {
        0.0
    }
}

/// Frequencies `l` (both signs, ascending) with `ψ̂(2πl/2^j) ≠ 0`.
pub fn support_set(j: u32) -> Vec<i64> {
    let pos = positive_support(j);
    let mut out: Vec<i64> = pos.iter().rev().map(|&l| -(l as i64)).collect();
    out.extend(pos.iter().map(|&l| l as i64));
    out
}

fn positive_support(j: u32) -> Vec<usize> {
    let m = (1usize << j) as f64;
    // 2^j/3 ≤ l ≤ 2^{j+2}/3; both boundaries are never integers.
    let lo = (m / 3.0).ceil() as usize;
    let hi = (4.0 * m / 3.0).floor() as usize;
    (lo.max(1)..=hi)
        .filter(|&l| mother_wavelet_profile(2.0 * PI * l as f64 / m) != 0.0)
        .collect()
}

/// Wavelet coefficients `β_{j,k}` for `j = −1..=max_level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffs", into = "RawCoeffs")]
pub struct WaveletCoeffs {
    // index 0 holds level −1
    levels: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawCoeffs {
    max_level: i32,
    levels: Vec<Vec<f64>>,
}

impl TryFrom<RawCoeffs> for WaveletCoeffs {
    type Error = crate::Error;

    fn try_from(raw: RawCoeffs) -> Result<Self> {
        if raw.levels.len() as i64 != raw.max_level as i64 + 2 {
            return validation(format!(
                "max_level {} needs {} level vectors, got {}",
                raw.max_level,
                raw.max_level as i64 + 2,
                raw.levels.len()
            ));
        }
        WaveletCoeffs::from_levels(raw.levels)
    }
}

impl From<WaveletCoeffs> for RawCoeffs {
    fn from(c: WaveletCoeffs) -> Self {
        RawCoeffs {
            max_level: c.max_level(),
            levels: c.levels,
        }
    }
}

/// Number of translates at level `j` (`|R_{-1}| = 1`).
pub fn level_size(j: i32) -> usize {
    if j < 0 {
        1
    } else {
        1usize << j
    }
}

impl WaveletCoeffs {
    pub fn zeros(max_level: i32) -> Self {
        assert!((-1..40).contains(&max_level), "max_level out of range");
        Self {
            levels: (-1..=max_level).map(|j| vec![0.0; level_size(j)]).collect(),
        }
    }

    /// `levels[0]` is level −1, `levels[i]` is level `i − 1`.
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() || levels.len() > 40 {
            return validation("coefficient levels must cover −1..=J with J < 39");
        }
        for (i, lv) in levels.iter().enumerate() {
            let j = i as i32 - 1;
            if lv.len() != level_size(j) {
                return validation(format!(
                    "level {j} has {} coefficients, expected {}",
                    lv.len(),
                    level_size(j)
                ));
            }
            if lv.iter().any(|x| !x.is_finite()) {
                return validation(format!("non-finite coefficient at level {j}"));
            }
        }
        Ok(Self { levels })
    }

    pub fn max_level(&self) -> i32 {
        self.levels.len() as i32 - 2
    }

    pub fn level(&self, j: i32) -> &[f64] {
        &self.levels[(j + 1) as usize]
    }

    pub fn level_mut(&mut self, j: i32) -> &mut [f64] {
        &mut self.levels[(j + 1) as usize]
    }

    pub fn get(&self, j: i32, k: usize) -> f64 {
        self.level(j)[k]
    }

    pub fn set(&mut self, j: i32, k: usize, v: f64) {
        self.level_mut(j)[k] = v;
    }

    /// `(j, k, β_{j,k})` over all coefficients, coarse to fine.
    pub fn iter(&self) -> impl Iterator<Item = (i32, usize, f64)> + '_ {
        self.levels.iter().enumerate().flat_map(|(i, lv)| {
            lv.iter()
                .enumerate()
                .map(move |(k, &v)| (i as i32 - 1, k, v))
        })
    }

    pub fn energy(&self) -> f64 {
        self.iter().map(|(_, _, v)| v * v).sum()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Copy restricted to levels `≤ j_max`.
    pub fn truncated(&self, j_max: i32) -> WaveletCoeffs {
        let keep = ((j_max + 2).max(1) as usize).min(self.levels.len());
        WaveletCoeffs {
            levels: self.levels[..keep].to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
struct LevelTable {
    // positive frequencies of C_j with 2^{-j/2} ψ̂(2πl/2^j)
    entries: Vec<(usize, Complex64)>,
}

/// Periodized Meyer basis on an `n`-point grid with levels `−1..=J`.
///
/// Level-`J` wavelets reach `|l| ≤ 2^{J+2}/3`, so `J ≤ log₂ n − 2` keeps every
/// used frequency strictly below the Nyquist index `n/2`.
#[derive(Debug, Clone)]
pub struct MeyerBasis {
    n: usize,
    max_level: i32,
    tables: Vec<LevelTable>,
}

impl MeyerBasis {
    /// Basis with the finest admissible level `J = log₂ n − 2`.
    pub fn new(n: usize) -> Result<Self> {
        if !is_power_of_two(n) || n < 4 {
            return domain(format!("grid size {n} must be a power of two >= 4"));
        }
        Self::with_max_level(n, n.trailing_zeros() as i32 - 2)
    }

    pub fn with_max_level(n: usize, max_level: i32) -> Result<Self> {
        if !is_power_of_two(n) || n < 4 {
            return domain(format!("grid size {n} must be a power of two >= 4"));
        }
        let finest = n.trailing_zeros() as i32 - 2;
        if max_level < -1 || max_level > finest {
            return domain(format!(
                "max level {max_level} outside −1..={finest} for n = {n}"
            ));
        }
        let tables = (0..=max_level.max(-1))
            .map(|j| {
                let j = j as u32;
                let m = (1usize << j) as f64;
                let norm = m.sqrt().recip();
                LevelTable {
                    entries: positive_support(j)
                        .into_iter()
                        .map(|l| (l, norm * mother_wavelet_ft(2.0 * PI * l as f64 / m)))
                        .collect(),
                }
            })
            .collect();
        Ok(Self {
            n,
            max_level,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_level(&self) -> i32 {
        self.max_level
    }

    fn check_level(&self, j: i32) -> Result<()> {
        if j < -1 || j > self.max_level {
            return domain(format!("level {j} outside −1..={}", self.max_level));
        }
        Ok(())
    }

    fn check_spectrum(&self, f: &Spectrum) -> Result<()> {
        if f.n() != self.n {
            return domain(format!(
                "spectrum grid {} does not match basis grid {}",
                f.n(),
                self.n
            ));
        }
        Ok(())
    }

    /// Nonzero Fourier coefficients `(l, Ψ_{j,k,l})`, ascending in `l`.
    pub fn wavelet_fourier_coeffs(&self, j: i32, k: usize) -> Result<Vec<(i64, Complex64)>> {
        self.check_level(j)?;
        if k >= level_size(j) {
            return domain(format!("translate {k} outside R_{j}"));
        }
        if j < 0 {
            return Ok(vec![(0, Complex64::new(1.0, 0.0))]);
        }
        let m = 1usize << j;
        let table = &self.tables[j as usize];
        let phase = |l: i64| {
            let r = (l.rem_euclid(m as i64) as usize * k) % m;
            Complex64::from_polar(1.0, -2.0 * PI * r as f64 / m as f64)
        };
        let mut out: Vec<(i64, Complex64)> = table
            .entries
            .iter()
            .rev()
            .map(|&(l, p)| (-(l as i64), phase(-(l as i64)) * p.conj()))
            .collect();
        out.extend(table.entries.iter().map(|&(l, p)| (l as i64, phase(l as i64) * p)));
        Ok(out)
    }

    /// Nonzero Fourier coefficients of the periodized scaling function `Φ_{j,k}`.
    pub fn scaling_fourier_coeffs(&self, j: i32, k: usize) -> Result<Vec<(i64, Complex64)>> {
        self.check_scaling_level(j)?;
        if k >= level_size(j) {
            return domain(format!("translate {k} outside 0..2^{j}"));
        }
        let m = 1usize << j;
        let (dc, table) = scaling_table(j as u32);
        let phase = |l: i64| {
            let r = (l.rem_euclid(m as i64) as usize * k) % m;
            Complex64::from_polar(1.0, -2.0 * PI * r as f64 / m as f64)
        };
        let mut out: Vec<(i64, Complex64)> = table
            .iter()
            .rev()
            .map(|&(l, p)| (-(l as i64), phase(-(l as i64)) * p))
            .collect();
        out.push((0, Complex64::new(dc, 0.0)));
        out.extend(table.iter().map(|&(l, p)| (l as i64, phase(l as i64) * p)));
        Ok(out)
    }

    fn check_scaling_level(&self, j: i32) -> Result<()> {
        if j < 0 || j > self.max_level + 1 {
            return domain(format!(
                "scaling level {j} outside 0..={}",
                self.max_level + 1
            ));
        }
        Ok(())
    }

    /// All coefficients up to the basis' finest level.
    pub fn forward(&self, f: &Spectrum) -> Result<WaveletCoeffs> {
        self.forward_to(f, self.max_level)
    }

    /// Coefficients for levels `−1..=j_max`.
    pub fn forward_to(&self, f: &Spectrum, j_max: i32) -> Result<WaveletCoeffs> {
        self.check_spectrum(f)?;
        self.check_level(j_max)?;
        let mut out = WaveletCoeffs::zeros(j_max);
        out.level_mut(-1)[0] = f.get(0).re;
        for j in 0..=j_max {
            let table = &self.tables[j as usize];
            let beta = analyze_level(f, &table.entries, None, 1usize << j);
            out.level_mut(j).copy_from_slice(&beta);
        }
        Ok(out)
    }

    /// Synthesises the Fourier coefficients of `Σ β_{j,k} Ψ_{j,k}`.
    pub fn inverse(&self, coeffs: &WaveletCoeffs) -> Result<Spectrum> {
        if coeffs.max_level() > self.max_level {
            return domain(format!(
                "coefficients reach level {} but the basis stops at {}",
                coeffs.max_level(),
                self.max_level
            ));
        }
        let mut f = Spectrum::zeros(self.n)?;
        f.half_mut()[0] += coeffs.level(-1)[0];
        for j in 0..=coeffs.max_level() {
            let table = &self.tables[j as usize];
            synthesize_level(&mut f, coeffs.level(j), &table.entries, None);
        }
        Ok(f)
    }

    pub fn inverse_signal(&self, coeffs: &WaveletCoeffs) -> Result<PeriodicSignal> {
        Ok(PeriodicSignal::from_spectrum(self.inverse(coeffs)?))
    }

    /// Scaling coefficients `α_{j,k} = ⟨f, Φ_{j,k}⟩`, `k ∈ 0..2^j`.
    pub fn scaling_forward(&self, f: &Spectrum, j: i32) -> Result<Vec<f64>> {
        self.check_spectrum(f)?;
        self.check_scaling_level(j)?;
        let (dc, table) = scaling_table(j as u32);
        Ok(analyze_level(f, &table, Some(dc), 1usize << j))
    }

    /// Fourier coefficients of `Σ_k α_k Φ_{j,k}`.
    pub fn scaling_inverse(&self, alpha: &[f64], j: i32) -> Result<Spectrum> {
        self.check_scaling_level(j)?;
        if alpha.len() != level_size(j) {
            return domain(format!(
                "expected {} scaling coefficients at level {j}, got {}",
                level_size(j),
                alpha.len()
            ));
        }
        let (dc, table) = scaling_table(j as u32);
        let mut f = Spectrum::zeros(self.n)?;
        synthesize_level(&mut f, alpha, &table, Some(dc));
        Ok(f)
    }

    /// Highest frequency touched by levels `≤ j`.
    pub fn band_limit(&self, j: i32) -> usize {
        if j < 0 {
            0
        } else {
            (4usize << j) / 3
        }
    }
}

fn scaling_table(j: u32) -> (f64, Vec<(usize, Complex64)>) {
    let m = (1usize << j) as f64;
    let norm = m.sqrt().recip();
    let hi = (2.0 * m / 3.0).floor() as usize;
    let table = (1..=hi)
        .filter_map(|l| {
            let v = scaling_ft(2.0 * PI * l as f64 / m);
            (v != 0.0).then(|| (l, Complex64::new(norm * v, 0.0)))
        })
        .collect();
    (norm, table)
}

/// `c_k = Σ_l f_l conj(B_l) e^{2πi l k/m}` for the real basis function with
/// positive-frequency values `entries` (and optional DC value).
fn analyze_level(
    f: &Spectrum,
    entries: &[(usize, Complex64)],
    dc: Option<f64>,
    m: usize,
) -> Vec<f64> {
    let mut g = vec![Complex64::new(0.0, 0.0); m];
    if let Some(d) = dc {
        g[0] += f.get(0) * d;
    }
    for &(l, p) in entries {
        let v = f.half()[l] * p.conj();
        let r = l % m;
        g[r] += v;
        g[(m - r) % m] += v.conj();
    }
    if m > 1 {
        fft_plan(m, true).process(&mut g);
    }
    g.into_iter().map(|c| c.re).collect()
}

fn synthesize_level(
    f: &mut Spectrum,
    coeffs: &[f64],
    entries: &[(usize, Complex64)],
    dc: Option<f64>,
) {
    let m = coeffs.len();
    let mut d: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    if m > 1 {
        fft_plan(m, false).process(&mut d);
    }
    let half = f.half_mut();
    if let Some(v) = dc {
        half[0] += d[0].re * v;
    }
    for &(l, p) in entries {
        half[l] += p * d[l % m];
    }
}

/// Free-function form of [`MeyerBasis::forward`].
pub fn forward_transform(f_hat: &Spectrum, basis: &MeyerBasis) -> Result<WaveletCoeffs> {
    basis.forward(f_hat)
}

/// Free-function form of [`MeyerBasis::inverse_signal`].
pub fn inverse_transform(coeffs: &WaveletCoeffs, basis: &MeyerBasis) -> Result<PeriodicSignal> {
    basis.inverse_signal(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aux_polynomial_endpoints() {
        assert_eq!(meyer_aux(0.0), 0.0);
        assert!((meyer_aux(1.0) - 1.0).abs() < 1e-15);
        // ν(x) + ν(1−x) = 1
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((meyer_aux(x) + meyer_aux(1.0 - x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_hat_outside_support() {
        assert_eq!(mother_wavelet_ft(0.0), Complex64::new(0.0, 0.0));
        assert_eq!(mother_wavelet_ft(3.0 * PI), Complex64::new(0.0, 0.0));
        assert_eq!(mother_wavelet_ft(-3.0 * PI), Complex64::new(0.0, 0.0));
        assert_eq!(mother_wavelet_ft(0.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn support_sets() {
        let c3: Vec<i64> = (3..=10).collect();
        let expect: Vec<i64> = c3.iter().rev().map(|l| -l).chain(c3.iter().copied()).collect();
        assert_eq!(support_set(3), expect);
        assert_eq!(support_set(0), vec![-1, 1]);
        assert_eq!(support_set(1), vec![-2, -1, 1, 2]);
        for j in 0..14u32 {
            let bound = 1i64 << (j + 1);
            assert!(support_set(j).iter().all(|l| l.abs() <= bound));
        }
    }

    #[test]
    fn level_minus_one_is_constant() {
        let b = MeyerBasis::new(64).unwrap();
        assert_eq!(
            b.wavelet_fourier_coeffs(-1, 0).unwrap(),
            vec![(0, Complex64::new(1.0, 0.0))]
        );
        assert!(b.wavelet_fourier_coeffs(-1, 1).is_err());
        assert!(b.wavelet_fourier_coeffs(b.max_level() + 1, 0).is_err());
        assert!(b.wavelet_fourier_coeffs(3, 8).is_err());
    }

    #[test]
    fn basis_level_bounds() {
        assert_eq!(MeyerBasis::new(4096).unwrap().max_level(), 10);
        assert!(MeyerBasis::with_max_level(4096, 11).is_err());
        assert!(MeyerBasis::new(100).is_err());
        let b = MeyerBasis::new(4096).unwrap();
        assert!(b.band_limit(b.max_level()) < 4096 / 2);
    }

    #[test]
    fn zero_input_zero_output() {
        let b = MeyerBasis::new(128).unwrap();
        let z = Spectrum::zeros(128).unwrap();
        let c = b.forward(&z).unwrap();
        assert!(c.iter().all(|(_, _, v)| v == 0.0));
        let s = b.inverse_signal(&WaveletCoeffs::zeros(b.max_level())).unwrap();
        assert!(s.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inverse_rejects_too_fine_levels() {
        let b = MeyerBasis::with_max_level(256, 3).unwrap();
        assert!(b.inverse(&WaveletCoeffs::zeros(4)).is_err());
    }

    #[test]
    fn coeffs_json_validates_lengths() {
        let c = WaveletCoeffs::zeros(2);
        let s = serde_json::to_string(&c).unwrap();
        let back: WaveletCoeffs = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<WaveletCoeffs>(
            r#"{"max_level":1,"levels":[[0.0],[0.0],[0.0]]}"#
        )
        .is_err());
    }
}
