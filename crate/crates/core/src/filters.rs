//! Random periodized Gamma filters and the moment/tail diagnostics on their
//! dyadic-block statistics.
//!
//! A Gamma(ν, λ) density periodized on `[0, 1)` has Fourier coefficients
//! `Y_l = (1 + 2πi l/λ)^{−ν}`. The scale `λ` is drawn from
//! `F_α(t) = min(1, 2 exp(−C_α / t^{2α}))`, with `C_α` calibrated to a target mean.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::analysis::stats;
use crate::error::{domain, validation, Error, Result};
use crate::numeric::{adaptive_simpson, bisect, fit_line};
use crate::spectrum::{is_power_of_two, PairList, Spectrum};

pub const DEFAULT_MEAN_LAMBDA: f64 = 150.0;

/// `∫₀¹ (1 − 2^{1 − u^{−2α}}) du`: the mean of `F_α` in units of its support end.
fn unit_mean(alpha: f64) -> Result<f64> {
    adaptive_simpson(
        |u| {
            if u <= 0.0 {
                1.0
            } else {
                1.0 - (LN_2 * (1.0 - u.powf(-2.0 * alpha))).exp()
            }
        },
        0.0,
        1.0,
        1e-14,
    )
}

/// Mean of `F_α` for a given `C_α`. `1 − F` vanishes beyond `t* = (C/ln 2)^{1/2α}`.
fn f_alpha_mean(c: f64, alpha: f64, unit: f64) -> f64 {
    (c / LN_2).powf(0.5 / alpha) * unit
}

/// Finds `C_α` with `E λ = mean_lambda` under `F_α`.
pub fn calibrate_c_alpha(alpha: f64, mean_lambda: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    if !(mean_lambda > 0.0 && mean_lambda.is_finite()) {
        return domain(format!("mean_lambda must be positive, got {mean_lambda}"));
    }
    let unit = unit_mean(alpha)?;
    // Bisection in log C; the mean is increasing in C.
    let g = |log_c: f64| f_alpha_mean(log_c.exp(), alpha, unit) / mean_lambda - 1.0;
    let target = 2.0 * alpha * (mean_lambda / unit).ln() + LN_2.ln();
    let (lo, hi) = (target - 50.0, target + 50.0);
    let log_c = bisect(g, lo, hi, 1e-13).map_err(|e| {
        Error::Numeric(format!(
            "calibrating C_alpha (alpha = {alpha}, mean = {mean_lambda}): {e}"
        ))
    })?;
    let c = log_c.exp();
    let achieved = f_alpha_mean(c, alpha, unit);
    if ((achieved - mean_lambda) / mean_lambda).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "C_alpha = {c} gives mean {achieved}, wanted {mean_lambda}"
        )));
    }
    Ok(c)
}

/// Scale distribution and shape of a random Gamma filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomFilterSpec {
    nu: f64,
    alpha: f64,
    mean_lambda: f64,
    c_alpha: f64,
}

impl RandomFilterSpec {
    /// Only polynomially decaying (ordinary-smooth) Gamma filters are representable,
    /// which is why `ν` must be strictly positive and finite.
    pub fn new(nu: f64, alpha: f64, mean_lambda: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return domain(format!("nu must be positive and finite, got {nu}"));
        }
        let c_alpha = calibrate_c_alpha(alpha, mean_lambda)?;
        Ok(Self {
            nu,
            alpha,
            mean_lambda,
            c_alpha,
        })
    }

    pub fn with_default_mean(nu: f64, alpha: f64) -> Result<Self> {
        Self::new(nu, alpha, DEFAULT_MEAN_LAMBDA)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean_lambda(&self) -> f64 {
        self.mean_lambda
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// Largest value `λ` can take.
    pub fn support_end(&self) -> f64 {
        (self.c_alpha / LN_2).powf(0.5 / self.alpha)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (2.0 * (-self.c_alpha / t.powf(2.0 * self.alpha)).exp()).min(1.0)
        }
    }

    /// Inverse CDF on `u ∈ (0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        (self.c_alpha / (2.0 / u).ln()).powf(0.5 / self.alpha)
    }

    pub fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 − U lies in (0, 1], so log(2/u) ≥ ln 2 > 0.
        let u = 1.0 - rng.random::<f64>();
        self.quantile(u)
    }

    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<FilterRealization> {
        let lambda = self.sample_lambda(rng);
        gamma_filter(self.nu, lambda, n)
    }
}

/// One realization of the filter on an `n`-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterRealization {
    lambda: Option<f64>,
    nu: f64,
    y_hat: Spectrum,
    u_stats: Vec<f64>,
    l_stats: Vec<f64>,
}

/// Finest level with `2^{j+1} − 1 < n/2`.
fn stats_max_level(n: usize) -> i32 {
    n.trailing_zeros() as i32 - 2
}

impl FilterRealization {
    /// Wraps arbitrary coefficients. They must describe a unit-mass real filter
    /// with no vanishing coefficient.
    pub fn from_spectrum(y_hat: Spectrum, lambda: Option<f64>, nu: f64) -> Result<Self> {
        if y_hat.n() < 4 {
            return domain(format!("filter grid {} is smaller than 4", y_hat.n()));
        }
        if (y_hat.half()[0] - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Model(format!(
                "Y_0 = {} but a filter density must have unit mass",
                y_hat.half()[0]
            )));
        }
        if let Some(l) = lambda {
            if !(l > 0.0 && l.is_finite()) {
                return domain(format!("lambda must be positive, got {l}"));
            }
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return domain(format!("nu must be non-negative, got {nu}"));
        }
        if let Some(l) = y_hat.half().iter().position(|c| c.norm_sqr() == 0.0) {
            return Err(Error::Model(format!("Y_{l} = 0: filter is not invertible")));
        }
        let (u_stats, l_stats) = compute_level_stats(&y_hat, stats_max_level(y_hat.n()))?;
        Ok(Self {
            lambda,
            nu,
            y_hat,
            u_stats,
            l_stats,
        })
    }

    pub fn n(&self) -> usize {
        self.y_hat.n()
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn y_hat(&self) -> &Spectrum {
        &self.y_hat
    }

    /// `Y_l`, `|l| ≤ n/2`.
    pub fn coeff(&self, l: i64) -> Complex64 {
        self.y_hat.get(l)
    }

    /// Filter samples on the grid (a density, so they average to 1).
    pub fn samples(&self) -> Vec<f64> {
        self.y_hat.to_samples()
    }

    /// `U_j^Y` for `j = 0..=J`.
    pub fn u_stats(&self) -> &[f64] {
        &self.u_stats
    }

    /// `L_j^Y` for `j = 0..=J`.
    pub fn l_stats(&self) -> &[f64] {
        &self.l_stats
    }

    pub fn u(&self, j: i32) -> Result<f64> {
        usize::try_from(j)
            .ok()
            .and_then(|j| self.u_stats.get(j).copied())
            .ok_or_else(|| Error::Domain(format!("U_j not available for j = {j}")))
    }
}

/// Periodized Gamma(ν, λ) filter.
pub fn gamma_filter(nu: f64, lambda: f64, n: usize) -> Result<FilterRealization> {
    if !(nu > 0.0 && nu.is_finite()) {
        return domain(format!("nu must be positive, got {nu}"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if !is_power_of_two(n) || n < 4 {
        return domain(format!("grid size {n} must be a power of two >= 4"));
    }
    let half: Vec<Complex64> = (0..=n / 2)
        .map(|l| Complex64::new(1.0, 2.0 * PI * l as f64 / lambda).powf(-nu))
        .collect();
    let mut half = half;
    half[0] = Complex64::new(1.0, 0.0);
    FilterRealization::from_spectrum(Spectrum::from_half(n, half)?, Some(lambda), nu)
}

/// `Y_l = 1` for every `l` (no blur).
pub fn identity_filter(n: usize) -> Result<FilterRealization> {
    let mut s = Spectrum::zeros(n)?;
    for c in s.half_mut() {
        *c = Complex64::new(1.0, 0.0);
    }
    FilterRealization::from_spectrum(s, None, 0.0)
}

/// `U_j = 2^{−j} Σ_{l=0}^{2^{j+1}−1} |Y_l|^{−2}` and `L_j = 2^{−j} Σ_{l=2^j}^{2^{j+1}−1} |Y_l|²`
/// for `j = 0..=max_level`.
pub fn compute_level_stats(y_hat: &Spectrum, max_level: i32) -> Result<(Vec<f64>, Vec<f64>)> {
    if max_level < 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let top = 1usize << (max_level + 1);
    if top > y_hat.half().len() {
        return domain(format!(
            "level {max_level} needs Y_l up to l = {}, spectrum stops at {}",
            top - 1,
            y_hat.n() / 2
        ));
    }
    let sq: Vec<f64> = y_hat.half()[..top].iter().map(|c| c.norm_sqr()).collect();
    if let Some(l) = sq.iter().position(|&v| v == 0.0) {
        return Err(Error::Model(format!("Y_{l} = 0: filter is not invertible")));
    }
    // L_j is summed per band: a prefix difference cancels against the
    // Y_0 = 1 term once |Y_l|² drops below machine epsilon.
    let mut inv_prefix = vec![0.0; top + 1];
    for l in 0..top {
        inv_prefix[l + 1] = inv_prefix[l] + 1.0 / sq[l];
    }
    let mut u = Vec::with_capacity(max_level as usize + 1);
    let mut lo = Vec::with_capacity(max_level as usize + 1);
    for j in 0..=max_level as usize {
        let m = 1usize << j;
        let w = 1.0 / m as f64;
        u.push(w * inv_prefix[2 * m]);
        lo.push(w * sq[m..2 * m].iter().sum::<f64>());
    }
    Ok((u, lo))
}

#[derive(Serialize, Deserialize)]
struct FilterFile {
    lambda: Option<f64>,
    nu: f64,
    n: usize,
    y_hat: PairList,
    u_stats: Vec<f64>,
    l_stats: Vec<f64>,
}

impl Serialize for FilterRealization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FilterFile {
            lambda: self.lambda,
            nu: self.nu,
            n: self.n(),
            y_hat: PairList::from_spectrum(&self.y_hat),
            u_stats: self.u_stats.clone(),
            l_stats: self.l_stats.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilterRealization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FilterFile::deserialize(d)?;
        let y = raw.y_hat.into_spectrum(raw.n).map_err(D::Error::custom)?;
        let f = FilterRealization::from_spectrum(y, raw.lambda, raw.nu).map_err(D::Error::custom)?;
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len()
                && a
                    .iter()
                    .zip(b)
                    .all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0))
        };
        if !close(&raw.u_stats, &f.u_stats) || !close(&raw.l_stats, &f.l_stats) {
            return Err(D::Error::custom(
                "u_stats/l_stats do not match the stored coefficients",
            ));
        }
        Ok(f)
    }
}

/// Anything that can produce filter realizations.
pub trait FilterSource: Send + Sync {
    fn realize(&self, n: usize, rng: &mut dyn RngCore) -> Result<FilterRealization>;
    /// Ill-posedness the source is designed to have.
    fn nominal_nu(&self) -> f64;
    /// Tail parameter of the scale distribution, if random.
    fn nominal_alpha(&self) -> Option<f64>;
}

impl FilterSource for RandomFilterSpec {
    fn realize(&self, n: usize, rng: &mut dyn RngCore) -> Result<FilterRealization> {
        self.draw(n, rng)
    }
    fn nominal_nu(&self) -> f64 {
        self.nu
    }
    fn nominal_alpha(&self) -> Option<f64> {
        Some(self.alpha)
    }
}

/// Gamma filter with a fixed scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedGamma {
    pub nu: f64,
    pub lambda: f64,
}

impl FilterSource for FixedGamma {
    fn realize(&self, n: usize, _rng: &mut dyn RngCore) -> Result<FilterRealization> {
        gamma_filter(self.nu, self.lambda, n)
    }
    fn nominal_nu(&self) -> f64 {
        self.nu
    }
    fn nominal_alpha(&self) -> Option<f64> {
        None
    }
}

/// The trivial filter `Y_l = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentitySource;

impl FilterSource for IdentitySource {
    fn realize(&self, n: usize, _rng: &mut dyn RngCore) -> Result<FilterRealization> {
        identity_filter(n)
    }
    fn nominal_nu(&self) -> f64 {
        0.0
    }
    fn nominal_alpha(&self) -> Option<f64> {
        None
    }
}

/// Tolerances and level choices for [`check_conditions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionConfig {
    /// Levels regressed for the `E L_j` slope; default `⌈J/2⌉..=J`.
    pub slope_levels: Option<(u32, u32)>,
    /// Level of the `U_j` tail curve; default `⌈2J/3⌉`.
    pub tail_level: Option<u32>,
    /// Allowed absolute deviation of the slope from `−2ν`.
    pub slope_tol: f64,
    /// Allowed relative deviation of the fitted tail exponent from `α/ν`.
    pub tail_rel_tol: f64,
}

impl Default for ConditionConfig {
    fn default() -> Self {
        Self {
            slope_levels: None,
            tail_level: None,
            slope_tol: 0.5,
            tail_rel_tol: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub n_trials: usize,
    pub max_level: u32,
    pub nu: f64,
    pub alpha: Option<f64>,
    /// `Ê(L_j)`, `j = 0..=J`.
    pub mean_l: Vec<f64>,
    pub slope_levels: (u32, u32),
    /// Slope of `log₂ Ê(L_j)` against `j`.
    pub c_low_slope: f64,
    pub c_low_expected: f64,
    pub c_low_pass: bool,
    pub tail_level: u32,
    /// `(t, P̂(U_j ≥ t·2^{2νj}))` at quantiles of the draws.
    pub tail_curve: Vec<(f64, f64)>,
    /// Fitted `γ` in `P̂ ≈ A exp(−c t^γ)`.
    pub tail_exponent: Option<f64>,
    /// `α/ν`: tail exponent of `U_j 2^{−2νj}` implied by `F_α`.
    pub tail_expected: Option<f64>,
    pub c_up_pass: Option<bool>,
    /// Reasons the diagnostics could not be evaluated.
    pub inconclusive: Vec<String>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.c_low_pass && self.c_up_pass.unwrap_or(true) && self.inconclusive.is_empty()
    }
}

/// Monte Carlo check of the moment condition on `L_j` and the stretched-exponential
/// tail of `U_j 2^{−2νj}`.
pub fn check_conditions(
    source: &dyn FilterSource,
    n_trials: usize,
    max_level: u32,
    cfg: &ConditionConfig,
    rng: &mut dyn RngCore,
) -> Result<ConditionReport> {
    if n_trials < 100 {
        return validation(format!("need at least 100 trials, got {n_trials}"));
    }
    if !(1..=24).contains(&max_level) {
        return validation(format!("max level {max_level} outside 1..=24"));
    }
    let (lo, hi) = cfg
        .slope_levels
        .unwrap_or((max_level.div_ceil(2), max_level));
    if lo >= hi || hi > max_level {
        return validation(format!(
            "slope levels {lo}..={hi} must be increasing and within 0..={max_level}"
        ));
    }
    let tail_level = cfg.tail_level.unwrap_or((2 * max_level).div_ceil(3));
    if tail_level > max_level {
        return validation(format!("tail level {tail_level} above {max_level}"));
    }
    let n = 1usize << (max_level + 2);
    let nu = source.nominal_nu();
    let levels = max_level as usize + 1;
    let mut sum_l = vec![0.0; levels];
    let mut tail = Vec::with_capacity(n_trials);
    for _ in 0..n_trials {
        let f = source.realize(n, rng)?;
        for (acc, v) in sum_l.iter_mut().zip(f.l_stats()) {
            *acc += v;
        }
        tail.push(f.u_stats()[tail_level as usize] * 2f64.powf(-2.0 * nu * tail_level as f64));
    }
    let mean_l: Vec<f64> = sum_l.iter().map(|s| s / n_trials as f64).collect();
    let xs: Vec<f64> = (lo..=hi).map(f64::from).collect();
    let ys: Vec<f64> = (lo..=hi).map(|j| mean_l[j as usize].log2()).collect();
    let c_low_slope = fit_line(&xs, &ys)?.slope;
    let c_low_expected = -2.0 * nu;
    let c_low_pass = (c_low_slope - c_low_expected).abs() <= cfg.slope_tol;

    let mut inconclusive = Vec::new();
    tail.sort_by(f64::total_cmp);
    let tail_curve = exceedance_curve(&tail, 50);
    let spread = tail[tail.len() - 1] - tail[0];
    let tail_expected = source.nominal_alpha().map(|a| a / nu);
    let tail_exponent = if spread <= 1e-12 * tail[tail.len() - 1].abs() {
        if tail_expected.is_some() {
            inconclusive.push("all U_j draws are equal; tail fit impossible".to_string());
        }
        None
    } else {
        fit_stretched_exponential(&tail)
    };
    if tail_expected.is_some() && tail_exponent.is_none() && spread > 0.0 {
        inconclusive.push("too few distinct tail points to fit an exponent".to_string());
    }
    let c_up_pass = match (tail_expected, tail_exponent) {
        (Some(e), Some(g)) => Some(((g - e) / e).abs() <= cfg.tail_rel_tol),
        _ => None,
    };
    Ok(ConditionReport {
        n_trials,
        max_level,
        nu,
        alpha: source.nominal_alpha(),
        mean_l,
        slope_levels: (lo, hi),
        c_low_slope,
        c_low_expected,
        c_low_pass,
        tail_level,
        tail_curve,
        tail_exponent,
        tail_expected,
        c_up_pass,
        inconclusive,
    })
}

/// `(t_i, P̂(X ≥ t_i))` at up to `points` evenly spaced order statistics.
fn exceedance_curve(sorted: &[f64], points: usize) -> Vec<(f64, f64)> {
    let n = sorted.len();
    let step = (n / points).max(1);
    (0..n)
        .step_by(step)
        .map(|i| (sorted[i], 1.0 - i as f64 / n as f64))
        .collect()
}

/// Fits `ln(ln A − ln P̂) = ln c + γ ln t` over `10/N ≤ P̂ ≤ 1/2`, profiling the
/// prefactor `A` on a log grid. Returns `γ`.
fn fit_stretched_exponential(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len() as f64;
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, 1.0 - i as f64 / n))
        .filter(|&(t, p)| t > 0.0 && p <= 0.5 && p >= 10.0 / n)
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let (a_lo, a_hi) = (0.55f64.ln(), 8f64.ln());
    let mut best: Option<(f64, f64)> = None;
    for i in 0..200 {
        let ln_a = a_lo + (a_hi - a_lo) * i as f64 / 199.0;
        let y: Vec<f64> = pts.iter().map(|p| (ln_a - p.1.ln()).ln()).collect();
        if let Ok(fit) = fit_line(&x, &y) {
            if best.is_none_or(|(r, _)| fit.rss < r) {
                best = Some((fit.rss, fit.slope));
            }
        }
    }
    best.map(|b| b.1)
}

/// KS distance between sampled scales and `F_α`.
pub fn sampler_ks_distance<R: Rng + ?Sized>(spec: &RandomFilterSpec, draws: usize, rng: &mut R) -> f64 {
    let mut x: Vec<f64> = (0..draws).map(|_| spec.sample_lambda(&mut *rng)).collect();
    stats::ks_distance(&mut x, |t| spec.cdf(t))
}
