//! Fourier-domain coefficient estimates and the thresholding / projection estimators.
//!
//! `β̂_{j,k} = Σ_l (X_l / Y_l) conj(Ψ_{j,k,l})`. All thresholds carry the known
//! noise level σ, so the tuning constants `η`, `η′` are dimensionless.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::zones::{classify_zone, RateParams, Zone};
use crate::error::{domain, Error, Result};
use crate::filters::FilterRealization;
use crate::forward_model::{samples_csv, Observation};
use crate::meyer::{MeyerBasis, WaveletCoeffs};
use crate::signal::PeriodicSignal;
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Deterministic level-dependent thresholds.
    D,
    /// Random thresholds from the realized `U_j`.
    R,
    /// One constant threshold, blind to the filter.
    #[serde(rename = "fixed")]
    Fixed,
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "hybrid")]
    Hybrid,
}

impl Method {
    pub const THRESHOLDING: [Method; 3] = [Method::D, Method::R, Method::Fixed];

    pub fn name(self) -> &'static str {
        match self {
            Method::D => "D",
            Method::R => "R",
            Method::Fixed => "fixed",
            Method::Linear => "linear",
            Method::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(Method::D),
            "r" => Ok(Method::R),
            "fixed" => Ok(Method::Fixed),
            "linear" => Ok(Method::Linear),
            "hybrid" => Ok(Method::Hybrid),
            other => domain(format!(
                "unknown method '{other}' (expected D, R, fixed, linear or hybrid)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub method: Method,
    pub eta: f64,
    pub eta_prime: f64,
    /// Assumed ill-posedness.
    pub nu: f64,
    /// Assumed tail parameter of the filter scale.
    pub alpha: f64,
    /// Constant threshold for [`Method::Fixed`]; `None` means `σ√(2 ln n / n)`.
    pub fixed_threshold: Option<f64>,
    /// Smoothness class for the non-adaptive estimators.
    pub rate_params: Option<RateParams>,
    /// Scale constant `K` in `U_j ≍ K 2^{2νj}`; divides `n` in the level formulas
    /// and enters `λ_j` as `√K`. `1` gives the bare formulas.
    pub filter_scale: f64,
    /// Projection level for [`Method::Linear`]; defaults to the rate-optimal one.
    pub linear_level: Option<i32>,
}

impl EstimatorConfig {
    pub fn new(method: Method, nu: f64, alpha: f64) -> Self {
        Self {
            method,
            eta: 1.0,
            eta_prime: 1.0,
            nu,
            alpha,
            fixed_threshold: None,
            rate_params: None,
            filter_scale: 1.0,
            linear_level: None,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_eta_prime(mut self, eta_prime: f64) -> Self {
        self.eta_prime = eta_prime;
        self
    }

    pub fn with_fixed_threshold(mut self, t: f64) -> Self {
        self.fixed_threshold = Some(t);
        self
    }

    pub fn with_rate_params(mut self, rp: RateParams) -> Self {
        self.rate_params = Some(rp);
        self
    }

    pub fn with_filter_scale(mut self, k: f64) -> Self {
        self.filter_scale = k;
        self
    }

    pub fn with_linear_level(mut self, j: i32) -> Self {
        self.linear_level = Some(j);
        self
    }

    /// `K = (2π / λ̄)^{2ν}` for filters with typical scale `λ̄`.
    pub fn filter_scale_for(nu: f64, mean_lambda: f64) -> f64 {
        (2.0 * std::f64::consts::PI / mean_lambda).powf(2.0 * nu)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.eta_prime > 0.0 && self.eta_prime.is_finite()) {
            return bad(format!("eta_prime must be positive, got {}", self.eta_prime));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be non-negative, got {}", self.nu));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.filter_scale > 0.0 && self.filter_scale.is_finite()) {
            return bad(format!("filter scale must be positive, got {}", self.filter_scale));
        }
        if let Some(t) = self.fixed_threshold {
            if !(t >= 0.0) {
                return bad(format!("fixed threshold must be non-negative, got {t}"));
            }
            if self.method != Method::Fixed {
                return bad("a fixed threshold only applies to the fixed method".into());
            }
        }
        match self.method {
            Method::Hybrid => {
                let rp = self
                    .rate_params
                    .ok_or_else(|| Error::Config("hybrid needs rate parameters (s, p, q, rho)".into()))?;
                if rp.p >= rp.rho {
                    return bad(format!(
                        "hybrid needs p < rho, got p = {} and rho = {}",
                        rp.p, rp.rho
                    ));
                }
            }
            Method::Linear => {
                if self.linear_level.is_none() && self.rate_params.is_none() {
                    return bad("linear needs a projection level or rate parameters".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A resolution level computed from a real-valued formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelChoice {
    pub level: i32,
    /// `log₂` of the formula value before flooring.
    pub log2_value: f64,
    /// Formula value below 1: only the scaling level is used.
    pub scaling_only: bool,
    /// Floor exceeded the basis range and was clamped.
    pub clamped: bool,
}

fn finest_level(n: usize) -> i32 {
    n.trailing_zeros() as i32 - 2
}

fn level_from_log2(log2_value: f64, top: i32) -> LevelChoice {
    if log2_value < 0.0 {
        return LevelChoice {
            level: -1,
            log2_value,
            scaling_only: true,
            clamped: false,
        };
    }
    let raw = log2_value.floor();
    let clamped = raw > top as f64;
    LevelChoice {
        level: if clamped { top } else { raw as i32 },
        log2_value,
        scaling_only: false,
        clamped,
    }
}

fn check_level_inputs(n: usize, nu: f64) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return domain(format!("n must be a power of two >= 8, got {n}"));
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return domain(format!("nu must be non-negative, got {nu}"));
    }
    Ok(())
}

/// `2^{j₁} = (n / (K (ln n)^{1+1/α}))^{1/(1+2ν)}`.
pub fn level_j1_scaled(n: usize, nu: f64, alpha: f64, k: f64) -> Result<LevelChoice> {
    check_level_inputs(n, nu)?;
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let ln = (n as f64).ln();
    let v = (n as f64 / (k * ln.powf(1.0 + 1.0 / alpha))).log2() / (1.0 + 2.0 * nu);
    Ok(level_from_log2(v, finest_level(n)))
}

pub fn level_j1(n: usize, nu: f64, alpha: f64) -> Result<LevelChoice> {
    level_j1_scaled(n, nu, alpha, 1.0)
}

/// `2^{j₂} = (n / (K ln n))^{1/(1+2ν)}`.
pub fn level_j2_scaled(n: usize, nu: f64, k: f64) -> Result<LevelChoice> {
    check_level_inputs(n, nu)?;
    let ln = (n as f64).ln();
    let v = (n as f64 / (k * ln)).log2() / (1.0 + 2.0 * nu);
    Ok(level_from_log2(v, finest_level(n)))
}

pub fn level_j2(n: usize, nu: f64) -> Result<LevelChoice> {
    level_j2_scaled(n, nu, 1.0)
}

/// Projection level `⌊log₂(n/K) / (2s + 2ν + 1)⌋` of the linear estimator.
pub fn linear_level(n: usize, s: f64, nu: f64, k: f64) -> Result<LevelChoice> {
    check_level_inputs(n, nu)?;
    let v = (n as f64 / k).log2() / (2.0 * s + 2.0 * nu + 1.0);
    Ok(level_from_log2(v, finest_level(n) + 1))
}

/// Upper level of the hybrid estimator:
/// `2^{j₂} ≈ (n / (ln n)^{1{ε<0}})^{s / ((2s + ν + 1/2)(s − 1/p + 1/ρ))}`.
pub fn hybrid_upper_level(n: usize, rp: &RateParams, k: f64) -> Result<LevelChoice> {
    check_level_inputs(n, rp.nu)?;
    let nu_prime = rp.nu + 0.5;
    let mut base = n as f64 / k;
    if classify_zone(rp) == Zone::Sparse {
        base /= (n as f64).ln();
    }
    let expo = rp.s / ((2.0 * rp.s + nu_prime) * (rp.s - 1.0 / rp.p + 1.0 / rp.rho));
    Ok(level_from_log2(expo * base.log2(), finest_level(n) + 1))
}

/// Coefficients of the scaling projection used by the linear and hybrid estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPart {
    pub level: i32,
    pub coeffs: Vec<f64>,
}

/// Output of an estimator. For every method `signal` equals the synthesis of
/// `kept_coeffs`; the linear and hybrid estimators also report their explicit
/// scaling coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub method: Method,
    pub signal: PeriodicSignal,
    pub raw_coeffs: WaveletCoeffs,
    pub kept_coeffs: WaveletCoeffs,
    /// Threshold per level `−1..=j_max`; unthresholded levels hold 0.
    pub thresholds: Vec<f64>,
    pub levels: (i32, i32),
    pub scaling: Option<ScalingPart>,
}

impl EstimateResult {
    pub fn to_csv(&self) -> String {
        samples_csv("estimate", self.signal.samples())
    }

    pub fn mse(&self, truth: &PeriodicSignal) -> Result<f64> {
        self.signal.mse(truth)
    }

    /// Number of nonzero detail coefficients that survived.
    pub fn kept_count(&self) -> usize {
        self.kept_coeffs
            .iter()
            .filter(|&(j, _, v)| j >= 0 && v != 0.0)
            .count()
    }
}

#[derive(Serialize, Deserialize)]
struct EstimateFile {
    method: Method,
    n: usize,
    levels: (i32, i32),
    thresholds: Vec<f64>,
    raw_coeffs: WaveletCoeffs,
    kept_coeffs: WaveletCoeffs,
    scaling: Option<ScalingPart>,
    estimate: Vec<f64>,
}

impl Serialize for EstimateResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EstimateFile {
            method: self.method,
            n: self.signal.n(),
            levels: self.levels,
            thresholds: self.thresholds.clone(),
            raw_coeffs: self.raw_coeffs.clone(),
            kept_coeffs: self.kept_coeffs.clone(),
            scaling: self.scaling.clone(),
            estimate: self.signal.samples().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EstimateResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = EstimateFile::deserialize(d)?;
        if raw.estimate.len() != raw.n {
            return Err(D::Error::custom(format!(
                "n = {} but {} estimate samples",
                raw.n,
                raw.estimate.len()
            )));
        }
        if raw.raw_coeffs.max_level() != raw.kept_coeffs.max_level() {
            return Err(D::Error::custom("raw and kept coefficients differ in depth"));
        }
        if raw.thresholds.len() as i64 != raw.kept_coeffs.max_level() as i64 + 2 {
            return Err(D::Error::custom("one threshold per level expected"));
        }
        if raw.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(D::Error::custom("non-finite threshold"));
        }
        let finest = i64::from(raw.n.trailing_zeros()) - 2;
        if i64::from(raw.kept_coeffs.max_level()) > finest.max(-1) {
            return Err(D::Error::custom("coefficients finer than the grid allows"));
        }
        if let Some(sp) = &raw.scaling {
            let ok = (0..=30).contains(&sp.level)
                && sp.coeffs.len() == 1usize << sp.level
                && sp.coeffs.iter().all(|c| c.is_finite());
            if !ok {
                return Err(D::Error::custom("malformed scaling coefficients"));
            }
        }
        if raw.estimate.iter().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("non-finite estimate sample"));
        }
        let signal = PeriodicSignal::from_samples(raw.estimate).map_err(D::Error::custom)?;
        Ok(EstimateResult {
            method: raw.method,
            signal,
            raw_coeffs: raw.raw_coeffs,
            kept_coeffs: raw.kept_coeffs,
            thresholds: raw.thresholds,
            levels: raw.levels,
            scaling: raw.scaling,
        })
    }
}

fn check_inputs(obs: &Observation, filter: &FilterRealization, basis: &MeyerBasis) -> Result<()> {
    if obs.n() != filter.n() || obs.n() != basis.n() {
        return domain(format!(
            "grid mismatch: observation {}, filter {}, basis {}",
            obs.n(),
            filter.n(),
            basis.n()
        ));
    }
    Ok(())
}

/// `X_l / Y_l` on every stored frequency.
pub fn deconvolve(obs: &Observation, filter: &FilterRealization) -> Result<Spectrum> {
    if obs.n() != filter.n() {
        return domain(format!(
            "observation grid {} does not match filter grid {}",
            obs.n(),
            filter.n()
        ));
    }
    let half = obs
        .x_hat()
        .half()
        .iter()
        .zip(filter.y_hat().half())
        .enumerate()
        .map(|(l, (x, y))| {
            if y.norm_sqr() == 0.0 {
                Err(Error::Model(format!("Y_{l} = 0: cannot invert the filter")))
            } else {
                Ok(x / y)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::from_half(obs.n(), half)
}

/// Raw estimates `β̂_{j,k}` for `j = −1..=j_max`.
pub fn estimate_coeffs(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    j_max: i32,
) -> Result<WaveletCoeffs> {
    check_inputs(obs, filter, basis)?;
    basis.forward_to(&deconvolve(obs, filter)?, j_max)
}

/// `Var(β̂_{j,k} | Y) = (σ²/n) Σ_l |Ψ_{j,k,l}|² / |Y_l|²`.
pub fn coefficient_variance(
    filter: &FilterRealization,
    basis: &MeyerBasis,
    j: i32,
    k: usize,
    sigma: f64,
) -> Result<f64> {
    if filter.n() != basis.n() {
        return domain("filter and basis grids differ");
    }
    let s: f64 = basis
        .wavelet_fourier_coeffs(j, k)?
        .iter()
        .map(|&(l, p)| p.norm_sqr() / filter.coeff(l).norm_sqr())
        .sum();
    Ok(sigma * sigma / basis.n() as f64 * s)
}

/// Hard threshold in place: keep when `|β| ≥ t`.
pub fn hard_threshold(coeffs: &mut [f64], t: f64) {
    for c in coeffs {
        if c.abs() < t {
            *c = 0.0;
        }
    }
}

fn threshold_levels(
    raw: WaveletCoeffs,
    method: Method,
    basis: &MeyerBasis,
    threshold: impl Fn(i32) -> Result<f64>,
) -> Result<EstimateResult> {
    let j_max = raw.max_level();
    let mut kept = raw.clone();
    let mut thresholds = vec![0.0];
    for j in 0..=j_max {
        let t = threshold(j)?;
        hard_threshold(kept.level_mut(j), t);
        thresholds.push(t);
    }
    let signal = basis.inverse_signal(&kept)?;
    Ok(EstimateResult {
        method,
        signal,
        raw_coeffs: raw,
        kept_coeffs: kept,
        thresholds,
        levels: (-1, j_max),
        scaling: None,
    })
}

fn expect_method(cfg: &EstimatorConfig, m: Method) -> Result<()> {
    cfg.validate()?;
    if cfg.method != m {
        return Err(Error::Config(format!(
            "configuration is for method {}, not {m}",
            cfg.method
        )));
    }
    Ok(())
}

/// Levels `−1..=j₁` thresholded at `λ_j = η σ √K 2^{νj} √((ln n)^{1+1/α}/n)`.
pub fn estimate_d(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    expect_method(cfg, Method::D)?;
    let n = obs.n();
    let j1 = level_j1_scaled(n, cfg.nu, cfg.alpha, cfg.filter_scale)?
        .level
        .min(basis.max_level());
    let raw = estimate_coeffs(obs, filter, basis, j1)?;
    let ln = (n as f64).ln();
    let base = cfg.eta * obs.sigma() * cfg.filter_scale.sqrt()
        * (ln.powf(1.0 + 1.0 / cfg.alpha) / n as f64).sqrt();
    threshold_levels(raw, Method::D, basis, |j| {
        Ok(base * 2f64.powf(cfg.nu * j as f64))
    })
}

/// Levels `−1..=j₂` thresholded at `τ_j = η′ σ √(U_j ln n / n)`.
pub fn estimate_r(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    expect_method(cfg, Method::R)?;
    let n = obs.n();
    let j2 = level_j2_scaled(n, cfg.nu, cfg.filter_scale)?
        .level
        .min(basis.max_level());
    let raw = estimate_coeffs(obs, filter, basis, j2)?;
    let ln = (n as f64).ln();
    let base = cfg.eta_prime * obs.sigma();
    threshold_levels(raw, Method::R, basis, |j| {
        Ok(base * (filter.u(j)? * ln / n as f64).sqrt())
    })
}

/// Levels `−1..=j₂` thresholded at one constant.
pub fn estimate_fixed(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    expect_method(cfg, Method::Fixed)?;
    let n = obs.n();
    let j2 = level_j2_scaled(n, cfg.nu, cfg.filter_scale)?
        .level
        .min(basis.max_level());
    let raw = estimate_coeffs(obs, filter, basis, j2)?;
    let t = cfg
        .fixed_threshold
        .unwrap_or_else(|| obs.sigma() * (2.0 * (n as f64).ln() / n as f64).sqrt());
    threshold_levels(raw, Method::Fixed, basis, |_| Ok(t))
}

fn scaling_projection(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    level: i32,
) -> Result<(ScalingPart, Spectrum)> {
    check_inputs(obs, filter, basis)?;
    let g = deconvolve(obs, filter)?;
    let coeffs = basis.scaling_forward(&g, level)?;
    let spectrum = basis.scaling_inverse(&coeffs, level)?;
    Ok((ScalingPart { level, coeffs }, spectrum))
}

/// `Σ_k α̂_{j₁,k} Φ_{j₁,k}` with no thresholding.
pub fn estimate_linear(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    j1: i32,
) -> Result<EstimateResult> {
    if j1 < 0 || j1 > basis.max_level() + 1 {
        return domain(format!(
            "linear level {j1} outside 0..={}",
            basis.max_level() + 1
        ));
    }
    let (scaling, spectrum) = scaling_projection(obs, filter, basis, j1)?;
    // V_{j₁} is spanned by the wavelets of levels −1..j₁−1.
    let raw = estimate_coeffs(obs, filter, basis, j1 - 1)?;
    Ok(EstimateResult {
        method: Method::Linear,
        signal: PeriodicSignal::from_spectrum(spectrum),
        kept_coeffs: raw.clone(),
        thresholds: vec![0.0; raw.max_level() as usize + 2],
        raw_coeffs: raw,
        levels: (-1, j1 - 1),
        scaling: Some(scaling),
    })
}

/// Level chosen by a linear configuration.
pub fn configured_linear_level(n: usize, cfg: &EstimatorConfig) -> Result<i32> {
    match (cfg.linear_level, cfg.rate_params) {
        (Some(j), _) => Ok(j),
        (None, Some(rp)) => Ok(linear_level(n, rp.s, cfg.nu, cfg.filter_scale)?.level.max(0)),
        (None, None) => Err(Error::Config(
            "linear needs a projection level or rate parameters".into(),
        )),
    }
}

/// Scaling projection at `j₁ + 1` plus details `j₁ < j < j₂` thresholded at
/// `η′ σ √(U_j (j − j₁) / n)`.
pub fn estimate_hybrid(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    expect_method(cfg, Method::Hybrid)?;
    let rp = cfg.rate_params.expect("validated");
    let n = obs.n();
    let mut rp_nu = rp;
    rp_nu.nu = cfg.nu;
    let j1 = linear_level(n, rp.s, cfg.nu, cfg.filter_scale)?
        .level
        .clamp(-1, basis.max_level());
    let j2 = hybrid_upper_level(n, &rp_nu, cfg.filter_scale)?
        .level
        .min(basis.max_level() + 1);
    if j2 <= j1 + 1 {
        let mut r = estimate_linear(obs, filter, basis, j1 + 1)?;
        r.method = Method::Hybrid;
        return Ok(r);
    }
    let (scaling, low) = scaling_projection(obs, filter, basis, j1 + 1)?;
    let raw = estimate_coeffs(obs, filter, basis, j2 - 1)?;
    let mut kept = raw.clone();
    let mut thresholds = vec![0.0; j1 as usize + 2];
    let base = cfg.eta_prime * obs.sigma() / (n as f64).sqrt();
    let mut details = WaveletCoeffs::zeros(j2 - 1);
    for j in j1 + 1..j2 {
        let t = base * (filter.u(j)? * (j - j1) as f64).sqrt();
        hard_threshold(kept.level_mut(j), t);
        details.level_mut(j).copy_from_slice(kept.level(j));
        thresholds.push(t);
    }
    let mut spectrum = basis.inverse(&details)?;
    for (a, b) in spectrum.half_mut().iter_mut().zip(low.half()) {
        *a += b;
    }
    Ok(EstimateResult {
        method: Method::Hybrid,
        signal: PeriodicSignal::from_spectrum(spectrum),
        raw_coeffs: raw,
        kept_coeffs: kept,
        thresholds,
        levels: (-1, j2 - 1),
        scaling: Some(scaling),
    })
}

/// Dispatches on `cfg.method`.
pub fn estimate(
    obs: &Observation,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    match cfg.method {
        Method::D => estimate_d(obs, filter, basis, cfg),
        Method::R => estimate_r(obs, filter, basis, cfg),
        Method::Fixed => estimate_fixed(obs, filter, basis, cfg),
        Method::Hybrid => estimate_hybrid(obs, filter, basis, cfg),
        Method::Linear => {
            cfg.validate()?;
            let j = configured_linear_level(obs.n(), cfg)?;
            estimate_linear(obs, filter, basis, j)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_formula_examples() {
        // 4096 / ln(4096)² ≈ 59.2
        assert_eq!(level_j1(4096, 0.0, 1.0).unwrap().level, 5);
        assert_eq!(level_j1(4096, 1.0, 1.0).unwrap().level, 1);
        // 4096 / ln 4096 ≈ 492.5
        assert_eq!(level_j2(4096, 0.0).unwrap().level, 8);
        assert_eq!(level_j2(4096, 1.0).unwrap().level, 2);
        assert!(level_j1(4, 1.0, 1.0).is_err());
    }

    #[test]
    fn scaling_only_flag() {
        // n / (ln n)^{1+1/α} < 1 for tiny α
        let c = level_j1(64, 1.0, 0.05).unwrap();
        assert_eq!(c.level, -1);
        assert!(c.scaling_only);
        let c = level_j2_scaled(1 << 12, 0.0, 1e-3).unwrap();
        assert!(c.clamped && c.level == 10);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("d".parse::<Method>().unwrap(), Method::D);
        assert_eq!("Fixed".parse::<Method>().unwrap(), Method::Fixed);
        assert!("soft".parse::<Method>().is_err());
        assert_eq!(serde_json::to_string(&Method::Fixed).unwrap(), "\"fixed\"");
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::new(Method::D, 1.0, 1.0).validate().is_ok());
        assert!(EstimatorConfig::new(Method::D, 1.0, 1.0).with_eta(0.0).validate().is_err());
        assert!(EstimatorConfig::new(Method::Hybrid, 1.0, 1.0).validate().is_err());
        assert!(EstimatorConfig::new(Method::D, 1.0, 1.0)
            .with_fixed_threshold(0.1)
            .validate()
            .is_err());
        let rp = RateParams::new(1.0, 4.0, 2.0, 2.0, 1.0).unwrap();
        assert!(EstimatorConfig::new(Method::Hybrid, 1.0, 1.0)
            .with_rate_params(rp)
            .validate()
            .is_err());
    }

    #[test]
    fn hard_threshold_keep_or_kill() {
        let mut v = vec![0.5, -0.2, 0.3, -0.31];
        hard_threshold(&mut v, 0.3);
        assert_eq!(v, vec![0.5, 0.0, 0.3, -0.31]);
        let w = v.clone();
        hard_threshold(&mut v, 0.3);
        assert_eq!(v, w);
    }
}
