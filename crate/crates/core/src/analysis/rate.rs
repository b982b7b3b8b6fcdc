//! Empirical convergence slopes of root-MSE against `n`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::estimators::{
    estimate, estimate_linear, linear_level, EstimatorConfig, Method,
};
use crate::filters::{gamma_filter, identity_filter, FilterRealization};
use crate::forward_model::observe;
use crate::meyer::{MeyerBasis, WaveletCoeffs};
use crate::numeric::fit_line;
use crate::rng::{derive_seed, seeded_rng, splitmix64};
use crate::signal::PeriodicSignal;

/// Band-limited target with `|β_{j,k}| = c 2^{−j(s+1/2)}` for `0 ≤ j ≤ top_level`
/// and fixed pseudo-random signs. Its squared tail beyond level `j` is
/// `c² Σ_{i>j} 2^{−2si}`, so it behaves like a function of smoothness `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTarget {
    pub s: f64,
    pub amplitude: f64,
    pub top_level: i32,
}

impl PowerLawTarget {
    pub fn coeffs(&self, max_level: i32) -> Result<WaveletCoeffs> {
        if self.top_level > max_level {
            return validation(format!(
                "target reaches level {} but the grid stops at {max_level}",
                self.top_level
            ));
        }
        let mut c = WaveletCoeffs::zeros(self.top_level);
        for j in 0..=self.top_level {
            let mag = self.amplitude * 2f64.powf(-(j as f64) * (self.s + 0.5));
            for (k, v) in c.level_mut(j).iter_mut().enumerate() {
                let h = splitmix64(((j as u64) << 32) | k as u64);
                *v = if h & 1 == 0 { mag } else { -mag };
            }
        }
        Ok(c)
    }

    pub fn signal(&self, n: usize) -> Result<PeriodicSignal> {
        let basis = MeyerBasis::new(n)?;
        basis.inverse_signal(&self.coeffs(basis.max_level())?)
    }
}

/// Abscissa of the regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateAxis {
    /// `log n`.
    LogN,
    /// `log(n / (log n)^{1+1/α})`.
    LogNOverLog { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSetup {
    pub target: PowerLawTarget,
    pub nu: f64,
    /// Fixed Gamma filter scale; `None` for no blur.
    pub lambda: Option<f64>,
    pub sigma: f64,
    pub method: Method,
    /// Freeze the projection level instead of the rate-optimal `j₁(n)`.
    pub fixed_level: Option<i32>,
    pub axis: RateAxis,
    pub seed: u64,
    pub bootstrap: usize,
}

impl RateSetup {
    pub fn linear(target: PowerLawTarget, nu: f64, lambda: f64, sigma: f64, seed: u64) -> Self {
        Self {
            target,
            nu,
            lambda: Some(lambda),
            sigma,
            method: Method::Linear,
            fixed_level: None,
            axis: RateAxis::LogN,
            seed,
            bootstrap: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub level: Option<i32>,
    pub rmse: f64,
    pub mses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSlope {
    pub slope: f64,
    pub stderr: f64,
    /// `−s/(2s + 2ν + 1)`.
    pub reference_slope: f64,
    pub points: Vec<RatePoint>,
}

fn filter_for(setup: &RateSetup, n: usize) -> Result<FilterRealization> {
    match setup.lambda {
        Some(l) if setup.nu > 0.0 => gamma_filter(setup.nu, l, n),
        _ => identity_filter(n),
    }
}

fn one_trial(
    setup: &RateSetup,
    truth: &PeriodicSignal,
    filter: &FilterRealization,
    basis: &MeyerBasis,
    level: Option<i32>,
    seed: u64,
) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let obs = observe(truth, filter, setup.sigma, &mut rng)?;
    let est = match (setup.method, level) {
        (Method::Linear, Some(j)) => estimate_linear(&obs, filter, basis, j)?,
        (Method::Linear, None) => unreachable!("linear level resolved by caller"),
        (m, _) => {
            let k = setup
                .lambda
                .map(|l| EstimatorConfig::filter_scale_for(setup.nu, l))
                .unwrap_or(1.0);
            let cfg = EstimatorConfig::new(m, setup.nu, 1.0).with_filter_scale(k);
            estimate(&obs, filter, basis, &cfg)?
        }
    };
    est.signal.mse(truth)
}

fn axis_value(axis: RateAxis, n: f64) -> f64 {
    match axis {
        RateAxis::LogN => n.ln(),
        RateAxis::LogNOverLog { alpha } => (n / n.ln().powf(1.0 + 1.0 / alpha)).ln(),
    }
}

/// Least-squares slope of `log √(mean MSE)` against the configured axis, with a
/// bootstrap standard error from resampling trials within each `n`.
pub fn empirical_rate_slope(setup: &RateSetup, n_grid: &[usize], trials: usize) -> Result<RateSlope> {
    if n_grid.len() < 4 {
        return Err(Error::Config(format!(
            "rate probe needs at least 4 grid sizes, got {}",
            n_grid.len()
        )));
    }
    if trials < 2 {
        return Err(Error::Config("rate probe needs at least 2 trials".into()));
    }
    if n_grid.iter().any(|&n| !n.is_power_of_two() || n < 16) {
        return Err(Error::Config("grid sizes must be powers of two >= 16".into()));
    }
    if !(setup.sigma >= 0.0 && setup.sigma.is_finite()) {
        return Err(Error::Config("sigma must be non-negative".into()));
    }
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let basis = MeyerBasis::new(n)?;
        let truth = setup.target.signal(n)?;
        let filter = filter_for(setup, n)?;
        let level = match (setup.method, setup.fixed_level) {
            (Method::Linear, Some(j)) => Some(j),
            (Method::Linear, None) => Some(
                linear_level(n, setup.target.s, setup.nu, 1.0)?
                    .level
                    .clamp(0, basis.max_level() + 1),
            ),
            _ => None,
        };
        let mses = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(setup.seed, &format!("rate-{n}"), t as u64);
                one_trial(setup, &truth, &filter, &basis, level, seed)
            })
            .collect::<Result<Vec<f64>>>()?;
        let rmse = (mses.iter().sum::<f64>() / trials as f64).sqrt();
        points.push(RatePoint {
            n,
            level,
            rmse,
            mses,
        });
    }
    let x: Vec<f64> = points.iter().map(|p| axis_value(setup.axis, p.n as f64)).collect();
    let slope_of = |rmse: &[f64]| -> Result<f64> {
        let y: Vec<f64> = rmse.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
        Ok(fit_line(&x, &y)?.slope)
    };
    let base: Vec<f64> = points.iter().map(|p| p.rmse).collect();
    let slope = slope_of(&base)?;
    let mut rng = seeded_rng(derive_seed(setup.seed, "bootstrap", 0));
    let mut boots = Vec::with_capacity(setup.bootstrap);
    for _ in 0..setup.bootstrap {
        let r: Vec<f64> = points
            .iter()
            .map(|p| {
                let m = p.mses.len();
                let s: f64 = (0..m).map(|_| p.mses[rng.random_range(0..m)]).sum();
                (s / m as f64).sqrt()
            })
            .collect();
        boots.push(slope_of(&r)?);
    }
    let stderr = if boots.len() >= 2 {
        crate::analysis::stats::variance(&boots).sqrt()
    } else {
        0.0
    };
    let s = setup.target.s;
    Ok(RateSlope {
        slope,
        stderr,
        reference_slope: -s / (2.0 * s + 2.0 * setup.nu + 1.0),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_target_tail() {
        let t = PowerLawTarget {
            s: 1.0,
            amplitude: 1.0,
            top_level: 4,
        };
        let c = t.coeffs(6).unwrap();
        let e4: f64 = c.level(4).iter().map(|v| v * v).sum();
        assert!((e4 - 2f64.powi(-8)).abs() < 1e-15);
        assert!(t.coeffs(3).is_err());
    }

    #[test]
    fn too_few_points() {
        let t = PowerLawTarget {
            s: 1.0,
            amplitude: 1.0,
            top_level: 4,
        };
        let s = RateSetup::linear(t, 1.0, 6.0, 1.0, 1);
        assert!(matches!(
            empirical_rate_slope(&s, &[64, 128, 256], 4),
            Err(Error::Config(_))
        ));
    }
}
