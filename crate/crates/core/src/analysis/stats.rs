//! Summary statistics and the few tests the benchmark needs.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{validation, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Standard error of the mean; 0 for a single value.
pub fn std_error(x: &[f64]) -> f64 {
    if x.len() < 2 {
        0.0
    } else {
        (variance(x) / x.len() as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedTest {
    pub mean_diff: f64,
    pub t: f64,
    pub df: f64,
    /// One-sided p-value for `E(b − a) > 0`.
    pub p_value: f64,
}

impl PairedTest {
    pub fn significant(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// One-sided paired t-test of `H₁: E(b − a) > 0`.
pub fn paired_t_test_less(a: &[f64], b: &[f64]) -> Result<PairedTest> {
    if a.len() != b.len() || a.len() < 2 {
        return validation(format!(
            "paired test needs two equal samples of size >= 2, got {} and {}",
            a.len(),
            b.len()
        ));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let m = mean(&d);
    let se = std_error(&d);
    let df = (d.len() - 1) as f64;
    let (t, p_value) = if se == 0.0 {
        if m > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (if m < 0.0 { f64::NEG_INFINITY } else { 0.0 }, 1.0)
        }
    } else {
        let t = m / se;
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
        (t, 1.0 - dist.cdf(t))
    };
    Ok(PairedTest {
        mean_diff: m,
        t,
        df,
        p_value,
    })
}

/// `sup_t |F̂(t) − F(t)|`. Sorts `x` in place.
pub fn ks_distance(x: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AndersonDarling {
    pub statistic: f64,
    pub p_value: f64,
}

/// Anderson–Darling test of `z` against a fully specified standard normal.
pub fn anderson_darling_normal(z: &[f64]) -> Result<AndersonDarling> {
    if z.len() < 8 {
        return validation("Anderson–Darling needs at least 8 values");
    }
    let normal = Normal::standard();
    let mut u: Vec<f64> = z.iter().map(|&v| normal.cdf(v)).collect();
    u.sort_by(f64::total_cmp);
    let n = u.len();
    let eps = 1e-300;
    let s: f64 = (0..n)
        .map(|i| {
            let w = (2 * i + 1) as f64;
            w * (u[i].max(eps).ln() + (1.0 - u[n - 1 - i]).max(eps).ln())
        })
        .sum();
    let a2 = -(n as f64) - s / n as f64;
    Ok(AndersonDarling {
        statistic: a2,
        p_value: (1.0 - ad_inf_cdf(a2)).clamp(0.0, 1.0),
    })
}

/// Limiting distribution of the Anderson–Darling statistic (Marsaglia & Marsaglia).
fn ad_inf_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z < 2.0 {
        (-1.2337141 / z).exp() / z.sqrt()
            * (2.00012
                + (0.247105
                    - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z)
                    * z)
    } else {
        (-(1.0776
            - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z)
            .exp())
        .exp()
    }
}
