//! Zone classification and the matching minimax rates.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// Tolerance on `ε` for the critical zone.
pub const ZONE_TOL: f64 = 1e-12;

/// Besov class `B^s_{p,q}`, loss exponent `ρ` and ill-posedness `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub rho: f64,
    pub nu: f64,
}

impl RateParams {
    pub fn new(s: f64, p: f64, q: f64, rho: f64, nu: f64) -> Result<Self> {
        let rp = Self { s, p, q, rho, nu };
        rp.validate()?;
        Ok(rp)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.s, self.p, self.q, self.rho, self.nu]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return validation("rate parameters must be finite");
        }
        if !(self.p > 1.0 && self.q > 1.0 && self.rho > 1.0) {
            return validation(format!(
                "need p, q, rho > 1 (got p = {}, q = {}, rho = {})",
                self.p, self.q, self.rho
            ));
        }
        if !(self.s > 1.0 / self.p) {
            return validation(format!("need s > 1/p (got s = {}, p = {})", self.s, self.p));
        }
        if !(self.nu >= 0.0) {
            return validation(format!("nu must be non-negative, got {}", self.nu));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    Sparse,
    Critical,
    Regular,
}

/// `ε = (2s + 2ν + 1)/ρ − (2ν + 1)/p`.
pub fn epsilon(rp: &RateParams) -> f64 {
    (2.0 * rp.s + 2.0 * rp.nu + 1.0) / rp.rho - (2.0 * rp.nu + 1.0) / rp.p
}

pub fn classify_zone(rp: &RateParams) -> Zone {
    let e = epsilon(rp);
    if e.abs() <= ZONE_TOL {
        Zone::Critical
    } else if e > 0.0 {
        Zone::Regular
    } else {
        Zone::Sparse
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateDetail {
    pub zone: Zone,
    pub value: f64,
    /// Power of the base `1/n` (regular) or `ln n / n` (otherwise).
    pub exponent: f64,
    /// Extra `(ln n)^e` factor in the critical zone, reported separately.
    pub critical_log_exponent: Option<f64>,
}

/// `r_n = n^{−s/(2s+2ν+1)}` in the regular zone,
/// `s_n = (ln n / n)^{(s − 1/p + 1/ρ)/(2s + 2ν + 1 − 2/p)}` otherwise.
pub fn theoretical_rate_detail(rp: &RateParams, n: f64) -> RateDetail {
    let zone = classify_zone(rp);
    match zone {
        Zone::Regular => {
            let exponent = rp.s / (2.0 * rp.s + 2.0 * rp.nu + 1.0);
            RateDetail {
                zone,
                value: n.powf(-exponent),
                exponent,
                critical_log_exponent: None,
            }
        }
        Zone::Sparse | Zone::Critical => {
            let exponent = (rp.s - 1.0 / rp.p + 1.0 / rp.rho)
                / (2.0 * rp.s + 2.0 * rp.nu + 1.0 - 2.0 / rp.p);
            RateDetail {
                zone,
                value: (n.ln() / n).powf(exponent),
                exponent,
                critical_log_exponent: (zone == Zone::Critical)
                    .then(|| (1.0 - rp.p / (rp.rho * rp.q)).max(0.0)),
            }
        }
    }
}

pub fn theoretical_rate(rp: &RateParams, n: f64) -> f64 {
    theoretical_rate_detail(rp, n).value
}
