//! Real 1-periodic signals sampled on a dyadic grid.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectrum::Spectrum;

/// Samples on `t_i = i/n` together with their Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal {
    samples: Vec<f64>,
    spectrum: Spectrum,
}

impl PeriodicSignal {
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let spectrum = Spectrum::from_samples(&samples)?;
        Ok(Self { samples, spectrum })
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        let samples = spectrum.to_samples();
        Self { samples, spectrum }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Ok(Self::from_spectrum(Spectrum::zeros(n)?))
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n() as f64;
        (0..self.n()).map(move |i| i as f64 / n)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    /// Sample standard deviation (divides by `n − 1`).
    pub fn sd(&self) -> f64 {
        sample_sd(&self.samples)
    }

    /// Mean over the grid of `(self − other)²`.
    pub fn mse(&self, other: &PeriodicSignal) -> Result<f64> {
        self.lp_error(other, 2.0)
    }

    /// Discrete `L^ρ` mean `(1/n) Σ |self − other|^ρ`.
    pub fn lp_error(&self, other: &PeriodicSignal, rho: f64) -> Result<f64> {
        if self.n() != other.n() {
            return domain(format!("grid size mismatch: {} vs {}", self.n(), other.n()));
        }
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs().powf(rho))
            .sum();
        Ok(s / self.n() as f64)
    }

    pub fn scaled(&self, factor: f64) -> PeriodicSignal {
        let samples: Vec<f64> = self.samples.iter().map(|x| x * factor).collect();
        let mut spectrum = self.spectrum.clone();
        for c in spectrum.half_mut() {
            *c *= factor;
        }
        Self { samples, spectrum }
    }
}

pub(crate) fn sample_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1.0)).sqrt()
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SignalFile {
    pub n: usize,
    pub samples: Vec<f64>,
}

impl Serialize for PeriodicSignal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignalFile {
            n: self.n(),
            samples: self.samples.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodicSignal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SignalFile::deserialize(d)?;
        if raw.samples.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "n = {} but {} samples",
                raw.n,
                raw.samples.len()
            )));
        }
        if raw.samples.iter().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom("non-finite sample"));
        }
        PeriodicSignal::from_samples(raw.samples).map_err(serde::de::Error::custom)
    }
}
