//! Test signals, convolution with a filter realization and the noisy
//! Fourier-domain observation `X_l = f_l Y_l + σ n^{−1/2} W_l`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::filters::{FilterRealization, FilterSource};
use crate::rng::seeded_rng;
use crate::signal::PeriodicSignal;
use crate::spectrum::{is_power_of_two, PairList, Spectrum};

/// The four classic piecewise-smooth test targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestSignal {
    Blocks,
    Bumps,
    HeaviSine,
    Doppler,
}

impl TestSignal {
    pub const ALL: [TestSignal; 4] = [
        TestSignal::Blocks,
        TestSignal::Bumps,
        TestSignal::HeaviSine,
        TestSignal::Doppler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestSignal::Blocks => "blocks",
            TestSignal::Bumps => "bumps",
            TestSignal::HeaviSine => "heavisine",
            TestSignal::Doppler => "doppler",
        }
    }

    /// Unscaled value at `t ∈ [0, 1)`.
    pub fn raw_value(self, t: f64) -> f64 {
        match self {
            TestSignal::Blocks => KNOTS
                .iter()
                .zip(BLOCK_HEIGHTS)
                .map(|(&k, h)| if t >= k { h } else { 0.0 })
                .sum(),
            TestSignal::Bumps => KNOTS
                .iter()
                .zip(BUMP_HEIGHTS)
                .zip(BUMP_WIDTHS)
                .map(|((&k, h), w)| h * (1.0 + ((t - k) / w).abs()).powi(-4))
                .sum(),
            TestSignal::HeaviSine => {
                4.0 * (4.0 * PI * t).sin() - sign(t - 0.3) - sign(0.72 - t)
            }
            TestSignal::Doppler => {
                (t * (1.0 - t)).sqrt() * (2.0 * PI * 1.05 / (t + 0.05)).sin()
            }
        }
    }
}

impl std::fmt::Display for TestSignal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blocks" => Ok(TestSignal::Blocks),
            "bumps" => Ok(TestSignal::Bumps),
            "heavisine" => Ok(TestSignal::HeaviSine),
            "doppler" => Ok(TestSignal::Doppler),
            other => domain(format!(
                "unknown test signal '{other}' (expected blocks, bumps, heavisine or doppler)"
            )),
        }
    }
}

// numpy-style sign: sign(0) = 0
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub const KNOTS: [f64; 11] = [
    0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81,
];
const BLOCK_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMP_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMP_WIDTHS: [f64; 11] = [
    0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005,
];

/// Target sampled on `t_i = i/n` and rescaled to unit sample standard deviation.
pub fn make_test_signal(target: TestSignal, n: usize) -> Result<PeriodicSignal> {
    if !is_power_of_two(n) {
        return domain(format!("grid size {n} is not a power of two >= 2"));
    }
    let raw: Vec<f64> = (0..n).map(|i| target.raw_value(i as f64 / n as f64)).collect();
    let sd = crate::signal::sample_sd(&raw);
    if !(sd > 0.0) {
        return domain(format!("{target} is constant on a grid of size {n}"));
    }
    PeriodicSignal::from_samples(raw.into_iter().map(|x| x / sd).collect())
}

/// Circular convolution `(f ⋆ Y)_l = f_l Y_l`.
pub fn convolve(f: &PeriodicSignal, filter: &FilterRealization) -> Result<PeriodicSignal> {
    if f.n() != filter.n() {
        return domain(format!(
            "signal grid {} does not match filter grid {}",
            f.n(),
            filter.n()
        ));
    }
    Ok(PeriodicSignal::from_spectrum(
        f.spectrum().multiply(filter.y_hat())?,
    ))
}

/// Noise level giving `sd(blurred) / σ = rsnr`.
pub fn rsnr_to_sigma(blurred: &PeriodicSignal, rsnr: f64) -> Result<f64> {
    if !(rsnr > 0.0 && rsnr.is_finite()) {
        return domain(format!("rsnr must be positive, got {rsnr}"));
    }
    let sd = blurred.sd();
    if !(sd > 0.0) {
        return domain("blurred signal has zero variance; rsnr is undefined");
    }
    Ok(sd / rsnr)
}

/// Noisy Fourier coefficients of the blurred signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    x_hat: Spectrum,
    sigma: f64,
    seed: Option<u64>,
    x0: f64,
}

impl Observation {
    pub fn new(x_hat: Spectrum, sigma: f64, seed: Option<u64>) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return domain(format!("sigma must be non-negative, got {sigma}"));
        }
        Ok(Self {
            x_hat,
            sigma,
            seed,
            x0: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.x_hat.n()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Initial value of the observed process; carried along, never used.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x_hat(&self) -> &Spectrum {
        &self.x_hat
    }

    /// Noisy blurred signal on the sample grid.
    pub fn samples(&self) -> Vec<f64> {
        self.x_hat.to_samples()
    }

    /// `t,y` rows of the sample-domain data.
    pub fn to_csv(&self) -> String {
        samples_csv("y", &self.samples())
    }
}

pub(crate) fn samples_csv(column: &str, samples: &[f64]) -> String {
    let n = samples.len() as f64;
    let mut out = format!("t,{column}\n");
    for (i, v) in samples.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i as f64 / n, v);
    }
    out
}

/// Draws `X_l = f_l Y_l + σ n^{−1/2} ζ_l` with `ζ_0` real standard normal and
/// `ζ_l = (g_l + i h_l)/√2` for `l ≥ 1`.
pub fn observe(
    f: &PeriodicSignal,
    filter: &FilterRealization,
    sigma: f64,
    rng: &mut dyn RngCore,
) -> Result<Observation> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return domain(format!("sigma must be non-negative, got {sigma}"));
    }
    let blurred = f.spectrum().multiply(filter.y_hat())?;
    let n = f.n();
    let scale = sigma / (n as f64).sqrt();
    let mut half = blurred.half().to_vec();
    let g0: f64 = rng.sample(StandardNormal);
    half[0] += scale * g0;
    for c in half.iter_mut().skip(1) {
        let g: f64 = rng.sample(StandardNormal);
        let h: f64 = rng.sample(StandardNormal);
        *c += scale * FRAC_1_SQRT_2 * Complex64::new(g, h);
    }
    Observation::new(Spectrum::from_half(n, half)?, sigma, None)
}

/// [`observe`] with a fresh generator seeded by `seed`, which is recorded.
pub fn observe_seeded(
    f: &PeriodicSignal,
    filter: &FilterRealization,
    sigma: f64,
    seed: u64,
) -> Result<Observation> {
    let mut rng = seeded_rng(seed);
    let mut obs = observe(f, filter, sigma, &mut rng)?;
    obs.seed = Some(seed);
    Ok(obs)
}

/// Everything produced by one simulated experiment.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub filter: FilterRealization,
    pub blurred: PeriodicSignal,
    pub sigma: f64,
    pub observation: Observation,
}

/// Draws a filter from `source`, blurs `truth`, sets σ from `rsnr` and adds noise.
/// The filter draw comes first from the seeded stream, then the noise, so
/// experiments that differ only in `rsnr` or the filter shape share their noise.
pub fn simulate(
    truth: &PeriodicSignal,
    source: &dyn FilterSource,
    rsnr: f64,
    seed: u64,
) -> Result<Simulation> {
    let mut rng = seeded_rng(seed);
    let filter = source.realize(truth.n(), &mut rng)?;
    let blurred = convolve(truth, &filter)?;
    let sigma = rsnr_to_sigma(&blurred, rsnr)?;
    let mut observation = observe(truth, &filter, sigma, &mut rng)?;
    observation.seed = Some(seed);
    Ok(Simulation {
        filter,
        blurred,
        sigma,
        observation,
    })
}

#[derive(Serialize, Deserialize)]
struct ObservationFile {
    n: usize,
    sigma: f64,
    seed: Option<u64>,
    x0: f64,
    x_hat: PairList,
}

impl Serialize for Observation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObservationFile {
            n: self.n(),
            sigma: self.sigma,
            seed: self.seed,
            x0: self.x0,
            x_hat: PairList::from_spectrum(&self.x_hat),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Observation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ObservationFile::deserialize(d)?;
        let x = raw.x_hat.into_spectrum(raw.n).map_err(D::Error::custom)?;
        if !raw.x0.is_finite() {
            return Err(D::Error::custom("x0 must be finite"));
        }
        let mut obs = Observation::new(x, raw.sigma, raw.seed).map_err(D::Error::custom)?;
        obs.x0 = raw.x0;
        Ok(obs)
    }
}
