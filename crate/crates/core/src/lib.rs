//! Adaptive wavelet deconvolution of periodic signals observed through a random
//! filter in Gaussian white noise.
//!
//! The pipeline is: build a [`PeriodicSignal`], draw a [`FilterRealization`],
//! simulate an [`Observation`], then run one of the estimators in
//! [`estimators`] against a [`MeyerBasis`].

pub mod analysis;
pub mod error;
pub mod estimators;
pub mod filters;
pub mod forward_model;
pub mod meyer;
pub mod numeric;
pub mod plot;
pub mod rng;
pub mod signal;
pub mod spectrum;

pub use error::{Error, Result};
pub use estimators::{EstimateResult, EstimatorConfig, Method};
pub use filters::{FilterRealization, RandomFilterSpec};
pub use forward_model::{Observation, TestSignal};
pub use meyer::{MeyerBasis, WaveletCoeffs};
pub use signal::PeriodicSignal;
pub use spectrum::Spectrum;
