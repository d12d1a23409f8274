//! Bayesian structural model updating with a multimodal variational
//! autoencoder, at desk scale.
//!
//! The crate covers the full loop: simulated seismic-response data
//! generation (a linear plane frame and a nonlinear 3-DOF hysteretic
//! stack), frequency-domain feature extraction, a joint multimodal VAE
//! with surrogate unimodal encoders, latent-space likelihood estimation,
//! and posterior sampling by Metropolis-Hastings or replica exchange.
//!
//! Scalar-generic modules accept `f32` or `f64` through [`scalar::Real`];
//! the pipeline and all oracle paths run `f64`. Concrete aliases for the
//! common instantiations live at the crate root.

pub mod error;
pub mod scalar;
pub mod signals;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default-precision time series.
pub type TimeSeries64 = signals::TimeSeries<f64>;
/// Default-precision feature matrix.
pub type FeatureMatrix64 = signals::FeatureMatrix<f64>;
