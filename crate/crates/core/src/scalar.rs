//! Scalar abstraction for the numerical core.
//!
//! Everything that is plain scalar math (feature extraction, hysteresis,
//! the tensor/NN stack, latent likelihoods, samplers) is generic over
//! [`Real`] so the same code runs in `f32` and `f64`. Oracle paths and the
//! pipeline always instantiate `f64`; `f32` exists for reduced-precision
//! training storage.

use ndarray::LinalgScalar;
use num_traits::{Float, FromPrimitive, NumAssignOps};
use rand::Rng;
use rustfft::FftNum;

pub trait Real:
    Float
    + FromPrimitive
    + NumAssignOps
    + LinalgScalar
    + FftNum
    + std::iter::Sum
    + std::fmt::Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64` literals and config values.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 converts to Real")
    }

    /// Widening (or identity) conversion used by oracles and serialization.
    fn to_f64_lossy(self) -> f64;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform draw on [0, 1).
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample::<$t, _>(rand_distr::StandardNormal)
            }

            fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.gen::<$t>()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
