//! Moments of exponential functionals `I = ∫_s^t exp(-X_u) du` of additive
//! processes described by their Laplace exponent `Φ(t; λ) = -ln E e^{-λ X_t}`.
//!
//! The numerical core is generic over the scalar type through [`Real`];
//! the aliases below fix it to `f64`. The [`montecarlo`] module and the
//! [`cli`] work in `f64` only.

// `!(x > 0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exponents;
mod layer;
pub mod moments;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Model = exponents::ExponentModel<f64>;
pub type Query = moments::MomentQuery<f64>;
pub type Moment = moments::MomentResult<f64>;
pub type Quad = quadrature::QuadConfig<f64>;
