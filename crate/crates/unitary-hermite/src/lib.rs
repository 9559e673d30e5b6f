//! Unitary Hermite polynomials, their zeros on the unit circle, the free
//! unitary normal distribution, finite free convolutions, backward heat flow
//! and the Lee-Yang zeros of the Curie-Weiss model.
//!
//! Every quantity that admits two independent computational routes is
//! exposed through both, so that each can serve as an oracle for the other.

pub mod circleroots;
pub mod curieweiss;
mod error;
pub mod freenormal;
pub mod heatflow;
pub(crate) mod mp;
pub mod polycore;
pub mod quad;
pub mod saddle;
pub mod scaledarith;
pub mod verify;
pub mod zetasolver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
