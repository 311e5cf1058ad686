//! Dynamics of the wave equation on the half-line with the inverse-square
//! Bessel potential 15/(4z²) and generalized boundary conditions at the
//! origin.
//!
//! The crate covers the boundary-parameter atlas (which triples
//! α = (α₀, α₁, α₂) are realizable as self-adjoint extensions), the point
//! spectrum of the extended operator, the conserved high-order energy, a
//! time-domain leapfrog solver for single Fourier modes, and the assembly of
//! modes into a field on the Poincaré half-space with its graviton splitting.

pub mod atlas;
pub mod energy;
pub mod error;
pub mod fields;
pub mod profiles;
pub mod quad;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
