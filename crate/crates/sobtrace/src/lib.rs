//! Trace functionals and almost-optimal Whitney extensions for Sobolev data
//! on finite subsets of the real line.
//!
//! Given samples (E, f) with E a finite set of reals, the crate
//!
//! - builds the Whitney field of local interpolation jets and assembles the
//!   piecewise-polynomial extension (Hermite polynomials across gaps, jet
//!   polynomials on the tails),
//! - evaluates the discrete trace functionals that characterize when f
//!   extends with finite homogeneous or full Sobolev norm, together with
//!   sharp-maximal-function characterizations,
//! - converts the homogeneous construction into a compactly supported full
//!   Sobolev extension by inserting a coarse grid into long gaps and pinning
//!   it to zero, and
//! - reproduces the classical extremal constants (Favard's interpolation
//!   constants, the binomial upper bounds, the Euler spline) at desk scale.

pub mod error;
pub mod polycore;
pub mod knotsel;
pub mod whitfield;
pub mod extend_lmp;
pub mod extend_wmp;
pub mod functionals;
pub mod finiteness;
pub mod verify;

pub use error::{Error, Result};
