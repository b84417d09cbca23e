//! Executable regularizations of the Dirac delta.
//!
//! * [`testfn`] builds smooth compactly supported bumps from `exp(-1/x)`.
//! * [`special`] provides the sine integral, Dirichlet tails and the
//!   `sin²y/y²` integral.
//! * [`families`] evaluates the sinc kernel `sin(Rx)/(πx)` and the
//!   Lorentzian `(ε/π)/(x²+ε²)` together with their anchored primitives.
//! * [`pairing`] integrates kernels against test functions with
//!   oscillation-aware panels and extrapolates the limit.
//! * [`seqdist`] checks fundamental sequences, equivalence and the
//!   distributional derivative on sup-norm grids.

#![allow(clippy::excessive_precision)]

pub mod error;
pub mod families;
pub mod pairing;
pub mod quad;
pub mod seqdist;
pub mod special;
pub mod testfn;

pub use error::{Error, Result};
pub use quad::{Integrator, QuadResult};
pub use testfn::{Interval, TestFunction};
