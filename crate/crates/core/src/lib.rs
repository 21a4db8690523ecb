//! Numerical laboratory for the triple autoconvolution of arclength measure on
//! quartic-perturbed parabolas `y -> (y, lambda y^2/2 + a y^4 + phi(y))`, and for
//! the sharp-constant comparison of the associated extension operator.
//!
//! * [`curve`]: the curve model, cutoff, curvature and regime thresholds.
//! * [`autoconv`]: the desingularized density `F(xi, eps)`, Hessian test and maximum scan.
//! * [`oracle`]: brute-force thickened-delta evaluation of the convolution.
//! * [`extension`]: L^6 / L^2 norms, Foschi constant and Gaussian trial ratios.
//! * [`cli`]: batch front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autoconv;
pub mod cli;
pub mod curve;
pub mod error;
pub mod extension;
pub mod fmt;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod sum;

pub use curve::{CurveParams, Regime, RegimeReport};
pub use error::{Error, Result};
