//! Angular-integral representation of `sigma * sigma * sigma`.
//!
//! Around `xi/3` the three convolved points are written as
//! `xi/3 + (alpha, beta, gamma)(theta) * rho`, the phase `psi` is inverted in
//! `rho` for `psi = eps^2`, and the remaining `theta` integral is smooth and
//! periodic.

mod density;
mod frame;
mod hessian;
mod psi;
mod scan;
mod solve;

pub use density::{
    origin_value, BoundaryCoords, DensitySample, TripleConvolution, DEFAULT_QUAD_NODES,
};
pub use frame::{angular_frame, AngularFrame, AngularRule};
pub use hessian::{
    default_fd_step, hessian_at_origin, hessian_closed_form, HessianReport, Matrix2,
};
pub use psi::{dpsi_drho, psi};
pub use scan::{evaluate_grid, sup_scan, DensityGrid, ScanGrid, SupScan};
pub use solve::{residual_tolerance, RhoSolution};
