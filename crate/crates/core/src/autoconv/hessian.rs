//! Second derivative test for `F` at `(xi, eps) = (0, 0)`.
//!
//! Entries are ordered `[xi, eps]`. `F` is only defined for `eps >= 0`, so the
//! `eps` stencils are one-sided. `F` is even in `eps` (the map
//! `(rho, theta) -> (-rho, theta + pi)` leaves `psi` and the weights unchanged),
//! hence all stencils have `O(h^2)` truncation error and the two-step
//! Richardson combination uses order 2.

use std::f64::consts::PI;

use super::density::{BoundaryCoords, TripleConvolution};
use crate::error::{invalid, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianReport {
    /// Richardson-extrapolated finite-difference `d^2 F / d eps^2`.
    pub d2_eps: f64,
    /// Richardson-extrapolated `d^2 F / d xi^2` along `eps = 0`.
    pub d2_xi: f64,
    pub mixed: f64,
    pub closed_form: Matrix2,
    pub fd: Matrix2,
    /// Both extrapolated diagonal entries negative.
    pub is_strict_max: bool,
    pub step: f64,
}

impl HessianReport {
    /// Largest entrywise relative deviation of the diagonal.
    pub fn max_rel_diag_error(&self) -> f64 {
        (0..2)
            .map(|i| ((self.fd[i][i] - self.closed_form[i][i]) / self.closed_form[i][i]).abs())
            .fold(0.0, f64::max)
    }
}

/// `(2 pi / sqrt 3)(1 / lambda) diag(lambda^2/3 - 8a/(3 lambda), 2 lambda - 8a / lambda^2)`.
pub fn hessian_closed_form(lambda: f64, a: f64) -> Matrix2 {
    let c = 2.0 * PI / SQRT3 / lambda;
    [
        [c * (lambda * lambda / 3.0 - 8.0 * a / (3.0 * lambda)), 0.0],
        [0.0, c * (2.0 * lambda - 8.0 * a / (lambda * lambda))],
    ]
}

pub fn default_fd_step(r: f64) -> f64 {
    1e-2 * r.min(1.0)
}

#[derive(Debug, Clone, Copy)]
struct Stencil {
    d2_xi: f64,
    d2_eps: f64,
    mixed: f64,
}

fn stencil(model: &TripleConvolution, h: f64, quad_nodes: usize) -> Result<Stencil> {
    let f = |xi: f64, eps: f64| model.density_f(BoundaryCoords::new(xi, eps), quad_nodes);
    let f00 = f(0.0, 0.0)?;
    let f0h = f(0.0, h)?;
    let f02h = f(0.0, 2.0 * h)?;
    let fp0 = f(h, 0.0)?;
    let fm0 = f(-h, 0.0)?;
    let fph = f(h, h)?;
    let fmh = f(-h, h)?;
    Ok(Stencil {
        d2_eps: (f00 - 2.0 * f0h + f02h) / (h * h),
        d2_xi: (fp0 - 2.0 * f00 + fm0) / (h * h),
        mixed: (fph - fmh - fp0 + fm0) / (2.0 * h * h),
    })
}

fn richardson2(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

pub fn hessian_at_origin(
    model: &TripleConvolution,
    fd_step: f64,
    quad_nodes: usize,
) -> Result<HessianReport> {
    let r = model.params().r();
    if !(fd_step > 0.0 && 3.0 * fd_step < r) {
        return Err(invalid(
            "fd_step",
            format!("need 0 < 3 * fd_step < r = {r}, got fd_step = {fd_step}"),
        ));
    }
    if 2.0 * fd_step >= model.eps_max() {
        return Err(invalid("fd_step", "2 * fd_step exceeds eps_max"));
    }
    let coarse = stencil(model, fd_step, quad_nodes)?;
    let fine = stencil(model, 0.5 * fd_step, quad_nodes)?;
    let d2_xi = richardson2(coarse.d2_xi, fine.d2_xi);
    let d2_eps = richardson2(coarse.d2_eps, fine.d2_eps);
    let mixed = richardson2(coarse.mixed, fine.mixed);
    let p = model.params();
    Ok(HessianReport {
        d2_eps,
        d2_xi,
        mixed,
        closed_form: hessian_closed_form(p.lambda(), p.a()),
        fd: [[d2_xi, mixed], [mixed, d2_eps]],
        is_strict_max: d2_xi < 0.0 && d2_eps < 0.0,
        step: fd_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveParams;

    #[test]
    fn closed_form_examples() {
        let c = 2.0 * PI / SQRT3;
        let m = hessian_closed_form(1.0, 1.0);
        assert!((m[0][0] - c * (-7.0 / 3.0)).abs() < 1e-14);
        assert!((m[1][1] - c * (-6.0)).abs() < 1e-14);
        assert_eq!(m[0][1], 0.0);
        assert_eq!(hessian_closed_form(2.0, 2.0)[1][1], 0.0);
        assert_eq!(hessian_closed_form(2.0, 1.0)[0][0], 0.0);
    }

    #[test]
    fn fd_agrees_for_supercritical_quartic() {
        let m = TripleConvolution::new(CurveParams::new(0.1, 1.0, 1.0).unwrap()).unwrap();
        let rep = hessian_at_origin(&m, 1e-4, 256).unwrap();
        assert!(rep.is_strict_max);
        assert!(rep.max_rel_diag_error() < 1e-3, "{rep:?}");
        assert!(rep.mixed.abs() < 1e-6);
    }

    #[test]
    fn rejects_large_step() {
        let m = TripleConvolution::new(CurveParams::new(0.01, 1.0, 1.0).unwrap()).unwrap();
        assert!(hessian_at_origin(&m, 0.005, 64).is_err());
    }
}
