//! Inversion of `psi(xi; rho, theta) = v^2` on the branch `rho >= 0`.
//!
//! Newton runs on `v(rho) = rho * sqrt(psi / rho^2)`, which is nearly linear
//! near the origin, starting from the linearization `rho0 = v / sqrt(psi''(0)/2)`.
//! A bracket `[lo, hi]` is maintained; any step leaving it is replaced by a
//! bisection step.

use super::psi::PsiSeries;
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSolution {
    pub rho: f64,
    /// `d psi / d rho` at the solution. Zero only for `v = 0`.
    pub dpsi_drho: f64,
    /// `(d psi / d rho) / rho`, positive on the whole branch including `rho = 0`.
    pub dpsi_over_rho: f64,
    pub iterations: usize,
    /// `psi(rho) - v^2`.
    pub residual: f64,
}

/// Residual bound accepted by the solver.
pub fn residual_tolerance(v: f64) -> f64 {
    1e-12 * (v * v).max(1.0)
}

pub(crate) struct SolveCtx {
    pub xi: f64,
    pub theta: f64,
}

pub(crate) fn solve_series(
    series: &PsiSeries,
    v: f64,
    upper: f64,
    ctx: &SolveCtx,
    r: f64,
) -> Result<RhoSolution> {
    let monotonicity = |rho: f64, d: f64| Error::MonotonicityViolated {
        xi: ctx.xi,
        rho,
        theta: ctx.theta,
        dpsi_over_rho: d,
        r,
    };
    let d0 = series.dpsi_over_rho(0.0);
    if d0 <= 0.0 {
        return Err(monotonicity(0.0, d0));
    }
    if v == 0.0 {
        return Ok(RhoSolution {
            rho: 0.0,
            dpsi_drho: 0.0,
            dpsi_over_rho: d0,
            iterations: 0,
            residual: 0.0,
        });
    }
    let no_conv = |reason| Error::NoConvergence {
        xi: ctx.xi,
        theta: ctx.theta,
        v,
        reason,
    };

    let v_hi = series.v(upper);
    if v_hi < v {
        return Err(no_conv("v lies beyond the invertible branch"));
    }

    let (mut lo, mut hi) = (0.0_f64, upper);
    let mut rho = (v / series.quadratic().sqrt()).clamp(0.0, upper);
    if !(rho > lo && rho < hi) {
        rho = 0.5 * (lo + hi);
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITER {
        iterations += 1;
        let p = series.reduced(rho);
        let d = series.dpsi_over_rho(rho);
        if d <= 0.0 {
            return Err(monotonicity(rho, d));
        }
        let sp = p.sqrt();
        let f = rho * sp - v;
        if f == 0.0 {
            converged = true;
            break;
        }
        if f < 0.0 {
            lo = rho;
        } else {
            hi = rho;
        }
        let slope = d / (2.0 * sp);
        let mut next = rho - f / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - rho).abs();
        rho = next;
        if step <= 4.0 * f64::EPSILON * rho || hi - lo <= 4.0 * f64::EPSILON * hi {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(no_conv("iteration limit reached"));
    }
    let residual = series.psi(rho) - v * v;
    if residual.abs() > residual_tolerance(v) {
        return Err(no_conv("residual above tolerance"));
    }
    let d = series.dpsi_over_rho(rho);
    if d <= 0.0 {
        return Err(monotonicity(rho, d));
    }
    Ok(RhoSolution {
        rho,
        dpsi_drho: rho * d,
        dpsi_over_rho: d,
        iterations,
        residual,
    })
}
