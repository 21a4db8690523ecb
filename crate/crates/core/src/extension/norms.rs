use std::f64::consts::PI;

use rayon::prelude::*;

use super::foschi::foschi_constant;
use super::trial::TrialFunction;
use crate::autoconv::{AngularRule, BoundaryCoords, TripleConvolution, DEFAULT_QUAD_NODES};
use crate::curve::CurveParams;
use crate::error::{invalid, Error, Result};
use crate::quad::{gauss_legendre, simpson_weights};
use crate::sum::{pairwise_dot, pairwise_sum};

/// Relative slack of the Hölder comparison.
const HOLDER_TOL: f64 = 1e-8;

/// Density of `(f sigma)^(*3)` in `(xi, eps)` coordinates.
pub fn weighted_density_f(
    model: &TripleConvolution,
    f: &TrialFunction,
    pt: BoundaryCoords,
    quad_nodes: usize,
) -> Result<f64> {
    let rule = AngularRule::new(quad_nodes);
    weighted_with(model, f, &rule, pt)
}

fn weighted_with(
    model: &TripleConvolution,
    f: &TrialFunction,
    rule: &AngularRule,
    pt: BoundaryCoords,
) -> Result<f64> {
    let p = model.params();
    let lambda = p.lambda();
    model.density_with(rule, pt, |y| f.eval(lambda, y) * p.weight_g(y))
}

/// Tensor Simpson grid for the `(xi, eps)` integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormGrid {
    /// Intervals per axis; a multiple of 4 so the half grid is also Simpson.
    pub n: usize,
    /// Allowed relative change of the norm between the half and full grids.
    pub tol: f64,
    pub quad_nodes: usize,
}

impl Default for NormGrid {
    fn default() -> Self {
        Self {
            n: 512,
            tol: 1e-6,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

impl NormGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_multiple_of(4) {
            return Err(invalid(
                "norm.n",
                format!("must be a multiple of 4 and at least 8, got {}", self.n),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(invalid(
                "norm.tol",
                format!("must be positive, got {}", self.tol),
            ));
        }
        if self.quad_nodes < 4 {
            return Err(invalid(
                "quad.nodes",
                format!("need at least 4, got {}", self.quad_nodes),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L6Estimate {
    pub norm: f64,
    /// `||T f||_6^6` on the full grid.
    pub sixth_power: f64,
    /// Same on the half grid.
    pub coarse_sixth_power: f64,
    pub xi_extent: f64,
    pub eps_extent: f64,
}

/// Rectangle `[-xi_top, xi_top] x [0, eps_top]` containing the support of
/// `(f sigma)^(*3)`, shrunk to where `f` is non-negligible.
fn extents(model: &TripleConvolution, f: &TrialFunction) -> (f64, f64) {
    let p = model.params();
    let r = p.r();
    let big_r = f.effective_radius(p.lambda(), 2.0 * r);
    let xi_top = (3.0 * r).min(3.0 * big_r);
    let g_top = p.g(big_r).max(p.g(-big_r));
    let g_bottom = (0..=400)
        .map(|i| p.g(-big_r + 2.0 * big_r * i as f64 / 400.0))
        .fold(f64::INFINITY, f64::min);
    let eps_top = (3.0 * (g_top - g_bottom)).max(0.0).sqrt() * 1.02;
    (xi_top, eps_top)
}

/// `||T f||_6 = ((2 pi)^2 iint |F_f|^2 2 eps d eps d xi)^{1/6}`, checked
/// against the same sum on every other grid point.
pub fn extension_l6(
    model: &TripleConvolution,
    f: &TrialFunction,
    grid: &NormGrid,
) -> Result<L6Estimate> {
    grid.validate()?;
    let (xi_top, eps_top) = extents(model, f);
    if f.is_zero() || !(eps_top > 0.0) {
        return Ok(L6Estimate {
            norm: 0.0,
            sixth_power: 0.0,
            coarse_sixth_power: 0.0,
            xi_extent: xi_top,
            eps_extent: eps_top,
        });
    }
    let n = grid.n;
    let hx = 2.0 * xi_top / n as f64;
    let he = eps_top / n as f64;
    let rule = AngularRule::new(grid.quad_nodes);
    let rows: Vec<Result<Vec<f64>>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let xi = if 2 * i == n {
                0.0
            } else {
                -xi_top + hx * i as f64
            };
            (0..=n)
                .map(|j| {
                    let eps = he * j as f64;
                    let v = weighted_with(model, f, &rule, BoundaryCoords::new(xi, eps))?;
                    Ok(v * v * 2.0 * eps)
                })
                .collect()
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let wx = simpson_weights(n, hx);
    let we = simpson_weights(n, he);
    let wx2 = simpson_weights(n / 2, 2.0 * hx);
    let we2 = simpson_weights(n / 2, 2.0 * he);
    let fine_rows: Vec<f64> = rows.iter().map(|row| pairwise_dot(&we, row)).collect();
    let coarse_rows: Vec<f64> = rows
        .iter()
        .step_by(2)
        .map(|row| {
            let sub: Vec<f64> = row.iter().step_by(2).copied().collect();
            pairwise_dot(&we2, &sub)
        })
        .collect();
    let scale = (2.0 * PI).powi(2);
    let fine = scale * pairwise_dot(&wx, &fine_rows);
    let coarse = scale * pairwise_dot(&wx2, &coarse_rows);
    let (fine_norm, coarse_norm) = (
        fine.max(0.0).powf(1.0 / 6.0),
        coarse.max(0.0).powf(1.0 / 6.0),
    );
    if !((fine_norm - coarse_norm).abs() <= grid.tol * fine_norm) {
        return Err(Error::GridUnresolved {
            what: "extension L6 norm",
            coarse: coarse_norm,
            fine: fine_norm,
            tol: grid.tol,
        });
    }
    Ok(L6Estimate {
        norm: fine_norm,
        sixth_power: fine,
        coarse_sixth_power: coarse,
        xi_extent: xi_top,
        eps_extent: eps_top,
    })
}

pub fn extension_l6_norm(
    model: &TripleConvolution,
    f: &TrialFunction,
    grid: &NormGrid,
) -> Result<f64> {
    extension_l6(model, f, grid).map(|e| e.norm)
}

/// `||f||_{L^2(sigma)}` against the cut-off arclength measure `G_r(y) dy`.
pub fn l2_norm(params: &CurveParams, f: &TrialFunction) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let r = params.r();
    let lambda = params.lambda();
    let mut knots = vec![-2.0 * r, -r, 0.0, r, 2.0 * r];
    knots.extend(
        f.breakpoints(lambda)
            .into_iter()
            .filter(|y| y.abs() < 2.0 * r),
    );
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup();
    let integrand = |y: f64| {
        let v = f.eval(lambda, y);
        v * v * params.weight_g(y)
    };
    // rough magnitude first, to set an absolute target for the adaptive rule
    let gl = gauss_legendre(64);
    let rough: f64 = knots
        .windows(2)
        .map(|k| {
            let (c, h) = (0.5 * (k[0] + k[1]), 0.5 * (k[1] - k[0]));
            h * gl
                .iter()
                .map(|&(x, w)| w * integrand(c + h * x))
                .sum::<f64>()
        })
        .sum();
    if rough == 0.0 {
        return 0.0;
    }
    let target = 1e-13 * rough.abs() / knots.len() as f64;
    let pieces: Vec<f64> = knots
        .windows(2)
        .map(|k| quadrature::integrate(integrand, k[0], k[1], target).integral)
        .collect();
    pairwise_sum(&pieces).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub ratio: f64,
    pub foschi: f64,
    /// `ratio / foschi - 1`.
    pub gap: f64,
}

/// `||T f_delta||_6 / ||f_delta||_2` for each Gaussian width.
pub fn ratio_sweep(
    model: &TripleConvolution,
    deltas: &[f64],
    grid: &NormGrid,
) -> Result<Vec<SweepRow>> {
    if deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(
            "sweep.deltas",
            "must be strictly decreasing".to_string(),
        ));
    }
    let foschi = foschi_constant(model.params().lambda())?;
    deltas
        .iter()
        .map(|&delta| {
            let f = TrialFunction::gaussian(delta)?;
            let ratio = extension_l6_norm(model, &f, grid)? / l2_norm(model.params(), &f);
            Ok(SweepRow {
                delta,
                ratio,
                foschi,
                gap: ratio / foschi - 1.0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    /// `||T |f| ||_6^6`.
    pub lhs: f64,
    /// `(2 pi)^2 ||sigma^(*3)||_inf ||f||_2^6`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `||T f||_6^6` with the bound `(2 pi)^2 linf_triple ||f||_2^6`, for `|f|`.
pub fn holder_bound_check(
    model: &TripleConvolution,
    f: &TrialFunction,
    grid: &NormGrid,
    linf_triple: f64,
) -> Result<HolderCheck> {
    if !(linf_triple >= 0.0 && linf_triple.is_finite()) {
        return Err(invalid(
            "linf_triple",
            format!("must be finite and nonnegative, got {linf_triple}"),
        ));
    }
    let f = f.magnitude();
    let lhs = extension_l6(model, &f, grid)?.sixth_power;
    let rhs = (2.0 * PI).powi(2) * linf_triple * l2_norm(model.params(), &f).powi(6);
    Ok(HolderCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + HOLDER_TOL),
    })
}
