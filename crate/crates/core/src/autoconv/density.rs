use std::f64::consts::{FRAC_PI_3, PI};

use super::frame::{AngularFrame, AngularRule};
use super::psi::PsiSeries;
use super::solve::{solve_series, RhoSolution, SolveCtx};
use crate::curve::CurveParams;
use crate::error::{invalid, Error, Result};
use crate::quad::linspace;

pub const DEFAULT_QUAD_NODES: usize = 256;

const SQRT3: f64 = 1.732_050_807_568_877_2;

// Lattice used to certify d(psi)/d(rho) > 0 before any inversion.
const CHECK_XI: usize = 41;
const CHECK_RHO: usize = 41;
const CHECK_THETA: usize = 60;

/// A point `(xi, eps)` with `tau = 3 g(xi/3) + eps^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCoords {
    pub xi: f64,
    pub eps: f64,
}

impl BoundaryCoords {
    pub fn new(xi: f64, eps: f64) -> Self {
        Self { xi, eps }
    }

    pub fn origin() -> Self {
        Self { xi: 0.0, eps: 0.0 }
    }

    pub fn tau(&self, params: &CurveParams) -> f64 {
        3.0 * params.g(self.xi / 3.0) + self.eps * self.eps
    }
}

/// `sigma * sigma * sigma` at a point `(xi, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub xi: f64,
    pub tau: f64,
    /// `sqrt(tau - 3 g(xi/3))`, NaN below the lower boundary.
    pub eps: f64,
    pub value: f64,
    pub out_of_support: bool,
}

/// Angular-integral representation of the triple convolution for one curve.
///
/// Construction certifies that `psi` is increasing in `rho` on
/// `[-3r, 3r] x [0, rho_max] x [0, 2pi/3]`, where `rho_max = 3 sqrt(2) r` is the
/// largest radius at which the cutoff product can be nonzero for `|xi| <= 3r`.
#[derive(Debug, Clone)]
pub struct TripleConvolution {
    params: CurveParams,
    rho_max: f64,
    eps_max: f64,
}

impl TripleConvolution {
    pub fn new(params: CurveParams) -> Result<Self> {
        let r = params.r();
        let rho_max = 3.0 * std::f64::consts::SQRT_2 * r;
        let rule = AngularRule::on_period(CHECK_THETA, 2.0 * FRAC_PI_3);
        let rhos = linspace(0.0, rho_max, CHECK_RHO);
        let mut xis = linspace(-3.0 * r, 3.0 * r, CHECK_XI);
        xis.push(0.0);
        for &xi in &xis {
            let taylor = params.g_poly().taylor_at(xi / 3.0);
            for (j, f) in rule.frames().iter().enumerate() {
                let s = PsiSeries::new(&taylor, rule.sums(j));
                for &rho in &rhos {
                    let d = s.dpsi_over_rho(rho);
                    if !(d > 0.0) {
                        return Err(Error::MonotonicityViolated {
                            xi,
                            rho,
                            theta: f.theta,
                            dpsi_over_rho: d,
                            r,
                        });
                    }
                }
            }
        }
        let taylor0 = params.g_poly().taylor_at(0.0);
        let eps_max = (0..rule.len())
            .map(|j| PsiSeries::new(&taylor0, rule.sums(j)).v(rho_max))
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            params,
            rho_max,
            eps_max,
        })
    }

    pub fn params(&self) -> &CurveParams {
        &self.params
    }

    /// Upper end of the certified `rho` range.
    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Largest `eps` for which the inversion converges at `xi = 0` for every angle.
    pub fn eps_max(&self) -> f64 {
        self.eps_max
    }

    /// Half-width of the `xi` support, `3r`.
    pub fn xi_max(&self) -> f64 {
        3.0 * self.params.r()
    }

    pub fn solve_rho(&self, xi: f64, theta: f64, v: f64) -> Result<RhoSolution> {
        if !(xi.abs() <= self.xi_max()) {
            return Err(invalid(
                "xi",
                format!("|xi| = {} exceeds 3r = {}", xi.abs(), self.xi_max()),
            ));
        }
        if !(v >= 0.0) {
            return Err(invalid("v", format!("must be nonnegative, got {v}")));
        }
        let f = AngularFrame::new(theta);
        let taylor = self.params.g_poly().taylor_at(xi / 3.0);
        let mut sums = [0.0; super::frame::MAX_POWER + 1];
        for (k, s) in sums.iter_mut().enumerate() {
            *s = f.power_sum(k as i32);
        }
        let series = PsiSeries::new(&taylor, &sums);
        solve_series(
            &series,
            v,
            self.rho_max,
            &SolveCtx { xi, theta },
            self.params.r(),
        )
    }

    /// Desingularized density `F(xi, eps)` with `quad_nodes` periodic trapezoid nodes in `theta`.
    pub fn density_f(&self, pt: BoundaryCoords, quad_nodes: usize) -> Result<f64> {
        let rule = AngularRule::new(quad_nodes);
        self.density_with(&rule, pt, |y| self.params.weight_g(y))
    }

    /// `sigma^(*3)(xi, tau)`; zero below the lower boundary or for `|xi| > 3r`.
    pub fn triple_conv(&self, xi: f64, tau: f64, quad_nodes: usize) -> Result<DensitySample> {
        let eps2 = tau - 3.0 * self.params.g(xi / 3.0);
        if eps2 < 0.0 || xi.abs() > self.xi_max() || eps2.is_nan() {
            return Ok(DensitySample {
                xi,
                tau,
                eps: f64::NAN,
                value: 0.0,
                out_of_support: true,
            });
        }
        let eps = eps2.sqrt();
        let value = self.density_f(BoundaryCoords { xi, eps }, quad_nodes)?;
        Ok(DensitySample {
            xi,
            tau,
            eps,
            value,
            out_of_support: false,
        })
    }

    /// The angular integral with an arbitrary per-factor weight `w(y)`; the
    /// plain density uses `w = G_r`.
    pub(crate) fn density_with<W: Fn(f64) -> f64>(
        &self,
        rule: &AngularRule,
        pt: BoundaryCoords,
        weight: W,
    ) -> Result<f64> {
        let BoundaryCoords { xi, eps } = pt;
        if !(eps >= 0.0) {
            return Err(invalid("eps", format!("must be nonnegative, got {eps}")));
        }
        if !(xi.abs() <= self.xi_max()) {
            return Ok(0.0);
        }
        let r = self.params.r();
        let x = xi / 3.0;
        let taylor = self.params.g_poly().taylor_at(x);
        let v2 = eps * eps;
        let mut acc = 0.0;
        for (j, frame) in rule.frames().iter().enumerate() {
            let series = PsiSeries::new(&taylor, rule.sums(j));
            let (rho, d) = if eps == 0.0 {
                (0.0, series.dpsi_over_rho(0.0))
            } else {
                let cut = support_radius(x, frame, r).min(self.rho_max);
                if series.psi(cut) <= v2 {
                    continue;
                }
                let ctx = SolveCtx {
                    xi,
                    theta: frame.theta,
                };
                let sol = solve_series(&series, eps, cut, &ctx, r)?;
                (sol.rho, sol.dpsi_over_rho)
            };
            let w = weight(x + frame.alpha * rho)
                * weight(x + frame.beta * rho)
                * weight(x + frame.gamma * rho);
            if w != 0.0 {
                acc += w / d;
            }
        }
        Ok(acc * rule.weight() / SQRT3)
    }
}

/// Smallest `rho > 0` at which one of the three points `x + e_i rho` leaves `(-2r, 2r)`.
pub(crate) fn support_radius(x: f64, frame: &AngularFrame, r: f64) -> f64 {
    frame
        .components()
        .iter()
        .filter(|e| **e != 0.0)
        .map(|&e| {
            if e > 0.0 {
                (2.0 * r - x) / e
            } else {
                (2.0 * r + x) / -e
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// `F(0, 0) = 2 pi / (sqrt(3) lambda)`.
pub fn origin_value(lambda: f64) -> f64 {
    2.0 * PI / (SQRT3 * lambda)
}
