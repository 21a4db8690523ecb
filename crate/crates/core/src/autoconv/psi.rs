//! The phase `psi(xi; rho, theta) = sum_i g(xi/3 + e_i rho) - 3 g(xi/3)` where
//! `e = (alpha, beta, gamma)(theta)`.
//!
//! Two routes are kept. [`psi`] and [`dpsi_drho`] spell out the quartic terms
//! and evaluate `phi` at the three shifted points. [`PsiSeries`] expands `g`
//! around `xi/3` instead: `psi = sum_{k>=2} g^(k)(xi/3)/k! * p_k(theta) * rho^k`
//! with `p_k` the power sums of the frame. That expansion is exact for
//! polynomial `g` and lets `psi / rho^2` and `psi' / rho` be evaluated without
//! cancellation near `rho = 0`.

use super::frame::{AngularFrame, MAX_POWER};
use crate::curve::CurveParams;

// (2/3)^(3/2)
const TWO_THIRDS_POW_1_5: f64 = 0.544_331_053_951_817_4;

/// Direct evaluation of the phase including the `phi` terms.
pub fn psi(params: &CurveParams, xi: f64, rho: f64, theta: f64) -> f64 {
    let f = AngularFrame::new(theta);
    let (lambda, a) = (params.lambda(), params.a());
    let s3 = (3.0 * theta).sin();
    let rho2 = rho * rho;
    let quartic = 0.5 * lambda * rho2 + (2.0 / 3.0) * a * xi * xi * rho2
        - TWO_THIRDS_POW_1_5 * a * xi * s3 * rho2 * rho
        + 0.5 * a * rho2 * rho2;
    if !params.has_phi() {
        return quartic;
    }
    let phi = params.phi_poly();
    let x = xi / 3.0;
    let shifted: f64 = f.components().iter().map(|e| phi.eval(x + e * rho)).sum();
    quartic + shifted - 3.0 * phi.eval(x)
}

/// Exact `rho`-derivative of [`psi`].
pub fn dpsi_drho(params: &CurveParams, xi: f64, rho: f64, theta: f64) -> f64 {
    let f = AngularFrame::new(theta);
    let (lambda, a) = (params.lambda(), params.a());
    let s3 = (3.0 * theta).sin();
    let quartic = lambda * rho + (4.0 / 3.0) * a * xi * xi * rho
        - 3.0 * TWO_THIRDS_POW_1_5 * a * xi * s3 * rho * rho
        + 2.0 * a * rho * rho * rho;
    if !params.has_phi() {
        return quartic;
    }
    let dphi = params.phi_poly().derivative();
    let x = xi / 3.0;
    let shifted: f64 = f
        .components()
        .iter()
        .map(|e| e * dphi.eval(x + e * rho))
        .sum();
    quartic + shifted
}

/// `psi` as a polynomial in `rho` for fixed `(xi, theta)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PsiSeries {
    // c[k] multiplies rho^k; c[0] = c[1] = 0.
    c: [f64; MAX_POWER + 1],
    deg: usize,
}

impl PsiSeries {
    /// `taylor[k] = g^(k)(xi/3) / k!`, `power_sums[k] = p_k(theta)`.
    #[inline]
    pub(crate) fn new(taylor: &[f64], power_sums: &[f64; MAX_POWER + 1]) -> Self {
        let mut c = [0.0; MAX_POWER + 1];
        let deg = taylor.len() - 1;
        for k in 2..=deg {
            c[k] = taylor[k] * power_sums[k];
        }
        Self { c, deg: deg.max(2) }
    }

    /// `psi / rho^2`; equals `g''(xi/3) / 2` at `rho = 0`.
    #[inline]
    pub(crate) fn reduced(&self, rho: f64) -> f64 {
        let mut acc = 0.0;
        for k in (2..=self.deg).rev() {
            acc = acc * rho + self.c[k];
        }
        acc
    }

    /// `(d psi / d rho) / rho`; equals `g''(xi/3)` at `rho = 0`.
    #[inline]
    pub(crate) fn dpsi_over_rho(&self, rho: f64) -> f64 {
        let mut acc = 0.0;
        for k in (2..=self.deg).rev() {
            acc = acc * rho + k as f64 * self.c[k];
        }
        acc
    }

    #[inline]
    pub(crate) fn psi(&self, rho: f64) -> f64 {
        rho * rho * self.reduced(rho)
    }

    /// `v(rho) = rho * (psi / rho^2)^(1/2)`, the square root of `psi` on the branch `rho >= 0`.
    #[inline]
    pub(crate) fn v(&self, rho: f64) -> f64 {
        rho * self.reduced(rho).max(0.0).sqrt()
    }

    pub(crate) fn quadratic(&self) -> f64 {
        self.c[2]
    }
}

#[cfg(test)]
mod tests {
    use super::super::frame::AngularRule;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn vanishes_at_zero_rho() {
        let p = CurveParams::with_phi(0.1, 1.3, 0.7, vec![2.0, -1.0]).unwrap();
        for xi in [-0.2, 0.0, 0.13] {
            assert_eq!(psi(&p, xi, 0.0, 0.4), 0.0);
        }
    }

    #[test]
    fn value_at_xi_zero() {
        let p = CurveParams::new(0.5, 2.0, 1.0).unwrap();
        for theta in [0.0, 0.3, 2.0] {
            assert!((psi(&p, 0.0, 0.5, theta) - 0.28125).abs() < 1e-16);
        }
    }

    #[test]
    fn depends_on_theta_through_sin_3theta() {
        let p = CurveParams::new(0.5, 2.0, 1.5).unwrap();
        for theta in [0.1, 1.0, 2.5] {
            let a = psi(&p, 0.07, 0.2, theta);
            let b = psi(&p, 0.07, 0.2, theta + 2.0 * PI / 3.0);
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn series_matches_direct_route() {
        let p = CurveParams::with_phi(0.1, 1.7, 2.2, vec![3.0, -2.0, 0.5]).unwrap();
        let rule = AngularRule::new(11);
        for xi in [-0.25, 0.0, 0.11] {
            let taylor = p.g_poly().taylor_at(xi / 3.0);
            for (j, f) in rule.frames().iter().enumerate() {
                let s = PsiSeries::new(&taylor, rule.sums(j));
                for rho in [1e-4, 0.03, 0.2] {
                    let direct = psi(&p, xi, rho, f.theta);
                    assert!(
                        (s.psi(rho) - direct).abs() <= 1e-13 * direct.abs() + 1e-19,
                        "psi {xi} {rho} {} {} {}",
                        s.psi(rho),
                        direct,
                        f.theta
                    );
                    let d = dpsi_drho(&p, xi, rho, f.theta);
                    assert!((rho * s.dpsi_over_rho(rho) - d).abs() <= 1e-13 * d.abs());
                }
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = CurveParams::with_phi(0.1, 1.0, 3.0, vec![1.0]).unwrap();
        let h = 1e-6;
        let (xi, rho, th) = (0.05, 0.08, 0.9);
        let fd = (psi(&p, xi, rho + h, th) - psi(&p, xi, rho - h, th)) / (2.0 * h);
        assert!((fd - dpsi_drho(&p, xi, rho, th)).abs() < 1e-8);
    }

    #[test]
    fn series_limits_at_origin() {
        let p = CurveParams::with_phi(0.1, 1.5, 2.0, vec![4.0, 1.0]).unwrap();
        let xi: f64 = 0.12;
        let taylor = p.g_poly().taylor_at(xi / 3.0);
        let rule = AngularRule::new(5);
        let s = PsiSeries::new(&taylor, rule.sums(3));
        let g2 = p.g_double_prime(xi / 3.0);
        assert!((s.dpsi_over_rho(0.0) - g2).abs() < 1e-15);
        assert!((s.reduced(0.0) - 0.5 * g2).abs() < 1e-15);
        // quadratic coefficient: lambda/2 + 2/3 a xi^2 + phi''(xi/3)/2
        let phi2 = p.phi_poly().derivative().derivative().eval(xi / 3.0);
        let expect = 0.75 + 2.0 / 3.0 * 2.0 * xi * xi + 0.5 * phi2;
        assert!((s.quadratic() - expect).abs() < 1e-15);
    }
}
