//! Local model of the curve near a curvature minimum:
//! `gamma(y) = (y, g(y))` with `g(y) = lambda y^2 / 2 + a y^4 + phi(y)`.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::poly::Polynomial;

/// Lowest and highest admissible degree of the perturbation `phi`.
pub const PHI_MIN_DEGREE: usize = 5;
pub const PHI_MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct CurveParams {
    r: f64,
    lambda: f64,
    a: f64,
    phi: Vec<f64>,
    g: Polynomial,
    g1: Polynomial,
    g2: Polynomial,
    phi_poly: Polynomial,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    r: f64,
    lambda: f64,
    a: f64,
    #[serde(default)]
    phi: Vec<f64>,
}

impl CurveParams {
    /// Quartic model with `phi = 0`.
    pub fn new(r: f64, lambda: f64, a: f64) -> Result<Self> {
        Self::with_phi(r, lambda, a, Vec::new())
    }

    /// `phi[i]` is the coefficient of `y^(5 + i)`.
    pub fn with_phi(r: f64, lambda: f64, a: f64, phi: Vec<f64>) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid(
                "r",
                format!("must be positive and finite, got {r}"),
            ));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid(
                "lambda",
                format!("must be positive and finite, got {lambda}"),
            ));
        }
        if !a.is_finite() {
            return Err(invalid("a", format!("must be finite, got {a}")));
        }
        if phi.len() > PHI_MAX_DEGREE - PHI_MIN_DEGREE + 1 {
            return Err(invalid(
                "phi",
                format!(
                    "at most {} coefficients (degrees {PHI_MIN_DEGREE}..={PHI_MAX_DEGREE}), got {}",
                    PHI_MAX_DEGREE - PHI_MIN_DEGREE + 1,
                    phi.len()
                ),
            ));
        }
        if let Some(c) = phi.iter().find(|c| !c.is_finite()) {
            return Err(invalid("phi", format!("non-finite coefficient {c}")));
        }

        let mut phi_coeffs = vec![0.0; PHI_MIN_DEGREE];
        phi_coeffs.extend_from_slice(&phi);
        let phi_poly = Polynomial::new(phi_coeffs.clone());

        let mut g_coeffs = phi_coeffs;
        if g_coeffs.len() < 5 {
            g_coeffs.resize(5, 0.0);
        }
        g_coeffs[2] += 0.5 * lambda;
        g_coeffs[4] += a;
        let g = Polynomial::new(g_coeffs);
        let g1 = g.derivative();
        let g2 = g1.derivative();
        Ok(Self {
            r,
            lambda,
            a,
            phi,
            g,
            g1,
            g2,
            phi_poly,
        })
    }

    /// Parses the key-value config (`r`, `lambda`, `a`, optional `phi = [c5, c6, ...]`).
    /// Unknown keys are rejected.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let raw: RawParams = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Self::with_phi(raw.r, raw.lambda, raw.a, raw.phi)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn has_phi(&self) -> bool {
        self.phi.iter().any(|&c| c != 0.0)
    }

    /// The full polynomial `g`.
    pub fn g_poly(&self) -> &Polynomial {
        &self.g
    }

    pub fn phi_poly(&self) -> &Polynomial {
        &self.phi_poly
    }

    /// Same curve with a different cap half-width.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::with_phi(r, self.lambda, self.a, self.phi.clone())
    }

    /// Same curve with a different quartic coefficient.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::with_phi(self.r, self.lambda, a, self.phi.clone())
    }

    #[inline]
    pub fn g(&self, y: f64) -> f64 {
        self.g.eval(y)
    }

    #[inline]
    pub fn g_prime(&self, y: f64) -> f64 {
        self.g1.eval(y)
    }

    #[inline]
    pub fn g_double_prime(&self, y: f64) -> f64 {
        self.g2.eval(y)
    }

    /// `eta_r(y) = eta(y / r)`.
    #[inline]
    pub fn cutoff(&self, y: f64) -> f64 {
        mollifier(y / self.r)
    }

    /// Arclength density times the cutoff: `(1 + g'(y)^2)^(1/2) eta_r(y)`.
    #[inline]
    pub fn weight_g(&self, y: f64) -> f64 {
        let eta = self.cutoff(y);
        if eta == 0.0 {
            return 0.0;
        }
        let d = self.g_prime(y);
        (1.0 + d * d).sqrt() * eta
    }

    /// `kappa(y) = g''(y) / (1 + g'(y)^2)^(3/2)`.
    pub fn curvature(&self, y: f64) -> f64 {
        let d = self.g_prime(y);
        self.g_double_prime(y) / (1.0 + d * d).powf(1.5)
    }

    pub fn classify_regime(&self) -> RegimeReport {
        RegimeReport::new(self.lambda, self.a)
    }
}

impl fmt::Display for CurveParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r = {}, lambda = {}, a = {}",
            self.r, self.lambda, self.a
        )?;
        if !self.phi.is_empty() {
            write!(f, ", phi = {:?}", self.phi)?;
        }
        Ok(())
    }
}

/// Smooth cutoff: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, even, values in `[0, 1]`.
///
/// On the transition `1 < |x| < 2` it is `B(2 - |x|)` with the partition bump
/// `B(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`.
pub fn mollifier(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 1.0 {
        1.0
    } else if ax >= 2.0 {
        0.0
    } else {
        let t = 2.0 - ax;
        let p = (-1.0 / t).exp();
        let q = (-1.0 / (1.0 - t)).exp();
        p / (p + q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `a < (lambda/2)^3`: the origin is not a curvature minimum.
    NotAMinimum,
    /// `(lambda/2)^3 <= a < 3/2 (lambda/2)^3`.
    ExtremizersExist,
    /// `3/2 (lambda/2)^3 <= a <= 2 (lambda/2)^3`, unresolved.
    OpenGap,
    /// `a > 2 (lambda/2)^3`.
    NoExtremizers,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NotAMinimum => "not_a_minimum",
            Regime::ExtremizersExist => "extremizers_exist",
            Regime::OpenGap => "open_gap",
            Regime::NoExtremizers => "no_extremizers",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub a_value: f64,
    pub threshold_min: f64,
    pub threshold_exist: f64,
    pub threshold_nonexist: f64,
    pub regime: Regime,
    /// Second arclength derivative of the curvature at the origin, `24a - 3 lambda^3`.
    pub kappa_s2_at_origin: f64,
}

impl RegimeReport {
    pub fn new(lambda: f64, a: f64) -> Self {
        let base = (0.5 * lambda).powi(3);
        let threshold_min = base;
        let threshold_exist = 1.5 * base;
        let threshold_nonexist = 2.0 * base;
        let regime = if a < threshold_min {
            Regime::NotAMinimum
        } else if a < threshold_exist {
            Regime::ExtremizersExist
        } else if a <= threshold_nonexist {
            Regime::OpenGap
        } else {
            Regime::NoExtremizers
        };
        Self {
            a_value: a,
            threshold_min,
            threshold_exist,
            threshold_nonexist,
            regime,
            kappa_s2_at_origin: 24.0 * a - 3.0 * lambda.powi(3),
        }
    }

    pub fn curvature_min_at_origin(&self) -> bool {
        self.regime != Regime::NotAMinimum
    }
}
