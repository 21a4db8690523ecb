use std::f64::consts::PI;

use crate::autoconv::{sup_scan, ScanGrid, TripleConvolution};
use crate::error::{invalid, Result};
use crate::fmt::sig17;
use crate::quad::linspace;
use crate::sum::pairwise_sum;

/// `C_F[lambda] = ((2 pi)^3 / (sqrt(3) lambda))^{1/6}`.
pub fn foschi_constant(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(((2.0 * PI).powi(3) / (3f64.sqrt() * lambda)).powf(1.0 / 6.0))
}

/// `(2 pi)^{1/3} linf^{1/6}`, the ratio bound implied by Hölder.
pub fn holder_cap(linf_triple: f64) -> f64 {
    (2.0 * PI).powf(1.0 / 3.0) * linf_triple.powf(1.0 / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsReport {
    pub foschi: f64,
    pub linf_triple: f64,
    pub holder_cap: f64,
}

impl ConstantsReport {
    /// Flat `key = value` block.
    pub fn to_text(&self) -> String {
        format!(
            "foschi = {}\nlinf_triple = {}\nholder_cap = {}\n",
            sig17(self.foschi),
            sig17(self.linf_triple),
            sig17(self.holder_cap)
        )
    }
}

/// `linf_triple` is the maximum of `F` over `grid`.
pub fn constants_report(
    model: &TripleConvolution,
    grid: &ScanGrid,
    quad_nodes: usize,
) -> Result<ConstantsReport> {
    let foschi = foschi_constant(model.params().lambda())?;
    let linf = sup_scan(model, grid, quad_nodes)?.max_value;
    Ok(ConstantsReport {
        foschi,
        linf_triple: linf,
        holder_cap: holder_cap(linf),
    })
}

/// `|G_1(x, t)|` for `G_1(x, t) = int exp(-lambda y^2 / 2) exp(-i t lambda y^2 / 2) exp(i x y) dy`,
/// by the trapezoid rule on a chirp-resolving grid.
fn g1_abs(lambda: f64, x: f64, t: f64) -> f64 {
    let half_len = (80.0 / lambda).sqrt();
    let h = 0.5 / (lambda * (1.0 + t * t)).sqrt();
    let n = (half_len / h).ceil() as usize;
    let h = half_len / n as f64;
    let mut re = Vec::with_capacity(2 * n + 1);
    let mut im = Vec::with_capacity(2 * n + 1);
    for k in 0..=2 * n {
        let y = -half_len + h * k as f64;
        let amp = (-0.5 * lambda * y * y).exp();
        let phase = x * y - 0.5 * t * lambda * y * y;
        re.push(amp * phase.cos());
        im.push(amp * phase.sin());
    }
    h * pairwise_sum(&re).hypot(pairwise_sum(&im))
}

/// `||G_1||_{L^6(R^2)} / ||G||_{L^2(R)}` with `G(y) = exp(-lambda y^2 / 2)`,
/// computed by quadrature only.
///
/// The `(x, t)` plane is mapped by `t = tan u`, `x = s sqrt(1 + t^2)`, which
/// follows the spreading of the Schrödinger evolution; `u` uses the midpoint
/// rule on `n_u` nodes and `s` the trapezoid rule on `n_s` nodes.
pub fn gaussian_ratio_oracle(lambda: f64, n_u: usize, n_s: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    if n_u < 2 || n_s < 3 {
        return Err(invalid("nodes", format!("too few nodes ({n_u}, {n_s})")));
    }
    let s_top = (40.0 * lambda / 3.0).sqrt();
    let s_nodes = linspace(-s_top, s_top, n_s);
    let hs = 2.0 * s_top / (n_s - 1) as f64;
    let hu = PI / n_u as f64;
    let mut cells = Vec::with_capacity(n_u * n_s);
    for i in 0..n_u {
        let u = -0.5 * PI + hu * (i as f64 + 0.5);
        let t = u.tan();
        let stretch = (1.0 + t * t).sqrt();
        // dx dt = sqrt(1 + t^2) (1 + t^2) ds du
        let jac = stretch * (1.0 + t * t);
        for (j, &s) in s_nodes.iter().enumerate() {
            let edge = if j == 0 || j + 1 == n_s { 0.5 } else { 1.0 };
            cells.push(edge * hs * hu * jac * g1_abs(lambda, s * stretch, t).powi(6));
        }
    }
    let l6 = pairwise_sum(&cells).powf(1.0 / 6.0);

    let g: Vec<f64> = s_nodes
        .iter()
        .map(|&s| {
            let y = s / lambda.sqrt();
            (-lambda * y * y).exp()
        })
        .collect();
    let l2 = (pairwise_sum(&g) * hs / lambda.sqrt()).sqrt();
    Ok(l6 / l2)
}
