//! Brute-force evaluation of `sigma * sigma * sigma` straight from the
//! definition of convolution, for cross-checking the angular representation.
//!
//! The Dirac factor is thickened to `delta_w(u) = chi(|u| <= w) / (2w)`:
//!
//! ```text
//! S_w(xi, tau) = (1/2w) * area-integral of G(y1) G(y2) G(xi - y1 - y2)
//!                over { |tau - H(y1, y2)| <= w },  H = g(y1) + g(y2) + g(xi - y1 - y2)
//! ```
//!
//! For fixed `y1`, `H` is convex in `y2`, so the band is at most two intervals
//! whose ends are found by monotone root finding and integrated with
//! Gauss-Legendre. The outer `y1` integral is split where the band changes
//! topology (`min_y2 H = tau +- w`), where it has square-root kinks, and each
//! piece uses a tanh-sinh rule with `grid_n` nodes.

use std::io::Write;

use rayon::prelude::*;

use crate::autoconv::{BoundaryCoords, TripleConvolution, DEFAULT_QUAD_NODES};
use crate::curve::CurveParams;
use crate::error::{invalid, Result};
use crate::fmt::sig17;
use crate::quad::{gauss_legendre, TanhSinh};
use crate::sum::pairwise_sum;

const INNER_NODES: usize = 32;
const BRACKET_ITERS: usize = 200;
/// Relative disagreement above which a comparison is flagged.
pub const COMPARE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Half-width `w` of the thickened delta.
    pub delta_width: f64,
    /// Outer quadrature nodes per piece.
    pub grid_n: usize,
    /// Richardson-combine `w` and `w/2`.
    pub extrapolate: bool,
}

impl OracleConfig {
    /// `w = 1e-5 lambda r^2`, 2048 nodes, extrapolation on.
    pub fn default_for(params: &CurveParams) -> Self {
        Self {
            delta_width: 1e-5 * params.lambda() * params.r() * params.r(),
            grid_n: 2048,
            extrapolate: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_width > 0.0 && self.delta_width.is_finite()) {
            return Err(invalid(
                "oracle.width",
                format!("must be positive, got {}", self.delta_width),
            ));
        }
        if self.grid_n < 64 {
            return Err(invalid(
                "oracle.grid_n",
                format!("must be at least 64, got {}", self.grid_n),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub error_estimate: f64,
    /// Unextrapolated values at `w` and `w/2`.
    pub at_width: f64,
    pub at_half_width: f64,
}

/// `g` must be convex on `[-2r, 2r]` for the band decomposition.
fn check_convex(params: &CurveParams) -> Result<()> {
    let r = params.r();
    for i in 0..=400 {
        let y = -2.0 * r + 4.0 * r * i as f64 / 400.0;
        if !(params.g_double_prime(y) > 0.0) {
            return Err(invalid(
                "a",
                format!(
                    "oracle needs g'' > 0 on [-2r, 2r]; g''({y}) = {}",
                    params.g_double_prime(y)
                ),
            ));
        }
    }
    Ok(())
}

/// Root of an increasing function on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
fn increasing_root<F, D>(f: F, df: D, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..BRACKET_ITERS {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)
            || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs())
        {
            return next;
        }
        x = next;
    }
    x
}

struct Band<'a> {
    p: &'a CurveParams,
    xi: f64,
    tau: f64,
    r: f64,
    gl: &'a [(f64, f64)],
}

struct Slice {
    lo: f64,
    hi: f64,
    y2min: f64,
    hmin: f64,
    g1: f64,
}

impl Band<'_> {
    fn slice(&self, y1: f64) -> Option<Slice> {
        let two_r = 2.0 * self.r;
        let lo = (-two_r).max(self.xi - y1 - two_r);
        let hi = two_r.min(self.xi - y1 + two_r);
        if !(hi > lo) {
            return None;
        }
        let s = self.xi - y1;
        let p = self.p;
        let dh = |y: f64| p.g_prime(y) - p.g_prime(s - y);
        let ddh = |y: f64| p.g_double_prime(y) + p.g_double_prime(s - y);
        let y2min = if dh(lo) >= 0.0 {
            lo
        } else if dh(hi) <= 0.0 {
            hi
        } else {
            increasing_root(dh, ddh, lo, hi)
        };
        let g1 = p.g(y1);
        let hmin = g1 + p.g(y2min) + p.g(s - y2min);
        Some(Slice {
            lo,
            hi,
            y2min,
            hmin,
            g1,
        })
    }

    fn min_h(&self, y1: f64) -> f64 {
        self.slice(y1).map_or(f64::INFINITY, |s| s.hmin)
    }

    /// `int G(y2) G(xi - y1 - y2) dy2` over `{ |tau - H| <= w }`.
    fn inner(&self, y1: f64, w: f64) -> f64 {
        let Some(sl) = self.slice(y1) else {
            return 0.0;
        };
        let (lo_level, hi_level) = (self.tau - w, self.tau + w);
        if sl.hmin > hi_level {
            return 0.0;
        }
        let p = self.p;
        let s = self.xi - y1;
        let h = |y: f64| sl.g1 + p.g(y) + p.g(s - y);
        let dh = |y: f64| p.g_prime(y) - p.g_prime(s - y);
        let h_lo = h(sl.lo);
        let h_hi = h(sl.hi);

        // left branch: h decreases from h_lo to hmin on [lo, y2min]
        let cross_left = |c: f64| {
            if c >= h_lo {
                sl.lo
            } else if c <= sl.hmin {
                sl.y2min
            } else {
                increasing_root(|y| c - h(y), |y| -dh(y), sl.lo, sl.y2min)
            }
        };
        // right branch: h increases from hmin to h_hi on [y2min, hi]
        let cross_right = |c: f64| {
            if c <= sl.hmin {
                sl.y2min
            } else if c >= h_hi {
                sl.hi
            } else {
                increasing_root(|y| h(y) - c, dh, sl.y2min, sl.hi)
            }
        };
        let f = |y2: f64| p.weight_g(y2) * p.weight_g(s - y2);
        let mut total = 0.0;
        for (a, b) in [
            (cross_left(hi_level), cross_left(lo_level)),
            (cross_right(lo_level), cross_right(hi_level)),
        ] {
            if b > a {
                let (c, half) = (0.5 * (a + b), 0.5 * (b - a));
                let sum: f64 = self.gl.iter().map(|&(x, wt)| wt * f(c + half * x)).sum();
                total += half * sum;
            }
        }
        total * p.weight_g(y1)
    }

    /// Value and quadrature error estimate of `S_w`.
    fn thickened(&self, w: f64, outer: &TanhSinh) -> (f64, f64) {
        let two_r = 2.0 * self.r;
        let y_lo = (-two_r).max(self.xi - 2.0 * two_r);
        let y_hi = two_r.min(self.xi + 2.0 * two_r);
        if !(y_hi > y_lo) {
            return (0.0, 0.0);
        }
        // m(y1) = min_y2 H is convex; golden-section search for its minimizer
        let invphi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (y_lo, y_hi);
        let mut c = b - invphi * (b - a);
        let mut d = a + invphi * (b - a);
        let (mut fc, mut fd) = (self.min_h(c), self.min_h(d));
        for _ in 0..BRACKET_ITERS {
            if b - a <= 1e-15 * two_r {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = self.min_h(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = self.min_h(d);
            }
        }
        let ystar = 0.5 * (a + b);
        let mstar = self.min_h(ystar);
        if mstar > self.tau + w {
            return (0.0, 0.0);
        }

        let mut breaks = vec![y_lo, y_hi];
        for level in [self.tau - w, self.tau + w] {
            if mstar >= level {
                continue;
            }
            // m decreasing on [y_lo, ystar], increasing on [ystar, y_hi]
            if self.min_h(y_lo) > level {
                breaks.push(bisect(|y| level - self.min_h(y), y_lo, ystar));
            }
            if self.min_h(y_hi) > level {
                breaks.push(bisect(|y| self.min_h(y) - level, ystar, y_hi));
            }
        }
        breaks.sort_by(|x, y| x.total_cmp(y));
        breaks.dedup();

        let mut value = Vec::with_capacity(breaks.len());
        let mut err = 0.0;
        for seg in breaks.windows(2) {
            let (v, e) = outer.integrate(seg[0], seg[1], |y1| self.inner(y1, w));
            value.push(v);
            err += e;
        }
        let scale = 0.5 / w;
        (scale * pairwise_sum(&value), scale * err)
    }
}

/// Bisection for an increasing function, `f(lo) <= 0 <= f(hi)`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BRACKET_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Thickened-delta evaluation of the triple convolution at `(xi, tau)`.
pub fn brute_triple_conv(
    params: &CurveParams,
    xi: f64,
    tau: f64,
    cfg: &OracleConfig,
) -> Result<OracleValue> {
    cfg.validate()?;
    check_convex(params)?;
    let outer = TanhSinh::new(cfg.grid_n);
    let gl = gauss_legendre(INNER_NODES);
    Ok(brute_with(params, xi, tau, cfg, &outer, &gl))
}

fn brute_with(
    params: &CurveParams,
    xi: f64,
    tau: f64,
    cfg: &OracleConfig,
    outer: &TanhSinh,
    gl: &[(f64, f64)],
) -> OracleValue {
    let band = Band {
        p: params,
        xi,
        tau,
        r: params.r(),
        gl,
    };
    let w = cfg.delta_width;
    let (s_w, e_w) = band.thickened(w, outer);
    let (s_half, e_half) = band.thickened(0.5 * w, outer);
    let diff = (s_w - s_half).abs();
    let quad = e_w.max(e_half);
    let floor = 4.0 * f64::EPSILON * s_half.abs();
    if cfg.extrapolate {
        OracleValue {
            value: (4.0 * s_half - s_w) / 3.0,
            error_estimate: diff / 3.0 + quad + floor,
            at_width: s_w,
            at_half_width: s_half,
        }
    } else {
        OracleValue {
            value: s_w,
            error_estimate: 4.0 * diff / 3.0 + quad + floor,
            at_width: s_w,
            at_half_width: s_half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub xi: f64,
    pub eps: f64,
    pub formula: f64,
    pub oracle: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub max_rel_error: f64,
    /// `max_rel_error > COMPARE_TOL`.
    pub flagged: bool,
}

impl ComparisonReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "xi,eps,formula,oracle,rel_err")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                sig17(row.xi),
                sig17(row.eps),
                sig17(row.formula),
                sig17(row.oracle),
                sig17(row.rel_err)
            )?;
        }
        Ok(())
    }
}

/// Rectangle of comparison points strictly inside the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareGrid {
    pub n_xi: usize,
    pub n_eps: usize,
    /// `xi` spans `[-xi_frac * r, xi_frac * r]`.
    pub xi_frac: f64,
    pub eps_lo: f64,
    pub eps_hi: f64,
}

impl CompareGrid {
    /// 5 x 5 points, `|xi| <= 0.8 r`, `eps` in `[0.2, 1.6] r`.
    pub fn default_for(params: &CurveParams) -> Self {
        Self {
            n_xi: 5,
            n_eps: 5,
            xi_frac: 0.8,
            eps_lo: 0.2 * params.r(),
            eps_hi: 1.6 * params.r(),
        }
    }

    pub fn points(&self, r: f64) -> Vec<BoundaryCoords> {
        let xs = crate::quad::linspace(-self.xi_frac * r, self.xi_frac * r, self.n_xi);
        let es = crate::quad::linspace(self.eps_lo, self.eps_hi, self.n_eps);
        xs.iter()
            .flat_map(|&x| es.iter().map(move |&e| BoundaryCoords::new(x, e)))
            .collect()
    }
}

/// Compares `F` of `formula` against the oracle built from `oracle_params` at
/// the physical points `(xi, 3 g(xi/3) + eps^2)` of the formula's curve.
pub fn compare_models(
    formula: &TripleConvolution,
    oracle_params: &CurveParams,
    points: &[BoundaryCoords],
    cfg: &OracleConfig,
    quad_nodes: usize,
) -> Result<ComparisonReport> {
    cfg.validate()?;
    check_convex(oracle_params)?;
    let min_eps = 2.0 * cfg.delta_width.sqrt();
    if let Some(p) = points.iter().find(|p| p.eps < min_eps) {
        return Err(invalid(
            "grid",
            format!(
                "comparison point eps = {} below the boundary margin 2 sqrt(w) = {min_eps}",
                p.eps
            ),
        ));
    }
    let outer = TanhSinh::new(cfg.grid_n);
    let gl = gauss_legendre(INNER_NODES);
    let floor = 1e-8 * crate::autoconv::origin_value(formula.params().lambda());
    let rows: Vec<Result<ComparisonRow>> = points
        .par_iter()
        .map(|&pt| {
            let f = formula.density_f(pt, quad_nodes)?;
            let tau = pt.tau(formula.params());
            let o = brute_with(oracle_params, pt.xi, tau, cfg, &outer, &gl).value;
            Ok(ComparisonRow {
                xi: pt.xi,
                eps: pt.eps,
                formula: f,
                oracle: o,
                rel_err: (o - f).abs() / f.abs().max(floor),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let max_rel_error = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    Ok(ComparisonReport {
        rows,
        max_rel_error,
        flagged: max_rel_error > COMPARE_TOL,
    })
}

/// Oracle against the formula for the same curve.
pub fn compare_on_grid(
    model: &TripleConvolution,
    grid: &CompareGrid,
    cfg: &OracleConfig,
) -> Result<ComparisonReport> {
    let points = grid.points(model.params().r());
    compare_models(model, model.params(), &points, cfg, DEFAULT_QUAD_NODES)
}

/// `int G_r(y) dy`, the total mass of the cut-off arclength measure.
pub fn measure_mass(params: &CurveParams) -> f64 {
    let r = params.r();
    let gl = gauss_legendre(64);
    // pieces split where the cutoff leaves its plateau
    let knots = [-2.0 * r, -r, r, 2.0 * r];
    knots
        .windows(2)
        .map(|k| {
            let (c, h) = (0.5 * (k[0] + k[1]), 0.5 * (k[1] - k[0]));
            h * gl
                .iter()
                .map(|&(x, w)| w * params.weight_g(c + h * x))
                .sum::<f64>()
        })
        .sum()
}

/// `iint S dxi dtau` over the support, with `tau = 3 g(xi/3) + eps^2`.
/// Gauss-Legendre with `nodes` points per axis.
pub fn brute_mass(params: &CurveParams, cfg: &OracleConfig, nodes: usize) -> Result<f64> {
    cfg.validate()?;
    check_convex(params)?;
    let r = params.r();
    let outer = TanhSinh::new(cfg.grid_n);
    let gl_inner = gauss_legendre(INNER_NODES);
    let gl = gauss_legendre(nodes);
    let g_top = 3.0 * params.g(2.0 * r).max(params.g(-2.0 * r));
    let xi_half = 6.0 * r;
    let cells: Vec<(f64, f64, f64)> = gl
        .iter()
        .flat_map(|&(x, wx)| gl.iter().map(move |&(e, we)| (x, e, wx * we)))
        .collect();
    let vals: Vec<f64> = cells
        .par_iter()
        .map(|&(x, e, w)| {
            let xi = xi_half * x;
            let base = 3.0 * params.g(xi / 3.0);
            let top = (g_top - base).max(0.0).sqrt();
            let eps = 0.5 * top * (e + 1.0);
            let s = brute_with(params, xi, base + eps * eps, cfg, &outer, &gl_inner).value;
            w * xi_half * 0.5 * top * 2.0 * eps * s
        })
        .collect();
    Ok(pairwise_sum(&vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(params: &CurveParams, n: usize) -> OracleConfig {
        OracleConfig {
            grid_n: n,
            ..OracleConfig::default_for(params)
        }
    }

    #[test]
    fn zero_below_boundary() {
        let p = CurveParams::new(0.05, 2.0, 1.0).unwrap();
        let c = cfg(&p, 65);
        let tau = 3.0 * p.g(0.01) - 2.0 * c.delta_width;
        let v = brute_triple_conv(&p, 0.03, tau, &c).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn matches_formula_near_origin() {
        let p = CurveParams::new(0.05, 2.0, 1.0).unwrap();
        let m = TripleConvolution::new(p.clone()).unwrap();
        let v = brute_triple_conv(&p, 0.0, 1e-4, &cfg(&p, 257)).unwrap();
        let f = m.density_f(BoundaryCoords::new(0.0, 0.01), 256).unwrap();
        assert!((v.value - f).abs() < 1e-2 * f, "{} vs {f}", v.value);
    }

    #[test]
    fn symmetric_in_xi() {
        let p = CurveParams::new(0.05, 2.0, 3.0).unwrap();
        let c = cfg(&p, 129);
        let tau = 3.0 * p.g(0.02 / 3.0) + 0.03 * 0.03;
        let a = brute_triple_conv(&p, 0.02, tau, &c).unwrap();
        let b = brute_triple_conv(&p, -0.02, tau, &c).unwrap();
        assert!((a.value - b.value).abs() <= a.error_estimate + b.error_estimate);
    }

    #[test]
    fn config_validation() {
        let p = CurveParams::new(0.05, 2.0, 3.0).unwrap();
        let mut c = OracleConfig::default_for(&p);
        c.grid_n = 10;
        assert!(brute_triple_conv(&p, 0.0, 1e-3, &c).is_err());
        c.grid_n = 64;
        c.delta_width = 0.0;
        assert!(brute_triple_conv(&p, 0.0, 1e-3, &c).is_err());
        let concave = CurveParams::new(1.0, 1.0, -2.0).unwrap();
        assert!(
            brute_triple_conv(&concave, 0.0, 1e-3, &OracleConfig::default_for(&concave)).is_err()
        );
    }

    #[test]
    fn rejects_points_near_boundary() {
        let p = CurveParams::new(0.05, 2.0, 3.0).unwrap();
        let m = TripleConvolution::new(p.clone()).unwrap();
        let mut c = OracleConfig::default_for(&p);
        c.delta_width = 1e-4;
        let pts = [BoundaryCoords::new(0.0, 0.01)];
        assert!(compare_models(&m, &p, &pts, &c, 64).is_err());
    }

    #[test]
    fn single_point_comparison() {
        let p = CurveParams::new(0.05, 2.0, 3.0).unwrap();
        let m = TripleConvolution::new(p.clone()).unwrap();
        let c = cfg(&p, 129);
        let pt = BoundaryCoords::new(0.01, 0.04);
        let rep = compare_models(&m, &p, &[pt], &c, 256).unwrap();
        let single = brute_triple_conv(&p, pt.xi, pt.tau(&p), &c).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].oracle, single.value);
        assert!(!rep.flagged);
    }
}
