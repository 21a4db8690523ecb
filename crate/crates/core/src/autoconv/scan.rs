//! Evaluation of `F` on tensor grids and the strict-maximum scan.

use std::io::Write;

use rayon::prelude::*;

use super::density::{BoundaryCoords, TripleConvolution};
use crate::error::{invalid, Result};
use crate::fmt::sig17;
use crate::quad::linspace;

/// Tensor grid over `|xi| <= 3r (1 - margin)`, `0 <= eps <= eps_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub n_xi: usize,
    pub n_eps: usize,
    pub margin: f64,
    /// Defaults to the model's `eps_max`.
    pub eps_max: Option<f64>,
}

impl ScanGrid {
    pub fn new(n_xi: usize, n_eps: usize) -> Self {
        Self {
            n_xi,
            n_eps,
            margin: 0.0,
            eps_max: None,
        }
    }

    /// Symmetric `xi` nodes; for odd counts the middle node is exactly 0.
    pub fn xi_nodes(&self, model: &TripleConvolution) -> Vec<f64> {
        let half = model.xi_max() * (1.0 - self.margin);
        if self.n_xi <= 1 {
            return vec![0.0; self.n_xi];
        }
        let m = (self.n_xi - 1) as f64;
        (0..self.n_xi)
            .map(|i| half * (2.0 * i as f64 - m) / m)
            .collect()
    }

    pub fn eps_nodes(&self, model: &TripleConvolution) -> Vec<f64> {
        linspace(0.0, self.eps_max.unwrap_or(model.eps_max()), self.n_eps)
    }

    fn validate(&self) -> Result<()> {
        if self.n_xi == 0 || self.n_eps == 0 {
            return Err(invalid("grid", "grid needs at least one node per axis"));
        }
        if !(0.0..1.0).contains(&self.margin) {
            return Err(invalid(
                "grid.margin",
                format!("must lie in [0, 1), got {}", self.margin),
            ));
        }
        if let Some(e) = self.eps_max {
            if !(e >= 0.0) {
                return Err(invalid(
                    "grid.eps_max",
                    format!("must be nonnegative, got {e}"),
                ));
            }
        }
        Ok(())
    }
}

/// Values of `F` on a tensor grid, row-major over `xi` then `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub xi: Vec<f64>,
    pub eps: Vec<f64>,
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, idx: usize) -> BoundaryCoords {
        let ne = self.eps.len();
        BoundaryCoords::new(self.xi[idx / ne], self.eps[idx % ne])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "xi,eps,tau,F")?;
        for (idx, v) in self.values.iter().enumerate() {
            let p = self.point(idx);
            writeln!(
                w,
                "{},{},{},{}",
                sig17(p.xi),
                sig17(p.eps),
                sig17(self.tau[idx]),
                sig17(*v)
            )?;
        }
        Ok(())
    }
}

/// Evaluates `F` at every grid point. Points are computed in parallel and the
/// first failing point in row-major order is reported.
pub fn evaluate_grid(
    model: &TripleConvolution,
    grid: &ScanGrid,
    quad_nodes: usize,
) -> Result<DensityGrid> {
    grid.validate()?;
    let xi = grid.xi_nodes(model);
    let eps = grid.eps_nodes(model);
    let rule = super::frame::AngularRule::new(quad_nodes);
    let ne = eps.len();
    let points: Vec<BoundaryCoords> = (0..xi.len() * ne)
        .map(|i| BoundaryCoords::new(xi[i / ne], eps[i % ne]))
        .collect();
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|&p| model.density_with(&rule, p, |y| model.params().weight_g(y)))
        .collect();
    let values = results.into_iter().collect::<Result<Vec<f64>>>()?;
    let tau = points.iter().map(|p| p.tau(model.params())).collect();
    Ok(DensityGrid {
        xi,
        eps,
        tau,
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupScan {
    pub argmax: BoundaryCoords,
    pub max_value: f64,
    pub strict_at_origin: bool,
    /// `F(0, 0)` when the origin is a grid node.
    pub origin_value: Option<f64>,
    /// Largest value away from the origin.
    pub runner_up: Option<f64>,
    pub quad_error_bound: f64,
    /// Every node within `quad_error_bound` of the maximum.
    pub near_max: Vec<BoundaryCoords>,
    pub grid: DensityGrid,
}

/// Scans `F` over the grid and decides whether the origin is a strict maximum.
///
/// The quadrature error bound is the change under halving the angular node
/// count, taken at the origin and at the best competitor.
pub fn sup_scan(model: &TripleConvolution, grid: &ScanGrid, quad_nodes: usize) -> Result<SupScan> {
    let dg = evaluate_grid(model, grid, quad_nodes)?;
    // lowest index wins exact ties
    let (arg, max_value) =
        dg.values
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    let origin_idx = (0..dg.len()).find(|&i| {
        let p = dg.point(i);
        p.xi == 0.0 && p.eps == 0.0
    });
    let origin_value = origin_idx.map(|i| dg.values[i]);
    let runner = dg
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != origin_idx)
        .fold(None::<(usize, f64)>, |best, (i, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        });

    let half = (quad_nodes / 2).max(1);
    let mut probes = vec![arg];
    if let Some(i) = origin_idx {
        probes.push(i);
    }
    if let Some((i, _)) = runner {
        probes.push(i);
    }
    let mut bound = 16.0 * f64::EPSILON * max_value.abs();
    for &i in &probes {
        let p = dg.point(i);
        let coarse = model.density_f(p, half)?;
        bound = bound.max((coarse - dg.values[i]).abs());
    }

    let near_max: Vec<BoundaryCoords> = dg
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max_value - bound)
        .map(|(i, _)| dg.point(i))
        .collect();
    let strict_at_origin = match (origin_value, runner) {
        (Some(f0), Some((_, rv))) => f0 - rv > bound,
        (Some(_), None) => true,
        _ => false,
    };
    Ok(SupScan {
        argmax: dg.point(arg),
        max_value,
        strict_at_origin,
        origin_value,
        runner_up: runner.map(|(_, v)| v),
        quad_error_bound: bound,
        near_max,
        grid: dg,
    })
}
