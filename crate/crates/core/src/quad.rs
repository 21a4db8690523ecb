//! Fixed quadrature rules shared by the density, oracle and norm code.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::sum::pairwise_sum;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("n >= 1");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Composite Simpson weights for `n_intervals` uniform intervals of width `h`.
///
/// Odd interval counts fall back to trapezoid weights on the last interval.
pub fn simpson_weights(n_intervals: usize, h: f64) -> Vec<f64> {
    if n_intervals == 0 {
        return vec![0.0];
    }
    let mut w = vec![0.0; n_intervals + 1];
    let even = n_intervals - n_intervals % 2;
    for i in (0..even).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if even < n_intervals {
        w[even] += h / 2.0;
        w[even + 1] += h / 2.0;
    }
    w
}

/// Uniformly spaced points on `[lo, hi]`; a single point sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Double-exponential (tanh-sinh) rule with a fixed odd node count.
///
/// Integrable endpoint singularities are handled without special casing.
/// Distances to both endpoints are stored separately so nodes crowding an
/// endpoint keep full relative precision.
#[derive(Debug, Clone)]
pub struct TanhSinh {
    // (fraction from left end, fraction from right end, weight on [-1, 1])
    nodes: Vec<(f64, f64, f64)>,
}

impl TanhSinh {
    const T_MAX: f64 = 4.0;

    pub fn new(n: usize) -> Self {
        let n = (n.max(3)) | 1;
        let h = 2.0 * Self::T_MAX / (n - 1) as f64;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let nodes = (0..n)
            .map(|i| {
                let t = -Self::T_MAX + h * i as f64;
                let u = half_pi * t.sinh();
                let from_left = 1.0 / (1.0 + (-2.0 * u).exp());
                let from_right = 1.0 / (1.0 + (2.0 * u).exp());
                let cu = u.cosh();
                let w = h * half_pi * t.cosh() / (cu * cu);
                (from_left, from_right, w)
            })
            .collect();
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Returns `(integral, |full - half-rule|)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> (f64, f64) {
        let len = b - a;
        if len == 0.0 {
            return (0.0, 0.0);
        }
        let vals: Vec<f64> = self
            .nodes
            .iter()
            .map(|&(l, r, w)| {
                let x = if l <= r { a + len * l } else { b - len * r };
                let fx = f(x);
                if fx.is_finite() {
                    w * fx
                } else {
                    0.0
                }
            })
            .collect();
        let full = 0.5 * len * pairwise_sum(&vals);
        let half: Vec<f64> = vals.iter().step_by(2).map(|v| 2.0 * v).collect();
        let coarse = 0.5 * len * pairwise_sum(&half);
        (full, (full - coarse).abs())
    }
}
