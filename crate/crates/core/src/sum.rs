//! Order-fixed summation for reductions over parallel-evaluated grids.
//!
//! Values are always produced into an indexed buffer first; the reduction
//! below then runs sequentially, so the result does not depend on how many
//! worker threads filled the buffer.

const BLOCK: usize = 32;

/// Pairwise (cascade) summation. Error grows as `O(log n)` instead of `O(n)`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `sum_i w_i x_i` with pairwise accumulation of the products.
pub fn pairwise_dot(w: &[f64], xs: &[f64]) -> f64 {
    debug_assert_eq!(w.len(), xs.len());
    if xs.len() <= BLOCK {
        return w.iter().zip(xs).map(|(a, b)| a * b).sum();
    }
    let mid = xs.len() / 2;
    pairwise_dot(&w[..mid], &xs[..mid]) + pairwise_dot(&w[mid..], &xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_beats_naive_on_long_sums() {
        let n = 1_000_000;
        let xs = vec![0.1; n];
        let exact = 0.1 * n as f64;
        let naive: f64 = xs.iter().sum();
        let pw = pairwise_sum(&xs);
        assert!((pw - exact).abs() <= (naive - exact).abs());
        assert!((pw - exact).abs() < 1e-9);
    }

    #[test]
    fn dot_matches_sum_of_products() {
        let w: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let x = vec![2.0; 100];
        assert_eq!(pairwise_dot(&w, &x), 9900.0);
    }
}
