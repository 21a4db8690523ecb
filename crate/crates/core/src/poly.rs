//! Dense univariate polynomials with ascending coefficients.

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// `coeffs[k]` multiplies `x^k`. Trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Coefficients of `h -> p(x + h)`, i.e. `p^(k)(x) / k!` for `k = 0..=degree`.
    ///
    /// Repeated synthetic division; exact up to rounding, no differencing.
    pub fn taylor_at(&self, x: f64) -> Vec<f64> {
        let mut b = self.coeffs.clone();
        let n = b.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                b[j] += x * b[j + 1];
            }
        }
        b
    }
}
