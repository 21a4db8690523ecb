use std::f64::consts::{PI, TAU};

/// Highest power sum kept per node; matches the maximal degree of `g`.
pub(crate) const MAX_POWER: usize = crate::curve::PHI_MAX_DEGREE;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT6: f64 = 2.449_489_742_783_178;

/// Unit vector `(alpha, beta, gamma)` in the plane `x + y + z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularFrame {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AngularFrame {
    pub fn new(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            theta,
            alpha: -c / SQRT2 - s / SQRT6,
            beta: c / SQRT2 - s / SQRT6,
            gamma: 2.0 * s / SQRT6,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// `alpha^k + beta^k + gamma^k`.
    pub fn power_sum(&self, k: i32) -> f64 {
        self.alpha.powi(k) + self.beta.powi(k) + self.gamma.powi(k)
    }
}

pub fn angular_frame(theta: f64) -> AngularFrame {
    AngularFrame::new(theta)
}

/// Periodic trapezoid nodes on `[0, 2 pi)` with cached power sums.
#[derive(Debug, Clone)]
pub struct AngularRule {
    frames: Vec<AngularFrame>,
    sums: Vec<[f64; MAX_POWER + 1]>,
}

impl AngularRule {
    pub fn new(n: usize) -> Self {
        Self::on_period(n, TAU)
    }

    /// `n` nodes on `[0, period)`.
    pub(crate) fn on_period(n: usize, period: f64) -> Self {
        let n = n.max(1);
        let frames: Vec<AngularFrame> = (0..n)
            .map(|j| AngularFrame::new(period * j as f64 / n as f64))
            .collect();
        let sums = frames
            .iter()
            .map(|f| {
                let mut p = [0.0; MAX_POWER + 1];
                let [a, b, c] = f.components();
                let (mut pa, mut pb, mut pc) = (1.0, 1.0, 1.0);
                for pk in p.iter_mut() {
                    *pk = pa + pb + pc;
                    pa *= a;
                    pb *= b;
                    pc *= c;
                }
                p
            })
            .collect();
        Self { frames, sums }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[AngularFrame] {
        &self.frames
    }

    pub(crate) fn sums(&self, j: usize) -> &[f64; MAX_POWER + 1] {
        &self.sums[j]
    }

    /// Weight of each node for an integral over `[0, 2 pi)`.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.frames.len() as f64
    }
}
