use crate::error::{invalid, Result};

/// Relative size of a Gaussian trial function at its effective radius.
const GAUSSIAN_TAIL: f64 = 1e-10;

/// A weight `f` on the curve, written as a function of the parameter `y`.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialFunction {
    /// `f(y) = delta^{-1/2} exp(-lambda y^2 / (2 delta^2))`.
    Gaussian {
        delta: f64,
    },
    /// Piecewise linear through `(nodes, values)`, zero outside the nodes.
    Tabulated {
        nodes: Vec<f64>,
        values: Vec<f64>,
    },
    Constant(f64),
}

impl TrialFunction {
    pub fn gaussian(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        Ok(Self::Gaussian { delta })
    }

    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(invalid(
                "values",
                format!("{} nodes but {} values", nodes.len(), values.len()),
            ));
        }
        if nodes.len() < 2 {
            return Err(invalid("nodes", "need at least two nodes".to_string()));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(invalid(
                "values",
                "nodes and values must be finite".to_string(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("nodes", "must be strictly increasing".to_string()));
        }
        Ok(Self::Tabulated { nodes, values })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid("f", format!("constant must be finite, got {c}")));
        }
        Ok(Self::Constant(c))
    }

    pub fn eval(&self, lambda: f64, y: f64) -> f64 {
        match self {
            Self::Gaussian { delta } => {
                let s = y / delta;
                (-0.5 * lambda * s * s).exp() / delta.sqrt()
            }
            Self::Constant(c) => *c,
            Self::Tabulated { nodes, values } => {
                let n = nodes.len();
                if !(y >= nodes[0] && y <= nodes[n - 1]) {
                    return 0.0;
                }
                let i = nodes.partition_point(|&x| x <= y).clamp(1, n - 1);
                let (x0, x1) = (nodes[i - 1], nodes[i]);
                let t = (y - x0) / (x1 - x0);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    /// `|f|`.
    pub fn magnitude(&self) -> Self {
        match self {
            Self::Gaussian { .. } => self.clone(),
            Self::Constant(c) => Self::Constant(c.abs()),
            Self::Tabulated { nodes, values } => Self::Tabulated {
                nodes: nodes.clone(),
                values: values.iter().map(|v| v.abs()).collect(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Gaussian { .. } => false,
            Self::Constant(c) => *c == 0.0,
            Self::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Half-width of the interval outside which `f` is negligible, capped at `cap`.
    pub(crate) fn effective_radius(&self, lambda: f64, cap: f64) -> f64 {
        match self {
            Self::Gaussian { delta } => {
                (delta * (2.0 * (1.0 / GAUSSIAN_TAIL).ln() / lambda).sqrt()).min(cap)
            }
            Self::Constant(_) => cap,
            Self::Tabulated { nodes, .. } => {
                nodes[0].abs().max(nodes[nodes.len() - 1].abs()).min(cap)
            }
        }
    }

    /// Points where `f` is not smooth, or changes scale.
    pub(crate) fn breakpoints(&self, lambda: f64) -> Vec<f64> {
        match self {
            Self::Gaussian { delta } => {
                let s = delta / lambda.sqrt();
                [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0]
                    .iter()
                    .map(|k| k * s)
                    .collect()
            }
            Self::Constant(_) => Vec::new(),
            Self::Tabulated { nodes, .. } => nodes.clone(),
        }
    }
}
