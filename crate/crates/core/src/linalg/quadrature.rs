use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Evaluates `P_q(x)` and `P_q'(x)` by the three-term recurrence.
fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if q == 0 { 1.0 } else { p1 };
    let dp = if q == 0 {
        0.0
    } else {
        q as f64 * (x * p - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// `q`-point Gauss-Legendre rule mapped from `[-1, 1]` to `[0, 1]`.
pub fn gauss_legendre(q: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_ORDER).contains(&q) {
        return Err(Error::InvalidOrder(q));
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let half = q.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(q, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots x_i descend; map so nodes ascend on [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[q - 1 - i] = 0.5 * w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.5;
    }
    Ok(QuadratureRule { nodes, weights })
}
