//! Quadrature grids on the write window `[0, T_W]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    Trapezoid,
    #[default]
    GaussLegendre,
}

impl QuadratureRule {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureRule::Trapezoid => "trapezoid",
            QuadratureRule::GaussLegendre => "gauss-legendre",
        }
    }
}

impl fmt::Display for QuadratureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trapezoid" => Ok(QuadratureRule::Trapezoid),
            "gauss-legendre" => Ok(QuadratureRule::GaussLegendre),
            other => Err(invalid(format!("unknown quadrature rule `{other}`"))),
        }
    }
}

/// Nodes and weights discretizing `∫₀^{T_W} dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    rule: QuadratureRule,
    write_time: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TimeGrid {
    pub fn new(n: usize, write_time: f64, rule: QuadratureRule) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {n}")));
        }
        if !(write_time.is_finite() && write_time > 0.0) {
            return Err(invalid(format!("T_W must be positive, got {write_time}")));
        }
        let (nodes, weights) = match rule {
            QuadratureRule::Trapezoid => trapezoid(n, 0.0, write_time),
            QuadratureRule::GaussLegendre => gauss_legendre(n, 0.0, write_time),
        };
        Ok(Self { rule, write_time, nodes, weights })
    }

    /// Grid from explicit nodes and weights, e.g. read back from a kernel file.
    pub fn from_parts(
        rule: QuadratureRule,
        write_time: f64,
        nodes: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != weights.len() {
            return Err(invalid("grid needs at least 2 nodes and one weight per node"));
        }
        if !(write_time.is_finite() && write_time > 0.0) {
            return Err(invalid(format!("T_W must be positive, got {write_time}")));
        }
        if nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(invalid("grid nodes must be strictly increasing"));
        }
        if nodes[0] < 0.0 || nodes[nodes.len() - 1] > write_time {
            return Err(invalid("grid nodes must lie inside [0, T_W]"));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(invalid("grid weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - write_time).abs() > 1e-12 * write_time {
            return Err(invalid(format!("grid weights sum to {total}, expected {write_time}")));
        }
        Ok(Self { rule, write_time, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn write_time(&self) -> f64 {
        self.write_time
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_k w_k f(t_k)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

fn trapezoid(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / (n - 1) as f64;
    let nodes = (0..n)
        .map(|k| if k == n - 1 { b } else { a + h * k as f64 })
        .collect();
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    (nodes, weights)
}

/// Gauss–Legendre rule on `[a, b]`, nodes found by Newton iteration on `P_n`.
pub(crate) fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = (b - a) / 2.0;
    let mid = (b + a) / 2.0;
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess for the i-th largest root
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let nf = n as f64;
        let mut z = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        // ascending order: root i (largest first) goes to the end
        x[n - 1 - i] = mid + half * z;
        x[i] = mid - half * z;
        w[n - 1 - i] = half * weight;
        w[i] = half * weight;
    }
    if n % 2 == 1 {
        x[n / 2] = mid;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
