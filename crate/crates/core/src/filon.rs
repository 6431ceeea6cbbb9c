//! Composite Filon–Simpson rule for `∫ A(x) e^{iωx} dx`.
//!
//! On every panel `A` is replaced by the quadratic through the two edges and
//! one interior node; the oscillatory factor is integrated exactly, so the
//! panel width is limited only by the smoothness of `A`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Moments `∫_{-1}^{1} ξ^k e^{iθξ} dξ` for `k = 0, 1, 2`.
pub fn moments(theta: f64) -> [Complex64; 3] {
    let t2 = theta * theta;
    if theta.abs() < 0.25 {
        let m0 = 2.0 * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0))));
        let m1 = 2.0
            * theta
            * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0 - t2 * t2 * t2 / 45_360.0
                + t2 * t2 * t2 * t2 / 3_991_680.0);
        let m2 = 2.0
            * (1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0 - t2 * t2 * t2 / 6480.0
                + t2 * t2 * t2 * t2 / 443_520.0);
        return [
            Complex64::new(m0, 0.0),
            Complex64::new(0.0, m1),
            Complex64::new(m2, 0.0),
        ];
    }
    let (s, c) = theta.sin_cos();
    let m0 = 2.0 * s / theta;
    let m1 = 2.0 * (s - theta * c) / t2;
    let m2 = 2.0 * ((t2 - 2.0) * s + 2.0 * theta * c) / (t2 * theta);
    [
        Complex64::new(m0, 0.0),
        Complex64::new(0.0, m1),
        Complex64::new(m2, 0.0),
    ]
}

/// Panel-wise quadratic model of an amplitude, reusable for many frequencies.
#[derive(Debug, Clone)]
pub struct FilonRule {
    centers: Vec<f64>,
    half_widths: Vec<f64>,
    coef: Vec<[Complex64; 3]>,
}

impl FilonRule {
    /// Builds the rule from interleaved samples `x₀ < x½ < x₁ < …` with an
    /// odd number of nodes; even positions are panel edges.
    pub fn new(nodes: &[f64], values: &[Complex64]) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Config("node and value counts differ".into()));
        }
        if nodes.len() < 3 || nodes.len().is_multiple_of(2) {
            return Err(Error::Config("Filon rule needs 2n+1 nodes with n >= 1".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("Filon nodes must be strictly increasing".into()));
        }
        let n = nodes.len() / 2;
        let mut centers = Vec::with_capacity(n);
        let mut half_widths = Vec::with_capacity(n);
        let mut coef = Vec::with_capacity(n);
        for k in 0..n {
            let (xa, xm, xb) = (nodes[2 * k], nodes[2 * k + 1], nodes[2 * k + 2]);
            let (a0, am, a1) = (values[2 * k], values[2 * k + 1], values[2 * k + 2]);
            let c = 0.5 * (xa + xb);
            let h = 0.5 * (xb - xa);
            let xi = (xm - c) / h;
            let p = (a0 + a1) * 0.5;
            let q = (a1 - a0) * 0.5;
            let c2 = (p - am + q * xi) / (1.0 - xi * xi);
            centers.push(c);
            half_widths.push(h);
            coef.push([p - c2, q, c2]);
        }
        Ok(Self {
            centers,
            half_widths,
            coef,
        })
    }

    /// Samples `f` at panel edges and midpoints of the given edge list.
    pub fn sample<F: Fn(f64) -> Complex64>(edges: &[f64], f: F) -> Result<Self> {
        let (nodes, values) = sample_nodes(edges, f);
        Self::new(&nodes, &values)
    }

    pub fn panels(&self) -> usize {
        self.centers.len()
    }

    /// `∫ A(x) e^{iωx} dx` over the span of the rule.
    pub fn integrate(&self, omega: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&c, &h), k) in self.centers.iter().zip(&self.half_widths).zip(&self.coef) {
            let m = moments(omega * h);
            let local = k[0] * m[0] + k[1] * m[1] + k[2] * m[2];
            let (s, co) = (omega * c).sin_cos();
            acc += Complex64::new(co, s) * local * h;
        }
        acc
    }

    /// Plain integral `∫ A(x) dx` of the quadratic model.
    pub fn integrate_plain(&self) -> Complex64 {
        self.integrate(0.0)
    }
}

/// Interleaves edges and midpoints and evaluates `f` on them.
pub fn sample_nodes<F: Fn(f64) -> Complex64>(edges: &[f64], f: F) -> (Vec<f64>, Vec<Complex64>) {
    let mut nodes = Vec::with_capacity(2 * edges.len());
    for (i, &e) in edges.iter().enumerate() {
        if i > 0 {
            nodes.push(0.5 * (edges[i - 1] + e));
        }
        nodes.push(e);
    }
    let values = nodes.iter().map(|&x| f(x)).collect();
    (nodes, values)
}

/// Uniform edges on `[a, b]` with `n` panels.
pub fn uniform_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|k| if k == n { b } else { a + h * k as f64 })
        .collect()
}
