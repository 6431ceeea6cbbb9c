//! Retarded Green function of the linearized equation, one spatial Fourier
//! mode at a time: a sum over the simple zeros of `S` plus a continuum
//! integral over the cut `M² ≥ 4m²`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{Classification, Dispersion, RootReport};
use crate::error::{Error, Result};
use crate::filon::FilonRule;
use crate::grid::TimeGrid;
use crate::params::ModelParams;
use crate::quad::Integrator;
use crate::spectral::CutSide;

/// Largest `dt·ω` accepted for the discrete frequencies of a mode.
pub const MAX_PHASE_STEP: f64 = 0.1;

/// `Δ̃_R(t, p; M²) = −sin(ω₀t)/ω₀·Θ(t)` with `ω₀ = √(p² + M²)`.
pub fn retarded_kg_mode(t: f64, p_abs: f64, m2: f64) -> Result<f64> {
    let w2 = p_abs * p_abs + m2;
    if !(w2 >= 0.0) {
        return Err(Error::Domain(format!(
            "p^2 + M^2 = {w2} is negative; the mode is not oscillatory"
        )));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    if w2 == 0.0 {
        return Ok(-t);
    }
    let w = w2.sqrt();
    Ok(-(w * t).sin() / w)
}

/// Estimate of the neglected continuum above `M2max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TailEstimate {
    /// `∫_{M2max}^∞ |ρ_S(M²)|/M dM²`, bounding the tail uniformly in `t` and `p`.
    /// Absent when the density decays too slowly for absolute convergence.
    pub absolute: Option<f64>,
    /// `2|ρ_S(M2max)|`; divided by `t` it bounds the oscillatory tail.
    pub oscillatory: f64,
}

/// Weighted cut density `ρ_S(M²) = κ√(1−4m²/M²)(λ₂M²−λ₁)/|S(−M²)|²` on a
/// fixed node set shared by all modes.
#[derive(Debug, Clone)]
pub struct CutDensity {
    disp: Dispersion,
    m2_max: f64,
    nodes: Vec<f64>,
    density: Vec<f64>,
    head_norm: f64,
    tail: TailEstimate,
}

/// `ρ_S(M²)` at a single point.
pub fn density_value(d: &Dispersion, m2: f64) -> Result<f64> {
    let p = d.params();
    let s = d.cut_boundary(m2, CutSide::Above)?;
    let numer = p.lambda2 * m2 - p.lambda1;
    let f = d.kernel().cut_boundary(m2, CutSide::Above)?;
    let scale = (numer * d.kappa()).abs() * f.norm() + (p.g2 * m2 - p.g1).abs();
    if s.norm() <= 1e-13 * scale || s.norm() == 0.0 {
        return Err(Error::Domain(format!(
            "S(-M^2) vanishes at M^2 = {m2}; the continuum has an embedded zero"
        )));
    }
    let rho = if p.is_massless() {
        1.0
    } else {
        (1.0 - 4.0 * p.m * p.m / m2).max(0.0).sqrt()
    };
    Ok(d.kappa() * rho * numer / s.norm_sqr())
}

fn u_scale(p: &ModelParams) -> f64 {
    (2.0 * p.m).max(p.a.abs().sqrt())
}

fn head_norm(d: &Dispersion, m2_max: f64) -> Result<f64> {
    let p = d.params();
    let m4 = 4.0 * p.m * p.m;
    let upper = (m2_max - m4).sqrt();
    let sigma = u_scale(p);
    let mut breaks = Vec::new();
    let mut b = 1e-6 * sigma;
    while b < upper {
        breaks.push(b);
        b *= 10.0;
    }
    let f = |u: f64| {
        let m2 = m4 + u * u;
        if m2 <= 0.0 {
            return 0.0;
        }
        density_value(d, m2).map_or(0.0, |v| v.abs() * 2.0 * u / m2.sqrt())
    };
    let (v, _) = Integrator::new(0.0, 1e-8)
        .with_max_intervals(20_000)
        .integrate_real(f, 0.0, upper, &breaks)?;
    Ok(v)
}

fn tail_estimate(d: &Dispersion, m2_max: f64) -> Result<TailEstimate> {
    let p = d.params();
    let oscillatory = 2.0 * density_value(d, m2_max)?.abs();
    if p.lambda2 == 0.0 && p.g2 == 0.0 {
        return Ok(TailEstimate {
            absolute: None,
            oscillatory,
        });
    }
    // M² = M2max/v² maps the tail onto (0, 1].
    let f = |v: f64| {
        if v == 0.0 {
            return 0.0;
        }
        let m2 = m2_max / (v * v);
        density_value(d, m2).map_or(0.0, |x| x.abs() / m2.sqrt() * 2.0 * m2_max / (v * v * v))
    };
    let (v, _) = Integrator::new(0.0, 1e-6)
        .with_max_intervals(20_000)
        .integrate_real(f, 0.0, 1.0, &[1e-6, 1e-4, 1e-2])?;
    Ok(TailEstimate {
        absolute: Some(v),
        oscillatory,
    })
}

/// Default continuum cutoff: `4m² + (200·max(m, √|a|, ω_grid))²`, enlarged
/// tenfold until the certified tail is below `1e-7` of the retained part.
pub fn default_m2_max(params: &ModelParams, omega_grid: f64) -> Result<f64> {
    let d = Dispersion::new(params)?;
    let base_scale = params.m.max(params.a.abs().sqrt()).max(omega_grid);
    let mut m2 = 4.0 * params.m * params.m + (200.0 * base_scale).powi(2);
    if params.lambda2 == 0.0 && params.g2 == 0.0 {
        return Ok(10.0 * m2);
    }
    let head = head_norm(&d, m2)?;
    for _ in 0..60 {
        let tail = tail_estimate(&d, m2)?;
        if tail.absolute.unwrap_or(f64::INFINITY) <= 1e-7 * head {
            return Ok(m2);
        }
        m2 *= 10.0;
    }
    Err(Error::Resolution("could not certify the continuum tail".into()))
}

/// Builds the continuum node set up to `m2_max` with `n_panels` panels.
pub fn cut_density(params: &ModelParams, m2_max: f64, n_panels: usize) -> Result<CutDensity> {
    let d = Dispersion::new(params)?;
    let m4 = 4.0 * params.m * params.m;
    if !(m2_max > m4) || !m2_max.is_finite() {
        return Err(Error::Config(format!("M2max = {m2_max} must exceed 4m^2 = {m4}")));
    }
    if n_panels < 8 {
        return Err(Error::Config("continuum needs at least 8 panels".into()));
    }
    // M² = 4m² + u²; u graded geometrically after a first short panel.
    let upper = (m2_max - m4).sqrt();
    let u1 = (1e-6 * u_scale(params)).min(1e-3 * upper);
    let ratio = (upper / u1).ln() / (n_panels - 1) as f64;
    let mut edges = Vec::with_capacity(n_panels + 1);
    edges.push(0.0);
    for k in 0..n_panels {
        edges.push(if k + 1 == n_panels {
            upper
        } else {
            u1 * (ratio * k as f64).exp()
        });
    }
    let mut nodes = Vec::with_capacity(2 * n_panels + 1);
    for (i, &e) in edges.iter().enumerate() {
        if i > 0 {
            let mid = 0.5 * (edges[i - 1] + e);
            nodes.push(m4 + mid * mid);
        }
        nodes.push(m4 + e * e);
    }
    if params.is_massless() {
        // The massless continuum starts at M² = 0 where the kernel is singular.
        nodes[0] = 0.25 * nodes[1];
    }
    let density = nodes
        .iter()
        .map(|&m2| density_value(&d, m2))
        .collect::<Result<Vec<_>>>()?;
    Ok(CutDensity {
        disp: d,
        m2_max,
        head_norm: head_norm(&d, m2_max)?,
        tail: tail_estimate(&d, m2_max)?,
        nodes,
        density,
    })
}

impl CutDensity {
    pub fn m2_max(&self) -> f64 {
        self.m2_max
    }

    /// Interleaved panel edges and interior nodes in `M²`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn panels(&self) -> usize {
        self.nodes.len() / 2
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.disp
    }

    pub fn tail(&self) -> TailEstimate {
        self.tail
    }

    /// `∫_{4m²}^{M2max} |ρ_S|/M dM²`, the uniform bound on the retained continuum.
    pub fn head_norm(&self) -> f64 {
        self.head_norm
    }

    /// Absolute tail relative to the retained continuum.
    pub fn relative_tail(&self) -> Option<f64> {
        self.tail.absolute.map(|t| t / self.head_norm)
    }

    /// Filon rule for `2ρ_S(ω₀² − p²)` in the variable `ω₀ = √(p² + M²)`.
    pub fn frequency_rule(&self, p_abs: f64) -> Result<FilonRule> {
        let p2 = p_abs * p_abs;
        let omega: Vec<f64> = self.nodes.iter().map(|&m2| (p2 + m2).sqrt()).collect();
        let vals: Vec<Complex64> = self
            .density
            .iter()
            .map(|&v| Complex64::new(2.0 * v, 0.0))
            .collect();
        FilonRule::new(&omega, &vals)
    }

    /// Continuum part `2∫ρ_S sin(ω₀t) dω₀` of the mode Green function.
    pub fn cut_part(&self, p_abs: f64, times: &[f64]) -> Result<Vec<f64>> {
        let rule = self.frequency_rule(p_abs)?;
        Ok(times
            .par_iter()
            .map(|&t| if t <= 0.0 { 0.0 } else { rule.integrate(t).im })
            .collect())
    }
}

/// `D̃_R(t, |p|)` sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeGreen {
    pub p_abs: f64,
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub pole_parts: Vec<f64>,
    pub cut_parts: Vec<f64>,
}

/// Pole frequencies `√(p² − s)` of the admissible zeros.
pub fn pole_frequencies(p_abs: f64, report: &RootReport) -> Vec<f64> {
    report
        .roots
        .iter()
        .map(|r| (p_abs * p_abs - r.s).sqrt())
        .collect()
}

fn admissible(report: &RootReport) -> Result<()> {
    match report.classification {
        Classification::AllNegative | Classification::Empty => Ok(()),
        Classification::ContainsPositive => Err(Error::RefusedRegime(
            "the retarded Green function is built only when every zero of S is negative".into(),
        )),
        Classification::Degenerate => Err(Error::Degenerate(
            report
                .degeneracy
                .clone()
                .unwrap_or_else(|| "degenerate zero set".into()),
        )),
    }
}

/// Assembles the pole and continuum parts of one mode.
pub fn mode_green(
    params: &ModelParams,
    p_abs: f64,
    grid: &TimeGrid,
    report: &RootReport,
    cut: &CutDensity,
) -> Result<ModeGreen> {
    admissible(report)?;
    if cut.dispersion().params() != params {
        return Err(Error::Config(
            "continuum was built for different parameters".into(),
        ));
    }
    if !(p_abs >= 0.0 && p_abs.is_finite()) {
        return Err(Error::Domain("|p| must be non-negative".into()));
    }
    let threshold = (p_abs * p_abs + 4.0 * params.m * params.m).sqrt();
    let freqs = pole_frequencies(p_abs, report);
    let fastest = freqs.iter().copied().fold(threshold, f64::max);
    if grid.dt * fastest > MAX_PHASE_STEP {
        return Err(Error::Resolution(format!(
            "dt = {} is too coarse for frequency {fastest} (need dt*w <= {MAX_PHASE_STEP})",
            grid.dt
        )));
    }
    let times = grid.times();
    let pole_parts: Vec<f64> = times
        .iter()
        .map(|&t| {
            if t <= 0.0 {
                return 0.0;
            }
            report
                .roots
                .iter()
                .zip(&freqs)
                .map(|(r, &w)| {
                    if w == 0.0 {
                        t / r.s_prime
                    } else {
                        (w * t).sin() / (r.s_prime * w)
                    }
                })
                .sum()
        })
        .collect();
    let cut_parts = cut.cut_part(p_abs, &times)?;
    let values = pole_parts.iter().zip(&cut_parts).map(|(a, b)| a + b).collect();
    Ok(ModeGreen {
        p_abs,
        grid: *grid,
        values,
        pole_parts,
        cut_parts,
    })
}
