//! Spherically symmetric fields and their three-dimensional Fourier transforms.
//!
//! `f̃(p) = (4π/p) ∫ f(r) sin(pr) r dr` and
//! `f(r) = (1/2π²) ∫ f̃(p) sinc(pr) p² dp`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::grid::PGrid;

/// Relative level below which a field counts as vanishing.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Values on `r_i = i·dr`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub dr: f64,
    pub values: Vec<f64>,
    pub support_radius: f64,
}

/// `exp(1 − 1/(1 − (r/R₀)²))` for `r < R₀`, zero beyond; unit maximum at `r = 0`.
pub fn bump(r: f64, r0: f64) -> f64 {
    let x = r / r0;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

impl RadialField {
    pub fn new(dr: f64, values: Vec<f64>, support_radius: f64) -> Result<Self> {
        if !(dr > 0.0 && dr.is_finite()) {
            return Err(Error::Config("dr must be positive".into()));
        }
        if values.len() < 3 {
            return Err(Error::Config("radial grid needs at least three points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("radial field has non-finite values".into()));
        }
        let f = Self {
            dr,
            values,
            support_radius,
        };
        f.check_support()?;
        Ok(f)
    }

    /// Samples `f` on `[0, radius]`, declaring `support_radius` as its support.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, dr: f64, radius: f64, support_radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Config("grid radius must be positive".into()));
        }
        let n = (radius / dr).round() as usize + 1;
        let values = (0..n).map(|i| f(i as f64 * dr)).collect();
        Self::new(dr, values, support_radius)
    }

    /// Standard bump of radius `r0` on a grid reaching `radius ≥ r0`.
    pub fn bump(r0: f64, dr: f64, radius: f64) -> Result<Self> {
        if !(r0 > 0.0 && radius >= r0) {
            return Err(Error::Config(
                "bump radius must be positive and inside the grid".into(),
            ));
        }
        Self::from_fn(|r| bump(r, r0), dr, radius, r0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.dr * (self.len() - 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.dr * i as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_support(&self) -> Result<()> {
        let peak = self.max_abs();
        let limit = SUPPORT_TOL * peak;
        for (i, v) in self.values.iter().enumerate() {
            if self.r(i) > self.support_radius && v.abs() > limit {
                return Err(Error::Domain(format!(
                    "field is {v:e} at r = {} beyond its support radius {}",
                    self.r(i),
                    self.support_radius
                )));
            }
        }
        if self.values.last().is_some_and(|v| v.abs() > limit) {
            return Err(Error::Domain(
                "field does not vanish at the edge of the grid".into(),
            ));
        }
        Ok(())
    }

    /// Largest wavenumber the grid resolves under `p·dr ≤ π/4`.
    pub fn p_limit(&self) -> f64 {
        FRAC_PI_4 / self.dr
    }

    /// `f̃(p)` at one wavenumber, by the trapezoid rule on the grid.
    pub fn transform_at(&self, p: f64) -> f64 {
        let dr = self.dr;
        let n = self.len();
        let mut acc = 0.0;
        if p == 0.0 {
            for (i, v) in self.values.iter().enumerate() {
                let r = i as f64 * dr;
                let w = if i + 1 == n { 0.5 } else { 1.0 };
                acc += w * v * r * r;
            }
            return 4.0 * PI * acc * dr;
        }
        for (i, v) in self.values.iter().enumerate().skip(1) {
            let r = i as f64 * dr;
            let w = if i + 1 == n { 0.5 } else { 1.0 };
            acc += w * v * r * (p * r).sin();
        }
        4.0 * PI * acc * dr / p
    }
}

/// Forward transform on arbitrary wavenumbers.
pub fn radial_to_mode(field: &RadialField, p: &[f64]) -> Result<Vec<f64>> {
    field.check_support()?;
    if let Some(&bad) = p
        .iter()
        .find(|&&q| q.abs() * field.dr > FRAC_PI_4 * (1.0 + 1e-12))
    {
        return Err(Error::Resolution(format!(
            "dr = {} does not resolve p = {bad} (need p*dr <= pi/4)",
            field.dr
        )));
    }
    Ok(p.iter().map(|&q| field.transform_at(q)).collect())
}

/// Inverse transform of samples on a uniform wavenumber grid at `r_i = i·dr`.
pub fn mode_to_radial(grid: &PGrid, values: &[f64], dr: f64, n: usize) -> Result<RadialField> {
    if values.len() != grid.n {
        return Err(Error::Config(
            "mode values do not match the wavenumber grid".into(),
        ));
    }
    if !(dr > 0.0) || n < 3 {
        return Err(Error::Config("invalid radial grid".into()));
    }
    let out: Vec<f64> = (0..n)
        .map(|i| {
            let r = i as f64 * dr;
            let mut acc = 0.0;
            for (k, v) in values.iter().enumerate() {
                let p = grid.at(k);
                acc += grid.weight(k) * v * p * p * sinc(p * r);
            }
            acc / (2.0 * PI * PI)
        })
        .collect();
    let peak = out.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let support = out
        .iter()
        .rposition(|v| v.abs() > SUPPORT_TOL * peak)
        .map_or(0.0, |i| i as f64 * dr);
    Ok(RadialField {
        dr,
        values: out,
        support_radius: support,
    })
}

/// Transform tabulated on a uniform grid, interpolated by four-point Lagrange.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    step: f64,
    values: Vec<f64>,
}

impl SpectrumTable {
    pub fn new(field: &RadialField, p_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && p_max > 0.0) {
            return Err(Error::Config(
                "spectrum table needs positive step and range".into(),
            ));
        }
        let n = (p_max / step).ceil() as usize + 3;
        if (n as f64) * step * field.dr > FRAC_PI_4 * 1.05 {
            return Err(Error::Resolution(format!(
                "dr = {} does not resolve the table up to p = {}",
                field.dr,
                n as f64 * step
            )));
        }
        let values = (0..n).map(|k| field.transform_at(k as f64 * step)).collect();
        Ok(Self { step, values })
    }

    pub fn p_max(&self) -> f64 {
        self.step * (self.values.len() - 3) as f64
    }

    /// Interpolated transform; even in `p`, zero beyond the table.
    pub fn eval(&self, p: f64) -> f64 {
        let x = p.abs() / self.step;
        let i = x.floor() as isize;
        if i + 2 >= self.values.len() as isize {
            return 0.0;
        }
        let at = |k: isize| self.values[k.unsigned_abs()];
        let t = x - i as f64;
        let (f0, f1, f2, f3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        // Lagrange weights on nodes -1, 0, 1, 2.
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3
    }
}

/// Smallest wavenumber beyond which `|f̃(p)|·p²` of every field stays below
/// `rel` times its maximum, searched on steps of `step` up to the grid limit.
pub fn spectral_extent(fields: &[&RadialField], rel: f64, step: f64) -> f64 {
    let limit = fields.iter().map(|f| f.p_limit()).fold(f64::INFINITY, f64::min);
    let n = (limit / step).floor() as usize;
    let mut last = step;
    for f in fields {
        let vals: Vec<f64> = (0..=n)
            .map(|k| {
                let p = k as f64 * step;
                (f.transform_at(p) * p * p).abs()
            })
            .collect();
        let peak = vals.iter().fold(0.0_f64, |m, v| m.max(*v));
        if let Some(k) = vals.iter().rposition(|v| *v > rel * peak) {
            last = last.max((k + 1) as f64 * step);
        }
    }
    last.min(limit)
}
