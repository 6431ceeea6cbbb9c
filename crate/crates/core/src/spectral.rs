//! The subtracted one-loop spectral function
//!
//! `F_a(z) = ∫_{4m²}^∞ √(1 − 4m²/M²) [1/(M² + a) − 1/(M² + z)] dM²`
//!
//! evaluated in closed form and by direct quadrature.
//!
//! With `q = z/(z + 4m²)` the closed form is `F_a(z) = G(z) − G(a)`,
//! `G(z) = 2 artanh(√q)/√q`, analytic off the cut `(−∞, −4m²]`.
//! For `m = 0` it reduces to `log(z/a)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::Integrator;

const SERIES_RADIUS: f64 = 0.05;

/// Side of the branch cut on which a boundary value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutSide {
    /// `−M² + i0`
    Above,
    /// `−M² − i0`
    Below,
}

impl CutSide {
    fn sign(self) -> f64 {
        match self {
            CutSide::Above => 1.0,
            CutSide::Below => -1.0,
        }
    }
}

// artanh(√q)/√q = Σ q^k/(2k+1)
fn h_series(q: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..16 {
        acc += term / (2 * k + 1) as f64;
        term *= q;
    }
    acc
}

// d/dq of the series above
fn h_series_derivative(q: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..17 {
        acc += term * (k as f64 / (2 * k + 1) as f64);
        term *= q;
    }
    acc
}

/// The cut function `F_a` for fixed mass and renormalization point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    m: f64,
    a: f64,
    ga: f64,
}

impl Kernel {
    pub fn new(m: f64, a: f64) -> Result<Self> {
        if !(m.is_finite() && a.is_finite()) || m < 0.0 {
            return Err(Error::Domain(
                "mass and renormalization point must be finite, m >= 0".into(),
            ));
        }
        if a <= -4.0 * m * m || (m == 0.0 && a <= 0.0) {
            return Err(Error::Domain(format!("renormalization point {a} is on the cut")));
        }
        let mut k = Self { m, a, ga: 0.0 };
        k.ga = k.g_real(a);
        Ok(k)
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn renormalization_point(&self) -> f64 {
        self.a
    }

    /// Branch point of the cut: `−4m²`.
    pub fn threshold(&self) -> f64 {
        -4.0 * self.m * self.m
    }

    fn four_m2(&self) -> f64 {
        4.0 * self.m * self.m
    }

    fn g_real(&self, s: f64) -> f64 {
        if self.m == 0.0 {
            return s.ln();
        }
        let d = s + self.four_m2();
        if d == 0.0 {
            return 0.0;
        }
        let q = s / d;
        if q.abs() < SERIES_RADIUS {
            return 2.0 * h_series(Complex64::new(q, 0.0)).re;
        }
        if q > 0.0 {
            let r = q.sqrt();
            let one_minus_r = (self.four_m2() / d) / (1.0 + r);
            ((1.0 + r) / one_minus_r).ln() / r
        } else {
            let r = (-q).sqrt();
            2.0 * r.atan() / r
        }
    }

    fn g_real_derivative(&self, s: f64) -> f64 {
        if self.m == 0.0 {
            return 1.0 / s;
        }
        let d = s + self.four_m2();
        let q = s / d;
        let dq = self.four_m2() / (d * d);
        let dh = if q.abs() < SERIES_RADIUS {
            h_series_derivative(Complex64::new(q, 0.0)).re
        } else {
            let h = 0.5 * self.g_real(s);
            (d / self.four_m2() - h) / (2.0 * q)
        };
        2.0 * dh * dq
    }

    fn g_complex(&self, z: Complex64) -> Complex64 {
        if self.m == 0.0 {
            return z.ln();
        }
        let d = z + self.four_m2();
        if d.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let q = z / d;
        if q.norm() < SERIES_RADIUS {
            return h_series(q) * 2.0;
        }
        let r = q.sqrt();
        let one_minus_r = (self.four_m2() / d) / (r + 1.0);
        ((r + 1.0).ln() - one_minus_r.ln()) / r
    }

    fn check_off_cut(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain("argument must be finite".into()));
        }
        if z.im == 0.0 && z.re <= self.threshold() {
            return Err(Error::Domain(format!(
                "z = {} lies on the branch cut (-inf, {}]",
                z.re,
                self.threshold()
            )));
        }
        Ok(())
    }

    /// Closed-form `F_a(z)` on the cut plane.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_cut(z)?;
        if z.im == 0.0 {
            return Ok(Complex64::new(self.g_real(z.re) - self.ga, 0.0));
        }
        Ok(self.g_complex(z) - self.ga)
    }

    /// `F_a(s)` for real `s > −4m²` (`s > 0` when massless).
    pub fn eval_real(&self, s: f64) -> f64 {
        self.g_real(s) - self.ga
    }

    /// `dF_a/ds` for real `s` above the threshold.
    pub fn derivative_real(&self, s: f64) -> f64 {
        self.g_real_derivative(s)
    }

    /// `dF_a/dz` off the cut.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_cut(z)?;
        if z.im == 0.0 {
            return Ok(Complex64::new(self.g_real_derivative(z.re), 0.0));
        }
        if self.m == 0.0 {
            return Ok(z.inv());
        }
        let d = z + self.four_m2();
        let q = z / d;
        let dq = self.four_m2() / (d * d);
        let dh = if q.norm() < SERIES_RADIUS {
            h_series_derivative(q)
        } else {
            let h = self.g_complex(z) * 0.5;
            (d / self.four_m2() - h) / (q * 2.0)
        };
        Ok(dh * dq * 2.0)
    }

    /// Boundary value `F_a(−M² ± i0)` for `M² ≥ 4m²`.
    pub fn cut_boundary(&self, m2: f64, side: CutSide) -> Result<Complex64> {
        if !m2.is_finite() || m2 < self.four_m2() || (self.m == 0.0 && m2 <= 0.0) {
            return Err(Error::Domain(format!(
                "M^2 = {m2} is below the continuum threshold {}",
                self.four_m2()
            )));
        }
        if self.m == 0.0 {
            return Ok(Complex64::new((m2 / self.a).ln(), side.sign() * PI));
        }
        if m2 == self.four_m2() {
            return Ok(Complex64::new(-self.ga, 0.0));
        }
        let x = self.four_m2() / m2;
        let beta = (1.0 - x).sqrt();
        let one_minus_beta = x / (1.0 + beta);
        let re = beta * ((1.0 + beta) / one_minus_beta).ln() - self.ga;
        Ok(Complex64::new(re, side.sign() * PI * beta))
    }

    /// Direct quadrature of the defining integral, substituting `M² = 4m² + u²`.
    pub fn integral(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        self.check_off_cut(z)?;
        if !(tol > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        let m2x4 = self.four_m2();
        let massless = self.m == 0.0;
        let za = z - self.a;
        let f = |u: f64| -> Complex64 {
            let mm = m2x4 + u * u;
            let rho = if massless { 1.0 } else { u / mm.sqrt() };
            za * (2.0 * u * rho / (mm + self.a)) / (z + mm)
        };
        let pole = (-z.re - m2x4).max(0.0).sqrt();
        let upper = 4.0
            * [
                1.0,
                2.0 * pole,
                z.norm().sqrt(),
                self.a.abs().sqrt(),
                2.0 * self.m,
            ]
            .into_iter()
            .fold(0.0_f64, f64::max);
        let integ = Integrator::new(0.5 * tol, 0.0).with_max_intervals(50_000);
        let head = integ.integrate(f, 0.0, upper, &[pole])?;
        let tail = integ.integrate(
            |v: f64| {
                if v == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(upper / v) * (upper / (v * v))
                }
            },
            0.0,
            1.0,
            &[],
        )?;
        Ok(head.value + tail.value)
    }
}

/// Closed-form `F_a(z)`.
pub fn fa_closed(z: Complex64, m: f64, a: f64) -> Result<Complex64> {
    Kernel::new(m, a)?.eval(z)
}

/// `F_a(z)` by adaptive quadrature of its defining integral.
pub fn fa_integral(z: Complex64, m: f64, a: f64, tol: f64) -> Result<Complex64> {
    Kernel::new(m, a)?.integral(z, tol)
}

/// `F_a(−M² ± i0)` on either side of the cut.
pub fn fa_cut_boundary(m2: f64, m: f64, a: f64, side: CutSide) -> Result<Complex64> {
    Kernel::new(m, a)?.cut_boundary(m2, side)
}

/// Massless kernel `log(x/a)` on the real line, approached from above on `x < 0`.
pub fn fa_massless(x: f64, a: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::Domain("massless kernel needs a > 0".into()));
    }
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain("massless kernel is singular at x = 0".into()));
    }
    if x > 0.0 {
        Ok(Complex64::new((x / a).ln(), 0.0))
    } else {
        Ok(Complex64::new((-x / a).ln(), PI))
    }
}

/// Spectral density `ρ(M²) = √(1 − 4m²/M²)/16π²` of the continuum.
pub fn spectral_density(m2: f64, m: f64) -> Result<f64> {
    let t = 4.0 * m * m;
    if !m2.is_finite() || m2 < t || m2 <= 0.0 {
        return Err(Error::Domain(format!("M^2 = {m2} is below the threshold {t}")));
    }
    Ok((1.0 - t / m2).sqrt() / (16.0 * PI * PI))
}
