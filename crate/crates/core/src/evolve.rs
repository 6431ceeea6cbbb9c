//! Solutions of the linearized equation: homogeneous evolution of compactly
//! supported initial data, exponentially growing modes, and past-compact
//! responses to a separable source.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dispersion::{Classification, Dispersion, RootReport};
use crate::error::{Error, Result};
use crate::filon::FilonRule;
use crate::greens::{density_value, mode_green, CutDensity, ModeGreen};
use crate::grid::{PGrid, TimeGrid};
use crate::params::ModelParams;
use crate::quad::Integrator;
use crate::radial::{bump, sinc, spectral_extent, RadialField, SpectrumTable};

/// `(s, w, C⁺, C⁻)` for one zero of `S` at one wavenumber, `w = √(p² − s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeCoefficient {
    pub s: f64,
    pub w: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

/// Time series of one spatial Fourier mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeSolution {
    pub p_abs: f64,
    pub coefficients: Vec<ModeCoefficient>,
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
}

impl ModeSolution {
    /// `Σ_s C⁺e^{iwt} + C⁻e^{−iwt}` at an arbitrary time.
    pub fn synthesize(&self, t: f64) -> Complex64 {
        synthesize(&self.coefficients, t)
    }
}

fn synthesize(coefs: &[ModeCoefficient], t: f64) -> Complex64 {
    coefs
        .iter()
        .map(|c| {
            let e = Complex64::from_polar(1.0, c.w * t);
            c.c_plus * e + c.c_minus * e.conj()
        })
        .sum()
}

fn frequencies(p_abs: f64, roots: &[f64]) -> Result<Vec<f64>> {
    let ws: Vec<f64> = roots.iter().map(|&s| (p_abs * p_abs - s).sqrt()).collect();
    if ws.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Degenerate(format!(
            "mode |p| = {p_abs} has a non-positive frequency"
        )));
    }
    for i in 0..ws.len() {
        for j in 0..i {
            if (ws[i] - ws[j]).abs() <= 1e-12 * ws[i].max(ws[j]) {
                return Err(Error::Degenerate("coincident mode frequencies".into()));
            }
        }
    }
    Ok(ws)
}

/// Row `j` holds `(+iw_s)^j` and `(−iw_s)^j` for every zero `s`.
pub fn ivp_matrix(p_abs: f64, roots: &[f64]) -> Result<DMatrix<Complex64>> {
    let ws = frequencies(p_abs, roots)?;
    let n = 2 * ws.len();
    Ok(DMatrix::from_fn(n, n, |j, col| {
        let w = ws[col / 2];
        let base = if col % 2 == 0 {
            Complex64::new(0.0, w)
        } else {
            Complex64::new(0.0, -w)
        };
        base.powu(j as u32)
    }))
}

/// Solves for `(C⁺, C⁻)` per zero from `2|𝒮|` time derivatives at `t = 0`.
pub fn ivp_coefficients(p_abs: f64, roots: &[f64], data: &[Complex64]) -> Result<Vec<ModeCoefficient>> {
    if roots.is_empty() {
        return Err(Error::RefusedRegime(
            "S has no zeros; the homogeneous equation has no nontrivial solutions".into(),
        ));
    }
    if data.len() != 2 * roots.len() {
        return Err(Error::Config(format!(
            "{} zeros need {} initial derivatives, got {}",
            roots.len(),
            2 * roots.len(),
            data.len()
        )));
    }
    let ws = frequencies(p_abs, roots)?;
    let a = ivp_matrix(p_abs, roots)?;
    let b = DVector::from_column_slice(data);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Degenerate("singular initial value system".into()))?;
    Ok(roots
        .iter()
        .zip(&ws)
        .enumerate()
        .map(|(i, (&s, &w))| ModeCoefficient {
            s,
            w,
            c_plus: x[2 * i],
            c_minus: x[2 * i + 1],
        })
        .collect())
}

fn require_all_negative(report: &RootReport) -> Result<Vec<f64>> {
    match report.classification {
        Classification::AllNegative => Ok(report.roots.iter().map(|r| r.s).collect()),
        Classification::ContainsPositive => Err(Error::RefusedRegime(
            "a non-negative zero of S is present; use the runaway analysis".into(),
        )),
        Classification::Empty => Err(Error::RefusedRegime(
            "S has no zeros; the homogeneous equation has no nontrivial solutions".into(),
        )),
        Classification::Degenerate => Err(Error::Degenerate(
            report
                .degeneracy
                .clone()
                .unwrap_or_else(|| "degenerate zero set".into()),
        )),
    }
}

/// Homogeneous evolution of one mode from its initial derivatives.
pub fn solve_ivp_mode(
    p_abs: f64,
    report: &RootReport,
    data: &[Complex64],
    grid: &TimeGrid,
) -> Result<ModeSolution> {
    let roots = require_all_negative(report)?;
    let coefficients = ivp_coefficients(p_abs, &roots, data)?;
    let values = grid
        .times()
        .iter()
        .map(|&t| synthesize(&coefficients, t))
        .collect();
    Ok(ModeSolution {
        p_abs,
        coefficients,
        grid: *grid,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeRegime {
    /// `p² < s`: exponential growth at rate `√(s − p²)`.
    Growing,
    /// `p² = s`: constant plus linear growth.
    Marginal,
    /// `p² > s`: bounded oscillation.
    Oscillatory,
}

/// Mode with unit initial displacement and zero velocity for a zero `s > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunawayMode {
    pub p_abs: f64,
    pub s: f64,
    pub regime: ModeRegime,
    /// Log-linear fit to the late part of the series (growing regime only).
    pub growth_rate: Option<f64>,
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

pub fn runaway_mode(p_abs: f64, s: f64, grid: &TimeGrid) -> Result<RunawayMode> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("runaway analysis needs s > 0, got {s}")));
    }
    let times = grid.times();
    let gap = s - p_abs * p_abs;
    let tol = 1e-12 * s.max(p_abs * p_abs);
    let (regime, values, growth_rate) = if gap.abs() <= tol {
        (
            ModeRegime::Marginal,
            times.iter().map(|t| 1.0 + t).collect(),
            None,
        )
    } else if gap < 0.0 {
        let w = (-gap).sqrt();
        (
            ModeRegime::Oscillatory,
            times.iter().map(|t| (w * t).cos()).collect(),
            None,
        )
    } else {
        let k = gap.sqrt();
        if k * grid.t_max() > 700.0 {
            return Err(Error::Resolution(format!(
                "growth rate {k} over tMax = {} overflows",
                grid.t_max()
            )));
        }
        let values: Vec<f64> = times.iter().map(|t| (k * t).cosh()).collect();
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(&values)
            .filter(|(t, _)| k * **t >= 3.0)
            .map(|(t, v)| (*t, v.ln()))
            .collect();
        if pts.len() < 10 {
            return Err(Error::Resolution(
                "time grid too short to measure the growth rate (need k*t >= 3 on 10 samples)".into(),
            ));
        }
        let (slope, _, _) = crate::decay::linear_fit(&pts);
        (ModeRegime::Growing, values, Some(slope))
    };
    Ok(RunawayMode {
        p_abs,
        s,
        regime,
        growth_rate,
        grid: *grid,
        values,
    })
}

const PROFILE_SAMPLES: usize = 2048;

/// Smooth bump `T(t)` of unit maximum supported on `[c − τ, c + τ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TemporalBump {
    pub center: f64,
    pub half_width: f64,
}

impl TemporalBump {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && center.is_finite()) {
            return Err(Error::Config("temporal bump needs a positive half width".into()));
        }
        Ok(Self { center, half_width })
    }

    pub fn eval(&self, t: f64) -> f64 {
        bump(t - self.center, self.half_width)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    /// `2∫₀^τ T(c + u) cos(ωu) du`, so that `∫T(t)e^{−iωt}dt = e^{−iωc}` times this.
    pub fn cosine_transform(&self, omega: f64) -> f64 {
        let h = self.half_width / PROFILE_SAMPLES as f64;
        let rot = Complex64::from_polar(1.0, omega * h);
        let mut e = Complex64::new(1.0, 0.0);
        let mut acc = 0.5;
        for k in 1..PROFILE_SAMPLES {
            e *= rot;
            acc += bump(k as f64 * h, self.half_width) * e.re;
        }
        2.0 * h * acc
    }

    /// `∫T(t) e^{−iωt} dt`.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        Complex64::from_polar(self.cosine_transform(omega), -omega * self.center)
    }

    /// Frequency beyond which `|T̂|` stays below `rel·T̂(0)`.
    pub fn bandwidth(&self, rel: f64) -> f64 {
        let peak = self.cosine_transform(0.0);
        let step = 0.25 / self.half_width;
        let mut last = step;
        let mut quiet = 0;
        let mut k = 1;
        while quiet < 400 && k < 400_000 {
            let w = k as f64 * step;
            if self.cosine_transform(w).abs() > rel * peak {
                last = w;
                quiet = 0;
            } else {
                quiet += 1;
            }
            k += 1;
        }
        last + step
    }
}

/// Response of one mode to `T(t)·B̃(p)` by trapezoidal convolution with `D̃_R`.
///
/// `min_tail` is the span after the source that the grid must still cover.
pub fn evolve_sourced_mode(
    green: &ModeGreen,
    b_tilde: f64,
    temporal: &TemporalBump,
    min_tail: f64,
) -> Result<ModeSolution> {
    let grid = green.grid;
    if grid.t0 != 0.0 {
        return Err(Error::Config("Green function grid must start at t = 0".into()));
    }
    let (ta, tb) = temporal.support();
    if ta < 0.0 || tb > grid.t_max() {
        return Err(Error::Config(format!(
            "source support [{ta}, {tb}] is not inside the time grid [0, {}]",
            grid.t_max()
        )));
    }
    if grid.t_max() - tb < min_tail {
        return Err(Error::Resolution(format!(
            "grid ends {} after the source; {min_tail} required",
            grid.t_max() - tb
        )));
    }
    let dt = grid.dt;
    let k0 = (ta / dt).floor() as usize;
    let k1 = ((tb / dt).ceil() as usize).min(grid.n - 1);
    let f: Vec<f64> = (k0..=k1).map(|k| temporal.eval(grid.at(k)) * b_tilde).collect();
    let d = &green.values;
    let values = (0..grid.n)
        .into_par_iter()
        .map(|j| {
            if j <= k0 {
                return Complex64::new(0.0, 0.0);
            }
            let top = j.min(k1);
            let mut acc = 0.0;
            for k in k0..=top {
                acc += d[j - k] * f[k - k0];
            }
            Complex64::new(acc * dt, 0.0)
        })
        .collect();
    Ok(ModeSolution {
        p_abs: green.p_abs,
        coefficients: Vec::new(),
        grid,
        values,
    })
}

/// A set of sourced modes sharing one separable source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourcedRun {
    pub temporal: TemporalBump,
    pub source_amplitudes: Vec<f64>,
    pub modes: Vec<ModeSolution>,
    pub residual_norm: f64,
}

/// Builds Green functions and responses for each wavenumber in `p_values`.
#[allow(clippy::too_many_arguments)]
pub fn sourced_run(
    params: &ModelParams,
    report: &RootReport,
    cut: &CutDensity,
    temporal: &TemporalBump,
    spatial: &RadialField,
    p_values: &[f64],
    grid: &TimeGrid,
    min_tail: f64,
) -> Result<SourcedRun> {
    let amps = crate::radial::radial_to_mode(spatial, p_values)?;
    let modes = p_values
        .iter()
        .zip(&amps)
        .map(|(&p, &b)| {
            let g = mode_green(params, p, grid, report, cut)?;
            evolve_sourced_mode(&g, b, temporal, min_tail)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut run = SourcedRun {
        temporal: temporal.clone(),
        source_amplitudes: amps,
        modes,
        residual_norm: 0.0,
    };
    run.residual_norm = residual_check(&run, params)?;
    Ok(run)
}

/// Largest relative deviation from `S(−ω² + p²)ψ̂ = f̂` over the modes.
///
/// Transforms are taken at `ω = p₀ − iη` with `η = 25/tMax`, which makes the
/// truncated series effectively complete; frequencies with
/// `|p₀| < π/(2dt)` are compared.
pub fn residual_check(run: &SourcedRun, params: &ModelParams) -> Result<f64> {
    let disp = Dispersion::new(params)?;
    let mut worst: f64 = 0.0;
    for (mode, &b) in run.modes.iter().zip(&run.source_amplitudes) {
        let g = mode.grid;
        let n = g.n;
        let eta = 25.0 / g.t_max();
        let damp = |j: usize| (-eta * g.at(j)).exp();
        let mut psi: Vec<Complex64> = (0..n).map(|j| mode.values[j] * damp(j)).collect();
        let mut src: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(run.temporal.eval(g.at(j)) * b * damp(j), 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        fft.process(&mut psi);
        fft.process(&mut src);
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..n {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            let p0 = 2.0 * PI * kk / (n as f64 * g.dt);
            if p0.abs() >= 0.5 * PI / g.dt {
                continue;
            }
            let omega = Complex64::new(p0, -eta);
            let z = -omega * omega + mode.p_abs * mode.p_abs;
            let s = disp.eval(z)?;
            num += (s * psi[k] * g.dt - src[k] * g.dt).norm_sqr();
            den += (src[k] * g.dt).norm_sqr();
        }
        if den > 0.0 {
            worst = worst.max((num / den).sqrt());
        }
    }
    Ok(worst)
}

/// Field value at a fixed radius over a uniform set of times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeSeries {
    pub radius: f64,
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    /// Contribution of the zeros of `S`.
    pub pole: Vec<f64>,
    /// Contribution of the continuum.
    pub cut: Vec<f64>,
}

impl ProbeSeries {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }
}

/// Relative spectral level below which wavenumbers are dropped in probes.
pub const PROBE_SPECTRAL_TOL: f64 = 1e-14;

// Σ_k Re(b_k e^{iw_k t_j}) on the uniform time grid, by phase rotation.
fn accumulate_phases(terms: &[(Complex64, f64)], times: &TimeGrid) -> Vec<f64> {
    let n = times.n;
    terms
        .par_chunks(256)
        .fold(
            || vec![0.0; n],
            |mut acc, chunk| {
                for &(b, w) in chunk {
                    let rot = Complex64::from_polar(1.0, w * times.dt);
                    let mut z = b * Complex64::from_polar(1.0, w * times.t0);
                    for (j, a) in acc.iter_mut().enumerate() {
                        if j % 512 == 0 {
                            z = b * Complex64::from_polar(1.0, w * times.at(j));
                        }
                        *a += z.re;
                        z *= rot;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0.0; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

fn probe_dp(times: &TimeGrid, radius: f64, support: f64) -> f64 {
    let reach = times.t_max().abs().max(times.t0.abs()) + radius + support;
    PI / reach
}

/// Homogeneous solution at radius `r` from initial data fields
/// `φ⁰, …, φ^{2|𝒮|−1}`, summed over a wavenumber grid fine enough to keep
/// periodic images out of the time window.
pub fn probe_ivp(
    report: &RootReport,
    data: &[RadialField],
    radius: f64,
    times: &TimeGrid,
) -> Result<ProbeSeries> {
    let roots = require_all_negative(report)?;
    if data.len() != 2 * roots.len() {
        return Err(Error::Config(format!(
            "{} zeros need {} initial data fields",
            roots.len(),
            2 * roots.len()
        )));
    }
    let support = data.iter().map(|f| f.support_radius).fold(0.0, f64::max);
    let refs: Vec<&RadialField> = data.iter().collect();
    let p_max = spectral_extent(&refs, PROBE_SPECTRAL_TOL, 0.25);
    let pg = PGrid::covering(p_max, probe_dp(times, radius, support))?;
    let terms: Vec<(Complex64, f64)> = (0..pg.n)
        .into_par_iter()
        .map(|k| -> Result<Vec<(Complex64, f64)>> {
            let p = pg.at(k);
            let d: Vec<Complex64> = data
                .iter()
                .map(|f| Complex64::new(f.transform_at(p), 0.0))
                .collect();
            let coefs = ivp_coefficients(p, &roots, &d)?;
            let amp = pg.weight(k) * p * p * sinc(p * radius) / (2.0 * PI * PI);
            Ok(coefs
                .iter()
                .map(|c| ((c.c_plus + c.c_minus.conj()) * amp, c.w))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let values = accumulate_phases(&terms, times);
    Ok(ProbeSeries {
        radius,
        grid: *times,
        cut: vec![0.0; values.len()],
        pole: values.clone(),
        values,
    })
}

/// Step in `P = √(ω₀² − 4m²)` of the continuum nodes used by sourced probes.
pub const PROBE_CUT_STEP: f64 = 0.05;

/// Past-compact response to `T(t)B(r)` at radius `r`, for times after the
/// source has switched off.
#[allow(clippy::too_many_arguments)]
pub fn probe_sourced(
    params: &ModelParams,
    report: &RootReport,
    temporal: &TemporalBump,
    spatial: &RadialField,
    radius: f64,
    times: &TimeGrid,
) -> Result<ProbeSeries> {
    match report.classification {
        Classification::AllNegative | Classification::Empty => {}
        Classification::ContainsPositive => {
            return Err(Error::RefusedRegime(
                "the retarded Green function is built only when every zero of S is negative".into(),
            ))
        }
        Classification::Degenerate => return Err(Error::Degenerate("degenerate zero set".into())),
    }
    let (_, tb) = temporal.support();
    if times.t0 < tb {
        return Err(Error::Config(format!(
            "probe times must start after the source ends at t = {tb}"
        )));
    }
    let disp = Dispersion::new(params)?;
    let omega_cut = temporal.bandwidth(1e-12);
    let extent = spectral_extent(&[spatial], PROBE_SPECTRAL_TOL, 0.25);
    let p_top = extent.min(omega_cut);
    let table = SpectrumTable::new(spatial, p_top, (0.05 / spatial.support_radius).min(0.01))?;
    let c = temporal.center;

    // Zeros: Σ_s ∫dp p² sinc(pr) B̃ T̂_c(w) Im(e^{iw(t−c)})/(2π² S′ w).
    let pg = PGrid::covering(p_top, probe_dp(times, radius, spatial.support_radius) * 0.5)?;
    let shifted = TimeGrid::starting_at(times.t0 - c, times.dt, times.n)?;
    let terms: Vec<(Complex64, f64)> = report
        .roots
        .iter()
        .flat_map(|root| {
            let table = &table;
            (0..pg.n)
                .into_par_iter()
                .map(move |k| {
                    let p = pg.at(k);
                    let w = (p * p - root.s).sqrt();
                    let amp = pg.weight(k)
                        * p
                        * p
                        * sinc(p * radius)
                        * table.eval(p)
                        * temporal.cosine_transform(w)
                        / (2.0 * PI * PI * root.s_prime * w);
                    // Im(a e^{iwt}) = Re(−i a e^{iwt})
                    (Complex64::new(0.0, -amp), w)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let pole = accumulate_phases(&terms, &shifted);

    // Continuum: Im ∫dω₀ e^{iω₀(t−c)} T̂_c(ω₀) A(ω₀), with
    // A = (1/π²) ∫₀^{P} p² sinc(pr) B̃(p) ρ_S(ω₀² − p²) dp.
    let m4 = 4.0 * params.m * params.m;
    let p_span = (omega_cut * omega_cut - m4).max(0.0).sqrt();
    let panels = ((p_span / PROBE_CUT_STEP).ceil() as usize).max(8);
    let step = p_span / panels as f64;
    let nodes_p: Vec<f64> = (0..=2 * panels).map(|i| 0.5 * step * i as f64).collect();
    let scale = table.eval(0.0).abs().max(f64::MIN_POSITIVE);
    let integ = Integrator::new(1e-15 * scale, 1e-10).with_max_intervals(2000);
    let amps = nodes_p
        .par_iter()
        .map(|&pp| -> Result<Complex64> {
            let top = pp.min(table.p_max());
            if top <= 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let (v, _) = integ.integrate_real(
                |q| {
                    let m2 = m4 + pp * pp - q * q;
                    if m2 <= m4 || (m4 == 0.0 && m2 <= 0.0) {
                        return 0.0;
                    }
                    q * q * sinc(q * radius) * table.eval(q) * density_value(&disp, m2).unwrap_or(0.0)
                },
                0.0,
                top,
                &[],
            )?;
            let omega = (m4 + pp * pp).sqrt();
            Ok(Complex64::new(
                v / (PI * PI) * temporal.cosine_transform(omega),
                0.0,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut omega_nodes: Vec<f64> = nodes_p.iter().map(|&pp| (m4 + pp * pp).sqrt()).collect();
    if m4 == 0.0 {
        omega_nodes[0] = 0.0;
    }
    let rule = FilonRule::new(&omega_nodes, &amps)?;
    let cut: Vec<f64> = (0..times.n)
        .into_par_iter()
        .map(|j| rule.integrate(shifted.at(j)).im)
        .collect();

    let values = pole.iter().zip(&cut).map(|(a, b)| a + b).collect();
    Ok(ProbeSeries {
        radius,
        grid: *times,
        values,
        pole,
        cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::classify;
    use approx::assert_relative_eq;

    #[test]
    fn single_root_coefficients() {
        let (p, s) = (0.8, -1.5_f64);
        let w = (p * p - s).sqrt();
        let (f0, f1) = (Complex64::new(0.7, 0.0), Complex64::new(-0.3, 0.0));
        let c = ivp_coefficients(p, &[s], &[f0, f1]).unwrap();
        let i = Complex64::i();
        assert!((c[0].c_plus - (f0 / 2.0 - i * f1 / (2.0 * w))).norm() < 1e-15);
        assert!((c[0].c_minus - (f0 / 2.0 + i * f1 / (2.0 * w))).norm() < 1e-15);
    }

    #[test]
    fn pure_eigenmode_data() {
        let (p, s1, s2) = (0.5, -1.0_f64, -3.0);
        let w1 = (p * p - s1).sqrt();
        let i = Complex64::i();
        let data: Vec<Complex64> = (0..4).map(|j| (-i * w1).powu(j)).collect();
        let c = ivp_coefficients(p, &[s1, s2], &data).unwrap();
        assert!((c[0].c_minus - 1.0).norm() < 1e-12);
        for z in [c[0].c_plus, c[1].c_plus, c[1].c_minus] {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn four_by_four_determinant() {
        let (p, s1, s2) = (0.3_f64, -0.7_f64, -2.2_f64);
        let (w1, w2) = ((p * p - s1).sqrt(), (p * p - s2).sqrt());
        let (n1, n2) = (-s1, -s2);
        let det = ivp_matrix(p, &[s1, s2]).unwrap().determinant();
        let expected = -4.0 * (n1 - n2).powi(2) * w1 * w2;
        assert_relative_eq!(det.re, expected, max_relative = 1e-10);
        assert!(det.im.abs() < 1e-10 * expected.abs());
    }

    #[test]
    fn coincident_roots_are_degenerate() {
        assert!(matches!(
            ivp_matrix(1.0, &[-1.0, -1.0]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn runaway_regimes() {
        let g = TimeGrid::new(0.01, 3001).unwrap();
        let r = runaway_mode(0.0, 1.0, &g).unwrap();
        assert_eq!(r.regime, ModeRegime::Growing);
        assert!((r.growth_rate.unwrap() - 1.0).abs() < 0.01);
        let m = runaway_mode(1.0, 1.0, &g).unwrap();
        assert_eq!(m.regime, ModeRegime::Marginal);
        let o = runaway_mode(2.0, 1.0, &g).unwrap();
        assert_eq!(o.regime, ModeRegime::Oscillatory);
        assert!(o.values.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn temporal_transform_matches_quadrature() {
        let b = TemporalBump::new(3.0, 1.5).unwrap();
        for &w in &[0.0, 0.7, 6.0, 30.0] {
            let q = Integrator::new(1e-15, 1e-13)
                .integrate(|t| Complex64::from_polar(b.eval(t), -w * t), 1.5, 4.5, &[])
                .unwrap();
            assert!((b.fourier(w) - q.value).norm() < 1e-12, "w = {w}");
        }
    }

    #[test]
    fn zero_source_gives_zero_response_and_residual() {
        let p = ModelParams {
            m: 1.0,
            hbar: 1.0,
            lambda: 1.0,
            lambda1: 3.0,
            lambda2: 1.0,
            g1: 2.0,
            g2: 1.0,
            a: -1.0,
        };
        let report = classify(&p).unwrap();
        let cut = crate::greens::cut_density(&p, 1e6, 128).unwrap();
        let grid = TimeGrid::new(0.02, 600).unwrap();
        let g = mode_green(&p, 0.5, &grid, &report, &cut).unwrap();
        let t = TemporalBump::new(2.0, 1.0).unwrap();
        let m = evolve_sourced_mode(&g, 0.0, &t, 1.0).unwrap();
        assert!(m.values.iter().all(|v| v.norm() == 0.0));
        let run = SourcedRun {
            temporal: t,
            source_amplitudes: vec![0.0],
            modes: vec![m],
            residual_norm: 0.0,
        };
        assert_eq!(residual_check(&run, &p).unwrap(), 0.0);
    }
}
