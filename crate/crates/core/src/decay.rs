//! The oscillatory integral
//!
//! `W(t) = ∫₀^∞ f(p) e^{iwt} p²/w dp`,  `w = √(p² + m²)`,
//!
//! whose large-`t` behaviour sets the decay of every dispersive mode sum, and
//! a log-log fitter for power-law decay of time series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filon::{uniform_edges, FilonRule};
use crate::quad::Integrator;

/// Numerical route for [`lemma_w_integral_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaRoute {
    /// Adaptive Gauss–Kronrod directly in `p`.
    Direct,
    /// `m > 0`: `y = t(w − m)` maps the phase to `e^{imt}e^{iy}`; Filon in `y`.
    Substitution,
    /// Filon in `p` with the phase `e^{ipt}` (massless only).
    Filon,
}

/// Smallest `P` with `|f(p)|p² ≤ rel·max` for all sampled `p > P`.
pub fn profile_extent<F: Fn(f64) -> f64>(f: &F, rel: f64) -> f64 {
    let step = 0.05;
    let mut peak: f64 = 0.0;
    let mut last = step;
    let mut quiet = 0;
    let mut k = 1;
    while k < 2_000_000 {
        let p = k as f64 * step;
        let v = (f(p) * p * p).abs();
        if v > peak {
            peak = v;
        }
        if v > rel * peak {
            last = p;
            quiet = 0;
        } else {
            quiet += 1;
            if quiet > 2000 {
                break;
            }
        }
        k += 1;
    }
    last + step
}

const EXTENT_TOL: f64 = 1e-17;

fn direct<F: Fn(f64) -> f64>(f: &F, m: f64, t: f64, tol: f64, top: f64) -> Result<Complex64> {
    let w_top = (top * top + m * m).sqrt();
    let oscillations = ((w_top - m) * t / (2.0 * std::f64::consts::PI)).ceil() as usize;
    let pieces = (oscillations / 2).clamp(1, 100_000);
    let breaks: Vec<f64> = (1..pieces).map(|k| top * k as f64 / pieces as f64).collect();
    let q = Integrator::new(tol, 0.0)
        .with_max_intervals(50_000 + 4 * pieces)
        .integrate(
            |p| {
                let w = (p * p + m * m).sqrt();
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::from_polar(f(p) * p * p / w, w * t)
            },
            0.0,
            top,
            &breaks,
        )?;
    Ok(q.value)
}

fn substitution<F: Fn(f64) -> f64>(f: &F, m: f64, t: f64, tol: f64, top: f64) -> Result<Complex64> {
    let y_top = t * ((m * m + top * top).sqrt() - m);
    let h = |y: f64| -> f64 {
        let x = y / t;
        let p = (x * (x + 2.0 * m)).sqrt();
        f(p) * y.sqrt() * (x + 2.0 * m).sqrt()
    };
    let y1 = y_top.min(1.0);
    // y = v² removes the √y endpoint behaviour.
    let head = Integrator::new(0.5 * tol, 0.0)
        .with_max_intervals(20_000)
        .integrate(
            |v| {
                let y = v * v;
                let x = y / t;
                let p = (x * (x + 2.0 * m)).sqrt();
                Complex64::from_polar(f(p) * v * (x + 2.0 * m).sqrt() * 2.0 * v, y)
            },
            0.0,
            y1.sqrt(),
            &[],
        )?;
    let mut total = head.value;
    if y_top > y1 {
        let mut edges = vec![y1];
        let mut y = y1;
        while y < y_top {
            y += 0.004 * y.max(1.0).min(t.max(1.0));
            edges.push(y.min(y_top));
        }
        let rule = FilonRule::sample(&edges, |y| Complex64::new(h(y), 0.0))?;
        total += rule.integrate(1.0);
    }
    Ok(Complex64::from_polar(t.powf(-1.5), m * t) * total)
}

fn filon_massless<F: Fn(f64) -> f64>(f: &F, t: f64, top: f64) -> Result<Complex64> {
    let panels = ((top / 0.004).ceil() as usize).max(16);
    let rule = FilonRule::sample(&uniform_edges(0.0, top, panels), |p| {
        Complex64::new(f(p) * p, 0.0)
    })?;
    Ok(rule.integrate(t))
}

/// `W(t)` by the route suited to `m` and `t`.
pub fn lemma_w_integral<F: Fn(f64) -> f64>(f: F, m: f64, t: f64, tol: f64) -> Result<Complex64> {
    let route = if t == 0.0 {
        LemmaRoute::Direct
    } else if m > 0.0 {
        LemmaRoute::Substitution
    } else {
        LemmaRoute::Filon
    };
    lemma_w_integral_with(f, m, t, tol, route)
}

/// `W(t)` by an explicit route.
pub fn lemma_w_integral_with<F: Fn(f64) -> f64>(
    f: F,
    m: f64,
    t: f64,
    tol: f64,
    route: LemmaRoute,
) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain("W(t) needs t >= 0".into()));
    }
    if !(m >= 0.0) || !(tol > 0.0) {
        return Err(Error::Config("W(t) needs m >= 0 and tol > 0".into()));
    }
    let top = profile_extent(&f, EXTENT_TOL);
    match route {
        LemmaRoute::Direct => direct(&f, m, t, tol, top),
        LemmaRoute::Substitution => {
            if m == 0.0 || t == 0.0 {
                return Err(Error::Config(
                    "the substitution route needs m > 0 and t > 0".into(),
                ));
            }
            substitution(&f, m, t, tol, top)
        }
        LemmaRoute::Filon => {
            if m != 0.0 {
                return Err(Error::Config("the plain Filon route is massless only".into()));
            }
            filon_massless(&f, t, top)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitWindow {
    pub t_min: f64,
    pub t_max: f64,
}

impl FitWindow {
    /// Last decade `[t_last/10, t_last]`, clipped to the start of the series.
    pub fn default_for(t_first: f64, t_last: f64) -> Self {
        Self {
            t_min: (t_last / 10.0).max(t_first),
            t_max: t_last,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum OscillationHandling {
    /// Discrete local maxima of `|series|`.
    Envelope,
    /// Root mean square over consecutive blocks of the given duration.
    Rms { block: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayFit {
    pub exponent: f64,
    pub stderr: f64,
    pub amplitude: f64,
    pub window: FitWindow,
    pub oscillation_handling: OscillationHandling,
    pub points: usize,
}

/// Minimum number of peaks or blocks in a fit.
pub const MIN_PEAKS: usize = 8;

/// Least-squares line `y = a + b x`; returns `(b, a, stderr(b))`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if pts.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    (slope, intercept, stderr)
}

/// Fits `|series| ≈ A·t^k` on the window.
pub fn fit_decay_exponent(
    times: &[f64],
    series: &[f64],
    window: FitWindow,
    handling: OscillationHandling,
) -> Result<DecayFit> {
    if times.len() != series.len() || times.len() < 3 {
        return Err(Error::Config(
            "times and series must have equal length >= 3".into(),
        ));
    }
    if !(window.t_min > 0.0 && window.t_min < window.t_max) {
        return Err(Error::Config("fit window needs 0 < tMin < tMax".into()));
    }
    if window.t_max / window.t_min < 10.0 * (1.0 - 1e-9) {
        return Err(Error::Config("fit window must span at least one decade".into()));
    }
    let (first, last) = (times[0], times[times.len() - 1]);
    let slack = 1e-9 * last.abs().max(1.0);
    if window.t_min < first - slack || window.t_max > last + slack {
        return Err(Error::Config(format!(
            "fit window [{}, {}] is outside the series [{first}, {last}]",
            window.t_min, window.t_max
        )));
    }
    let inside = |t: f64| t >= window.t_min - slack && t <= window.t_max + slack;
    let mut pts = Vec::new();
    match handling {
        OscillationHandling::Envelope => {
            for i in 1..series.len() - 1 {
                let (a, b, c) = (series[i - 1].abs(), series[i].abs(), series[i + 1].abs());
                if inside(times[i]) && b > a && b >= c && b > 0.0 {
                    pts.push((times[i].ln(), b.ln()));
                }
            }
        }
        OscillationHandling::Rms { block } => {
            if !(block > 0.0) {
                return Err(Error::Config("RMS block length must be positive".into()));
            }
            let mut start = window.t_min;
            while start < window.t_max - 1e-12 * window.t_max {
                let end = (start + block).min(window.t_max);
                let (mut sum, mut sum_t, mut count) = (0.0, 0.0, 0usize);
                for (t, v) in times.iter().zip(series) {
                    if *t >= start && (*t < end || (end == window.t_max && *t <= end + slack)) {
                        sum += v * v;
                        sum_t += t;
                        count += 1;
                    }
                }
                if count >= 3 && sum > 0.0 {
                    pts.push(((sum_t / count as f64).ln(), 0.5 * (sum / count as f64).ln()));
                }
                start = end;
            }
        }
    }
    if pts.len() < MIN_PEAKS {
        return Err(Error::InsufficientPeaks {
            found: pts.len(),
            required: MIN_PEAKS,
        });
    }
    let (exponent, intercept, stderr) = linear_fit(&pts);
    Ok(DecayFit {
        exponent,
        stderr,
        amplitude: intercept.exp(),
        window,
        oscillation_handling: handling,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss(p: f64) -> f64 {
        (-p * p).exp()
    }

    #[test]
    fn massless_at_zero_time() {
        let w = lemma_w_integral(gauss, 0.0, 0.0, 1e-12).unwrap();
        assert_relative_eq!(w.re, 0.5, max_relative = 1e-12);
        assert!(w.im.abs() < 1e-14);
    }

    #[test]
    fn routes_agree_for_massive_profile() {
        for &t in &[1.0, 7.3, 40.0, 100.0] {
            let a = lemma_w_integral_with(gauss, 1.0, t, 1e-13, LemmaRoute::Direct).unwrap();
            let b = lemma_w_integral_with(gauss, 1.0, t, 1e-13, LemmaRoute::Substitution).unwrap();
            assert!((a - b).norm() < 1e-6 * a.norm(), "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn massless_routes_agree() {
        for &t in &[0.5, 3.0, 20.0] {
            let a = lemma_w_integral_with(gauss, 0.0, t, 1e-13, LemmaRoute::Direct).unwrap();
            let b = lemma_w_integral_with(gauss, 0.0, t, 1e-13, LemmaRoute::Filon).unwrap();
            assert!((a - b).norm() < 1e-8 * a.norm().max(1e-6), "t = {t}");
        }
    }

    #[test]
    fn synthetic_power_law() {
        let times: Vec<f64> = (0..=99_000).map(|k| 10.0 + 0.01 * k as f64).collect();
        let series: Vec<f64> = times.iter().map(|t| t.powf(-1.5) * (5.0 * t).cos()).collect();
        let fit = fit_decay_exponent(
            &times,
            &series,
            FitWindow {
                t_min: 10.0,
                t_max: 1000.0,
            },
            OscillationHandling::Envelope,
        )
        .unwrap();
        assert!((fit.exponent + 1.5).abs() < 0.02);
    }

    #[test]
    fn short_window_is_rejected() {
        let times: Vec<f64> = (0..100).map(|k| 1.0 + k as f64).collect();
        let series = vec![1.0; 100];
        let r = fit_decay_exponent(
            &times,
            &series,
            FitWindow {
                t_min: 50.0,
                t_max: 100.0,
            },
            OscillationHandling::Envelope,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn monotone_series_has_no_peaks() {
        let times: Vec<f64> = (0..1000).map(|k| 1.0 + k as f64).collect();
        let series: Vec<f64> = times.iter().map(|t| 1.0 / t).collect();
        let r = fit_decay_exponent(
            &times,
            &series,
            FitWindow {
                t_min: 10.0,
                t_max: 1000.0,
            },
            OscillationHandling::Envelope,
        );
        assert!(matches!(r, Err(Error::InsufficientPeaks { .. })));
    }

    #[test]
    fn default_window_is_last_decade() {
        let w = FitWindow::default_for(0.0, 100.0);
        assert_eq!(w.t_min, 10.0);
        let w = FitWindow::default_for(40.0, 100.0);
        assert_eq!(w.t_min, 40.0);
    }
}
