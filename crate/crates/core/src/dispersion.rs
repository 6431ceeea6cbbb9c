//! The characteristic function
//!
//! `S(z) = −(λ₁ + λ₂z)·κ·F_a(z) − (g₁ + g₂z)`,  `κ = λħ/16π²`,
//!
//! its real zero set and the stability classification derived from it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{CutSide, Kernel};

/// `S` bound to one parameter tuple.
#[derive(Debug, Clone, Copy)]
pub struct Dispersion {
    params: ModelParams,
    kernel: Kernel,
    kappa: f64,
}

impl Dispersion {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: *params,
            kernel: Kernel::new(params.m, params.a)?,
            kappa: params.kappa(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Lower end of the real interval on which `S` is real and analytic.
    pub fn lower_bound(&self) -> f64 {
        if self.params.is_massless() {
            0.0
        } else {
            self.params.threshold()
        }
    }

    fn check_real(&self, s: f64) -> Result<()> {
        if !(s.is_finite() && s > self.lower_bound()) {
            return Err(Error::Domain(format!(
                "s = {s} is outside ({}, inf)",
                self.lower_bound()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let p = &self.params;
        let f = self.kernel.eval(z)?;
        Ok(-(z * p.lambda2 + p.lambda1) * f * self.kappa - (z * p.g2 + p.g1))
    }

    /// `S(s)` on the real axis, unchecked.
    pub fn eval_real(&self, s: f64) -> f64 {
        let p = &self.params;
        -(p.lambda1 + p.lambda2 * s) * self.kappa * self.kernel.eval_real(s) - (p.g1 + p.g2 * s)
    }

    /// `S′(s)` on the real axis, unchecked.
    pub fn derivative_real(&self, s: f64) -> f64 {
        let p = &self.params;
        -p.lambda2 * self.kappa * self.kernel.eval_real(s)
            - (p.lambda1 + p.lambda2 * s) * self.kappa * self.kernel.derivative_real(s)
            - p.g2
    }

    /// Sum of the magnitudes of the three terms of `S′(s)`.
    pub fn derivative_scale(&self, s: f64) -> f64 {
        let p = &self.params;
        (p.lambda2 * self.kappa * self.kernel.eval_real(s)).abs()
            + ((p.lambda1 + p.lambda2 * s) * self.kappa * self.kernel.derivative_real(s)).abs()
            + p.g2.abs()
    }

    pub fn derivative(&self, s: f64) -> Result<f64> {
        self.check_real(s)?;
        Ok(self.derivative_real(s))
    }

    /// `dS/dz` off the cut.
    pub fn derivative_complex(&self, z: Complex64) -> Result<Complex64> {
        let p = &self.params;
        let f = self.kernel.eval(z)?;
        let df = self.kernel.derivative(z)?;
        Ok(-f * (p.lambda2 * self.kappa) - (z * p.lambda2 + p.lambda1) * df * self.kappa - p.g2)
    }

    /// `S(−M² ± i0)` on the continuum.
    pub fn cut_boundary(&self, m2: f64, side: CutSide) -> Result<Complex64> {
        let p = &self.params;
        let f = self.kernel.cut_boundary(m2, side)?;
        Ok(-f * ((p.lambda1 - p.lambda2 * m2) * self.kappa) - (p.g1 - p.g2 * m2))
    }
}

/// `S(z)` for the given parameters.
pub fn s_eval(z: Complex64, params: &ModelParams) -> Result<Complex64> {
    Dispersion::new(params)?.eval(z)
}

/// `S′(s)` for real `s` above the threshold.
pub fn s_prime(s: f64, params: &ModelParams) -> Result<f64> {
    Dispersion::new(params)?.derivative(s)
}

/// `g₂λ₁ − λ₂g₁ ≥ 0`, which confines the zeros of `S` to the real axis.
pub fn check_condition(params: &ModelParams) -> bool {
    params.condition_margin() >= 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RootKind {
    Interior,
    SpecialPoint,
}

/// A simple real zero of `S` and its residue data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Root {
    pub s: f64,
    pub s_prime: f64,
    pub kind: RootKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Empty,
    AllNegative,
    ContainsPositive,
    Degenerate,
}

/// Which sufficient condition for an all-negative zero set applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorollaryCase {
    A,
    B,
    C,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RootReport {
    pub roots: Vec<Root>,
    pub classification: Classification,
    pub condition_holds: bool,
    /// False when the real-axis search cannot exclude complex zeros.
    pub trusted: bool,
    pub corollary_case: CorollaryCase,
    /// Real interval scanned for sign changes.
    pub searched_interval: [f64; 2],
    /// `S` at the end of the search interval still has the wrong sign for
    /// its asymptotics, so an odd number of zeros lies beyond it.
    pub tail_unresolved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<String>,
}

impl RootReport {
    pub fn interior_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.kind == RootKind::Interior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub root_tol: f64,
    pub grid_points: usize,
    pub s_max: Option<f64>,
    /// Number of tenfold extensions tried when the sign at `s_max` is wrong.
    pub max_extensions: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-12,
            grid_points: 4096,
            s_max: None,
            max_extensions: 280,
        }
    }
}

const TANGENCY: f64 = 1e-6;

/// Default upper end of the root search.
pub fn default_s_max(params: &ModelParams) -> f64 {
    let mut s = (1e4 * params.m * params.m).max(1e4 * params.a.abs());
    if params.g2 != 0.0 {
        let r = (params.g1 / params.g2).abs();
        if r.is_finite() {
            s = s.max(1e4 * r);
        }
    }
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn asymptotic_sign(p: &ModelParams) -> i8 {
    if p.lambda2 != 0.0 {
        -sign(p.lambda2)
    } else if p.g2 != 0.0 {
        -sign(p.g2)
    } else {
        -sign(p.lambda1)
    }
}

/// Points `lo + d` with `d` geometric between `d_min` and `hi − lo`.
fn graded_grid(lo: f64, hi: f64, d_min: f64, n: usize) -> Vec<f64> {
    let span = hi - lo;
    let ratio = (span / d_min).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + d_min * (ratio * k as f64).exp()
            }
        })
        .collect();
    g.dedup();
    g
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if sign(fm) == sign(flo) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

struct Scan {
    brackets: Vec<(f64, f64)>,
    exact: Vec<f64>,
    tangency: Option<f64>,
}

fn scan_grid(d: &Dispersion, grid: &[f64], root_tol: f64) -> Scan {
    let vals: Vec<f64> = grid.iter().map(|&s| d.eval_real(s)).collect();
    let ders: Vec<f64> = grid.iter().map(|&s| d.derivative_real(s)).collect();
    let mut out = Scan {
        brackets: Vec::new(),
        exact: Vec::new(),
        tangency: None,
    };
    for k in 0..grid.len() {
        if vals[k] == 0.0 {
            out.exact.push(grid[k]);
        }
        if k + 1 == grid.len() {
            break;
        }
        let (a, b) = (grid[k], grid[k + 1]);
        let (sa, sb) = (sign(vals[k]), sign(vals[k + 1]));
        if sa == 0 || sb == 0 {
            continue;
        }
        if sa != sb {
            out.brackets.push((a, b));
            continue;
        }
        if sign(ders[k]) != sign(ders[k + 1]) && sign(ders[k]) != 0 && sign(ders[k + 1]) != 0 {
            // An extremum inside the cell may hide a close pair of zeros.
            let e = bisect(&|s| d.derivative_real(s), a, b);
            let se = d.eval_real(e);
            if se.abs() <= root_tol {
                out.tangency = Some(e);
            } else if sign(se) != sa {
                out.brackets.push((a, e));
                out.brackets.push((e, b));
            }
        }
    }
    out
}

fn corollary_case(d: &Dispersion, condition: bool) -> CorollaryCase {
    let p = d.params();
    if !condition || p.is_massless() {
        return CorollaryCase::None;
    }
    let k = d.kappa();
    let f0 = d.kernel().eval_real(0.0);
    let f_thr = d.kernel().eval_real(p.threshold());
    let m2x4 = -p.threshold();
    if p.lambda2 == 0.0 && p.lambda1 != 0.0 {
        let g1l = p.g1 / p.lambda1;
        let g2l = p.g2 / p.lambda1;
        if g2l >= 0.0 && -g1l <= k * f0 && k * f_thr <= -g1l + m2x4 * g2l {
            return CorollaryCase::A;
        }
    }
    if p.lambda2 != 0.0 && p.g2 != 0.0 {
        let sl = -p.lambda1 / p.lambda2;
        let sg = -p.g1 / p.g2;
        if sl < sg && sg < p.a && p.a < 0.0 {
            return CorollaryCase::B;
        }
    }
    if p.lambda2 != 0.0 && p.lambda1 != 0.0 {
        let sl = -p.lambda1 / p.lambda2;
        let r = -p.g1 / p.lambda1;
        if p.threshold() < sl && sl < p.a && p.a < 0.0 && p.g2 > 0.0 && 0.0 <= r && r <= k * f0 {
            return CorollaryCase::C;
        }
    }
    CorollaryCase::None
}

fn search(params: &ModelParams, opts: &RootOptions) -> Result<RootReport> {
    if !(opts.root_tol > 0.0) {
        return Err(Error::Config("rootTol must be positive".into()));
    }
    if opts.grid_points < 16 {
        return Err(Error::Config("root grid needs at least 16 points".into()));
    }
    let d = Dispersion::new(params)?;
    let lo = d.lower_bound();
    let mut hi = opts.s_max.unwrap_or_else(|| default_s_max(params));
    if !(hi.is_finite() && hi > lo) {
        return Err(Error::Config(format!(
            "sMax = {hi} must exceed the lower bound {lo}"
        )));
    }
    let scale = if params.is_massless() {
        params.a.abs()
    } else {
        -params.threshold()
    };
    let grid = graded_grid(lo, hi, 1e-12 * scale, opts.grid_points);
    let mut scan = scan_grid(&d, &grid, opts.root_tol);

    let target = asymptotic_sign(params);
    let mut tail_unresolved = false;
    if sign(d.eval_real(hi)) != target {
        tail_unresolved = true;
        for _ in 0..opts.max_extensions {
            let next = hi * 10.0;
            if !next.is_finite() || next > 1e300 {
                break;
            }
            let seg = graded_grid(hi, next, 1e-3 * hi, 64);
            let more = scan_grid(&d, &seg, opts.root_tol);
            scan.brackets.extend(more.brackets);
            scan.exact.extend(more.exact);
            scan.tangency = scan.tangency.or(more.tangency);
            hi = next;
            if sign(d.eval_real(hi)) == target {
                tail_unresolved = false;
                break;
            }
        }
    }

    let f = |s: f64| d.eval_real(s);
    let mut locs: Vec<f64> = scan.brackets.iter().map(|&(a, b)| bisect(&f, a, b)).collect();
    locs.extend(scan.exact.iter().copied());
    locs.sort_by(f64::total_cmp);
    locs.dedup();

    let mut degeneracy = scan
        .tangency
        .map(|e| format!("tangential zero of S near s = {e}"));
    let mut roots = Vec::new();
    for s in locs {
        let sp = d.derivative_real(s);
        if sp.abs() < TANGENCY * d.derivative_scale(s) {
            degeneracy.get_or_insert_with(|| format!("S'(s) vanishes at the zero s = {s}"));
        }
        roots.push(Root {
            s,
            s_prime: sp,
            kind: RootKind::Interior,
        });
    }
    if let Some(sl) = params.special_point() {
        let residual = params.g2 * params.lambda1 / params.lambda2 - params.g1;
        if sl <= params.threshold() && residual.abs() <= opts.root_tol {
            roots.push(Root {
                s: sl,
                s_prime: special_point_slope(&d, sl),
                kind: RootKind::SpecialPoint,
            });
        }
    }
    if roots.len() > 2 {
        degeneracy.get_or_insert_with(|| format!("{} zeros found, at most two are admissible", roots.len()));
    }

    let condition = check_condition(params);
    let classification = if degeneracy.is_some() {
        Classification::Degenerate
    } else if roots.is_empty() {
        Classification::Empty
    } else if roots.iter().all(|r| r.s < 0.0) {
        Classification::AllNegative
    } else {
        Classification::ContainsPositive
    };
    Ok(RootReport {
        roots,
        classification,
        condition_holds: condition,
        trusted: condition,
        corollary_case: corollary_case(&d, condition),
        searched_interval: [lo, hi],
        tail_unresolved,
        degeneracy,
    })
}

// At the special point the spectral term drops out of S; its slope there
// is taken from the boundary value of F on the side used for retarded modes.
fn special_point_slope(d: &Dispersion, s: f64) -> f64 {
    let p = d.params();
    let f = if s == p.threshold() {
        d.kernel().eval_real(s)
    } else {
        d.kernel()
            .cut_boundary(-s, CutSide::Above)
            .map(|c| c.re)
            .unwrap_or(f64::NAN)
    };
    -p.lambda2 * d.kappa() * f - p.g2
}

/// Locates the real zeros of `S`; a tangential zero is an error.
pub fn find_roots(params: &ModelParams, opts: &RootOptions) -> Result<RootReport> {
    let report = search(params, opts)?;
    if let Some(why) = &report.degeneracy {
        return Err(Error::Degenerate(why.clone()));
    }
    Ok(report)
}

/// Zero set and stability class with default search options.
pub fn classify(params: &ModelParams) -> Result<RootReport> {
    classify_with(params, &RootOptions::default())
}

/// Like [`classify`], but a degenerate zero set is reported, not raised.
pub fn classify_with(params: &ModelParams, opts: &RootOptions) -> Result<RootReport> {
    search(params, opts)
}

/// Plain sign scan on `n` points graded toward `lo`, refined by bisection.
///
/// Carries no extremum refinement; used as an inexpensive cross-check.
pub fn scan_roots_dense(params: &ModelParams, n: usize, hi: f64) -> Result<Vec<f64>> {
    let d = Dispersion::new(params)?;
    let lo = d.lower_bound();
    if !(hi > lo) || n < 2 {
        return Err(Error::Config("invalid scan interval".into()));
    }
    let scale = if params.is_massless() {
        params.a
    } else {
        -params.threshold()
    };
    let grid = graded_grid(lo, hi, 1e-13 * scale, n);
    let f = |s: f64| d.eval_real(s);
    let mut out = Vec::new();
    let mut prev = f(grid[0]);
    for w in grid.windows(2) {
        let cur = f(w[1]);
        if sign(prev) * sign(cur) < 0 {
            out.push(bisect(&f, w[0], w[1]));
        }
        prev = cur;
    }
    Ok(out)
}
