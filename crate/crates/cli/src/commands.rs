use std::f64::consts::PI;

use anyhow::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use backreact::cosmo::cosmo_regime_report;
use backreact::decay::{fit_decay_exponent, DecayFit, FitWindow};
use backreact::dispersion::{classify_with, scan_roots_dense, Classification, RootOptions, RootReport};
use backreact::evolve::{
    probe_ivp, probe_sourced, runaway_mode, solve_ivp_mode, sourced_run, ModeRegime, TemporalBump,
};
use backreact::greens::{cut_density, default_m2_max, TailEstimate};
use backreact::grid::TimeGrid;
use backreact::radial::RadialField;
use backreact::spectral::{CutSide, Kernel};
use backreact::{Error, ModelParams};

use crate::config::{set_param, ConfigError, EvolveMode, RunConfig};
use crate::output::{Cell, Sink, Table};

/// Points of the dense sign scan used to cross-check reported zeros.
const ORACLE_POINTS: usize = 100_000;

fn root_options(cfg: &RunConfig) -> RootOptions {
    RootOptions {
        root_tol: cfg.tolerances.root_tol,
        ..RootOptions::default()
    }
}

fn degenerate(report: &RootReport) -> Error {
    Error::Degenerate(
        report
            .degeneracy
            .clone()
            .unwrap_or_else(|| "degenerate zero set".into()),
    )
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Empty => "Empty",
        Classification::AllNegative => "AllNegative",
        Classification::ContainsPositive => "ContainsPositive",
        Classification::Degenerate => "Degenerate",
    }
}

pub fn fa(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let p = cfg.model()?;
    let kernel = Kernel::new(p.m, p.a)?;
    let task = cfg
        .fa
        .as_ref()
        .ok_or_else(|| ConfigError("fa needs an 'fa' block with 'real' and/or 'complex' ranges".into()))?;
    let mut points: Vec<Complex64> = Vec::new();
    if let Some(r) = &task.real {
        points.extend(r.points().into_iter().map(|x| Complex64::new(x, 0.0)));
    }
    if let Some(rect) = &task.complex {
        for y in rect.im.points().into_iter().filter(|&y| y != 0.0) {
            points.extend(rect.re.points().into_iter().map(|x| Complex64::new(x, y)));
        }
    }
    if points.is_empty() {
        return Err(ConfigError("the 'fa' block selects no points".into()).into());
    }
    let tol = cfg.tolerances.quad_tol;
    let massless = p.m == 0.0;
    let rows = points
        .par_iter()
        .map(|&z| -> Result<Vec<Cell>> {
            let on_cut = z.im == 0.0 && (z.re <= kernel.threshold() || (massless && z.re <= 0.0));
            let (value, route, diff) = if on_cut {
                if massless && z.re == 0.0 {
                    (Complex64::new(f64::NAN, f64::NAN), "singular", f64::NAN)
                } else {
                    (kernel.cut_boundary(-z.re, CutSide::Above)?, "cut_above", f64::NAN)
                }
            } else {
                let closed = kernel.eval(z)?;
                let quad = kernel.integral(z, tol)?;
                (
                    closed,
                    if massless { "massless" } else { "closed" },
                    (closed - quad).norm(),
                )
            };
            Ok(vec![
                z.re.into(),
                z.im.into(),
                value.re.into(),
                value.im.into(),
                route.into(),
                diff.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("fa", &["re_z", "im_z", "re_f", "im_f", "route", "route_diff"]);
    rows.into_iter().for_each(|r| table.push(r));
    sink.table(&table, true)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OracleCheck {
    points: usize,
    upper: f64,
    roots: Vec<f64>,
    agrees: bool,
}

fn oracle(p: &ModelParams, report: &RootReport) -> Result<OracleCheck> {
    let upper = report.searched_interval[1];
    let roots = scan_roots_dense(p, ORACLE_POINTS, upper)?;
    let reported: Vec<f64> = report.interior_roots().map(|r| r.s).collect();
    let agrees = roots.len() == reported.len()
        && roots
            .iter()
            .zip(&reported)
            .all(|(a, b)| (a - b).abs() <= 1e-8 * a.abs().max(1.0));
    Ok(OracleCheck {
        points: ORACLE_POINTS,
        upper,
        roots,
        agrees,
    })
}

pub fn roots(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let p = cfg.model()?;
    let report = classify_with(&p, &root_options(cfg))?;
    let check = oracle(&p, &report)?;
    sink.document("roots", &json!({ "report": report, "oracle": check }), true)?;
    if report.classification == Classification::Degenerate {
        return Err(degenerate(&report).into());
    }
    Ok(())
}

pub fn cosmo(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let c = cfg.cosmo()?;
    let report = cosmo_regime_report(&c)?;
    sink.document("cosmo", &report, true)?;
    if report.report.classification == Classification::Degenerate {
        return Err(degenerate(&report.report).into());
    }
    Ok(())
}

pub fn scan(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let base = cfg.model()?;
    let task = cfg
        .scan
        .as_ref()
        .ok_or_else(|| ConfigError("scan needs a 'scan' block with an 'x' axis".into()))?;
    let xs = task.x.range.points();
    let ys = task
        .y
        .as_ref()
        .map(|y| y.range.points())
        .unwrap_or_else(|| vec![f64::NAN]);
    let cells: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let opts = root_options(cfg);
    let rows = cells
        .par_iter()
        .map(|&(x, y)| -> Result<Vec<Cell>> {
            let mut p = base;
            set_param(&mut p, &task.x.param, x)?;
            if let Some(ax) = &task.y {
                set_param(&mut p, &ax.param, y)?;
            }
            let outcome = p.validate().and_then(|_| classify_with(&p, &opts));
            Ok(match outcome {
                Ok(r) => {
                    let roots: Vec<String> = r.roots.iter().map(|s| format!("{:?}", s.s)).collect();
                    vec![
                        x.into(),
                        y.into(),
                        classification_name(r.classification).into(),
                        r.roots.len().into(),
                        roots.join(";").into(),
                        r.condition_holds.into(),
                        serde_json::to_value(r.corollary_case)?
                            .as_str()
                            .unwrap_or("")
                            .into(),
                        r.degeneracy.unwrap_or_default().into(),
                    ]
                }
                Err(e) => vec![
                    x.into(),
                    y.into(),
                    "invalid".into(),
                    Cell::Int(0),
                    "".into(),
                    false.into(),
                    "".into(),
                    e.to_string().into(),
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "scan",
        &[
            "x",
            "y",
            "classification",
            "n_roots",
            "roots",
            "condition_holds",
            "corollary_case",
            "note",
        ],
    );
    rows.into_iter().for_each(|r| table.push(r));
    sink.table(&table, true)
}

fn max_support(radii: impl Iterator<Item = f64>) -> f64 {
    radii.fold(0.0, f64::max)
}

fn probe_table(series: &backreact::evolve::ProbeSeries) -> Table {
    let mut t = Table::new("probe", &["t", "r", "psi", "pole", "cut"]);
    for (j, time) in series.times().into_iter().enumerate() {
        t.push(vec![
            time.into(),
            series.radius.into(),
            series.values[j].into(),
            series.pole[j].into(),
            series.cut[j].into(),
        ]);
    }
    t
}

fn fit_probe(cfg: &RunConfig, times: &[f64], values: &[f64]) -> serde_json::Value {
    let first = times[0].max(f64::MIN_POSITIVE);
    let last = times[times.len() - 1];
    let def = FitWindow::default_for(first, last);
    let window = FitWindow {
        t_min: cfg.evolve.fit.t_min.unwrap_or(def.t_min),
        t_max: cfg.evolve.fit.t_max.unwrap_or(def.t_max),
    };
    let fit: std::result::Result<DecayFit, Error> =
        fit_decay_exponent(times, values, window, cfg.evolve.fit.handling);
    match fit {
        Ok(f) => json!({ "decayFit": f }),
        Err(e) => json!({ "fitError": e.to_string() }),
    }
}

pub fn evolve(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    match cfg.evolve.mode {
        EvolveMode::Sourced => evolve_sourced(cfg, sink),
        EvolveMode::Ivp => evolve_ivp(cfg, sink),
        EvolveMode::Runaway => evolve_runaway(cfg, sink),
    }
}

fn probe_grid(t0: f64, cfg: &RunConfig) -> Result<TimeGrid> {
    let g = &cfg.grids;
    if g.t_max <= t0 {
        return Err(ConfigError(format!("tMax = {} leaves no probe times after t = {t0}", g.t_max)).into());
    }
    let n = ((g.t_max - t0) / g.probe_dt * (1.0 + 1e-12)).floor() as usize + 1;
    Ok(TimeGrid::starting_at(t0, g.probe_dt, n.max(2))?)
}

fn evolve_sourced(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let p = cfg.model()?;
    let report = classify_with(&p, &root_options(cfg))?;
    if report.classification == Classification::Degenerate {
        return Err(degenerate(&report).into());
    }
    let g = &cfg.grids;
    let src = &cfg.evolve.source;
    let grid = TimeGrid::covering(g.t_max, g.dt)?;
    let m2_max = match g.m2_max {
        Some(v) => v,
        None => default_m2_max(&p, PI / grid.dt)?,
    };
    let cut = cut_density(&p, m2_max, g.n_nodes)?;
    let temporal = TemporalBump::new(src.center, src.half_width)?;
    let mut spatial = RadialField::bump(src.radius, g.dr, g.r.unwrap_or(1.25 * src.radius))?;
    spatial.values.iter_mut().for_each(|v| *v *= src.amplitude);

    let p_values = cfg.p_values();
    let run = sourced_run(&p, &report, &cut, &temporal, &spatial, &p_values, &grid, 0.0)?;
    let (ta, tb) = temporal.support();
    let mut modes = Table::new("modes", &["t", "p_abs", "re", "im"]);
    let mut precursor: f64 = 0.0;
    for m in &run.modes {
        for (j, v) in m.values.iter().enumerate() {
            let t = m.grid.at(j);
            if t < ta {
                precursor = precursor.max(v.norm());
            }
            modes.push(vec![t.into(), m.p_abs.into(), v.re.into(), v.im.into()]);
        }
    }

    let times = probe_grid(tb, cfg)?;
    let series = probe_sourced(&p, &report, &temporal, &spatial, cfg.evolve.radius, &times)?;
    let fit = fit_probe(cfg, &series.times(), &series.values);
    let tail: TailEstimate = cut.tail();

    sink.table(&modes, false)?;
    sink.table(&probe_table(&series), false)?;
    let mut summary = json!({
        "mode": "sourced",
        "report": report,
        "residualNorm": run.residual_norm,
        "sourceAmplitudes": run.source_amplitudes,
        "causality": { "sourceStart": ta, "maxBeforeSource": precursor },
        "continuum": {
            "M2max": m2_max,
            "panels": g.n_nodes,
            "tail": tail,
            "relativeTail": cut.relative_tail(),
        },
    });
    merge(&mut summary, fit);
    sink.document("summary", &summary, true)
}

fn evolve_ivp(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let p = cfg.model()?;
    let report = classify_with(&p, &root_options(cfg))?;
    if report.classification == Classification::Degenerate {
        return Err(degenerate(&report).into());
    }
    let g = &cfg.grids;
    let radii = &cfg.evolve.initial_data;
    if radii.len() != 2 * report.roots.len() {
        return Err(ConfigError(format!(
            "{} zeros of S need {} initial data radii, got {}",
            report.roots.len(),
            2 * report.roots.len(),
            radii.len()
        ))
        .into());
    }
    let radius = g.r.unwrap_or(1.25 * max_support(radii.iter().copied()));
    let fields = radii
        .iter()
        .map(|&r0| RadialField::bump(r0, g.dr, radius))
        .collect::<backreact::Result<Vec<_>>>()?;
    let times = probe_grid(0.0, cfg)?;
    let series = probe_ivp(&report, &fields, cfg.evolve.radius, &times)?;

    let grid = TimeGrid::covering(g.t_max, g.dt)?;
    let mut modes = Table::new("modes", &["t", "p_abs", "re", "im"]);
    for &pa in &cfg.p_values() {
        let data: Vec<Complex64> = fields
            .iter()
            .map(|f| Complex64::new(f.transform_at(pa), 0.0))
            .collect();
        let sol = solve_ivp_mode(pa, &report, &data, &grid)?;
        for (j, v) in sol.values.iter().enumerate() {
            modes.push(vec![grid.at(j).into(), pa.into(), v.re.into(), v.im.into()]);
        }
    }

    // The fit skips t = 0, where a power law is undefined.
    let all_t = series.times();
    let fit = fit_probe(cfg, &all_t[1..], &series.values[1..]);
    sink.table(&modes, false)?;
    sink.table(&probe_table(&series), false)?;
    let mut summary = json!({ "mode": "ivp", "report": report });
    merge(&mut summary, fit);
    sink.document("summary", &summary, true)
}

fn evolve_runaway(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let p = cfg.model()?;
    let report = classify_with(&p, &root_options(cfg))?;
    if report.classification == Classification::Degenerate {
        return Err(degenerate(&report).into());
    }
    let positive: Vec<f64> = report.roots.iter().map(|r| r.s).filter(|&s| s > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::RefusedRegime(format!(
            "runaway analysis needs a positive zero of S; classification is {}",
            classification_name(report.classification)
        ))
        .into());
    }
    let grid = TimeGrid::covering(cfg.grids.t_max, cfg.grids.dt)?;
    let mut rates = Table::new(
        "runaway",
        &[
            "s",
            "p_abs",
            "regime",
            "growth_rate",
            "expected_rate",
            "rel_error",
        ],
    );
    let mut modes = Table::new("modes", &["t", "s", "p_abs", "value"]);
    for &s in &positive {
        for &pa in &cfg.p_values() {
            let m = runaway_mode(pa, s, &grid)?;
            let regime = match m.regime {
                ModeRegime::Growing => "growing",
                ModeRegime::Marginal => "marginal",
                ModeRegime::Oscillatory => "oscillatory",
            };
            let expected = if m.regime == ModeRegime::Growing {
                (s - pa * pa).sqrt()
            } else {
                f64::NAN
            };
            let rate = m.growth_rate.unwrap_or(f64::NAN);
            rates.push(vec![
                s.into(),
                pa.into(),
                regime.into(),
                rate.into(),
                expected.into(),
                ((rate - expected) / expected).abs().into(),
            ]);
            for (j, v) in m.values.iter().enumerate() {
                modes.push(vec![grid.at(j).into(), s.into(), pa.into(), (*v).into()]);
            }
        }
    }
    sink.table(&modes, false)?;
    sink.table(&rates, true)?;
    sink.document("summary", &json!({ "mode": "runaway", "report": report }), false)
}

fn merge(into: &mut serde_json::Value, extra: serde_json::Value) {
    if let (Some(a), serde_json::Value::Object(b)) = (into.as_object_mut(), extra) {
        a.extend(b);
    }
}
