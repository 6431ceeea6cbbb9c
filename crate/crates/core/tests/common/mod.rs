#![allow(dead_code)]

use backreact::decay::{fit_decay_exponent, DecayFit, FitWindow, OscillationHandling};
use backreact::dispersion::RootReport;
use backreact::evolve::{probe_ivp, probe_sourced, ProbeSeries, TemporalBump};
use backreact::grid::TimeGrid;
use backreact::radial::RadialField;
use backreact::{ModelParams, Result};

/// Satisfies `−λ₁/λ₂ < −g₁/g₂ < a < 0`; one negative zero.
pub fn cor_b() -> ModelParams {
    ModelParams {
        m: 1.0,
        hbar: 1.0,
        lambda: 1.0,
        lambda1: 3.0,
        lambda2: 1.0,
        g1: 2.0,
        g2: 1.0,
        a: -1.0,
    }
}

/// Same inequalities with a strong coupling; two negative zeros.
pub fn two_roots() -> ModelParams {
    ModelParams {
        lambda: 300.0,
        lambda1: 1.5,
        g1: 1.2,
        ..cor_b()
    }
}

/// `λħ` so small that `S` is the affine function `−(g₁ + g₂z)`.
pub fn affine() -> ModelParams {
    ModelParams {
        m: 1.0,
        hbar: 1.0,
        lambda: 1e-12,
        lambda1: 1.0,
        lambda2: 0.0,
        g1: 1.0,
        g2: 1.0,
        a: -1.0,
    }
}

/// Sourced and homogeneous late-time series at `r = 0`, in units of `unit`.
pub struct DecayRuns {
    pub sourced: ProbeSeries,
    pub ivp: Option<ProbeSeries>,
    pub window: FitWindow,
}

/// Source `T(t)B(r)` with `T` centred at 4 (half width 3) and `B` a bump of
/// radius 2; samples `t ∈ [7, 700]` with step 0.05.
pub fn decay_runs(params: &ModelParams, report: &RootReport, unit: f64, with_ivp: bool) -> Result<DecayRuns> {
    let temporal = TemporalBump::new(4.0 * unit, 3.0 * unit)?;
    let spatial = RadialField::bump(2.0 * unit, 0.005 * unit, 2.5 * unit)?;
    let times = TimeGrid::starting_at(7.0 * unit, 0.05 * unit, 13_861)?;
    let sourced = probe_sourced(params, report, &temporal, &spatial, 0.0, &times)?;
    let ivp = if with_ivp {
        let n = 2 * report.roots.len();
        let data: Vec<RadialField> = (0..n)
            .map(|j| {
                let r0 = (2.0 - 0.25 * j as f64) * unit;
                RadialField::bump(r0, 0.002 * unit, 2.2 * unit)
            })
            .collect::<Result<_>>()?;
        Some(probe_ivp(report, &data, 0.0, &times)?)
    } else {
        None
    };
    Ok(DecayRuns {
        sourced,
        ivp,
        window: FitWindow::default_for(times.at(0), times.t_max()),
    })
}

pub fn envelope_fit(series: &ProbeSeries, window: FitWindow) -> Result<DecayFit> {
    fit_decay_exponent(
        &series.times(),
        &series.values,
        window,
        OscillationHandling::Envelope,
    )
}
