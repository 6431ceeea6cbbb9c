//! Cosmological reading of the model: a massive scalar with curvature
//! coupling `ξ` driving the linearized trace equation for the scalar
//! curvature, with `ħ = 1` and masses in units of the Planck mass.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dispersion::{classify, RootReport};
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CosmoParams {
    pub m: f64,
    pub xi: f64,
    pub alpha3: f64,
    pub m_planck: f64,
    pub a: f64,
}

impl CosmoParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_planck > 0.0 && self.m_planck.is_finite()) {
            return Err(Error::Config("Planck mass must be positive".into()));
        }
        if !(self.xi > 0.0) {
            return Err(Error::Config("curvature coupling xi must be positive".into()));
        }
        if !(self.m >= 0.0) || !self.alpha3.is_finite() || !self.a.is_finite() {
            return Err(Error::Config("mass, alpha3 and a must be finite, m >= 0".into()));
        }
        if self.a <= -4.0 * self.m * self.m {
            return Err(Error::Config("renormalization point must exceed -4m^2".into()));
        }
        Ok(())
    }

    /// `ξ = 1/6`, where `λ₂` vanishes.
    pub fn is_conformal(&self) -> bool {
        self.xi == 1.0 / 6.0
    }
}

/// Toy-model couplings of a cosmological configuration.
///
/// `g₁ = −m_P²/8π`, `g₂ = α₃`, `λ = ξ`, `λ₁ = m²`, `λ₂ = 3(ξ − 1/6)`, `ħ = 1`.
pub fn map_params(c: &CosmoParams) -> Result<ModelParams> {
    c.validate()?;
    let p = ModelParams {
        m: c.m,
        hbar: 1.0,
        lambda: c.xi,
        lambda1: c.m * c.m,
        lambda2: 3.0 * (c.xi - 1.0 / 6.0),
        g1: -c.m_planck * c.m_planck / (8.0 * PI),
        g2: c.alpha3,
        a: c.a,
    };
    p.validate()?;
    Ok(p)
}

/// `α₃m²/m_P² ≥ −(3/8π)(ξ − 1/6)`.
pub fn cosmo_condition(c: &CosmoParams) -> bool {
    c.alpha3 * c.m * c.m / (c.m_planck * c.m_planck) >= -(3.0 / (8.0 * PI)) * (c.xi - 1.0 / 6.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CosmoReport {
    pub cosmo: CosmoParams,
    pub params: ModelParams,
    pub report: RootReport,
    pub condition_holds: bool,
    /// `ξ = 1/6`: `λ₂ = 0` and only the first sufficient condition can apply.
    pub conformal_coupling: bool,
    /// `0 < ξ < 1/6`, `α₃ > 0`, `a > −4m²`: the region where sourced
    /// solutions are expected to carry no discrete-mass contribution.
    pub poles_absent_region: bool,
    /// `ξ > 1/6`, `α₃ > 0`, `a > −4m²`: the region where, for large enough
    /// `m²`, every zero of `S` is negative.
    pub all_negative_region: bool,
    /// Whether the computed zero set matches the expectation of the region.
    pub region_confirmed: Option<bool>,
    /// The cosmological constant and the trace anomaly are set to zero at
    /// linear order.
    pub cosmological_constant: f64,
    pub trace_anomaly_included: bool,
    pub warnings: Vec<String>,
}

pub fn cosmo_regime_report(c: &CosmoParams) -> Result<CosmoReport> {
    use crate::dispersion::Classification::*;
    let params = map_params(c)?;
    let report = classify(&params)?;
    let admissible = c.alpha3 > 0.0 && c.a > -4.0 * c.m * c.m;
    let poles_absent_region = admissible && c.xi > 0.0 && c.xi < 1.0 / 6.0;
    let all_negative_region = admissible && c.xi > 1.0 / 6.0;
    let region_confirmed = if poles_absent_region {
        Some(report.condition_holds && report.roots.is_empty())
    } else if all_negative_region {
        Some(report.condition_holds && report.classification == AllNegative)
    } else {
        None
    };
    let mut warnings = Vec::new();
    if c.is_conformal() {
        warnings.push("conformal coupling xi = 1/6 gives lambda2 = 0".to_string());
    }
    if !report.trusted {
        warnings.push("stability condition violated: complex zeros of S are not excluded".to_string());
    }
    if report.tail_unresolved {
        warnings.push(format!(
            "S keeps the wrong sign up to s = {:e}; a remote zero lies beyond the search",
            report.searched_interval[1]
        ));
    }
    Ok(CosmoReport {
        cosmo: *c,
        params,
        conformal_coupling: c.is_conformal(),
        condition_holds: report.condition_holds,
        report,
        poles_absent_region,
        all_negative_region,
        region_confirmed,
        cosmological_constant: 0.0,
        trace_anomaly_included: false,
        warnings,
    })
}
