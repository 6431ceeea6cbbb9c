//! Coupling and renormalization constants of one linearized theory.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The tuple `(m, ħ, λ, λ₁, λ₂, g₁, g₂, a)`.
///
/// `a` is the renormalization point of the one-loop kernel and must satisfy
/// `a > -4m²`. A vanishing mass selects the logarithmic (massless) kernel,
/// which additionally needs `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    pub hbar: f64,
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub g1: f64,
    pub g2: f64,
    pub a: f64,
}

impl ModelParams {
    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("m", self.m),
            ("hbar", self.hbar),
            ("lambda", self.lambda),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("g1", self.g1),
            ("g2", self.g2),
            ("a", self.a),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("{name} must be finite")));
        }
        if self.m < 0.0 {
            return Err(Error::Config("mass must be non-negative".into()));
        }
        if self.hbar <= 0.0 {
            return Err(Error::Config("hbar must be positive".into()));
        }
        if self.lambda <= 0.0 {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if self.lambda1 == 0.0 && self.lambda2 == 0.0 {
            return Err(Error::Config(
                "at least one of lambda1, lambda2 must be nonzero".into(),
            ));
        }
        if self.g1 == 0.0 && self.g2 == 0.0 {
            return Err(Error::Config("at least one of g1, g2 must be nonzero".into()));
        }
        if self.a <= self.threshold() {
            return Err(Error::Config(format!(
                "renormalization point a = {} must exceed -4m^2 = {}",
                self.a,
                self.threshold()
            )));
        }
        Ok(())
    }

    /// `λħ/16π²`, the prefactor of the spectral function in `S`.
    pub fn kappa(&self) -> f64 {
        self.lambda * self.hbar / (16.0 * PI * PI)
    }

    /// Lower end `-4m²` of the real interval where the kernel is real.
    pub fn threshold(&self) -> f64 {
        -4.0 * self.m * self.m
    }

    pub fn is_massless(&self) -> bool {
        self.m == 0.0
    }

    /// `g₂λ₁ − λ₂g₁`; non-negative values keep every zero of `S` real.
    pub fn condition_margin(&self) -> f64 {
        self.g2 * self.lambda1 - self.lambda2 * self.g1
    }

    /// `−λ₁/λ₂`, where the spectral term of `S` vanishes identically.
    pub fn special_point(&self) -> Option<f64> {
        (self.lambda2 != 0.0).then(|| -self.lambda1 / self.lambda2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
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

    #[test]
    fn accepts_admissible_tuple() {
        assert!(base().validate().is_ok());
    }

    #[test]
    fn rejects_renormalization_point_below_threshold() {
        let p = ModelParams { a: -4.0, ..base() };
        assert!(matches!(p.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_vanishing_coupling_pairs() {
        let p = ModelParams {
            lambda1: 0.0,
            lambda2: 0.0,
            ..base()
        };
        assert!(p.validate().is_err());
        let p = ModelParams {
            g1: 0.0,
            g2: 0.0,
            ..base()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn massless_needs_positive_a() {
        let p = ModelParams {
            m: 0.0,
            a: -0.5,
            ..base()
        };
        assert!(p.validate().is_err());
        let p = ModelParams {
            m: 0.0,
            a: 0.5,
            ..base()
        };
        assert!(p.validate().is_ok());
    }
}
