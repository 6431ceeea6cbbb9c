//! Uniform sampling grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `t_j = t0 + j·dt`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    /// Grid starting at `t = 0`.
    pub fn new(dt: f64, n: usize) -> Result<Self> {
        Self::starting_at(0.0, dt, n)
    }

    pub fn starting_at(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite()) {
            return Err(Error::Config("time step must be positive and finite".into()));
        }
        if n < 2 {
            return Err(Error::Config("time grid needs at least two samples".into()));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid on `[0, t_max]` with step close to `dt_max`.
    pub fn covering(t_max: f64, dt_max: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::Config("tMax must be positive".into()));
        }
        let steps = (t_max / dt_max).ceil().max(1.0) as usize;
        Self::new(t_max / steps as f64, steps + 1)
    }

    pub fn at(&self, j: usize) -> f64 {
        self.t0 + self.dt * j as f64
    }

    pub fn t_max(&self) -> f64 {
        self.at(self.n - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.at(j)).collect()
    }
}

/// Wavenumbers `p_k = k·dp`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub dp: f64,
    pub n: usize,
}

impl PGrid {
    pub fn new(dp: f64, n: usize) -> Result<Self> {
        if !(dp > 0.0 && dp.is_finite()) || n < 2 {
            return Err(Error::Config("wavenumber grid needs dp > 0 and n >= 2".into()));
        }
        Ok(Self { dp, n })
    }

    /// Grid on `[0, p_max]` with step at most `dp_max`.
    pub fn covering(p_max: f64, dp_max: f64) -> Result<Self> {
        if !(p_max > 0.0) {
            return Err(Error::Config("pMax must be positive".into()));
        }
        let steps = (p_max / dp_max).ceil().max(1.0) as usize;
        Self::new(p_max / steps as f64, steps + 1)
    }

    pub fn at(&self, k: usize) -> f64 {
        self.dp * k as f64
    }

    pub fn p_max(&self) -> f64 {
        self.at(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.at(k)).collect()
    }

    /// Trapezoid weight of node `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n {
            0.5 * self.dp
        } else {
            self.dp
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_hits_endpoint() {
        let g = TimeGrid::covering(10.0, 0.3).unwrap();
        assert!((g.t_max() - 10.0).abs() < 1e-12);
        assert!(g.dt <= 0.3);
        let p = PGrid::covering(5.0, 0.01).unwrap();
        assert!((p.p_max() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(0.1, 1).is_err());
        assert!(PGrid::new(-1.0, 10).is_err());
    }
}
