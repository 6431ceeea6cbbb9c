//! Run configuration: a versioned JSON document plus `--set path=value`
//! overrides applied before deserialization.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use backreact::cosmo::CosmoParams;
use backreact::decay::OscillationHandling;
use backreact::ModelParams;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Invalid or inconsistent configuration; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub params: Option<ModelParams>,
    #[serde(default)]
    pub cosmo_params: Option<CosmoParams>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub fa: Option<FaTask>,
    #[serde(default)]
    pub evolve: EvolveTask,
    #[serde(default)]
    pub scan: Option<ScanTask>,
    #[serde(default)]
    pub seed: u64,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Grids {
    /// Radial step of spatial profiles.
    pub dr: f64,
    /// Radial extent of spatial profiles; defaults to 1.25 times the largest bump radius.
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Step of the mode time grid.
    pub dt: f64,
    pub t_max: f64,
    /// Step of the position-space probe series.
    pub probe_dt: f64,
    /// Largest wavenumber of the default mode list.
    pub p_max: f64,
    /// Number of continuum panels.
    pub n_nodes: usize,
    #[serde(rename = "M2max")]
    pub m2_max: Option<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            dr: 0.005,
            r: None,
            dt: 0.01,
            t_max: 100.0,
            probe_dt: 0.05,
            p_max: 2.0,
            n_nodes: 2048,
            m2_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Tolerances {
    pub root_tol: f64,
    pub quad_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_tol: 1e-12,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Range1 {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range1 {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        (0..self.n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64)
            .collect()
    }

    fn check(&self, what: &str) -> Result<(), ConfigError> {
        if self.n == 0 || !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return bad(format!("{what}: need finite min <= max and n >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FaTask {
    /// Points on the real axis.
    pub real: Option<Range1>,
    /// Rectangle in the complex plane; points with `im = 0` are skipped.
    pub complex: Option<Rect>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Rect {
    pub re: Range1,
    pub im: Range1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EvolveMode {
    Sourced,
    Ivp,
    Runaway,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SourceSpec {
    pub center: f64,
    pub half_width: f64,
    /// Support radius of the spatial bump.
    pub radius: f64,
    pub amplitude: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self {
            center: 4.0,
            half_width: 3.0,
            radius: 2.0,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct FitSpec {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub handling: OscillationHandling,
}

impl Default for FitSpec {
    fn default() -> Self {
        Self {
            t_min: None,
            t_max: None,
            handling: OscillationHandling::Envelope,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct EvolveTask {
    pub mode: EvolveMode,
    /// Wavenumbers of the exported mode tables; defaults to five points on `[0, pMax]`.
    pub p_values: Option<Vec<f64>>,
    /// Radius of the position-space probe.
    pub radius: f64,
    pub source: SourceSpec,
    /// Support radii of the bump profiles `φ⁰, …, φ^{2|𝒮|−1}`.
    pub initial_data: Vec<f64>,
    pub fit: FitSpec,
}

impl Default for EvolveTask {
    fn default() -> Self {
        Self {
            mode: EvolveMode::Sourced,
            p_values: None,
            radius: 0.0,
            source: SourceSpec::default(),
            initial_data: Vec::new(),
            fit: FitSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Axis {
    /// One of `m, hbar, lambda, lambda1, lambda2, g1, g2, a`.
    pub param: String,
    #[serde(flatten)]
    pub range: Range1,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScanTask {
    pub x: Axis,
    pub y: Option<Axis>,
}

pub const SCAN_PARAMS: [&str; 8] = ["m", "hbar", "lambda", "lambda1", "lambda2", "g1", "g2", "a"];

pub fn set_param(p: &mut ModelParams, name: &str, v: f64) -> Result<(), ConfigError> {
    match name {
        "m" => p.m = v,
        "hbar" => p.hbar = v,
        "lambda" => p.lambda = v,
        "lambda1" => p.lambda1 = v,
        "lambda2" => p.lambda2 = v,
        "g1" => p.g1 = v,
        "g2" => p.g2 = v,
        "a" => p.a = v,
        _ => {
            return bad(format!(
                "unknown scan parameter '{name}' (expected one of {SCAN_PARAMS:?})"
            ))
        }
    }
    Ok(())
}

impl RunConfig {
    /// Reads the file (if any), applies overrides and checks the schema.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| ConfigError(format!("{} is not valid JSON: {e}", p.display())))?
            }
            None => Value::Object(Map::new()),
        };
        if !doc.is_object() {
            return bad("configuration must be a JSON object");
        }
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| ConfigError(format!("invalid configuration: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema version {} (this build reads version {SCHEMA_VERSION})",
                self.version
            ));
        }
        let t = &self.tolerances;
        if !(t.root_tol > 0.0 && t.quad_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        let g = &self.grids;
        if !(g.dr > 0.0 && g.dt > 0.0 && g.t_max > 0.0 && g.probe_dt > 0.0 && g.p_max >= 0.0) {
            return bad("grid steps and tMax must be positive, pMax non-negative");
        }
        if g.n_nodes < 8 {
            return bad("nNodes must be at least 8");
        }
        if let Some(r) = g.r {
            if !(r > 0.0) {
                return bad("R must be positive");
            }
        }
        if let Some(p) = &self.params {
            p.validate().map_err(|e| ConfigError(e.to_string()))?;
        }
        if let Some(c) = &self.cosmo_params {
            c.validate().map_err(|e| ConfigError(e.to_string()))?;
        }
        for p in self.p_values() {
            if !(p >= 0.0 && p.is_finite()) {
                return bad("wavenumbers must be finite and non-negative");
            }
            if p * g.dr > FRAC_PI_4 * (1.0 + 1e-12) {
                return bad(format!(
                    "dr = {} does not resolve p = {p} (need p*dr <= pi/4)",
                    g.dr
                ));
            }
        }
        if let Some(fa) = &self.fa {
            if let Some(r) = &fa.real {
                r.check("fa.real")?;
            }
            if let Some(c) = &fa.complex {
                c.re.check("fa.complex.re")?;
                c.im.check("fa.complex.im")?;
            }
        }
        if let Some(s) = &self.scan {
            s.x.range.check("scan.x")?;
            set_param(&mut placeholder(), &s.x.param, 0.0)?;
            if let Some(y) = &s.y {
                y.range.check("scan.y")?;
                set_param(&mut placeholder(), &y.param, 0.0)?;
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelParams, ConfigError> {
        self.params
            .ok_or_else(|| ConfigError("this command needs a 'params' block".into()))
    }

    pub fn cosmo(&self) -> Result<CosmoParams, ConfigError> {
        self.cosmo_params
            .ok_or_else(|| ConfigError("this command needs a 'cosmoParams' block".into()))
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.evolve.p_values.clone().unwrap_or_else(|| {
            Range1 {
                min: 0.0,
                max: self.grids.p_max,
                n: 5,
            }
            .points()
        })
    }
}

fn placeholder() -> ModelParams {
    ModelParams {
        m: 1.0,
        hbar: 1.0,
        lambda: 1.0,
        lambda1: 1.0,
        lambda2: 0.0,
        g1: 1.0,
        g2: 1.0,
        a: 0.0,
    }
}

/// `a.b.c=value`; the value is parsed as JSON and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<(), ConfigError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("override '{spec}' is not of the form key=value")))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return bad(format!("override '{spec}' has an empty key"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ConfigError(format!("override '{spec}': '{key}' is inside a non-object")))?;
        node = obj
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
    }
    node.as_object_mut()
        .ok_or_else(|| ConfigError(format!("override '{spec}' targets a non-object")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_create_nested_objects() {
        let mut doc = serde_json::json!({});
        apply_override(&mut doc, "grids.dt=0.02").unwrap();
        apply_override(&mut doc, "evolve.mode=ivp").unwrap();
        assert_eq!(doc["grids"]["dt"], 0.02);
        assert_eq!(doc["evolve"]["mode"], "ivp");
        assert!(apply_override(&mut doc, "nokey").is_err());
    }

    #[test]
    fn defaults_are_consistent() {
        let cfg = RunConfig::load(None, &[]).unwrap();
        assert_eq!(cfg.version, SCHEMA_VERSION);
        assert_eq!(cfg.p_values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        assert!(RunConfig::load(None, &["grid.dt=1".into()]).is_err());
        assert!(RunConfig::load(None, &["version=2".into()]).is_err());
        assert!(RunConfig::load(None, &["tolerances.rootTol=0".into()]).is_err());
    }

    #[test]
    fn unresolved_wavenumber_is_rejected() {
        let err = RunConfig::load(None, &["grids.dr=0.5".into()]).unwrap_err();
        assert!(err.0.contains("pi/4"));
    }
}
