//! Experiment configuration: file formats, defaults and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use atomchain::averaging::EpsPolicy;
use atomchain::chain::DefectSpec;
use atomchain::potential::{LennardJones, PotentialParams};
use serde::{Deserialize, Serialize};

/// Invalid configuration. Mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError(format!("{}: {}", field, msg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialConfig,
    pub defect: DefectConfig,
    pub mesh: MeshConfig,
    pub dynamics: DynamicsConfig,
    pub boundary: BoundaryConfig,
    pub times: TimesConfig,
    pub averaging: AveragingConfig,
    pub integrator: IntegratorSettings,
    pub output: OutputConfig,
    #[serde(rename = "static")]
    pub statics: StaticConfig,
    pub stability: StabilityConfig,
    pub riemann: RiemannConfig,
    pub consistency: ConsistencyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: PotentialConfig::default(),
            defect: DefectConfig::default(),
            mesh: MeshConfig::default(),
            dynamics: DynamicsConfig::default(),
            boundary: BoundaryConfig::Fixed,
            times: TimesConfig::default(),
            averaging: AveragingConfig::default(),
            integrator: IntegratorSettings::default(),
            output: OutputConfig::default(),
            statics: StaticConfig::default(),
            stability: StabilityConfig::default(),
            riemann: RiemannConfig::default(),
            consistency: ConsistencyConfig::default(),
        }
    }
}

/// Either `three_a` (stress prefactor `3A`) or `energy_scale` (`A`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub three_a: Option<f64>,
    pub energy_scale: Option<f64>,
    pub eta_cut: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self { three_a: Some(0.25), energy_scale: None, eta_cut: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectConfig {
    pub s1: f64,
    pub s2: f64,
    pub delta: f64,
}

impl Default for DefectConfig {
    fn default() -> Self {
        Self { s1: 1.0, s2: 1.1, delta: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub cells: Vec<usize>,
    pub rho0: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { cells: vec![16, 32, 64, 128], rho0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MeasureFlag {
    Raw,
    Mollified,
    Viscous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    /// Viscosity of the viscous runs.
    pub mu: f64,
    pub measures: Vec<MeasureFlag>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self { mu: 0.01, measures: vec![MeasureFlag::Raw, MeasureFlag::Mollified] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Fixed,
    EndLoad { v0: f64 },
}

/// Output times: an explicit `list`, or `k·dt` for `k = 1..=count`.
/// Events are monitored every `monitor_dt` up to the last output time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimesConfig {
    pub list: Option<Vec<f64>>,
    pub dt: f64,
    pub count: usize,
    pub monitor_dt: Option<f64>,
}

impl Default for TimesConfig {
    fn default() -> Self {
        Self { list: None, dt: 0.01, count: 4, monitor_dt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AveragingConfig {
    /// Fixed `ε`; otherwise `min(max(cells_per_eps/M, floor), cap)`.
    pub eps: Option<f64>,
    pub cells_per_eps: f64,
    pub floor: f64,
    pub cap: f64,
    /// Half-width of the time window; 0 disables time averaging.
    pub tau: f64,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        let p = EpsPolicy::<f64>::default();
        Self { eps: None, cells_per_eps: p.cells_per_eps, floor: p.floor, cap: p.cap, tau: 0.0 }
    }
}

impl AveragingConfig {
    pub fn eps_for(&self, cells: usize) -> f64 {
        self.eps.unwrap_or_else(|| {
            EpsPolicy { cells_per_eps: self.cells_per_eps, floor: self.floor, cap: self.cap }.eps(cells)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_step: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: OutputFormat,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("atomchain-out"), format: OutputFormat::Csv, plot: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StaticConfig {
    pub a: f64,
    /// Stress level of a two-phase solution; defaults to 0.
    pub c: Option<f64>,
}

impl Default for StaticConfig {
    fn default() -> Self {
        Self { a: 0.9, c: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub a: f64,
    pub cells: usize,
    pub amplitude: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self { a: 1.2, cells: 2, amplitude: 1e-3, t_end: 5.0, samples: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiemannConfig {
    /// Cell-centre samples of the exact solution.
    pub points: usize,
}

impl Default for RiemannConfig {
    fn default() -> Self {
        Self { points: 1024 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceChoice {
    ExactRiemann,
    FinestMesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConsistencyConfig {
    pub reference: ReferenceChoice,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        Self { reference: ReferenceChoice::ExactRiemann }
    }
}

impl ExperimentConfig {
    /// Reads TOML or JSON, chosen by extension (`.json`) or by the first
    /// non-blank character. A JSON document with a top-level `config` key
    /// (a run manifest) yields that embedded configuration.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {}", path.display(), e)))?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if is_json {
            Self::from_json(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
        } else {
            Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap_or_default(),
            other => other,
        };
        serde_json::from_value(value).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn potential(&self) -> Result<LennardJones<f64>, ConfigError> {
        let p = &self.potential;
        let params = match (p.three_a, p.energy_scale) {
            (Some(_), Some(_)) => return Err(invalid("potential", "give either three_a or energy_scale, not both")),
            (Some(t), None) => PotentialParams::from_stress_prefactor(t, p.eta_cut),
            (None, Some(a)) => PotentialParams::new(a, 1.0, p.eta_cut),
            (None, None) => return Err(invalid("potential", "one of three_a or energy_scale is required")),
        }
        .map_err(|e| invalid("potential", e))?;
        LennardJones::new(params).map_err(|e| invalid("potential", e))
    }

    pub fn defect(&self) -> DefectSpec<f64> {
        DefectSpec::new(self.defect.s1, self.defect.s2, self.defect.delta)
    }

    /// Output times, sorted and strictly positive unless `0` is listed.
    pub fn output_times(&self) -> Vec<f64> {
        match &self.times.list {
            Some(list) => list.clone(),
            None => (1..=self.times.count).map(|k| self.times.dt * k as f64).collect(),
        }
    }

    /// Integrator samples: `0`, the output times and the monitor grid.
    pub fn sample_times(&self) -> Vec<f64> {
        let out = self.output_times();
        let end = out.iter().copied().fold(0.0, f64::max);
        let mut all = vec![0.0];
        all.extend(out.iter().copied());
        if let Some(h) = self.times.monitor_dt {
            let n = (end / h).floor() as usize;
            all.extend((1..=n).map(|k| h * k as f64));
        }
        all.sort_by(|a, b| a.partial_cmp(b).expect("validated times are finite"));
        all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        all
    }

    /// Checks everything the commands rely on, naming the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pot = self.potential()?;
        let d = &self.defect;
        if !(d.s1 > 0.0 && d.s2 > 0.0) {
            return Err(invalid("defect", "strains s1 and s2 must be positive"));
        }
        self.defect().validate(&pot).map_err(|e| invalid("defect", e))?;
        if self.mesh.cells.is_empty() {
            return Err(invalid("mesh.cells", "must list at least one cell count"));
        }
        if let Some(&m) = self.mesh.cells.iter().find(|&&m| m < 2) {
            return Err(invalid("mesh.cells", format!("cell count {} is below 2", m)));
        }
        let mut seen = self.mesh.cells.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("mesh.cells", "cell counts must be distinct"));
        }
        if !(self.mesh.rho0 > 0.0) {
            return Err(invalid("mesh.rho0", "must be positive"));
        }
        if !(self.dynamics.mu >= 0.0) {
            return Err(invalid("dynamics.mu", "must be non-negative"));
        }
        if self.dynamics.measures.is_empty() {
            return Err(invalid("dynamics.measures", "must list at least one of raw, mollified, viscous"));
        }
        if let BoundaryConfig::EndLoad { v0 } = self.boundary {
            if !v0.is_finite() {
                return Err(invalid("boundary.v0", "must be finite"));
            }
        }
        match &self.times.list {
            Some(list) => {
                if list.is_empty() {
                    return Err(invalid("times.list", "must not be empty"));
                }
                if list.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(invalid("times.list", "times must be finite and non-negative"));
                }
                if list.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("times.list", "times must be strictly increasing"));
                }
            }
            None => {
                if !(self.times.dt > 0.0) || self.times.count == 0 {
                    return Err(invalid("times", "dt must be positive and count at least 1"));
                }
            }
        }
        if let Some(h) = self.times.monitor_dt {
            if !(h > 0.0) {
                return Err(invalid("times.monitor_dt", "must be positive"));
            }
        }
        let a = &self.averaging;
        if let Some(eps) = a.eps {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(invalid("averaging.eps", "must lie in (0, 1)"));
            }
        }
        if !(a.cells_per_eps > 0.0 && a.floor > 0.0 && a.cap >= a.floor && a.cap < 1.0) {
            return Err(invalid("averaging", "need cells_per_eps > 0 and 0 < floor ≤ cap < 1"));
        }
        if !(a.tau >= 0.0) {
            return Err(invalid("averaging.tau", "must be non-negative"));
        }
        if self.dynamics.measures.contains(&MeasureFlag::Mollified) {
            for &m in &self.mesh.cells {
                let eps = a.eps_for(m);
                if !(eps > 1.0 / m as f64) {
                    return Err(invalid("averaging", format!("eps = {} does not exceed the cell size of M = {}", eps, m)));
                }
            }
        }
        let i = &self.integrator;
        if !(i.rel_tol > 0.0 && i.abs_tol > 0.0) {
            return Err(invalid("integrator", "tolerances must be positive"));
        }
        if let Some(h) = i.max_step {
            if !(h > 0.0) {
                return Err(invalid("integrator.max_step", "must be positive"));
            }
        }
        if !(self.statics.a > 0.0) {
            return Err(invalid("static.a", "must be positive"));
        }
        let s = &self.stability;
        if s.cells < 2 || !(s.amplitude > 0.0) || !(s.t_end > 0.0) || s.samples < 6 {
            return Err(invalid("stability", "need cells ≥ 2, amplitude > 0, t_end > 0 and samples ≥ 6"));
        }
        if self.riemann.points < 2 {
            return Err(invalid("riemann.points", "must be at least 2"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.output_times(), vec![0.01, 0.02, 0.03, 0.04]);
        assert_eq!(c.sample_times().len(), 5);
    }

    #[test]
    fn toml_sections() {
        let c = ExperimentConfig::from_toml(
            "[defect]\ns2 = 1.3\n[mesh]\ncells = [64]\n[boundary]\nkind = \"end_load\"\nv0 = -0.05\n",
        )
        .unwrap();
        assert_eq!(c.defect.s2, 1.3);
        assert_eq!(c.boundary, BoundaryConfig::EndLoad { v0: -0.05 });
        assert_eq!(c.defect.delta, 0.1);
    }

    #[test]
    fn unknown_fields_are_reported() {
        let e = ExperimentConfig::from_toml("[defect]\nss2 = 1.3\n").unwrap_err();
        assert!(e.0.contains("ss2"), "{}", e);
        assert!(e.0.contains("line"), "{}", e);
    }

    #[test]
    fn empty_mesh_is_rejected() {
        let c = ExperimentConfig::from_toml("[mesh]\ncells = []\n").unwrap();
        assert!(c.validate().unwrap_err().0.starts_with("mesh.cells"));
    }

    #[test]
    fn manifest_config_is_reloaded() {
        let c = ExperimentConfig { mesh: MeshConfig { cells: vec![32], rho0: 1.0 }, ..Default::default() };
        let manifest = serde_json::json!({ "config": c, "runs": [] });
        assert_eq!(ExperimentConfig::from_json(&manifest.to_string()).unwrap(), c);
    }

    #[test]
    fn monitor_grid_is_merged() {
        let mut c = ExperimentConfig::default();
        c.times = TimesConfig { list: Some(vec![0.5, 1.0]), dt: 0.01, count: 1, monitor_dt: Some(0.25) };
        assert_eq!(c.sample_times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn shipped_recipes_are_valid() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes");
        let mut count = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                let cfg = ExperimentConfig::load(&path).unwrap();
                cfg.validate().unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
                count += 1;
            }
        }
        assert!(count > 0);
    }
}
