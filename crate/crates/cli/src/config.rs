//! TOML experiment configuration with dotted-path overrides.

use critquench::collapse::{AnalysisParams, CollapseWindow, CrossoverAnchor, CrossoverParams, GridParams, SearchParams};
use critquench::scaling::CriticalConstants;
use critquench::synthetic::ScalingFunction;
use critquench::Family;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: Family,
    pub dim: usize,
    #[serde(default = "one")]
    pub coupling: f64,
    /// Overrides the literature value of `T_c` or `g_c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_point: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub sizes: Vec<usize>,
    pub fields: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Last recorded time, in MCS (classical) or `Jt` (quantum).
    pub t_max: f64,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    /// First nonzero recorded time for quantum runs.
    #[serde(default = "default_t_min")]
    pub t_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "one_usize")]
    pub n_realizations: usize,
    /// Wolff updates before the quench; default `5L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_equil: Option<usize>,
    #[serde(default = "default_min_sweeps")]
    pub equil_min_sweeps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; 0 means all available cores.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_krylov_tol")]
    pub krylov_tol: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_realizations: 1,
            n_equil: None,
            equil_min_sweeps: default_min_sweeps(),
            seed: None,
            threads: 0,
            krylov_tol: default_krylov_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub early_fraction: f64,
    pub delta: f64,
    pub crossover_anchor: CrossoverAnchor,
    pub w_min: f64,
    pub w_max: f64,
    pub scan_points: usize,
    pub refine_tol: f64,
    pub k: f64,
    pub grid_points_per_decade: usize,
    pub min_curves: usize,
    pub min_decades: f64,
    pub min_points: usize,
    pub min_triple_fraction: f64,
    /// Exponent for `analyze-crossing`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing_w: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let p = AnalysisParams::default();
        Self {
            betas: (0..9).map(|k| 0.10 + 0.05 * k as f64).collect(),
            gammas: (0..5).map(|k| 0.6 + 0.1 * k as f64).collect(),
            early_fraction: p.crossover.early_fraction,
            delta: p.crossover.threshold,
            crossover_anchor: p.crossover.anchor,
            w_min: p.search.w_min,
            w_max: p.search.w_max,
            scan_points: p.search.scan_points,
            refine_tol: p.search.refine_tol,
            k: p.k,
            grid_points_per_decade: p.grid.points_per_decade,
            min_curves: p.grid.min_curves,
            min_decades: p.grid.min_decades,
            min_points: p.grid.min_points,
            min_triple_fraction: p.grid.min_triple_fraction,
            crossing_w: None,
        }
    }
}

impl AnalysisConfig {
    pub fn params(&self) -> AnalysisParams {
        AnalysisParams {
            windows: CollapseWindow::product(&self.betas, &self.gammas),
            crossover: CrossoverParams {
                early_fraction: self.early_fraction,
                threshold: self.delta,
                anchor: self.crossover_anchor,
            },
            grid: GridParams {
                points_per_decade: self.grid_points_per_decade,
                min_curves: self.min_curves,
                min_decades: self.min_decades,
                min_points: self.min_points,
                min_triple_fraction: self.min_triple_fraction,
            },
            search: SearchParams {
                w_min: self.w_min,
                w_max: self.w_max,
                scan_points: self.scan_points,
                refine_tol: self.refine_tol,
            },
            k: self.k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub w_star: f64,
    #[serde(default)]
    pub function: ScalingFunction,
    #[serde(default)]
    pub noise: f64,
    /// Every curve covers at least `[x_lo, x_hi]` in the collapse variable.
    #[serde(default = "default_x_lo")]
    pub x_lo: f64,
    #[serde(default = "default_x_hi")]
    pub x_hi: f64,
    #[serde(default = "default_synth_ppd")]
    pub points_per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub lattice: LatticeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticConfig>,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_ppd() -> usize {
    20
}
fn default_t_min() -> f64 {
    0.05
}
fn default_min_sweeps() -> f64 {
    10.0
}
fn default_krylov_tol() -> f64 {
    1e-10
}
fn default_x_lo() -> f64 {
    1e-4
}
fn default_x_hi() -> f64 {
    1e2
}
fn default_synth_ppd() -> usize {
    40
}

/// Set `path` (dot separated) in a TOML table, creating tables on the way.
/// The value is parsed as TOML when possible and taken as a string otherwise.
pub fn apply_override(root: &mut toml::Table, assignment: &str) -> CliResult<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{assignment}' is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("bad override path '{path}'")));
    }
    let mut table = root;
    for key in &keys[..keys.len() - 1] {
        let entry = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override path '{path}': '{key}' is not a table")))?;
    }
    table.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Parse TOML text, apply overrides, and validate.
    pub fn load(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let config: Self = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{field}: {msg}")));
        if self.lattice.sizes.is_empty() {
            return bad("lattice.sizes", "must be nonempty".into());
        }
        if self.lattice.fields.is_empty() {
            return bad("lattice.fields", "must be nonempty".into());
        }
        if let Some(h) = self.lattice.fields.iter().find(|h| !(**h >= 0.0 && h.is_finite())) {
            return bad("lattice.fields", format!("fields must be finite and nonnegative, got {h}"));
        }
        if self.simulation.n_realizations == 0 {
            return bad("simulation.n_realizations", "must be at least 1".into());
        }
        if let Some(s) = &self.schedule {
            if !(s.t_max > 0.0) || s.points_per_decade == 0 {
                return bad("schedule", format!("need t_max > 0 and points_per_decade > 0, got {} and {}", s.t_max, s.points_per_decade));
            }
        }
        if self.analysis.betas.is_empty() || self.analysis.gammas.is_empty() {
            return bad("analysis", "betas and gammas must be nonempty".into());
        }
        self.constants().map(|_| ())
    }

    /// Literature constants for the model with any configured overrides.
    pub fn constants(&self) -> CliResult<CriticalConstants> {
        let m = &self.model;
        let base = CriticalConstants::defaults(m.family, m.dim).map_err(|e| CliError::Config(format!("model: {e}")))?;
        base.with_overrides(m.critical_point, m.eta, m.z, Some(m.coupling))
            .map_err(|e| CliError::Config(format!("model: {e}")))
    }

    pub fn schedule(&self) -> CliResult<&ScheduleConfig> {
        self.schedule.as_ref().ok_or_else(|| CliError::Config("schedule: section is required".into()))
    }

    pub fn synthetic(&self) -> CliResult<&SyntheticConfig> {
        self.synthetic.as_ref().ok_or_else(|| CliError::Config("synthetic: section is required".into()))
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.simulation
            .seed
            .ok_or_else(|| CliError::Config("simulation.seed: required (set it in the config or pass --seed)".into()))
    }
}
