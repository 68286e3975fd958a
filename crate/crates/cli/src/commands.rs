//! Subcommand implementations. Each returns the manifest it wrote.

use std::path::{Path, PathBuf};
use std::time::Instant;

use critquench::classical::{run_ensemble, ClassicalModelSpec, Equilibration, QuenchSchedule};
use critquench::collapse::{crossing_spread, estimate_w, AnalysisParams, CollapseResult, CrossingDiagnostic};
use critquench::quantum::{run_quantum_quench, QuantumModelSpec};
use critquench::rng::derive_seed;
use critquench::scaling::{rescale_curve, CriticalConstants};
use critquench::synthetic::{covering_times, make_synthetic, SyntheticSpec};
use critquench::{EnsembleSeries, ExecMode, Family, LatticeGeometry};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::io::{collect_series_paths, read_series, sha256_file, write_csv, write_json, write_series, FileEntry, RunManifest, SeriesCount};

fn series_seed(master: u64, size: usize, field: f64) -> u64 {
    derive_seed(master, &[size as u64, field.to_bits()])
}

fn require_family(config: &ExperimentConfig, family: Family) -> CliResult<()> {
    if config.model.family != family {
        return Err(CliError::Config(format!("model.family: this command needs {family}, config has {}", config.model.family)));
    }
    Ok(())
}

/// Run `body` over every `(L, h)`, writing series as they complete. On
/// failure the manifest is still written, marked incomplete.
fn simulate_each(
    command: &str,
    config: &ExperimentConfig,
    out_dir: &Path,
    constants: CriticalConstants,
    mut body: impl FnMut(usize, f64) -> CliResult<EnsembleSeries>,
) -> CliResult<RunManifest> {
    let start = Instant::now();
    let mut manifest = RunManifest::new(command, config, Some(constants));
    let series_dir = out_dir.join("series");
    let mut outcome = Ok(());
    'outer: for &h in &config.lattice.fields {
        for &size in &config.lattice.sizes {
            match body(size, h) {
                Ok(series) => {
                    for path in write_series(&series_dir, &series)? {
                        manifest.add_file(out_dir, &path)?;
                    }
                    manifest.counts.push(SeriesCount {
                        label: series.label.to_string(),
                        n_realizations: series.n_realizations,
                    });
                }
                Err(e) => {
                    outcome = Err(e);
                    break 'outer;
                }
            }
        }
    }
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => {
            manifest.complete = true;
            manifest.write(out_dir)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.error = Some(format!("partial results: {e}"));
            manifest.write(out_dir)?;
            Err(e)
        }
    }
}

pub fn simulate_classical(config: &ExperimentConfig, out_dir: &Path) -> CliResult<RunManifest> {
    require_family(config, Family::Classical)?;
    let constants = config.constants()?;
    let seed = config.seed()?;
    let sched = config.schedule()?;
    let schedule = QuenchSchedule::log_spaced(sched.t_max.round() as u64, sched.points_per_decade)?;
    let sim = &config.simulation;
    simulate_each("simulate-classical", config, out_dir, constants, |size, h| {
        let geometry = LatticeGeometry::new(config.model.dim, size)?;
        let spec = ClassicalModelSpec::new(geometry, constants.coupling, constants.critical_point, h)?;
        let equil = Equilibration {
            updates: sim.n_equil.unwrap_or(Equilibration::default_for(size).updates),
            min_sweeps: sim.equil_min_sweeps,
        };
        Ok(run_ensemble(&spec, &schedule, equil, sim.n_realizations, series_seed(seed, size, h), ExecMode::available())?)
    })
}

pub fn simulate_quantum(config: &ExperimentConfig, out_dir: &Path) -> CliResult<RunManifest> {
    require_family(config, Family::Quantum)?;
    let constants = config.constants()?;
    let sched = config.schedule()?;
    let times = critquench::synthetic::log_times(sched.t_min, sched.t_max, sched.points_per_decade)?;
    let tol = config.simulation.krylov_tol;
    simulate_each("simulate-quantum", config, out_dir, constants, |size, h| {
        let geometry = LatticeGeometry::new(config.model.dim, size)?;
        let spec = QuantumModelSpec::new(geometry, constants.coupling, constants.critical_point, h)?;
        let run = run_quantum_quench(&spec, &times, tol)?;
        let e0 = run.energy[0];
        let drift = run.energy.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max);
        if drift > 1e-6 {
            return Err(CliError::Numerical(format!("{}: relative energy drift {drift:.3e}", run.series.label)));
        }
        Ok(run.series)
    })
}

pub fn make_synthetic_cmd(config: &ExperimentConfig, out_dir: &Path) -> CliResult<RunManifest> {
    let constants = config.constants()?;
    let synth = config.synthetic()?;
    let seed = config.seed()?;
    let times = covering_times(
        &constants,
        &config.lattice.sizes,
        &config.lattice.fields,
        synth.w_star,
        (synth.x_lo, synth.x_hi),
        synth.points_per_decade,
    )?;
    let spec = SyntheticSpec {
        sizes: config.lattice.sizes.clone(),
        fields: config.lattice.fields.clone(),
        w_star: synth.w_star,
        function: synth.function,
        noise: synth.noise,
        seed,
        times,
    };
    let all = make_synthetic(&spec, &constants)?;
    let mut iter = all.into_iter();
    simulate_each("make-synthetic", config, out_dir, constants, |_, _| Ok(iter.next().expect("one series per (L, h)")))
}

fn load_inputs(inputs: &[PathBuf]) -> CliResult<(Vec<EnsembleSeries>, Vec<FileEntry>)> {
    let paths = collect_series_paths(inputs)?;
    let mut series = Vec::with_capacity(paths.len());
    let mut entries = Vec::new();
    for p in &paths {
        series.push(read_series(p)?);
        for f in [p.clone(), p.with_extension("json")] {
            entries.push(FileEntry {
                path: f.display().to_string(),
                sha256: sha256_file(&f)?,
                bytes: std::fs::metadata(&f).map_err(|e| CliError::io(&f, e))?.len(),
            });
        }
    }
    Ok((series, entries))
}

/// Family and dimension come from the series when not configured.
fn analysis_constants(config: Option<&ExperimentConfig>, series: &[EnsembleSeries]) -> CliResult<CriticalConstants> {
    match config {
        Some(c) => c.constants(),
        None => {
            let first = series.first().ok_or_else(|| CliError::Config("no input series".into()))?;
            Ok(CriticalConstants::defaults(first.label.family, first.label.dim)?)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CollapseReport {
    pub constants: CriticalConstants,
    pub params: AnalysisParams,
    pub result: CollapseResult,
    pub inputs: Vec<FileEntry>,
}

pub fn analyze_collapse(config: Option<&ExperimentConfig>, inputs: &[PathBuf], out_dir: &Path) -> CliResult<CollapseReport> {
    let (series, entries) = load_inputs(inputs)?;
    if series.len() < 2 {
        return Err(CliError::Config(format!("analyze-collapse needs at least two series, got {}", series.len())));
    }
    let distinct = |f: fn(&EnsembleSeries) -> u64| {
        let mut v: Vec<u64> = series.iter().map(f).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if distinct(|s| s.label.size as u64) < 2 && distinct(|s| s.label.field.to_bits()) < 2 {
        return Err(CliError::Config("analyze-collapse needs series spanning at least two sizes or fields".into()));
    }
    let constants = analysis_constants(config, &series)?;
    let params = config.map(|c| c.analysis.params()).unwrap_or_default();
    let result = estimate_w(&series, &constants, &params, ExecMode::available())?;

    let windows = result.estimates.iter().map(|e| {
        vec![
            e.window.beta.to_string(),
            e.window.gamma.to_string(),
            e.w_opt.to_string(),
            e.cost_min.to_string(),
            e.n_grid.to_string(),
            e.accepted.to_string(),
            e.reason.clone().unwrap_or_default(),
        ]
    });
    write_csv(&out_dir.join("collapse_windows.csv"), &["beta", "gamma", "w_opt", "cost_min", "n_grid", "accepted", "reason"], windows)?;
    let mut rows = Vec::new();
    for s in &series {
        let c = rescale_curve(s, &constants, result.w_rep)?;
        for k in 0..c.len() {
            rows.push(vec![c.label.to_string(), c.times[k].to_string(), c.x[k].to_string(), c.y[k].to_string(), c.y_err[k].to_string()]);
        }
    }
    write_csv(&out_dir.join("rescaled_at_w_rep.csv"), &["label", "time", "x", "y", "y_err"], rows)?;
    let report = CollapseReport { constants, params, result, inputs: entries };
    write_json(&out_dir.join("collapse_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct CrossingReport {
    pub constants: CriticalConstants,
    pub w: f64,
    pub diagnostic: CrossingDiagnostic,
    pub inputs: Vec<FileEntry>,
}

pub fn analyze_crossing(config: Option<&ExperimentConfig>, inputs: &[PathBuf], w: Option<f64>, out_dir: &Path) -> CliResult<CrossingReport> {
    let (series, entries) = load_inputs(inputs)?;
    let w = w
        .or_else(|| config.and_then(|c| c.analysis.crossing_w))
        .ok_or_else(|| CliError::Config("analysis.crossing_w: required (or pass --w)".into()))?;
    let constants = analysis_constants(config, &series)?;
    let ppd = config.map_or(100, |c| c.analysis.grid_points_per_decade);
    let curves = series
        .iter()
        .map(|s| Ok(rescale_curve(s, &constants, w)?.restrict(0.0, f64::INFINITY)))
        .collect::<CliResult<Vec<_>>>()?;
    let diagnostic = crossing_spread(&curves, ppd)?;
    let rows = diagnostic.x.iter().zip(&diagnostic.delta).map(|(x, d)| vec![x.to_string(), d.to_string()]);
    write_csv(&out_dir.join("crossing.csv"), &["x", "delta"], rows)?;
    let report = CrossingReport { constants, w, diagnostic, inputs: entries };
    write_json(&out_dir.join("crossing_report.json"), &report)?;
    Ok(report)
}
