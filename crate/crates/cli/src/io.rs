//! Series tables, JSON sidecars, digests and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use critquench::scaling::CriticalConstants;
use critquench::{EnsembleSeries, SeriesLabel, TimeUnit};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const SERIES_HEADER: [&str; 4] = ["time", "mean_M2", "stderr_M2", "n"];

/// Metadata stored next to each series table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSidecar {
    pub label: SeriesLabel,
    pub time_unit: TimeUnit,
    pub n_realizations: usize,
    pub columns: Vec<String>,
}

pub fn series_stem(label: &SeriesLabel) -> String {
    label.to_string()
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Write any rows as CSV with the given header.
pub fn write_csv<R: IntoIterator<Item = Vec<String>>>(path: &Path, header: &[&str], rows: R) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::Numerical(format!("csv encoding for {}: {e}", path.display()));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?;
    write_bytes(path, &bytes)
}

/// Write `<dir>/<label>.csv` and `<dir>/<label>.json`; returns both paths.
pub fn write_series(dir: &Path, series: &EnsembleSeries) -> CliResult<[PathBuf; 2]> {
    let stem = series_stem(&series.label);
    let csv_path = dir.join(format!("{stem}.csv"));
    let n = series.n_realizations.to_string();
    let rows = (0..series.len()).map(|k| {
        vec![
            series.times[k].to_string(),
            series.mean_m2[k].to_string(),
            series.stderr_m2[k].to_string(),
            n.clone(),
        ]
    });
    write_csv(&csv_path, &SERIES_HEADER, rows)?;
    let sidecar = SeriesSidecar {
        label: series.label,
        time_unit: series.time_unit,
        n_realizations: series.n_realizations,
        columns: SERIES_HEADER.iter().map(|s| s.to_string()).collect(),
    };
    let json_path = dir.join(format!("{stem}.json"));
    write_json(&json_path, &sidecar)?;
    Ok([csv_path, json_path])
}

/// Read a series table and its sidecar (same stem, `.json`).
pub fn read_series(csv_path: &Path) -> CliResult<EnsembleSeries> {
    let json_path = csv_path.with_extension("json");
    let text = fs::read_to_string(&json_path).map_err(|e| CliError::io(&json_path, e))?;
    let sidecar: SeriesSidecar =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", json_path.display())))?;
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", csv_path.display()));
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != SERIES_HEADER {
        return Err(bad(format!("expected header {:?}, found {:?}", SERIES_HEADER, header)));
    }
    let (mut times, mut mean, mut err) = (Vec::new(), Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let parse = |k: usize| -> CliResult<f64> {
            record[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("row {}: column {}: {e}", line + 2, SERIES_HEADER[k])))
        };
        times.push(parse(0)?);
        mean.push(parse(1)?);
        err.push(parse(2)?);
    }
    EnsembleSeries::new(sidecar.label, sidecar.time_unit, times, mean, err, sidecar.n_realizations).map_err(|e| bad(e.to_string()))
}

/// Expand directories into their `.csv` files (sorted); keep explicit files.
pub fn collect_series_paths(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| CliError::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv") && p.with_extension("json").exists())
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCount {
    pub label: String,
    pub n_realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<CriticalConstants>,
    pub counts: Vec<SeriesCount>,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, constants: Option<CriticalConstants>) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            complete: false,
            error: None,
            config: config.clone(),
            constants,
            counts: Vec::new(),
            wall_clock_seconds: 0.0,
            files: Vec::new(),
        }
    }

    pub fn add_file(&mut self, out_dir: &Path, path: &Path) -> CliResult<()> {
        let rel = path.strip_prefix(out_dir).unwrap_or(path);
        let bytes = fs::metadata(path).map_err(|e| CliError::io(path, e))?.len();
        self.files.push(FileEntry {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: sha256_file(path)?,
            bytes,
        });
        Ok(())
    }

    pub fn write(&self, out_dir: &Path) -> CliResult<PathBuf> {
        let path = out_dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }

    /// Every listed file exists under `out_dir` with a matching digest.
    pub fn verify(&self, out_dir: &Path) -> CliResult<()> {
        for f in &self.files {
            let actual = sha256_file(&out_dir.join(&f.path))?;
            if actual != f.sha256 {
                return Err(CliError::Numerical(format!("digest mismatch for {}", f.path)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use critquench::Family;

    #[test]
    fn series_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let label = SeriesLabel { family: Family::Classical, dim: 3, size: 10, field: 0.05 };
        let s = EnsembleSeries::new(label, TimeUnit::Mcs, vec![0.0, 1.0, 2.0], vec![1.0 / 3.0, 2.5e-7, 1e12], vec![0.0, 0.1, 1.0 / 7.0], 9).unwrap();
        let [csv_path, _] = write_series(dir.path(), &s).unwrap();
        assert_eq!(read_series(&csv_path).unwrap(), s);
        let text = fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with("time,mean_M2,stderr_M2,n\n"));
    }
}
