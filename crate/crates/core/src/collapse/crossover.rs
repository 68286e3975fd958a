use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::EnsembleSeries;

/// Where the reference line for bend detection is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverAnchor {
    /// The first `early_fraction` of the log-time range.
    Earliest,
    /// A log-time span of the same width centered on the steepest local
    /// log-log slope. Curves that sit on an equilibrium plateau before rising
    /// bend at the end of the rise instead of at its onset.
    SteepestRise,
}

/// Bend detection: a straight line is fitted to `ln⟨M²⟩` vs `ln t` over a
/// span of `early_fraction` of the log-time range placed by `anchor`; `t_x`
/// is the first later time whose residual exceeds `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverParams {
    pub early_fraction: f64,
    pub threshold: f64,
    pub anchor: CrossoverAnchor,
}

impl Default for CrossoverParams {
    fn default() -> Self {
        Self {
            early_fraction: 0.25,
            threshold: 0.05,
            anchor: CrossoverAnchor::Earliest,
        }
    }
}

/// Least-squares line `y = a + b x`.
pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Time at which `⟨M²(t)⟩` bends away from its early log-log behavior, or
/// the last recorded time if it never does.
pub fn detect_crossover_time(series: &EnsembleSeries, params: CrossoverParams) -> Result<f64> {
    let points: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.mean_m2)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &m)| (t, m))
        .collect();
    if points.len() < 8 {
        return Err(Error::Diagnostics(format!(
            "series {}: need at least 8 times with t > 0, got {}",
            series.label,
            points.len()
        )));
    }
    if points.iter().any(|&(_, m)| !(m > 0.0)) {
        return Err(Error::Diagnostics(format!(
            "series {}: nonpositive mean, cannot take logarithms",
            series.label
        )));
    }
    if !(params.early_fraction > 0.0 && params.early_fraction <= 1.0 && params.threshold > 0.0) {
        return Err(Error::Argument(format!(
            "crossover needs 0 < early_fraction <= 1 and threshold > 0, got {} and {}",
            params.early_fraction, params.threshold
        )));
    }
    let lt: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let span = params.early_fraction * (lt[lt.len() - 1] - lt[0]);
    let ((a, b), search_from) = match params.anchor {
        CrossoverAnchor::Earliest => {
            let n_fit = lt.iter().take_while(|&&v| v <= lt[0] + span + 1e-12).count().max(3);
            (fit_line(&lt[..n_fit], &ly[..n_fit]), n_fit)
        }
        CrossoverAnchor::SteepestRise => {
            let local = |k: usize| {
                let lo = lt.partition_point(|&v| v < lt[k] - span / 2.0 - 1e-12);
                let hi = lt.partition_point(|&v| v <= lt[k] + span / 2.0 + 1e-12);
                if hi - lo >= 3 {
                    fit_line(&lt[lo..hi], &ly[lo..hi])
                } else {
                    // Sparse sampling: fall back to the three nearest points.
                    let start = k.saturating_sub(1).min(lt.len() - 3);
                    fit_line(&lt[start..start + 3], &ly[start..start + 3])
                }
            };
            let mut best = 0;
            let mut best_fit = local(0);
            for k in 1..lt.len() {
                let fit = local(k);
                if fit.1 > best_fit.1 {
                    best = k;
                    best_fit = fit;
                }
            }
            (best_fit, best + 1)
        }
    };
    let t_x = (search_from..lt.len())
        .find(|&k| (ly[k] - (a + b * lt[k])).abs() > params.threshold)
        .map_or(points[points.len() - 1].0, |k| points[k].0);
    Ok(t_x)
}
