use serde::{Deserialize, Serialize};

use super::cost::cost_on_grid;
use super::crossover::detect_crossover_time;
use super::grid::{build_common_grid, CoverageCheck, LogLogInterpolant};
use super::{AnalysisParams, CollapseWindow};
use crate::error::{argument, Error, Result};
use crate::exec::{map_slice, ExecMode};
use crate::scaling::CriticalConstants;
use crate::series::{EnsembleSeries, SeriesLabel};

/// Coarse scan followed by golden-section refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub w_min: f64,
    pub w_max: f64,
    pub scan_points: usize,
    pub refine_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            w_min: 0.2,
            w_max: 3.0,
            scan_points: 200,
            refine_tol: 1e-3,
        }
    }
}

/// A series reduced to what the `w` search needs: log reduced times, the log
/// reduced field, rescaled fluctuations and the crossover time.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCurve {
    pub label: SeriesLabel,
    pub t_x: f64,
    times: Vec<f64>,
    log_t_hat: Vec<f64>,
    log_h_hat: f64,
    y: Vec<f64>,
}

impl PreparedCurve {
    pub fn new(series: &EnsembleSeries, constants: &CriticalConstants, t_x: f64) -> Result<Self> {
        // Reuse the validation in rescale_curve.
        crate::scaling::rescale_curve(series, constants, 1.0)?;
        let size = series.label.size;
        let h_hat = constants.reduced_field(series.label.field, size);
        if !(h_hat > 0.0) {
            return Err(argument(format!("series {} has no field; x = 0 for all t", series.label)));
        }
        let scale = constants.fluctuation_scale(size);
        let mut times = Vec::new();
        let mut log_t_hat = Vec::new();
        let mut y = Vec::new();
        for (&t, &m) in series.times.iter().zip(&series.mean_m2) {
            if t > 0.0 && m > 0.0 {
                times.push(t);
                log_t_hat.push(constants.reduced_time(t, size)?.ln());
                y.push(m * scale);
            }
        }
        Ok(Self {
            label: series.label,
            t_x,
            times,
            log_t_hat,
            log_h_hat: h_hat.ln(),
            y,
        })
    }

    /// Interpolant of the windowed curve at exponent `w`.
    pub fn windowed(&self, w: f64, window: CollapseWindow) -> LogLogInterpolant {
        let (lo, hi) = (window.beta * self.t_x, window.gamma * self.t_x);
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= lo && t <= hi)
            .map(|(k, _)| ((self.log_h_hat + w * self.log_t_hat[k]).exp(), self.y[k]))
            .unzip();
        LogLogInterpolant::new(&x, &y)
    }
}

/// Optimum for a single window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub window: CollapseWindow,
    pub w_opt: f64,
    pub cost_min: f64,
    /// Grid points contributing to the cost at `w_opt`.
    pub n_grid: usize,
    pub overlap_decades: f64,
    pub accepted: bool,
    pub reason: Option<String>,
}

/// Cost at `w`, the number of contributing grid points, and the coverage
/// verdict at that `w`. `Err` when no grid point has two curves.
fn cost_at(curves: &[PreparedCurve], w: f64, window: CollapseWindow, params: &AnalysisParams) -> std::result::Result<(f64, usize, CoverageCheck), String> {
    let interps: Vec<LogLogInterpolant> = curves.iter().map(|c| c.windowed(w, window)).collect();
    let usable = interps.iter().filter(|i| i.is_usable()).count();
    let grid = build_common_grid(&interps, params.grid.points_per_decade, params.grid.min_curves)
        .ok_or_else(|| "curves do not overlap in x".to_string())?;
    let (cost, n) = cost_on_grid(&interps, &grid).ok_or_else(|| "no grid point with two curves".to_string())?;
    Ok((cost, n, grid.check(usable, &params.grid)))
}

fn golden_section(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// `C(w)` at the evenly spaced scan points of `params.search`; `None` where
/// no grid point is covered by two curves.
pub fn cost_landscape(curves: &[PreparedCurve], window: CollapseWindow, params: &AnalysisParams) -> Vec<(f64, Option<f64>)> {
    let s = params.search;
    let n = s.scan_points.max(2);
    let step = (s.w_max - s.w_min) / (n - 1) as f64;
    (0..n)
        .map(|k| {
            let w = s.w_min + step * k as f64;
            (w, cost_at(curves, w, window, params).ok().map(|v| v.0))
        })
        .collect()
}

/// Minimize the collapse cost over `w` for one window; the coverage checks
/// are applied at the optimum.
pub fn optimize_w(curves: &[PreparedCurve], window: CollapseWindow, params: &AnalysisParams) -> WindowEstimate {
    let s = params.search;
    let reject = |reason: String, w_opt: f64, cost_min: f64| WindowEstimate {
        window,
        w_opt,
        cost_min,
        n_grid: 0,
        overlap_decades: 0.0,
        accepted: false,
        reason: Some(reason),
    };
    let n = s.scan_points.max(2);
    let step = (s.w_max - s.w_min) / (n - 1) as f64;
    let scan = cost_landscape(curves, window, params);
    let feasible: Vec<(usize, f64)> = scan.iter().enumerate().filter_map(|(k, (_, c))| c.map(|c| (k, c))).collect();
    let Some(&(k_best, c_best)) = feasible.iter().min_by(|a, b| a.1.total_cmp(&b.1)) else {
        let reason = cost_at(curves, s.w_min, window, params).err().unwrap_or_default();
        return reject(format!("no w with overlapping curves: {reason}"), f64::NAN, f64::NAN);
    };
    let c_max = feasible.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    if c_max - c_best <= 1e-9 * c_max.abs() {
        return reject("cost landscape is flat in w".into(), scan[k_best].0, c_best);
    }
    let lo = s.w_min + step * k_best.saturating_sub(1) as f64;
    let hi = (s.w_min + step * (k_best + 1) as f64).min(s.w_max);
    let objective = |w: f64| cost_at(curves, w, window, params).map_or(f64::INFINITY, |v| v.0);
    let mut w_opt = golden_section(lo, hi, s.refine_tol, objective);
    if !(objective(w_opt) <= c_best) {
        w_opt = scan[k_best].0;
    }
    let (cost_min, n_grid, check) = cost_at(curves, w_opt, window, params).expect("optimum has a defined cost");
    if let Some(reason) = check.reason {
        return reject(reason, w_opt, cost_min);
    }
    WindowEstimate {
        window,
        w_opt,
        cost_min,
        n_grid,
        overlap_decades: check.decades,
        accepted: true,
        reason: None,
    }
}

/// Linearly interpolated percentile of sorted data, `p` in `[0, 100]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty slice");
    let pos = (p / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Window-ensemble estimate of the collapse exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub w_rep: f64,
    pub sigma_sys: f64,
    pub k: f64,
    /// `w_rep ± k σ_sys`.
    pub band: (f64, f64),
    pub estimates: Vec<WindowEstimate>,
    pub crossover_times: Vec<(SeriesLabel, f64)>,
}

impl CollapseResult {
    pub fn accepted(&self) -> impl Iterator<Item = &WindowEstimate> {
        self.estimates.iter().filter(|e| e.accepted)
    }

    pub fn band_overlaps(&self, center: f64, half_width: f64) -> bool {
        self.band.0 <= center + half_width && self.band.1 >= center - half_width
    }
}

/// Check family, dimension and unit consistency and compute crossover times.
pub fn prepare_curves(series: &[EnsembleSeries], constants: &CriticalConstants, params: &AnalysisParams) -> Result<Vec<PreparedCurve>> {
    if series.len() < 2 {
        return Err(argument(format!("collapse needs at least two series, got {}", series.len())));
    }
    let unit = series[0].time_unit;
    if let Some(s) = series.iter().find(|s| s.time_unit != unit) {
        return Err(argument(format!(
            "mixed time units: {} uses {} but {} uses {}",
            series[0].label,
            unit.tag(),
            s.label,
            s.time_unit.tag()
        )));
    }
    series
        .iter()
        .map(|s| {
            s.validate()?;
            let t_x = detect_crossover_time(s, params.crossover)?;
            PreparedCurve::new(s, constants, t_x)
        })
        .collect()
}

/// Optimize every window and summarize by median and central 68% width.
pub fn estimate_w(series: &[EnsembleSeries], constants: &CriticalConstants, params: &AnalysisParams, mode: ExecMode) -> Result<CollapseResult> {
    if params.windows.len() < 3 {
        return Err(argument(format!("need at least three windows, got {}", params.windows.len())));
    }
    if !(params.k > 0.0) {
        return Err(argument(format!("band multiplier must be positive, got {}", params.k)));
    }
    let s = params.search;
    if !(s.w_min > 0.0 && s.w_max > s.w_min && s.refine_tol > 0.0) {
        return Err(argument(format!("invalid search range [{}, {}]", s.w_min, s.w_max)));
    }
    let curves = prepare_curves(series, constants, params)?;
    let estimates = map_slice(mode, &params.windows, |&w| optimize_w(&curves, w, params));
    let mut ws: Vec<f64> = estimates.iter().filter(|e| e.accepted).map(|e| e.w_opt).collect();
    if ws.len() < 3 {
        let reasons: Vec<String> = estimates
            .iter()
            .filter_map(|e| e.reason.as_ref().map(|r| format!("({:.2},{:.2}): {r}", e.window.beta, e.window.gamma)))
            .take(5)
            .collect();
        return Err(Error::Analysis(format!(
            "only {} of {} windows accepted; {}",
            ws.len(),
            estimates.len(),
            reasons.join("; ")
        )));
    }
    ws.sort_by(f64::total_cmp);
    let w_rep = percentile(&ws, 50.0);
    let sigma_sys = (percentile(&ws, 84.0) - percentile(&ws, 16.0)) / 2.0;
    Ok(CollapseResult {
        w_rep,
        sigma_sys,
        k: params.k,
        band: (w_rep - params.k * sigma_sys, w_rep + params.k * sigma_sys),
        estimates,
        crossover_times: curves.iter().map(|c| (c.label, c.t_x)).collect(),
    })
}
