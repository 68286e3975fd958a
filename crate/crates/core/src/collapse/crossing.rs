use serde::{Deserialize, Serialize};

use super::grid::LogLogInterpolant;
use crate::error::{argument, Error, Result};
use crate::scaling::RescaledCurve;

/// Relative spread of rescaled curves across sizes on their common `x` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingDiagnostic {
    pub x: Vec<f64>,
    /// `(max_L y − min_L y) / mean_L y` at each grid point.
    pub delta: Vec<f64>,
    pub x_min: f64,
    pub delta_min: f64,
}

impl CrossingDiagnostic {
    pub fn argmin(&self) -> usize {
        self.delta.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |v| v.0)
    }
}

/// Evaluate all curves on a log grid over the intersection of their `x` ranges.
/// Curves must share the field value.
pub fn crossing_spread(curves: &[RescaledCurve], points_per_decade: usize) -> Result<CrossingDiagnostic> {
    if curves.len() < 2 {
        return Err(argument(format!("crossing needs at least two curves, got {}", curves.len())));
    }
    let h = curves[0].label.field;
    if let Some(c) = curves.iter().find(|c| (c.label.field - h).abs() > 1e-12 * h.abs().max(1.0)) {
        return Err(argument(format!("crossing curves must share one field; found h = {h} and {}", c.label.field)));
    }
    if points_per_decade == 0 {
        return Err(argument("points_per_decade must be positive"));
    }
    let interps: Vec<LogLogInterpolant> = curves.iter().map(LogLogInterpolant::from_curve).collect();
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (c, i) in curves.iter().zip(&interps) {
        let (a, b) = i
            .log_range()
            .ok_or_else(|| Error::Diagnostics(format!("curve {} has fewer than two positive points", c.label)))?;
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if !(hi > lo) {
        return Err(Error::Diagnostics("curves have no common x range".into()));
    }
    let n = (((hi - lo) / std::f64::consts::LN_10 * points_per_decade as f64).ceil() as usize + 1).max(2);
    let mut x = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for j in 0..n {
        let lx = if j == n - 1 { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 };
        let ys: Vec<f64> = interps.iter().map(|i| i.eval_log(lx).expect("inside intersection").exp()).collect();
        let max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        x.push(lx.exp());
        delta.push((max - min) / mean);
    }
    let mut diag = CrossingDiagnostic { x, delta, x_min: f64::NAN, delta_min: f64::NAN };
    let k = diag.argmin();
    diag.x_min = diag.x[k];
    diag.delta_min = diag.delta[k];
    Ok(diag)
}
