use super::grid::{CommonGrid, LogLogInterpolant};
use crate::scaling::RescaledCurve;

/// Mean over kept grid points of the unbiased across-curve variance of `ln y`,
/// together with the number of grid points that contributed.
pub(crate) fn cost_on_grid(interpolants: &[LogLogInterpolant], grid: &CommonGrid) -> Option<(f64, usize)> {
    let mut total = 0.0;
    let mut count = 0usize;
    let mut values = Vec::with_capacity(interpolants.len());
    for &j in &grid.kept {
        let lx = grid.log_x(j);
        values.clear();
        values.extend(grid.coverage[j].iter().filter_map(|&a| interpolants[a].eval_log(lx)).filter(|v| v.is_finite()));
        if values.len() < 2 {
            continue;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        total += values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        count += 1;
    }
    (count > 0).then(|| (total / count as f64, count))
}

/// Collapse cost of curves already rescaled at a common `w`, evaluated on `grid`.
/// `None` when no grid point has two usable curves.
pub fn collapse_cost(curves: &[RescaledCurve], grid: &CommonGrid) -> Option<f64> {
    let interps: Vec<LogLogInterpolant> = curves.iter().map(LogLogInterpolant::from_curve).collect();
    if grid.coverage.iter().flatten().any(|&a| a >= interps.len()) {
        return None;
    }
    cost_on_grid(&interps, grid).map(|c| c.0)
}
