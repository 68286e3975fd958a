//! Single-variable data collapse of `L^{-κ}⟨M²⟩` versus `x = ĥ t̂^w`.
//!
//! Pipeline: detect each curve's crossover time `t_x`, restrict every curve to
//! a relative window `[β t_x, γ t_x]`, evaluate curves on a shared log grid,
//! and minimize the mean across-curve variance of `ln y` over `w`. Repeating
//! this over many windows gives an ensemble of estimates whose median and
//! central 68% width are reported.

mod cost;
mod crossing;
mod crossover;
mod estimate;
mod grid;

pub use cost::collapse_cost;
pub use crossing::{crossing_spread, CrossingDiagnostic};
pub use crossover::{detect_crossover_time, CrossoverAnchor, CrossoverParams};
pub use estimate::{cost_landscape, estimate_w, optimize_w, percentile, prepare_curves, CollapseResult, PreparedCurve, SearchParams, WindowEstimate};
pub use grid::{build_common_grid, CommonGrid, CoverageCheck, GridParams, LogLogInterpolant};

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

/// Relative fit window `t ∈ [β t_x, γ t_x]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseWindow {
    pub beta: f64,
    pub gamma: f64,
}

impl CollapseWindow {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < gamma && gamma.is_finite()) {
            return Err(argument(format!("window needs 0 < beta < gamma, got ({beta}, {gamma})")));
        }
        Ok(Self { beta, gamma })
    }

    /// All pairs `β < γ` with `β ∈ {0.10, 0.15, …, 0.50}` and `γ ∈ {0.6, 0.7, …, 1.0}`.
    pub fn default_grid() -> Vec<Self> {
        let betas: Vec<f64> = (0..9).map(|k| 0.10 + 0.05 * k as f64).collect();
        let gammas: Vec<f64> = (0..5).map(|k| 0.6 + 0.1 * k as f64).collect();
        Self::product(&betas, &gammas)
    }

    /// Every `(β, γ)` pair from the two lists with `β < γ`.
    pub fn product(betas: &[f64], gammas: &[f64]) -> Vec<Self> {
        betas
            .iter()
            .flat_map(|&b| gammas.iter().filter_map(move |&g| Self::new(b, g).ok()))
            .collect()
    }
}

/// Complete parameter set for one collapse analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub windows: Vec<CollapseWindow>,
    pub crossover: CrossoverParams,
    pub grid: GridParams,
    pub search: SearchParams,
    /// Band half-width multiplier on `σ_sys`.
    pub k: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            windows: CollapseWindow::default_grid(),
            crossover: CrossoverParams::default(),
            grid: GridParams::default(),
            search: SearchParams::default(),
            k: 4.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_grid() {
        let w = CollapseWindow::default_grid();
        assert_eq!(w.len(), 45);
        assert!(w.iter().all(|w| w.beta < w.gamma));
        assert!((w[0].beta - 0.1).abs() < 1e-12 && (w[0].gamma - 0.6).abs() < 1e-12);
        assert!((w[44].beta - 0.5).abs() < 1e-12 && (w[44].gamma - 1.0).abs() < 1e-12);
        assert!(CollapseWindow::new(0.5, 0.5).is_err());
        assert!(CollapseWindow::new(0.0, 0.5).is_err());
        assert_eq!(CollapseWindow::product(&[0.5, 0.9], &[0.6, 0.8]).len(), 2);
    }
}
