use serde::{Deserialize, Serialize};

use crate::scaling::RescaledCurve;

/// Piecewise-linear interpolation of `ln y` against `ln x`, without extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogInterpolant {
    lx: Vec<f64>,
    ly: Vec<f64>,
}

impl LogLogInterpolant {
    /// Uses the points with `x > 0` and `y > 0`; `x` must be increasing there.
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let (lx, ly) = x
            .iter()
            .zip(y)
            .filter(|(&a, &b)| a > 0.0 && b > 0.0)
            .map(|(&a, &b)| (a.ln(), b.ln()))
            .unzip();
        Self { lx, ly }
    }

    pub fn from_curve(curve: &RescaledCurve) -> Self {
        Self::new(&curve.x, &curve.y)
    }

    /// Needs two points to span anything.
    pub fn is_usable(&self) -> bool {
        self.lx.len() >= 2
    }

    /// `[ln x_first, ln x_last]`.
    pub fn log_range(&self) -> Option<(f64, f64)> {
        if self.is_usable() {
            Some((self.lx[0], self.lx[self.lx.len() - 1]))
        } else {
            None
        }
    }

    /// `ln y` at `ln x`, or `None` outside the sampled range.
    pub fn eval_log(&self, lx: f64) -> Option<f64> {
        let (lo, hi) = self.log_range()?;
        let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if lx < lo - eps || lx > hi + eps {
            return None;
        }
        let k = self.lx.partition_point(|&v| v < lx).clamp(1, self.lx.len() - 1);
        let (x0, x1) = (self.lx[k - 1], self.lx[k]);
        let (y0, y1) = (self.ly[k - 1], self.ly[k]);
        if x1 == x0 {
            return Some(y0);
        }
        let f = ((lx - x0) / (x1 - x0)).clamp(0.0, 1.0);
        Some(y0 + f * (y1 - y0))
    }
}

/// Grid construction and window-acceptance thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub points_per_decade: usize,
    /// Curves that must cover a grid point for it to enter the cost.
    pub min_curves: usize,
    /// Minimum overlap extent in decades of `x`.
    pub min_decades: f64,
    /// Minimum number of grid points with at least two curves.
    pub min_points: usize,
    /// Minimum fraction of kept points covered by at least three curves
    /// (applies only when three or more curves are present).
    pub min_triple_fraction: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            points_per_decade: 100,
            min_curves: 2,
            min_decades: 0.3,
            min_points: 20,
            min_triple_fraction: 0.25,
        }
    }
}

/// Log-spaced grid over the union of curve ranges with per-point coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonGrid {
    pub x: Vec<f64>,
    /// Indices of the curves whose range contains each grid point.
    pub coverage: Vec<Vec<usize>>,
    /// Grid indices covered by at least `min_curves` curves.
    pub kept: Vec<usize>,
}

/// Outcome of the overlap/coverage checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCheck {
    pub decades: f64,
    pub points_two: usize,
    pub triple_fraction: f64,
    pub passed: bool,
    pub reason: Option<String>,
}

impl CommonGrid {
    pub fn log_x(&self, j: usize) -> f64 {
        self.x[j].ln()
    }

    /// Extent of the kept region in decades.
    pub fn overlap_decades(&self) -> f64 {
        match (self.kept.first(), self.kept.last()) {
            (Some(&a), Some(&b)) => (self.x[b] / self.x[a]).log10(),
            _ => 0.0,
        }
    }

    pub fn check(&self, n_curves: usize, params: &GridParams) -> CoverageCheck {
        let decades = self.overlap_decades();
        let points_two = self.kept.iter().filter(|&&j| self.coverage[j].len() >= 2).count();
        let triples = self.kept.iter().filter(|&&j| self.coverage[j].len() >= 3).count();
        let triple_fraction = if self.kept.is_empty() {
            0.0
        } else {
            triples as f64 / self.kept.len() as f64
        };
        let reason = if decades < params.min_decades {
            Some(format!("overlap spans {decades:.3} decades < {}", params.min_decades))
        } else if points_two < params.min_points {
            Some(format!("{points_two} grid points with >= 2 curves < {}", params.min_points))
        } else if n_curves >= 3 && triple_fraction < params.min_triple_fraction {
            Some(format!(
                "{:.0}% of grid points with >= 3 curves < {:.0}%",
                100.0 * triple_fraction,
                100.0 * params.min_triple_fraction
            ))
        } else {
            None
        };
        CoverageCheck {
            decades,
            points_two,
            triple_fraction,
            passed: reason.is_none(),
            reason,
        }
    }
}

/// Build the shared grid. Returns `None` (window rejection) when no grid point
/// is covered by `min_curves` curves.
pub fn build_common_grid(interpolants: &[LogLogInterpolant], points_per_decade: usize, min_curves: usize) -> Option<CommonGrid> {
    let ranges: Vec<Option<(f64, f64)>> = interpolants.iter().map(LogLogInterpolant::log_range).collect();
    let lo = ranges.iter().flatten().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let hi = ranges.iter().flatten().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) || points_per_decade == 0 {
        return None;
    }
    let decades = (hi - lo) / std::f64::consts::LN_10;
    let n = ((decades * points_per_decade as f64).ceil() as usize + 1).max(2);
    let log_grid: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => lo,
            _ if j == n - 1 => hi,
            _ => lo + (hi - lo) * j as f64 / (n - 1) as f64,
        })
        .collect();
    let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let coverage: Vec<Vec<usize>> = log_grid
        .iter()
        .map(|&g| {
            ranges
                .iter()
                .enumerate()
                .filter_map(|(a, r)| r.filter(|&(l, h)| g >= l - eps && g <= h + eps).map(|_| a))
                .collect()
        })
        .collect();
    let kept: Vec<usize> = (0..n).filter(|&j| coverage[j].len() >= min_curves.max(1)).collect();
    if kept.is_empty() {
        return None;
    }
    Some(CommonGrid {
        x: log_grid.iter().map(|v| v.exp()).collect(),
        coverage,
        kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(x0: f64, x1: f64) -> LogLogInterpolant {
        let xs: Vec<f64> = (0..=10).map(|k| x0 * (x1 / x0).powf(k as f64 / 10.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        LogLogInterpolant::new(&xs, &ys)
    }

    #[test]
    fn interpolation_is_exact_for_power_laws() {
        let f = line(1.0, 100.0);
        for x in [1.0f64, 2.5, 17.0, 100.0] {
            assert!((f.eval_log(x.ln()).unwrap() - 2.0 * x.ln()).abs() < 1e-12);
        }
        assert!(f.eval_log(0.5f64.ln()).is_none());
        assert!(f.eval_log(101f64.ln()).is_none());
    }

    #[test]
    fn identical_ranges_cover_everything() {
        let g = build_common_grid(&[line(1.0, 10.0), line(1.0, 10.0)], 50, 2).unwrap();
        assert_eq!(g.x.len(), 51);
        assert_eq!(g.kept.len(), g.x.len());
        assert!((g.x[0] - 1.0).abs() < 1e-12 && (g.x[50] - 10.0).abs() < 1e-9);
        assert!(g.coverage.iter().all(|c| c == &vec![0, 1]));
    }

    #[test]
    fn disjoint_ranges_are_rejected() {
        assert!(build_common_grid(&[line(1.0, 2.0), line(3.0, 9.0)], 50, 2).is_none());
    }

    #[test]
    fn staggered_coverage_matches_interval_oracle() {
        let ranges = [(1.0, 10.0), (3.0, 30.0), (5.0, 100.0)];
        let curves: Vec<_> = ranges.iter().map(|&(a, b)| line(a, b)).collect();
        let g = build_common_grid(&curves, 20, 2).unwrap();
        for (j, &x) in g.x.iter().enumerate() {
            let expected: Vec<usize> = ranges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| x >= a * (1.0 - 1e-9) && x <= b * (1.0 + 1e-9))
                .map(|(k, _)| k)
                .collect();
            assert_eq!(g.coverage[j], expected, "x = {x}");
            assert_eq!(g.kept.contains(&j), expected.len() >= 2);
        }
        // Overlap of >= 2 curves runs from 3 to 30.
        assert!((g.overlap_decades() - 1.0).abs() < 0.06);
        let check = g.check(3, &GridParams::default());
        assert!(check.passed, "{check:?}");
    }

    #[test]
    fn coverage_checks_reject_thin_overlap() {
        let g = build_common_grid(&[line(1.0, 2.0), line(1.5, 3.0)], 100, 2).unwrap();
        let check = g.check(2, &GridParams::default());
        assert!(!check.passed);
        assert!(check.reason.unwrap().contains("decades"));
    }
}
