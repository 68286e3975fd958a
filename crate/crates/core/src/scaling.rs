//! Critical-exponent bookkeeping and the reduced variables
//! `t̂ = (Jt) L^{-z}` (or `t_MCS L^{-z}`), `ĥ = (h/J) L^{y_h}`.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::series::{EnsembleSeries, Family, SeriesLabel};

/// Where a constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Value that fixes the studied protocol (critical point, dynamic exponent).
    Standard,
    /// Standard literature value used as a default.
    LiteratureDefault,
    UserOverride,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsProvenance {
    pub critical_point: Provenance,
    pub eta: Provenance,
    pub z: Provenance,
}

/// Exponents and couplings for one universality class / model.
///
/// `kappa` and `y_h` are always derived from `(family, dim, eta, z)`:
/// quantum `κ = d + 2 - z - η`, `y_h = (d + z + 2 - η)/2`;
/// classical `κ = d + 2 - η`, `y_h = (d + 2 - η)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub family: Family,
    pub dim: usize,
    pub eta: f64,
    pub z: f64,
    pub coupling: f64,
    /// `T_c` for classical models, `g_c` for quantum ones, in units of energy.
    pub critical_point: f64,
    pub y_h: f64,
    pub kappa: f64,
    pub provenance: ConstantsProvenance,
}

/// `2 / ln(1 + √2)`, the exact square-lattice critical temperature in units of `J`.
pub fn onsager_tc() -> f64 {
    2.0 / (1.0 + 2f64.sqrt()).ln()
}

/// `base^exponent` evaluated as `exp(exponent · ln base)`.
#[inline]
pub fn power(base: f64, exponent: f64) -> f64 {
    (exponent * base.ln()).exp()
}

/// Build a constants record, deriving `κ` and `y_h`.
pub fn derive_constants(
    family: Family,
    dim: usize,
    eta: f64,
    z: f64,
    coupling: f64,
    critical_point: f64,
    provenance: ConstantsProvenance,
) -> Result<CriticalConstants> {
    if dim == 0 {
        return Err(argument("dimension must be at least 1"));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(argument(format!("eta must lie in [0, 1), got {eta}")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(argument(format!("z must be positive, got {z}")));
    }
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(argument(format!("coupling must be positive, got {coupling}")));
    }
    if !(critical_point > 0.0 && critical_point.is_finite()) {
        return Err(argument(format!("critical point must be positive, got {critical_point}")));
    }
    let d = dim as f64;
    let (kappa, y_h) = match family {
        Family::Quantum => (d + 2.0 - z - eta, (d + z + 2.0 - eta) / 2.0),
        Family::Classical => (d + 2.0 - eta, (d + 2.0 - eta) / 2.0),
    };
    Ok(CriticalConstants {
        family,
        dim,
        eta,
        z,
        coupling,
        critical_point,
        y_h,
        kappa,
        provenance,
    })
}

impl CriticalConstants {
    /// Compiled-in defaults for the supported models (`J = 1`).
    ///
    /// | model | critical point | z | η |
    /// |---|---|---|---|
    /// | quantum 1D | g_c = 1 | 1 | 1/4 |
    /// | quantum 2D | g_c = 3.044 | 1 | 0.0363 |
    /// | classical 2D | T_c = 2/ln(1+√2) | 2.17 | 1/4 |
    /// | classical 3D | T_c = 4.5115 | 2.02 | 0.0363 |
    /// | classical 4D | T_c = 6.6803 | 2 | 0 |
    pub fn defaults(family: Family, dim: usize) -> Result<Self> {
        use Provenance::*;
        let (tc, eta, z, prov) = match (family, dim) {
            (Family::Quantum, 1) => (1.0, 0.25, 1.0, (Standard, LiteratureDefault, Standard)),
            (Family::Quantum, 2) => (3.044, 0.0363, 1.0, (Standard, LiteratureDefault, Standard)),
            (Family::Classical, 2) => (onsager_tc(), 0.25, 2.17, (LiteratureDefault, LiteratureDefault, LiteratureDefault)),
            (Family::Classical, 3) => (4.5115, 0.0363, 2.02, (Standard, LiteratureDefault, Standard)),
            (Family::Classical, 4) => (6.6803, 0.0, 2.0, (Standard, LiteratureDefault, Standard)),
            _ => {
                return Err(argument(format!("no default constants for {family} d = {dim}")));
            }
        };
        derive_constants(
            family,
            dim,
            eta,
            z,
            1.0,
            tc,
            ConstantsProvenance {
                critical_point: prov.0,
                eta: prov.1,
                z: prov.2,
            },
        )
    }

    /// Replace any of the primary constants, marking them as user overrides.
    pub fn with_overrides(
        &self,
        critical_point: Option<f64>,
        eta: Option<f64>,
        z: Option<f64>,
        coupling: Option<f64>,
    ) -> Result<Self> {
        let mut prov = self.provenance;
        if critical_point.is_some() {
            prov.critical_point = Provenance::UserOverride;
        }
        if eta.is_some() {
            prov.eta = Provenance::UserOverride;
        }
        if z.is_some() {
            prov.z = Provenance::UserOverride;
        }
        let coupling = coupling.unwrap_or(self.coupling);
        // Defaults are quoted in units of J.
        let critical_point = critical_point.unwrap_or(self.critical_point / self.coupling * coupling);
        derive_constants(
            self.family,
            self.dim,
            eta.unwrap_or(self.eta),
            z.unwrap_or(self.z),
            coupling,
            critical_point,
            prov,
        )
    }

    /// `t̂`: `(J t) L^{-z}` for quantum, `t_MCS L^{-z}` for classical models.
    pub fn reduced_time(&self, t: f64, size: usize) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(argument(format!("time must be nonnegative, got {t}")));
        }
        let raw = match self.family {
            Family::Quantum => self.coupling * t,
            Family::Classical => t,
        };
        Ok(raw * power(size as f64, -self.z))
    }

    /// `ĥ = (h/J) L^{y_h}`.
    pub fn reduced_field(&self, h: f64, size: usize) -> f64 {
        h / self.coupling * power(size as f64, self.y_h)
    }

    /// `L^{-κ}`.
    pub fn fluctuation_scale(&self, size: usize) -> f64 {
        power(size as f64, -self.kappa)
    }
}

/// One `(L, h)` series in collapse coordinates `x = ĥ t̂^w`, `y = L^{-κ}⟨M²⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledCurve {
    pub label: SeriesLabel,
    /// Raw times, kept for window selection.
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_err: Vec<f64>,
    pub w: f64,
}

impl RescaledCurve {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Sub-curve with raw times in `[t_lo, t_hi]`, dropping `t = 0` and `y <= 0`.
    pub fn restrict(&self, t_lo: f64, t_hi: f64) -> RescaledCurve {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&k| {
                let t = self.times[k];
                t > 0.0 && t >= t_lo && t <= t_hi && self.y[k] > 0.0 && self.x[k] > 0.0
            })
            .collect();
        RescaledCurve {
            label: self.label,
            times: keep.iter().map(|&k| self.times[k]).collect(),
            x: keep.iter().map(|&k| self.x[k]).collect(),
            y: keep.iter().map(|&k| self.y[k]).collect(),
            y_err: keep.iter().map(|&k| self.y_err[k]).collect(),
            w: self.w,
        }
    }
}

/// Map a raw series into collapse coordinates at exponent `w`.
///
/// `t = 0` maps to `x = 0`; it is kept here and dropped by [`RescaledCurve::restrict`].
pub fn rescale_curve(series: &EnsembleSeries, constants: &CriticalConstants, w: f64) -> Result<RescaledCurve> {
    if series.label.family != constants.family || series.label.dim != constants.dim {
        return Err(argument(format!(
            "series {} does not match constants for {} d = {}",
            series.label, constants.family, constants.dim
        )));
    }
    if series.time_unit != constants.family.time_unit() {
        return Err(argument(format!(
            "series {} has time unit {} but {} models use {}",
            series.label,
            series.time_unit.tag(),
            constants.family,
            constants.family.time_unit().tag()
        )));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(argument(format!("w must be positive, got {w}")));
    }
    let size = series.label.size;
    let h_hat = constants.reduced_field(series.label.field, size);
    let scale = constants.fluctuation_scale(size);
    let x = series
        .times
        .iter()
        .map(|&t| {
            let th = constants.reduced_time(t, size)?;
            Ok(if th == 0.0 { 0.0 } else { h_hat * power(th, w) })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RescaledCurve {
        label: series.label,
        times: series.times.clone(),
        x,
        y: series.mean_m2.iter().map(|m| m * scale).collect(),
        y_err: series.stderr_m2.iter().map(|e| e * scale).collect(),
        w,
    })
}
