//! Synthetic `⟨M²(t)⟩` series that collapse exactly at a chosen exponent.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::rng::{derive_seed, SimRng};
use crate::scaling::{power, CriticalConstants};
use crate::series::{EnsembleSeries, SeriesLabel};

/// Scaling function `F` with `L^{-κ}⟨M²⟩ = F(ĥ t̂^{w*})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalingFunction {
    /// `u² / (1 + u)` with `u = x / scale`.
    Rational { scale: f64 },
    /// `floor + (ceiling − floor) u^p / (1 + u^p)`: plateau, rise, saturation.
    Sigmoid { floor: f64, ceiling: f64, scale: f64, power: f64 },
}

impl Default for ScalingFunction {
    fn default() -> Self {
        Self::Rational { scale: 1.0 }
    }
}

impl ScalingFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Rational { scale } => {
                let u = x / scale;
                u * u / (1.0 + u)
            }
            Self::Sigmoid { floor, ceiling, scale, power: p } => {
                let up = (x / scale).powf(p);
                floor + (ceiling - floor) * up / (1.0 + up)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Rational { scale } => scale > 0.0,
            Self::Sigmoid { floor, ceiling, scale, power } => floor > 0.0 && ceiling > floor && scale > 0.0 && power > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(argument(format!("invalid scaling function {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub sizes: Vec<usize>,
    pub fields: Vec<f64>,
    pub w_star: f64,
    pub function: ScalingFunction,
    /// Relative Gaussian noise on each mean; the reported stderr is `noise·mean`.
    pub noise: f64,
    pub seed: u64,
    /// Raw times, in the unit of the constants' family. `t = 0` is allowed.
    pub times: Vec<f64>,
}

/// `0` followed by log-spaced times from `t_min` to `t_max`.
pub fn log_times(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || points_per_decade == 0 {
        return Err(argument(format!("invalid time range [{t_min}, {t_max}]")));
    }
    let n = ((t_max / t_min).log10() * points_per_decade as f64).ceil() as usize + 1;
    let mut times = vec![0.0];
    times.extend((0..n).map(|k| t_min * (t_max / t_min).powf(k as f64 / (n - 1) as f64)));
    Ok(times)
}

/// Common time axis on which every `(L, h)` curve sweeps at least `x ∈ [x_lo, x_hi]`.
pub fn covering_times(
    constants: &CriticalConstants,
    sizes: &[usize],
    fields: &[f64],
    w_star: f64,
    x_range: (f64, f64),
    points_per_decade: usize,
) -> Result<Vec<f64>> {
    let (x_lo, x_hi) = x_range;
    if !(x_lo > 0.0 && x_hi > x_lo && w_star > 0.0) {
        return Err(argument(format!("invalid x range ({x_lo}, {x_hi}) or w* = {w_star}")));
    }
    let mut t_min = f64::INFINITY;
    let mut t_max = 0f64;
    for &size in sizes {
        for &h in fields {
            let h_hat = constants.reduced_field(h, size);
            let t_hat_to_t = constants.reduced_time(1.0, size)?.recip();
            let t_at = |x: f64| power(x / h_hat, 1.0 / w_star) * t_hat_to_t;
            t_min = t_min.min(t_at(x_lo));
            t_max = t_max.max(t_at(x_hi));
        }
    }
    log_times(t_min, t_max, points_per_decade)
}

/// Generate one series per `(L, h)`, sizes varying fastest.
pub fn make_synthetic(spec: &SyntheticSpec, constants: &CriticalConstants) -> Result<Vec<EnsembleSeries>> {
    spec.function.validate()?;
    if !(spec.w_star > 0.0) || !(spec.noise >= 0.0) {
        return Err(argument(format!("need w* > 0 and noise >= 0, got {} and {}", spec.w_star, spec.noise)));
    }
    if spec.sizes.is_empty() || spec.fields.is_empty() {
        return Err(argument("sizes and fields must be nonempty"));
    }
    if let Some(h) = spec.fields.iter().find(|h| !(**h > 0.0)) {
        return Err(argument(format!("fields must be positive, got {h}")));
    }
    let mut out = Vec::with_capacity(spec.sizes.len() * spec.fields.len());
    for &h in &spec.fields {
        for &size in &spec.sizes {
            let label = SeriesLabel { family: constants.family, dim: constants.dim, size, field: h };
            let h_hat = constants.reduced_field(h, size);
            let amp = power(size as f64, constants.kappa);
            let mut rng = SimRng::seed_from_u64(derive_seed(spec.seed, &[size as u64, h.to_bits()]));
            let mut mean = Vec::with_capacity(spec.times.len());
            let mut err = Vec::with_capacity(spec.times.len());
            for &t in &spec.times {
                let th = constants.reduced_time(t, size)?;
                let x = if th == 0.0 { 0.0 } else { h_hat * power(th, spec.w_star) };
                let clean = amp * spec.function.eval(x);
                let xi: f64 = StandardNormal.sample(&mut rng);
                mean.push(clean * (1.0 + spec.noise * xi));
                err.push(spec.noise * clean);
            }
            out.push(EnsembleSeries::new(label, constants.family.time_unit(), spec.times.clone(), mean, err, 1)?);
        }
    }
    Ok(out)
}
