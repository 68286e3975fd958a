//! Classical Ising quenches: Wolff preparation at `T_c`, Glauber evolution in a field.

mod dynamics;
mod ensemble;

pub use dynamics::{
    glauber_flip_probability, glauber_sweep, wolff_add_probability, wolff_equilibrate, wolff_update, GlauberKernel, WolffRun,
};
pub use ensemble::{
    ensemble_average, observable_stats, run_ensemble, run_quench_realization, sample_equilibrium,
    simulate_ensemble, EquilibriumSample, Equilibration, Observable, Trajectory,
};

use crate::error::{argument, Result};
use crate::lattice::LatticeGeometry;

/// Couplings and temperature of a classical run. The post-quench Hamiltonian
/// is `H = -J Σ s_i s_j - h M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalModelSpec {
    pub geometry: LatticeGeometry,
    pub coupling: f64,
    pub temperature: f64,
    pub field: f64,
}

impl ClassicalModelSpec {
    pub fn new(geometry: LatticeGeometry, coupling: f64, temperature: f64, field: f64) -> Result<Self> {
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(argument(format!("coupling must be positive, got {coupling}")));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(argument(format!("temperature must be positive, got {temperature}")));
        }
        if !(field >= 0.0 && field.is_finite()) {
            return Err(argument(format!("field must be nonnegative, got {field}")));
        }
        Ok(Self {
            geometry,
            coupling,
            temperature,
            field,
        })
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// Same model with a different longitudinal field.
    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.geometry.clone(), self.coupling, self.temperature, field)
    }
}

/// Record times in Monte Carlo sweeps; starts at 0, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuenchSchedule {
    times: Vec<u64>,
}

impl QuenchSchedule {
    pub fn new(times: Vec<u64>) -> Result<Self> {
        if times.first() != Some(&0) {
            return Err(argument("schedule must start at t = 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(argument("schedule times must be strictly increasing"));
        }
        Ok(Self { times })
    }

    /// `0` plus integer times rounded from `10^(k / points_per_decade)`, deduplicated,
    /// ending exactly at `t_max`.
    pub fn log_spaced(t_max: u64, points_per_decade: usize) -> Result<Self> {
        if t_max == 0 || points_per_decade == 0 {
            return Err(argument("log-spaced schedule needs t_max >= 1 and points_per_decade >= 1"));
        }
        let mut times = vec![0u64];
        let decades = (t_max as f64).log10();
        let steps = (decades * points_per_decade as f64).ceil() as usize;
        for k in 0..=steps {
            let t = (10f64.powf(k as f64 / points_per_decade as f64).round() as u64).min(t_max);
            if t > *times.last().unwrap() {
                times.push(t);
            }
        }
        if *times.last().unwrap() != t_max {
            times.push(t_max);
        }
        Self::new(times)
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn t_max(&self) -> u64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
