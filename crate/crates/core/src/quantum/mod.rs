//! Exact small-system transverse-field Ising dynamics.
//!
//! States live in the full `2^N` σ^z basis. Site `i` is bit `i` of the basis
//! index; a clear bit is spin up (`σ^z = +1`), a set bit spin down.

mod hamiltonian;
mod krylov;
mod lanczos;
mod linalg;
mod quench;

pub use hamiltonian::{apply_hamiltonian, magnetization_of, TfimHamiltonian};
pub use krylov::{evolve, Propagator, StepStats};
pub use lanczos::{ground_state, GroundState, LanczosOptions};
pub use quench::{run_quantum_quench, QuantumQuench};

use num_complex::Complex64;

use crate::error::{argument, Error, Result};
use crate::lattice::LatticeGeometry;

/// Largest lattice handled by the dense state representation.
pub const MAX_QUANTUM_SITES: usize = 22;

/// `H = -J Σ Z_i Z_j - g Σ X_i - h Σ Z_i` on a periodic chain or square lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModelSpec {
    pub geometry: LatticeGeometry,
    pub coupling: f64,
    pub transverse: f64,
    pub field: f64,
}

impl QuantumModelSpec {
    pub fn new(geometry: LatticeGeometry, coupling: f64, transverse: f64, field: f64) -> Result<Self> {
        if !(1..=2).contains(&geometry.dim()) {
            return Err(argument(format!(
                "quantum models support d = 1 or 2, got d = {}",
                geometry.dim()
            )));
        }
        if geometry.sites() > MAX_QUANTUM_SITES {
            return Err(Error::Capacity(format!(
                "{} sites exceed the exact-state limit of {MAX_QUANTUM_SITES}",
                geometry.sites()
            )));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(argument(format!("coupling must be positive, got {coupling}")));
        }
        if !(transverse > 0.0 && transverse.is_finite()) {
            return Err(argument(format!("transverse field must be positive, got {transverse}")));
        }
        if !(field >= 0.0 && field.is_finite()) {
            return Err(argument(format!("field must be nonnegative, got {field}")));
        }
        Ok(Self {
            geometry,
            coupling,
            transverse,
            field,
        })
    }

    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.geometry.clone(), self.coupling, self.transverse, field)
    }

    pub fn hilbert_dim(&self) -> usize {
        1usize << self.geometry.sites()
    }
}

/// Normalized amplitudes in the σ^z basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_sites {
            return Err(argument(format!(
                "{} amplitudes do not match 2^{n_sites}",
                amplitudes.len()
            )));
        }
        Ok(Self { n_sites, amplitudes })
    }

    /// Basis state `|s⟩`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(argument(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_sites, amplitudes })
    }

    /// `∏_i |+⟩_x`: equal weight on every basis state.
    pub fn x_polarized(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let a = Complex64::new((dim as f64).recip().sqrt(), 0.0);
        Self {
            n_sites,
            amplitudes: vec![a; dim],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    /// `⟨M²⟩ = Σ_s |ψ(s)|² M(s)²`.
    pub fn measure_m2(&self) -> f64 {
        let n = self.n_sites;
        linalg::chunked_sum(self.amplitudes.len(), |range| {
            range
                .map(|s| {
                    let m = magnetization_of(n, s) as f64;
                    self.amplitudes[s].norm_sqr() * m * m
                })
                .sum()
        })
    }

    /// `⟨M⟩`.
    pub fn measure_m(&self) -> f64 {
        let n = self.n_sites;
        linalg::chunked_sum(self.amplitudes.len(), |range| {
            range
                .map(|s| self.amplitudes[s].norm_sqr() * magnetization_of(n, s) as f64)
                .sum()
        })
    }

    /// `⟨Z_i Z_j⟩`.
    pub fn zz_correlation(&self, i: usize, j: usize) -> f64 {
        linalg::chunked_sum(self.amplitudes.len(), |range| {
            range
                .map(|s| {
                    let sign = if ((s >> i) ^ (s >> j)) & 1 == 0 { 1.0 } else { -1.0 };
                    self.amplitudes[s].norm_sqr() * sign
                })
                .sum()
        })
    }
}
