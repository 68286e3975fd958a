use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lanczos::tridiagonal_eigen;
use super::{linalg, QuantumModelSpec, StateVector, TfimHamiltonian};
use crate::error::{argument, Error, Result};

/// Diagnostics of one `step` call.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub substeps: usize,
    pub max_krylov_dim: usize,
    /// Sum of the per-substep a-posteriori error estimates.
    pub error_estimate: f64,
}

/// Adaptive Lanczos propagator for `exp(-iH dt)`.
///
/// Each substep builds an orthonormal Krylov basis from the current state and
/// grows it until the estimate `β_m |[exp(-iT_m τ) e_1]_m|` drops below the
/// tolerance; if the dimension budget runs out first, `τ` is halved.
#[derive(Debug, Clone)]
pub struct Propagator {
    ham: TfimHamiltonian,
    tol: f64,
    max_krylov_dim: usize,
}

/// `V exp(-i T τ) e_1` coefficients in the Krylov basis.
fn krylov_coefficients(alphas: &[f64], betas: &[f64], tau: f64) -> Vec<Complex64> {
    let (values, vectors): (Vec<f64>, DMatrix<f64>) = tridiagonal_eigen(alphas, betas);
    let m = alphas.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| vectors[(i, k)] * vectors[(0, k)] * Complex64::from_polar(1.0, -values[k] * tau))
                .sum()
        })
        .collect()
}

impl Propagator {
    pub fn new(spec: &QuantumModelSpec, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(argument(format!("tolerance must be positive, got {tol}")));
        }
        let ham = TfimHamiltonian::new(spec);
        // Keep the basis under ~1 GiB.
        let budget = (1usize << 30) / (16 * ham.dim());
        Ok(Self {
            max_krylov_dim: budget.clamp(8, 40).min(ham.dim()),
            ham,
            tol,
        })
    }

    pub fn hamiltonian(&self) -> &TfimHamiltonian {
        &self.ham
    }

    /// `⟨ψ|H|ψ⟩` (real part).
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        Ok(self.ham.expectation(state)?.re)
    }

    /// Advance `state` by `dt` in units of `1/J`-scaled time (the Hamiltonian's units).
    pub fn step(&self, state: &mut StateVector, dt: f64) -> Result<StepStats> {
        if !(dt >= 0.0) {
            return Err(argument(format!("time step must be nonnegative, got {dt}")));
        }
        if state.n_sites() != self.ham.n_sites() {
            return Err(argument("state does not match the Hamiltonian"));
        }
        let mut stats = StepStats::default();
        let mut remaining = dt;
        let dim = self.ham.dim();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        while remaining > 0.0 {
            let norm = state.norm();
            let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(self.max_krylov_dim);
            let mut first = state.amplitudes().to_vec();
            linalg::scale(Complex64::new(1.0 / norm, 0.0), &mut first);
            basis.push(first);
            let mut alphas = Vec::new();
            let mut betas: Vec<f64> = Vec::new();
            let mut tau = remaining;
            let mut coeffs: Option<(Vec<Complex64>, f64)> = None;

            for j in 0..self.max_krylov_dim {
                self.ham.apply_into(&basis[j], &mut w);
                let alpha = linalg::dot(&basis[j], &w).re;
                alphas.push(alpha);
                for _ in 0..2 {
                    for v in &basis {
                        let c = linalg::dot(v, &w);
                        linalg::axpy(-c, v, &mut w);
                    }
                }
                let beta = linalg::norm(&w);
                if beta <= 1e-13 * alpha.abs().max(1.0) {
                    // Invariant subspace: the projection is exact for any τ.
                    coeffs = Some((krylov_coefficients(&alphas, &betas, tau), 0.0));
                    break;
                }
                if j >= 1 || j + 1 == self.max_krylov_dim {
                    let c = krylov_coefficients(&alphas, &betas, tau);
                    let err = beta * c[j].norm();
                    if err <= self.tol {
                        coeffs = Some((c, err));
                        break;
                    }
                    if j + 1 == self.max_krylov_dim {
                        while tau > 1e-14 * dt.max(1.0) {
                            tau *= 0.5;
                            let c = krylov_coefficients(&alphas, &betas, tau);
                            let err = beta * c[j].norm();
                            if err <= self.tol {
                                coeffs = Some((c, err));
                                break;
                            }
                        }
                        break;
                    }
                }
                betas.push(beta);
                let mut next = w.clone();
                linalg::scale(Complex64::new(1.0 / beta, 0.0), &mut next);
                basis.push(next);
            }

            let (c, err) = coeffs.ok_or_else(|| Error::Numerical {
                message: format!(
                    "Krylov step cannot reach tolerance {:.1e} within dimension {}",
                    self.tol, self.max_krylov_dim
                ),
                residual: f64::NAN,
            })?;
            let out = state.amplitudes_mut();
            out.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
            for (k, v) in basis.iter().enumerate().take(c.len()) {
                linalg::axpy(c[k] * norm, v, out);
            }
            stats.substeps += 1;
            stats.max_krylov_dim = stats.max_krylov_dim.max(c.len());
            stats.error_estimate += err;
            remaining -= tau;
            if remaining < 1e-15 * dt {
                remaining = 0.0;
            }
        }
        Ok(stats)
    }
}

/// `exp(-iH dt)|ψ⟩` with local error at most `tol` per substep.
pub fn evolve(state: &StateVector, spec: &QuantumModelSpec, dt: f64, tol: f64) -> Result<StateVector> {
    let mut out = state.clone();
    Propagator::new(spec, tol)?.step(&mut out, dt)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGeometry;
    use crate::quantum::{ground_state, LanczosOptions};

    fn chain(l: usize, g: f64, h: f64) -> QuantumModelSpec {
        QuantumModelSpec::new(LatticeGeometry::new(1, l).unwrap(), 1.0, g, h).unwrap()
    }

    #[test]
    fn zero_step_is_identity() {
        let psi = StateVector::x_polarized(5);
        let out = evolve(&psi, &chain(5, 1.0, 0.1), 0.0, 1e-12).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn eigenstate_only_acquires_a_phase() {
        let spec = chain(8, 1.0, 0.0);
        let gs = ground_state(&spec, LanczosOptions::default()).unwrap();
        let out = evolve(&gs.state, &spec, 3.7, 1e-12).unwrap();
        let overlap = linalg::dot(gs.state.amplitudes(), out.amplitudes());
        assert!((overlap - Complex64::from_polar(1.0, -gs.energy * 3.7)).norm() < 1e-8);
        assert!((out.measure_m2() - gs.state.measure_m2()).abs() < 1e-10);
    }

    #[test]
    fn norm_and_energy_are_conserved() {
        let spec = chain(10, 1.0, 0.2);
        let gs = ground_state(&spec.with_field(0.0).unwrap(), LanczosOptions::default()).unwrap();
        let prop = Propagator::new(&spec, 1e-12).unwrap();
        let mut psi = gs.state.clone();
        let e0 = prop.energy(&psi).unwrap();
        for _ in 0..10 {
            prop.step(&mut psi, 0.5).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-10);
        }
        let e1 = prop.energy(&psi).unwrap();
        assert!(((e1 - e0) / e0).abs() < 1e-8 * 5.0);
    }

    #[test]
    fn negative_step_is_rejected() {
        let psi = StateVector::x_polarized(4);
        assert!(evolve(&psi, &chain(4, 1.0, 0.1), -1.0, 1e-12).is_err());
    }
}
