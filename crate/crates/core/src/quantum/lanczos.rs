use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{linalg, QuantumModelSpec, StateVector, TfimHamiltonian};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov vectors kept per restart cycle.
    pub krylov_dim: usize,
    /// Target for `‖Hψ - Eψ‖`.
    pub residual_tol: f64,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 60,
            residual_tol: 1e-9,
            max_restarts: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub residual: f64,
    pub restarts: usize,
}

/// Lowest eigenvalues and eigenvectors of the symmetric tridiagonal matrix
/// `(alphas, betas)`, sorted ascending.
pub(crate) fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m, m, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Orthogonalize `w` against every vector in `basis`, twice.
fn reorthogonalize(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        for v in basis {
            let c = linalg::dot_real(v, w);
            linalg::axpy(-c, v, w);
        }
    }
}

/// Critical ground state of `H_crit` by restarted Lanczos.
///
/// The iteration starts from the uniform vector, which is even under the
/// global spin flip and under translations; the Hamiltonian preserves both,
/// so the result is the Z₂-even ground state even when the odd partner is
/// nearly degenerate. `⟨M⟩ = 0` is checked on the way out.
pub fn ground_state(spec: &QuantumModelSpec, opts: LanczosOptions) -> Result<GroundState> {
    if spec.field != 0.0 {
        return Err(Error::Protocol(format!(
            "ground state preparation is at h = 0, got h = {}",
            spec.field
        )));
    }
    let ham = TfimHamiltonian::new(spec);
    let dim = ham.dim();
    let m_max = opts.krylov_dim.clamp(2, dim);
    let mut start = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for restart in 0..opts.max_restarts {
        basis.clear();
        basis.push(start);
        let mut alphas = Vec::with_capacity(m_max);
        let mut betas: Vec<f64> = Vec::with_capacity(m_max);
        for j in 0..m_max {
            ham.apply_into(&basis[j], &mut w);
            let alpha = linalg::dot_real(&basis[j], &w);
            alphas.push(alpha);
            reorthogonalize(&basis, &mut w);
            let beta = linalg::norm_real(&w);
            if j + 1 == m_max || beta <= 1e-13 * alpha.abs().max(1.0) {
                break;
            }
            betas.push(beta);
            let mut next = w.clone();
            linalg::scale(1.0 / beta, &mut next);
            basis.push(next);
        }
        let (values, vectors) = tridiagonal_eigen(&alphas, &betas);
        let energy = values[0];
        let mut ritz = vec![0.0; dim];
        for (k, v) in basis.iter().enumerate() {
            linalg::axpy(vectors[(k, 0)], v, &mut ritz);
        }
        let norm = linalg::norm_real(&ritz);
        let sign = if ritz.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        linalg::scale(sign / norm, &mut ritz);

        ham.apply_into(&ritz, &mut w);
        linalg::axpy(-energy, &ritz, &mut w);
        last_residual = linalg::norm_real(&w);
        if last_residual <= opts.residual_tol {
            let state = StateVector::new(
                ham.n_sites(),
                ritz.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            )?;
            let m = state.measure_m();
            if m.abs() > 1e-8 {
                return Err(Error::Numerical {
                    message: format!("ground state is not Z2-even: <M> = {m:.3e}"),
                    residual: last_residual,
                });
            }
            return Ok(GroundState {
                energy,
                state,
                residual: last_residual,
                restarts: restart,
            });
        }
        start = ritz;
    }
    Err(Error::Numerical {
        message: format!("Lanczos did not converge in {} restarts", opts.max_restarts),
        residual: last_residual,
    })
}
