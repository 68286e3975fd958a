use num_complex::Complex64;

use super::{linalg, QuantumModelSpec, StateVector};
use crate::error::{argument, Result};

/// `M(s) = Σ_i σ^z_i` for basis index `s` (set bits are down spins).
#[inline]
pub fn magnetization_of(n_sites: usize, s: usize) -> i64 {
    n_sites as i64 - 2 * s.count_ones() as i64
}

/// Matrix-free TFIM Hamiltonian: a stored diagonal (`ZZ` and field parts)
/// plus the bit-flip action of `-g Σ X_i`.
#[derive(Debug, Clone)]
pub struct TfimHamiltonian {
    n_sites: usize,
    transverse: f64,
    diagonal: Vec<f64>,
}

pub(crate) trait Amplitude:
    Copy + Send + Sync + std::ops::Add<Output = Self> + std::ops::Mul<f64, Output = Self> + std::ops::Sub<Output = Self>
{
    const ZERO: Self;
}

impl Amplitude for f64 {
    const ZERO: Self = 0.0;
}

impl Amplitude for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
}

impl TfimHamiltonian {
    pub fn new(spec: &QuantumModelSpec) -> Self {
        let g = &spec.geometry;
        let bonds: Vec<(usize, usize)> = (0..g.sites())
            .flat_map(|i| (0..g.dim()).map(move |axis| (i, g.forward(i, axis))))
            .collect();
        Self::with_bonds(g.sites(), &bonds, spec.coupling, spec.transverse, spec.field)
    }

    /// Hamiltonian on an explicit bond list.
    pub fn with_bonds(n_sites: usize, bonds: &[(usize, usize)], coupling: f64, transverse: f64, field: f64) -> Self {
        let mut diagonal = vec![0.0; 1usize << n_sites];
        linalg::for_each_chunk_mut(&mut diagonal, |offset, chunk| {
            for (k, d) in chunk.iter_mut().enumerate() {
                let s = offset + k;
                let zz: i64 = bonds
                    .iter()
                    .map(|&(a, b)| if ((s >> a) ^ (s >> b)) & 1 == 0 { 1 } else { -1 })
                    .sum();
                *d = -coupling * zz as f64 - field * magnetization_of(n_sites, s) as f64;
            }
        });
        Self {
            n_sites,
            transverse,
            diagonal,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `out = H input`.
    pub(crate) fn apply_into<T: Amplitude>(&self, input: &[T], out: &mut [T]) {
        let n = self.n_sites;
        let g = self.transverse;
        let diag = &self.diagonal;
        linalg::for_each_chunk_mut(out, |offset, chunk| {
            for (k, o) in chunk.iter_mut().enumerate() {
                let s = offset + k;
                let mut flips = T::ZERO;
                for i in 0..n {
                    flips = flips + input[s ^ (1 << i)];
                }
                *o = input[s] * diag[s] - flips * g;
            }
        });
    }

    /// `H|ψ⟩` as a new (unnormalized) amplitude vector.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        if state.n_sites() != self.n_sites {
            return Err(argument(format!(
                "state has {} sites, Hamiltonian has {}",
                state.n_sites(),
                self.n_sites
            )));
        }
        let mut out = vec![Complex64::ZERO; self.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        Ok(out)
    }

    /// `⟨ψ|H|ψ⟩`, complex so callers can check the imaginary part.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        let h_psi = self.apply(state)?;
        Ok(linalg::dot(state.amplitudes(), &h_psi))
    }
}

/// `H|ψ⟩` for a model spec.
pub fn apply_hamiltonian(spec: &QuantumModelSpec, state: &StateVector) -> Result<Vec<Complex64>> {
    TfimHamiltonian::new(spec).apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGeometry;
    use crate::rng;
    use rand::Rng;

    fn chain(l: usize, g: f64, h: f64) -> QuantumModelSpec {
        QuantumModelSpec::new(LatticeGeometry::new(1, l).unwrap(), 1.0, g, h).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut r = rng::stream(seed, 0);
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5))
            .collect();
        let norm = linalg::norm(&amps);
        StateVector::new(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn single_spin_is_pure_x() {
        let ham = TfimHamiltonian::with_bonds(1, &[], 1.0, 1.0, 0.0);
        let up = StateVector::basis(1, 0).unwrap();
        let out = ham.apply(&up).unwrap();
        assert_eq!(out, vec![Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]);
    }

    #[test]
    fn expectation_is_real() {
        for (l, seed) in [(4, 1), (6, 2), (9, 3)] {
            let ham = TfimHamiltonian::new(&chain(l, 1.0, 0.3));
            let e = ham.expectation(&random_state(l, seed)).unwrap();
            assert!(e.im.abs() <= 1e-12 * e.re.abs().max(1.0), "{e}");
        }
    }

    #[test]
    fn dimension_mismatch() {
        let ham = TfimHamiltonian::new(&chain(4, 1.0, 0.0));
        assert!(ham.apply(&StateVector::x_polarized(5)).is_err());
    }

    #[test]
    fn all_up_diagonal() {
        let ham = TfimHamiltonian::new(&chain(5, 1.0, 0.25));
        assert_eq!(ham.diagonal[0], -5.0 - 0.25 * 5.0);
        let sq = QuantumModelSpec::new(LatticeGeometry::new(2, 3).unwrap(), 1.0, 3.044, 0.0).unwrap();
        assert_eq!(TfimHamiltonian::new(&sq).diagonal[0], -18.0);
    }
}
