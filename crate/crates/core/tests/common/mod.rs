#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Periodic nearest-neighbor bonds of an `L^d` lattice from coordinate arithmetic.
pub fn periodic_bonds(dim: usize, size: usize) -> Vec<(usize, usize)> {
    let n = size.pow(dim as u32);
    let mut bonds = Vec::new();
    for site in 0..n {
        let mut coords = vec![0usize; dim];
        let mut rest = site;
        for axis in (0..dim).rev() {
            coords[axis] = rest % size;
            rest /= size;
        }
        for axis in 0..dim {
            let mut c = coords.clone();
            c[axis] = (c[axis] + 1) % size;
            let j = c.iter().fold(0, |acc, &v| acc * size + v);
            bonds.push((site, j));
        }
    }
    bonds
}

/// `op` acting on `site` of an `n`-site register, site 0 the least significant bit.
fn embed(op: &DMatrix<f64>, site: usize, n: usize) -> DMatrix<f64> {
    let eye = DMatrix::<f64>::identity(2, 2);
    let mut out = DMatrix::<f64>::identity(1, 1);
    for k in (0..n).rev() {
        out = out.kronecker(if k == site { op } else { &eye });
    }
    out
}

fn pauli_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Bit clear = spin up = +1.
fn pauli_z() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `H = −J Σ Z_i Z_j − g Σ X_i − h Σ Z_i` by Kronecker products.
pub fn dense_tfim(n: usize, bonds: &[(usize, usize)], j: f64, g: f64, h: f64) -> DMatrix<f64> {
    let dim = 1 << n;
    let z: Vec<DMatrix<f64>> = (0..n).map(|i| embed(&pauli_z(), i, n)).collect();
    let mut ham = DMatrix::<f64>::zeros(dim, dim);
    for &(a, b) in bonds {
        ham -= j * (&z[a] * &z[b]);
    }
    for (i, zi) in z.iter().enumerate() {
        ham -= g * embed(&pauli_x(), i, n);
        ham -= h * zi;
    }
    ham
}

pub fn dense_m2(n: usize) -> DMatrix<f64> {
    let m = (0..n).fold(DMatrix::<f64>::zeros(1 << n, 1 << n), |acc, i| acc + embed(&pauli_z(), i, n));
    &m * &m
}

pub fn expectation(op: &DMatrix<f64>, psi: &[Complex64]) -> f64 {
    let re = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.re));
    let im = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.im));
    re.dot(&(op * &re)) + im.dot(&(op * &im))
}

/// `exp(−iHt) ψ` through the eigendecomposition of the real symmetric `H`.
pub struct DenseEvolution {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl DenseEvolution {
    pub fn new(ham: DMatrix<f64>) -> Self {
        Self { eig: SymmetricEigen::new(ham) }
    }

    pub fn ground_energy(&self) -> f64 {
        self.eig.eigenvalues.min()
    }

    pub fn ground_state(&self) -> Vec<Complex64> {
        let k = self.eig.eigenvalues.imin();
        self.eig.eigenvectors.column(k).iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let v = &self.eig.eigenvectors;
        let dim = psi.len();
        let coeffs: Vec<Complex64> = (0..dim)
            .map(|k| {
                let c: Complex64 = (0..dim).map(|s| psi[s] * v[(s, k)]).sum();
                c * Complex64::from_polar(1.0, -self.eig.eigenvalues[k] * t)
            })
            .collect();
        (0..dim).map(|s| (0..dim).map(|k| coeffs[k] * v[(s, k)]).sum()).collect()
    }
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
