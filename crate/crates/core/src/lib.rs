//! Sudden symmetry-breaking field quenches at Ising critical points.
//!
//! The crate prepares critical initial states (Wolff-equilibrated Gibbs
//! states for classical lattices, exact ground states for small
//! transverse-field chains), switches on a longitudinal field `h`, and records
//! the order-parameter fluctuations `⟨M²(t)⟩`. The [`collapse`] module then
//! searches for the exponent `w` that collapses `L^{-κ}⟨M²⟩` onto a single
//! function of `ĥ·t̂^w`.
//!
//! Data-parallel loops (realizations, window ensembles, Hamiltonian
//! applications) go through [`exec`]; build without the default `parallel`
//! feature for a purely sequential crate. Results are identical either way.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod collapse;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod quantum;
pub mod rng;
pub mod scaling;
pub mod series;
pub mod synthetic;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use lattice::{LatticeGeometry, SpinConfiguration};
pub use scaling::CriticalConstants;
pub use series::{EnsembleSeries, Family, SeriesLabel, TimeUnit};
