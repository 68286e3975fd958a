use super::{ground_state, LanczosOptions, Propagator, QuantumModelSpec};
use crate::error::{argument, Result};
use crate::series::{EnsembleSeries, Family, SeriesLabel, TimeUnit};

/// A deterministic quantum quench run with its conservation diagnostics.
#[derive(Debug, Clone)]
pub struct QuantumQuench {
    /// `⟨M²(t)⟩` on the `Jt` axis (`n_realizations = 1`, zero stderr).
    pub series: EnsembleSeries,
    pub magnetization: Vec<f64>,
    /// `⟨H⟩` of the post-quench Hamiltonian at each record time.
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
    pub ground_energy: f64,
}

/// Prepare the `h = 0` ground state of `spec` and evolve it under `spec.field`.
///
/// `record_times` are in units of `Jt`; they must start at 0 and increase.
pub fn run_quantum_quench(spec: &QuantumModelSpec, record_times: &[f64], tol: f64) -> Result<QuantumQuench> {
    if record_times.first() != Some(&0.0) {
        return Err(argument("record times must start at 0"));
    }
    if record_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(argument("record times must be strictly increasing"));
    }
    let gs = ground_state(&spec.with_field(0.0)?, LanczosOptions::default())?;
    let prop = Propagator::new(spec, tol)?;
    let mut psi = gs.state;
    let n = record_times.len();
    let (mut m2, mut m, mut energy, mut norm) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    let mut now = 0.0;
    for &t in record_times {
        prop.step(&mut psi, (t - now) / spec.coupling)?;
        now = t;
        m2.push(psi.measure_m2());
        m.push(psi.measure_m());
        energy.push(prop.energy(&psi)?);
        norm.push(psi.norm());
    }
    let label = SeriesLabel {
        family: Family::Quantum,
        dim: spec.geometry.dim(),
        size: spec.geometry.size(),
        field: spec.field,
    };
    Ok(QuantumQuench {
        series: EnsembleSeries::new(label, TimeUnit::Jt, record_times.to_vec(), m2, vec![0.0; n], 1)?,
        magnetization: m,
        energy,
        norm,
        ground_energy: gs.energy,
    })
}
