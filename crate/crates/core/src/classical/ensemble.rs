use super::dynamics::{threshold, wolff_add_probability, wolff_equilibrate, wolff_update, GlauberKernel};
use super::{ClassicalModelSpec, QuenchSchedule};
use crate::error::{argument, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::lattice::SpinConfiguration;
use crate::rng;
use crate::series::{mean_and_stderr, EnsembleSeries, Family, SeriesLabel, TimeUnit};

/// Pre-quench equilibration budget.
///
/// At least `updates` Wolff flips are performed, and more if fewer than
/// `min_sweeps · N` spins have been flipped by then; the run is then repeated
/// for the same number of updates (see [`wolff_equilibrate`]). Cluster sizes
/// shrink relative to `N` in higher dimensions, so a fixed update count alone
/// under-equilibrates 4D lattices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibration {
    pub updates: usize,
    pub min_sweeps: f64,
}

impl Equilibration {
    /// `5·L` Wolff updates and at least 10 sweep-equivalents of flipped spins.
    pub fn default_for(size: usize) -> Self {
        Self {
            updates: 5 * size,
            min_sweeps: 10.0,
        }
    }
}

/// One quench realization, recorded at the schedule times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub label: SeriesLabel,
    pub schedule: QuenchSchedule,
    pub magnetization: Vec<i64>,
    pub m2: Vec<u64>,
    /// `H_crit` (without the field term) at each record time.
    pub energy: Vec<f64>,
    /// `(master seed, realization index)` of the random stream.
    pub seed: (u64, u64),
}

/// Equilibrate at `h = 0`, then switch on `spec.field` and evolve with Glauber
/// sweeps. Fully determined by `(seed, index)`.
pub fn run_quench_realization(
    spec: &ClassicalModelSpec,
    schedule: &QuenchSchedule,
    equil: Equilibration,
    seed: u64,
    index: u64,
) -> Result<Trajectory> {
    let mut r = rng::stream(seed, index);
    let critical = spec.with_field(0.0)?;
    let mut config = SpinConfiguration::random(spec.geometry.clone(), &mut r);
    wolff_equilibrate(&mut config, &critical, equil.updates, equil.min_sweeps, &mut r)?;

    let kernel = GlauberKernel::new(spec);
    let mut m = config.total_magnetization();
    let mut bonds = config.bond_sum();
    let mut out_m = Vec::with_capacity(schedule.len());
    let mut out_e = Vec::with_capacity(schedule.len());
    let mut t = 0u64;
    for &target in schedule.times() {
        while t < target {
            let (dm, db) = kernel.sweep(&mut config, &mut r);
            m += dm;
            bonds += db;
            t += 1;
        }
        out_m.push(m);
        out_e.push(-spec.coupling * bonds as f64);
    }
    let m2 = out_m.iter().map(|&v| v.unsigned_abs().pow(2)).collect();
    Ok(Trajectory {
        label: SeriesLabel {
            family: Family::Classical,
            dim: spec.geometry.dim(),
            size: spec.geometry.size(),
            field: spec.field,
        },
        schedule: schedule.clone(),
        magnetization: out_m,
        m2,
        energy: out_e,
        seed: (seed, index),
    })
}

/// `n_realizations` independent quenches, realization `i` on stream `(seed, i)`.
pub fn simulate_ensemble(
    spec: &ClassicalModelSpec,
    schedule: &QuenchSchedule,
    equil: Equilibration,
    n_realizations: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<Vec<Trajectory>> {
    if n_realizations == 0 {
        return Err(argument("n_realizations must be at least 1"));
    }
    map_indexed(mode, n_realizations, |i| {
        run_quench_realization(spec, schedule, equil, seed, i as u64)
    })
    .into_iter()
    .collect()
}

/// Simulate and reduce to `⟨M²(t)⟩` in one step.
pub fn run_ensemble(
    spec: &ClassicalModelSpec,
    schedule: &QuenchSchedule,
    equil: Equilibration,
    n_realizations: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<EnsembleSeries> {
    let trajectories = simulate_ensemble(spec, schedule, equil, n_realizations, seed, mode)?;
    ensemble_average(&trajectories)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Magnetization,
    MagnetizationSquared,
    Energy,
}

fn check_compatible(trajectories: &[Trajectory]) -> Result<&Trajectory> {
    let first = trajectories
        .first()
        .ok_or_else(|| argument("at least one trajectory is required"))?;
    for t in trajectories {
        if t.schedule != first.schedule {
            return Err(argument("trajectories have mismatched schedules"));
        }
        if t.label != first.label {
            return Err(argument(format!("mixed labels {} and {}", first.label, t.label)));
        }
    }
    Ok(first)
}

/// Per-time sample mean and standard error of an observable, reduced in
/// realization order.
pub fn observable_stats(trajectories: &[Trajectory], obs: Observable) -> Result<(Vec<f64>, Vec<f64>)> {
    let first = check_compatible(trajectories)?;
    let mut means = Vec::with_capacity(first.schedule.len());
    let mut errs = Vec::with_capacity(first.schedule.len());
    let mut column = Vec::with_capacity(trajectories.len());
    for k in 0..first.schedule.len() {
        column.clear();
        column.extend(trajectories.iter().map(|t| match obs {
            Observable::Magnetization => t.magnetization[k] as f64,
            Observable::MagnetizationSquared => t.m2[k] as f64,
            Observable::Energy => t.energy[k],
        }));
        let (m, e) = mean_and_stderr(&column);
        means.push(m);
        errs.push(e);
    }
    Ok((means, errs))
}

/// Reduce trajectories to the ensemble `⟨M²(t)⟩` series.
pub fn ensemble_average(trajectories: &[Trajectory]) -> Result<EnsembleSeries> {
    let first = check_compatible(trajectories)?;
    let (mean, err) = observable_stats(trajectories, Observable::MagnetizationSquared)?;
    EnsembleSeries::new(
        first.label,
        TimeUnit::Mcs,
        first.schedule.times().iter().map(|&t| t as f64).collect(),
        mean,
        err,
        trajectories.len(),
    )
}

/// Equilibrium measurement at `h = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquilibriumSample {
    pub magnetization: i64,
    pub bond_sum: i64,
}

/// Zero-field equilibrium samples from `n_chains` independent Wolff chains.
///
/// Each chain is equilibrated with `equil`, then measured every `k` Wolff
/// updates, `k` being `spacing_sweeps · N` over the mean cluster size seen
/// during equilibration. Chain `c` uses
/// stream `(seed, c)`; samples are returned chain by chain.
pub fn sample_equilibrium(
    spec: &ClassicalModelSpec,
    equil: Equilibration,
    n_samples: usize,
    spacing_sweeps: f64,
    n_chains: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<Vec<EquilibriumSample>> {
    if n_chains == 0 || n_samples == 0 {
        return Err(argument("need at least one chain and one sample"));
    }
    let spec = spec.with_field(0.0)?;
    let per_chain = n_samples.div_ceil(n_chains);
    let chains: Result<Vec<Vec<EquilibriumSample>>> = map_indexed(mode, n_chains, |c| {
        let mut r = rng::stream(seed, c as u64);
        let mut config = SpinConfiguration::random(spec.geometry.clone(), &mut r);
        let burn_in = wolff_equilibrate(&mut config, &spec, equil.updates, equil.min_sweeps, &mut r)?;
        let add = threshold(wolff_add_probability(&spec));
        let target = spacing_sweeps * spec.geometry.sites() as f64;
        let spacing = (target / burn_in.mean_cluster_size()).ceil().max(1.0) as usize;
        let mut stack = Vec::new();
        let mut out = Vec::with_capacity(per_chain);
        for _ in 0..per_chain {
            for _ in 0..spacing {
                wolff_update(&mut config, add, &mut stack, &mut r);
            }
            out.push(EquilibriumSample {
                magnetization: config.total_magnetization(),
                bond_sum: config.bond_sum(),
            });
        }
        Ok(out)
    })
    .into_iter()
    .collect();
    let mut all: Vec<EquilibriumSample> = chains?.into_iter().flatten().collect();
    all.truncate(n_samples);
    Ok(all)
}
