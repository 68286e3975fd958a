//! Fast self-checks of the invariants the simulation and analysis rely on.

use critquench::classical::{glauber_flip_probability, run_ensemble, ClassicalModelSpec, Equilibration, QuenchSchedule};
use critquench::collapse::{estimate_w, AnalysisParams};
use critquench::quantum::{evolve, run_quantum_quench, QuantumModelSpec, StateVector, TfimHamiltonian};
use critquench::rng::stream;
use critquench::scaling::CriticalConstants;
use critquench::synthetic::{covering_times, make_synthetic, ScalingFunction, SyntheticSpec};
use critquench::{ExecMode, Family, LatticeGeometry, SpinConfiguration};
use num_complex::Complex64;
use rand::Rng;

type Check = (&'static str, fn() -> Result<(), String>);

fn flip_energy() -> Result<(), String> {
    let geometry = LatticeGeometry::new(3, 4).map_err(|e| e.to_string())?;
    let mut rng = stream(1, 0);
    let mut config = SpinConfiguration::random(geometry.clone(), &mut rng);
    for site in 0..geometry.sites() {
        let before = config.bond_energy(1.0);
        let expected = 2.0 * f64::from(config.spin(site)) * config.local_field_sum(site).map_err(|e| e.to_string())? as f64;
        config.flip(site);
        let change = config.bond_energy(1.0) - before;
        if (change - expected).abs() > 1e-12 {
            return Err(format!("site {site}: dE {change} vs {expected}"));
        }
    }
    Ok(())
}

fn detailed_balance() -> Result<(), String> {
    let beta = 1.0 / 4.5115;
    for de in [-12.0, -4.0, 0.5, 2.0, 8.0] {
        let ratio = glauber_flip_probability(beta, de) / glauber_flip_probability(beta, -de);
        if (ratio / (-beta * de).exp() - 1.0).abs() > 1e-12 {
            return Err(format!("dE = {de}: ratio {ratio}"));
        }
    }
    Ok(())
}

fn hermiticity() -> Result<(), String> {
    let spec = QuantumModelSpec::new(LatticeGeometry::new(1, 6).map_err(|e| e.to_string())?, 1.0, 1.0, 0.3).map_err(|e| e.to_string())?;
    let ham = TfimHamiltonian::new(&spec);
    let mut rng = stream(2, 0);
    let mut random = || {
        let amps = (0..64).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        StateVector::new(6, amps).expect("64 amplitudes")
    };
    let (a, b) = (random(), random());
    let ha = ham.apply(&a).map_err(|e| e.to_string())?;
    let hb = ham.apply(&b).map_err(|e| e.to_string())?;
    let lhs: Complex64 = a.amplitudes().iter().zip(&hb).map(|(x, y)| x.conj() * y).sum();
    let rhs: Complex64 = ha.iter().zip(b.amplitudes()).map(|(x, y)| x.conj() * y).sum();
    if (lhs - rhs).norm() > 1e-10 {
        return Err(format!("<a|Hb> = {lhs}, <Ha|b> = {rhs}"));
    }
    Ok(())
}

fn unitarity() -> Result<(), String> {
    let spec = QuantumModelSpec::new(LatticeGeometry::new(1, 8).map_err(|e| e.to_string())?, 1.0, 1.0, 0.2).map_err(|e| e.to_string())?;
    let psi = evolve(&StateVector::x_polarized(8), &spec, 2.0, 1e-12).map_err(|e| e.to_string())?;
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(format!("norm {}", psi.norm()));
    }
    Ok(())
}

fn quantum_stationarity() -> Result<(), String> {
    let spec = QuantumModelSpec::new(LatticeGeometry::new(1, 8).map_err(|e| e.to_string())?, 1.0, 1.0, 0.0).map_err(|e| e.to_string())?;
    let run = run_quantum_quench(&spec, &[0.0, 1.0, 2.0, 4.0], 1e-12).map_err(|e| e.to_string())?;
    let m0 = run.series.mean_m2[0];
    match run.series.mean_m2.iter().find(|m| (*m - m0).abs() > 1e-8 * m0) {
        Some(m) => Err(format!("<M^2> moved from {m0} to {m}")),
        None => Ok(()),
    }
}

fn parallel_matches_sequential() -> Result<(), String> {
    let spec = ClassicalModelSpec::new(LatticeGeometry::new(2, 6).map_err(|e| e.to_string())?, 1.0, 2.269, 0.1).map_err(|e| e.to_string())?;
    let schedule = QuenchSchedule::log_spaced(20, 5).map_err(|e| e.to_string())?;
    let run = |mode| run_ensemble(&spec, &schedule, Equilibration::default_for(6), 16, 3, mode).map_err(|e| e.to_string());
    if run(ExecMode::Parallel)? != run(ExecMode::Sequential)? {
        return Err("ensembles differ".into());
    }
    Ok(())
}

fn synthetic_recovery() -> Result<(), String> {
    let constants = CriticalConstants::defaults(Family::Classical, 3).map_err(|e| e.to_string())?;
    let (sizes, fields) = (vec![8, 12, 16], vec![0.01, 0.04]);
    let times = covering_times(&constants, &sizes, &fields, 1.0, (1e-4, 1e2), 20).map_err(|e| e.to_string())?;
    let spec = SyntheticSpec {
        sizes,
        fields,
        w_star: 1.0,
        function: ScalingFunction::Rational { scale: 1.0 },
        noise: 0.0,
        seed: 0,
        times,
    };
    let series = make_synthetic(&spec, &constants).map_err(|e| e.to_string())?;
    let r = estimate_w(&series, &constants, &AnalysisParams::default(), ExecMode::available()).map_err(|e| e.to_string())?;
    if (r.w_rep - 1.0).abs() > 1e-2 {
        return Err(format!("w_rep = {}", r.w_rep));
    }
    Ok(())
}

const CHECKS: [Check; 7] = [
    ("single-flip energy change", flip_energy),
    ("glauber detailed balance", detailed_balance),
    ("hamiltonian hermiticity", hermiticity),
    ("krylov unitarity", unitarity),
    ("zero-field quantum stationarity", quantum_stationarity),
    ("parallel equals sequential", parallel_matches_sequential),
    ("synthetic collapse recovery", synthetic_recovery),
];

/// Run every check, printing one line each; returns the failures.
pub fn run_checks(mut out: impl std::io::Write) -> Vec<String> {
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => {
                let _ = writeln!(out, "PASS {name}");
            }
            Err(msg) => {
                let _ = writeln!(out, "FAIL {name}: {msg}");
                failed.push(name.to_string());
            }
        }
    }
    failed
}
