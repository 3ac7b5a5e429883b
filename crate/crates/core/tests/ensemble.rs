use spinarrival::dynamics::SolverConfig;
use spinarrival::ensemble::{
    run_ensemble, sample_initial, summarize, EnsembleError, Entry, Histogram, MAX_FAILURE_FRACTION,
};
use spinarrival::state::{SpinOrientation, WaveguideParams};
use std::f64::consts::PI;

#[test]
fn born_sample_moments() {
    let omega = 100.0;
    let params = WaveguideParams::new(10.0, omega).unwrap();
    let n = 1_000_000;
    let pts = sample_initial(n, &params, 2024);
    let nf = n as f64;
    let mean_z = pts.iter().map(|p| p.z).sum::<f64>() / nf;
    let var_z = pts.iter().map(|p| (p.z - mean_z).powi(2)).sum::<f64>() / (nf - 1.0);
    let rho2: Vec<f64> = pts.iter().map(|p| p.x * p.x + p.y * p.y).collect();
    let mean_rho2 = rho2.iter().sum::<f64>() / nf;

    let exact_var_z = 1.0 / 12.0 - 1.0 / (2.0 * PI * PI);
    assert!((mean_z - 0.5).abs() < 3.0 * (exact_var_z / nf).sqrt(), "mean z {mean_z}");
    // Var of (z - 1/2)^2 is bounded by 1/16, which bounds the spread of the variance estimate
    assert!((var_z - exact_var_z).abs() < 3.0 * (1.0 / 16.0 / nf).sqrt(), "var z {var_z}");
    // x^2 + y^2 is exponential with mean 1/omega, variance 1/omega^2
    assert!((mean_rho2 - 1.0 / omega).abs() < 3.0 / omega / nf.sqrt(), "mean rho^2 {mean_rho2}");
    assert!(pts.iter().all(|p| p.z > 0.0 && p.z < 1.0));
}

fn small_run(n: usize, threads: Option<usize>) -> spinarrival::ensemble::EnsembleResult {
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    let spin = SpinOrientation::new(1.2, 0.5).unwrap();
    run_ensemble(n, spin, params, &SolverConfig::for_length(10.0), 99, threads).unwrap()
}

#[test]
fn worker_count_does_not_change_records() {
    let one = small_run(64, Some(1));
    let three = small_run(64, Some(3));
    let default = small_run(64, None);
    assert_eq!(one, three);
    assert_eq!(one, default);
}

#[test]
fn smaller_runs_are_prefixes() {
    let big = small_run(48, Some(2));
    let small = small_run(20, Some(2));
    assert_eq!(big.prefix(20), small);
}

#[test]
fn censored_trajectories_are_counted() {
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    // a horizon just past the lobe region leaves most of the main lobe unseen
    let cfg = SolverConfig {
        t_max: 3.0,
        ..SolverConfig::for_length(10.0)
    };
    let n = 200;
    let r = run_ensemble(n, SpinOrientation::up(), params, &cfg, 5, None).unwrap();
    assert!(r.censored_count > 0 && r.censored_count < n);
    let taus = r.arrival_times();
    let hist = Histogram::default_for(&taus, 50);
    assert_eq!(hist.total() as usize + r.censored_count + r.failed_count, n);
    assert_eq!(r.censored_count, r.records.iter().filter(|e| e.is_censored()).count());
    let stats = summarize(&r).unwrap();
    assert_eq!(stats.arrivals + stats.censored, n);
    assert!((stats.arrival_fraction - taus.len() as f64 / n as f64).abs() < 1e-15);
    assert!(stats.tau_max <= 3.0 && stats.mean <= stats.tau_max);
}

#[test]
fn spin_up_arrives_before_horizon() {
    let params = WaveguideParams::new(100.0, 1000.0).unwrap();
    let r = run_ensemble(1000, SpinOrientation::up(), params, &SolverConfig::for_length(100.0), 8, None).unwrap();
    let stats = summarize(&r).unwrap();
    assert!(stats.arrival_fraction >= 0.999, "{}", stats.arrival_fraction);
}

#[test]
fn excessive_failures_abort_the_run() {
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    let cfg = SolverConfig {
        max_steps: 5,
        ..SolverConfig::for_length(10.0)
    };
    match run_ensemble(50, SpinOrientation::up(), params, &cfg, 1, None) {
        Err(EnsembleError::FailureRate { failed, total, limit, .. }) => {
            assert_eq!((failed, total), (50, 50));
            assert_eq!(limit, MAX_FAILURE_FRACTION);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn records_keep_their_initial_points() {
    let r = small_run(16, None);
    let pts = sample_initial(16, &r.params, r.seed);
    for (e, p) in r.records.iter().zip(&pts) {
        assert_eq!(e.initial(), *p);
        assert!(matches!(e, Entry::Finished(_)));
    }
}
