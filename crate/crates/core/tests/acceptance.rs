//! Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! `ACCEPTANCE_ONLY=1,6,8` restricts the run to the listed criteria.

mod common;

use spinarrival::commands::{self, RunOptions};
use spinarrival::config::ExperimentConfig;
use spinarrival::dynamics::{integrate_trajectory, SolverConfig};
use spinarrival::ensemble::{
    derive_seed, expected_lobe_population, lobe_interval, occupied_lobes, resolvable_lobes, run_ensemble,
    sample_point, summarize, windows_below, EnsembleResult, WINDOW_BIN_FRACTION, WINDOW_MIN_FRACTION,
};
use spinarrival::quadrature::{integrate, integrate_to_infinity, Tolerance};
use spinarrival::reference::{flux_cdf, flux_density, semiclassical_density};
use spinarrival::state::{Position3, SpinOrientation, UnitSystem, WaveguideParams};
use spinarrival::stats::{
    ks_critical_one_sample, ks_critical_two_sample, ks_one_sample_censored, ks_two_sample, linear_fit,
};
use spinarrival::w_evolution;
use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI, TAU};
use std::time::Instant;

const SEED_SPIN_UP: u64 = 1001;
const SEED_SPIN_UP_LOW_OMEGA: u64 = 1002;
const SEED_UP_DOWN: u64 = 1003;
const SEED_SYMMETRY: u64 = 1004;
const SEED_MEAN_DIP: u64 = 1005;
const SEED_SWEEP: u64 = 1006;

const L100: f64 = 100.0;

type Check = (bool, String);
type Criterion = (u32, &'static str, fn(&mut Runs) -> Check);

/// Ensembles shared between criteria. A run of size `n` is the prefix of any
/// larger run with the same seed, so only the largest request is computed.
#[derive(Default)]
struct Runs {
    cache: HashMap<&'static str, EnsembleResult>,
}

impl Runs {
    fn get(&mut self, key: &'static str, n: usize, spin: SpinOrientation, params: WaveguideParams, seed: u64) -> EnsembleResult {
        if let Some(r) = self.cache.get(key) {
            if r.len() >= n {
                return r.prefix(n);
            }
        }
        let cfg = SolverConfig::for_length(params.length);
        let r = run_ensemble(n, spin, params, &cfg, seed, None).expect("ensemble runs");
        self.cache.insert(key, r.clone());
        r
    }

    fn spin_up(&mut self, n: usize) -> EnsembleResult {
        let params = WaveguideParams::new(L100, 1e3).unwrap();
        self.get("spin_up", n, SpinOrientation::up(), params, SEED_SPIN_UP)
    }

    fn up_down(&mut self, n: usize) -> EnsembleResult {
        let params = WaveguideParams::new(L100, 1e3).unwrap();
        self.get("up_down", n, SpinOrientation::up_down(), params, SEED_UP_DOWN)
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn c1_spin_up_flux(runs: &mut Runs) -> Check {
    let n = 10_000;
    let r = runs.spin_up(n);
    let taus = sorted(r.arrival_times());
    let cdf = flux_cdf(&taus, L100).unwrap();
    let horizon = r.solver.t_max;
    let at_horizon = cdf.last().unwrap()
        + integrate(|t: f64| flux_density(t, L100), *taus.last().unwrap(), horizon, Tolerance::new(1e-14, 1e-10)).value;
    let d = ks_one_sample_censored(&cdf, n, at_horizon);
    let limit = 0.0163;
    (
        d < limit,
        format!(
            "KS D = {d:.5} (limit {limit}, asymptotic 1% value {:.5}); censored {}",
            ks_critical_one_sample(n),
            r.censored_count
        ),
    )
}

fn c2_pinch_off(runs: &mut Runs) -> Check {
    let r = runs.up_down(10_000);
    let s = summarize(&r).unwrap();
    let ok = (40.8..=45.0).contains(&s.tau_max);
    (ok, format!("tau_max = {:.4} (window [40.8, 45.0]); mean {:.4}", s.tau_max, s.mean))
}

/// The unweighted log-log slope is dominated by the sparse upper bins: its
/// standard error is about 0.16 at 1e5 arrivals and 0.08 at 4e5, so the
/// larger run is needed for a +-0.3 window to mean something.
fn c3_tail(runs: &mut Runs) -> Check {
    let n = 400_000;
    let r = runs.spin_up(n);
    let taus = r.arrival_times();
    let (lo, hi, bins) = (150.0f64, 450.0f64, 10usize);
    let edges: Vec<f64> = (0..=bins).map(|i| lo * (hi / lo).powf(i as f64 / bins as f64)).collect();
    let mut counts = vec![0usize; bins];
    for &t in &taus {
        if (lo..hi).contains(&t) {
            let i = ((t / lo).ln() / (hi / lo).ln() * bins as f64) as usize;
            counts[i.min(bins - 1)] += 1;
        }
    }
    if counts.contains(&0) {
        return (false, format!("empty tail bin: {counts:?}"));
    }
    let x: Vec<f64> = edges.windows(2).map(|e| (e[0] * e[1]).sqrt().ln()).collect();
    let y: Vec<f64> = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| (c as f64 / (n as f64 * (e[1] - e[0]))).ln())
        .collect();
    let fit = linear_fit(&x, &y);
    let exact: Vec<f64> = edges
        .windows(2)
        .map(|e| (integrate(|t: f64| flux_density(t, L100), e[0], e[1], Tolerance::new(1e-14, 1e-10)).value / (e[1] - e[0])).ln())
        .collect();
    let exact_slope = linear_fit(&x, &exact).slope;
    let in_range: usize = counts.iter().sum();
    // maximum likelihood amplitude with the exponent held at -4
    let amplitude = in_range as f64 / (n as f64 * (lo.powi(-3) - hi.powi(-3)) / 3.0);
    let expected = 4.0 * (L100 / PI).powi(3);
    let rel = amplitude / expected - 1.0;
    let ok = (fit.slope + 4.0).abs() <= 0.3 && rel.abs() <= 0.15;
    (
        ok,
        format!(
            "slope {:.3} (target -4 +- 0.3; the flux itself gives {exact_slope:.3} on these bins); amplitude {:.4e} vs {:.4e} ({:+.1}%, limit 15%); {in_range} of {n} arrivals in [150, 450]",
            fit.slope,
            amplitude,
            expected,
            100.0 * rel
        ),
    )
}

fn c4_omega_independence(runs: &mut Runs) -> Check {
    let n = 10_000;
    let high = runs.spin_up(n).arrival_times();
    let params = WaveguideParams::new(L100, 1e2).unwrap();
    let low = runs
        .get("spin_up_low_omega", n, SpinOrientation::up(), params, SEED_SPIN_UP_LOW_OMEGA)
        .arrival_times();
    let d = ks_two_sample(&low, &high);
    let limit = ks_critical_two_sample(low.len(), high.len());
    (d < limit, format!("two-sample KS D = {d:.5} (limit {limit:.5}); omega 1e2 vs 1e3"))
}

/// Arrival time at tight tolerances, so that paired runs differ by the
/// symmetry alone and not by solver error (about 1e-6 relative at the
/// defaults for precessing states).
fn arrival(p: Position3, spin: SpinOrientation, params: WaveguideParams) -> f64 {
    let cfg = SolverConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..SolverConfig::for_length(params.length)
    };
    integrate_trajectory(p, spin, params, &cfg)
        .unwrap()
        .arrival_time()
        .expect("arrives before the horizon")
}

fn c5_symmetry(runs: &mut Runs) -> Check {
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    let alpha = FRAC_PI_4;
    let beta = FRAC_PI_3;
    let (mut rot, mut mirror) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let p = sample_point(i, &params, SEED_SYMMETRY);
        let base = arrival(p, SpinOrientation::new(alpha, 0.0).unwrap(), params);
        let turned = arrival(p.rotated(beta), SpinOrientation::new(alpha, beta).unwrap(), params);
        let flipped = arrival(Position3::new(-p.x, p.y, p.z), SpinOrientation::new(PI - alpha, 0.0).unwrap(), params);
        rot = rot.max((turned - base).abs() / base);
        mirror = mirror.max((flipped - base).abs() / base);
    }
    let n = 10_000;
    let a = runs
        .get("sym_a", n, SpinOrientation::new(alpha, 0.0).unwrap(), params, derive_seed(SEED_SYMMETRY, 0))
        .arrival_times();
    let b = runs
        .get("sym_b", n, SpinOrientation::new(alpha, beta).unwrap(), params, derive_seed(SEED_SYMMETRY, 1))
        .arrival_times();
    let c = runs
        .get("sym_c", n, SpinOrientation::new(PI - alpha, 0.0).unwrap(), params, derive_seed(SEED_SYMMETRY, 2))
        .arrival_times();
    let limit = ks_critical_two_sample(n, n);
    let (d_beta, d_alpha) = (ks_two_sample(&a, &b), ks_two_sample(&a, &c));
    let ok = rot <= 1e-6 && mirror <= 1e-6 && d_beta < limit && d_alpha < limit;
    (
        ok,
        format!(
            "1000 pairs: max rel |dtau| rotation {rot:.2e}, mirror {mirror:.2e} (limit 1e-6); \
             KS beta {d_beta:.5}, alpha<->pi-alpha {d_alpha:.5} (limit {limit:.5})"
        ),
    )
}

fn c6_flux_normalization(_: &mut Runs) -> Check {
    let tol = Tolerance::new(1e-13, 1e-12);
    let total = integrate(|t: f64| flux_density(t, L100), 0.0, 500.0, tol).value;
    let expected = 1.0 - 4.0 / 3.0 * (L100 / PI).powi(3) * 500f64.powi(-3);
    // the same mass as probability that has left the interval [0, L]
    let inside = integrate(|z: f64| w_evolution(z, 500.0).unwrap().norm_sqr(), 0.0, L100, tol).value;
    let err = (total - expected).abs();
    (
        err <= 1e-3,
        format!(
            "int_0^500 flux = {total:.6}, expected {expected:.6} (|diff| {err:.2e}, limit 1e-3); 1 - 2 int_0^L |W|^2 = {:.6}",
            1.0 - 2.0 * inside
        ),
    )
}

fn c7_semiclassical(_: &mut Runs) -> Check {
    let tol = Tolerance::new(1e-14, 1e-13);
    // tau = L/u
    let total = integrate_to_infinity(|u: f64| semiclassical_density(L100 / u, L100) * L100 / (u * u), 0.0, tol).value;
    let tau = 1e4;
    let ratio = semiclassical_density(tau, L100) * tau * tau / L100 / (8.0 / PI.powi(3));
    let ok = (total - 1.0).abs() <= 1e-6 && (ratio - 1.0).abs() <= 0.01;
    (
        ok,
        format!(
            "int Pi_sc = {total:.10} (limit 1 +- 1e-6); tau^2 Pi_sc / L at 1e4 = {:.5} x 8/pi^3 (limit 1%)",
            ratio
        ),
    )
}

fn c8_propagator(_: &mut Runs) -> Check {
    let mut worst: f64 = 0.0;
    for &z in &common::log_space(0.1, 150.0, 10) {
        for &t in &common::log_space(0.1, 50.0, 10) {
            let w = w_evolution(z, t).unwrap();
            worst = worst.max((w - common::w_quadrature(z, t)).norm() / w.norm());
        }
    }
    let norm_err = [0.1, 1.0, 10.0, 42.9]
        .iter()
        .map(|&t| (common::norm_quadrature(t) - 0.5).abs())
        .fold(0.0, f64::max);
    let wall = [0.1, 1.0, 10.0, 100.0]
        .iter()
        .map(|&t| w_evolution(0.0, t).unwrap().norm())
        .fold(0.0, f64::max);
    let ok = worst <= 1e-6 && norm_err <= 1e-6 && wall <= 1e-12;
    (
        ok,
        format!("oracle max rel err {worst:.2e} (1e-6); norm max |err| {norm_err:.2e} (1e-6); max |W(0,t)| {wall:.1e} (1e-12)"),
    )
}

fn c9_windows(runs: &mut Runs) -> Check {
    let r = runs.up_down(100_000);
    let taus = r.arrival_times();
    let below = L100 / TAU;
    let windows = windows_below(&taus, below, L100 * WINDOW_BIN_FRACTION, L100 * WINDOW_MIN_FRACTION);
    let lobes = occupied_lobes(&taus, L100);
    let at_edges = windows
        .iter()
        .filter(|w| (2..200).any(|k| {
            let edge = lobe_interval(L100, k).0;
            w.start < edge && edge < w.end
        }))
        .count();
    let list: Vec<String> = windows.iter().take(6).map(|w| format!("[{:.3}, {:.3}]", w.start, w.end)).collect();
    (
        windows.len() >= 3 && lobes >= 4,
        format!(
            "{} windows below L/2pi (need 3), {at_edges} contain a lobe edge L/(n pi): {}; {lobes} consecutive occupied lobes (need 4)",
            windows.len(),
            list.join(" ")
        ),
    )
}

fn c10_mean_dip(runs: &mut Runs) -> Check {
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    let n = 10_000;
    let up = summarize(&runs.get("dip_up", n, SpinOrientation::up(), params, derive_seed(SEED_MEAN_DIP, 0))).unwrap();
    let half = summarize(&runs.get("dip_half", n, SpinOrientation::up_down(), params, derive_seed(SEED_MEAN_DIP, 1))).unwrap();
    let gap = up.mean - half.mean;
    let se = up.standard_error().hypot(half.standard_error());
    (
        gap > 5.0 * se,
        format!(
            "<tau>(0) = {:.4}, <tau>(pi/2) = {:.4}; gap {gap:.4} = {:.1} combined standard errors (need 5)",
            up.mean,
            half.mean,
            gap / se
        ),
    )
}

fn c11_linear_growth(_: &mut Runs) -> Check {
    let lengths = [10.0, 20.0, 40.0, 80.0];
    let n = 2000;
    let stats: Vec<_> = lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let params = WaveguideParams::new(l, 100.0).unwrap();
            let cfg = SolverConfig::for_length(l);
            let r = run_ensemble(n, SpinOrientation::up_down(), params, &cfg, derive_seed(SEED_SWEEP, i as u64), None).unwrap();
            summarize(&r).unwrap()
        })
        .collect();
    let fit = |f: fn(&spinarrival::ensemble::SummaryStats) -> f64| {
        linear_fit(&lengths, &stats.iter().map(f).collect::<Vec<_>>())
    };
    let (m, s, t) = (fit(|s| s.mean), fit(|s| s.std), fit(|s| s.tau_max));
    let ok = m.r_squared > 0.99 && s.r_squared > 0.99 && t.r_squared > 0.99;
    (
        ok,
        format!(
            "R^2 mean {:.5} (slope {:.4}), std {:.5}, tau_max {:.5} (need > 0.99); N = {n} per L",
            m.r_squared, m.slope, s.r_squared, t.r_squared
        ),
    )
}

fn c12_lobe_arithmetic(_: &mut Runs) -> Check {
    // the constants as rounded in the source
    let rounded = UnitSystem::new(50e-6, 9.11e-31, 1.05e-34).unwrap();
    let length = rounded.from_physical_length(5e-3);
    let (coarse, fine) = (resolvable_lobes(10e-6, length, &rounded), resolvable_lobes(0.1e-6, length, &rounded));
    let codata = UnitSystem::electron(50e-6);
    let (coarse_c, fine_c) = (resolvable_lobes(10e-6, length, &codata), resolvable_lobes(0.1e-6, length, &codata));
    let pop = expected_lobe_population(100_000, 1);
    let ok = coarse == 8 && fine == 83 && (pop - 20264.0).abs() <= 1.0;
    (
        ok,
        format!(
            "lobes at 10 us: {coarse}, at 0.1 us: {fine} (need 8, 83; CODATA constants give {coarse_c}, {fine_c}); \
             lobe-1 population of 1e5: {pop:.2}"
        ),
    )
}

fn c13_determinism(runs: &mut Runs) -> Check {
    let text = r#"
[spin]
alpha = 0.0
[waveguide]
length = 100.0
omega = 1000.0
[ensemble]
n = 10000
seed = 1001
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let max = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let names = [&cfg.output.arrivals, &cfg.output.histogram, &cfg.output.summary];
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (threads, dir) in [1usize, 4, max].into_iter().zip(&dirs) {
        let opts = RunOptions {
            seed: None,
            threads: Some(threads),
            out: dir.path().to_path_buf(),
        };
        commands::simulate(&cfg, &opts).unwrap();
        outputs.push(names.iter().map(|n| std::fs::read(dir.path().join(n)).unwrap()).collect());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    // and the criterion-1 run itself, computed on the default pool
    let reference = spinarrival::output::arrivals_csv(&runs.spin_up(10_000));
    let matches_c1 = outputs[0][0] == reference.as_bytes();
    let bytes: usize = outputs[0].iter().map(Vec::len).sum();
    (
        same && matches_c1,
        format!("threads {{1, 4, {max}}}: {} files, {bytes} bytes each run, identical = {same}; arrivals equal the criterion-1 run = {matches_c1}", names.len()),
    )
}

fn main() {
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [Criterion; 13] = [
        (1, "spin-up arrivals follow the flux", c1_spin_up_flux),
        (2, "up-down pinch-off", c2_pinch_off),
        (3, "spin-up tail exponent and amplitude", c3_tail),
        (4, "spin-up independent of omega", c4_omega_independence),
        (5, "rotation and mirror symmetry", c5_symmetry),
        (6, "flux normalization", c6_flux_normalization),
        (7, "semiclassical normalization and tail", c7_semiclassical),
        (8, "propagator oracle", c8_propagator),
        (9, "no-arrival windows and lobes", c9_windows),
        (10, "mean dip at alpha = pi/2", c10_mean_dip),
        (11, "linear growth with L", c11_linear_growth),
        (12, "lobe arithmetic", c12_lobe_arithmetic),
        (13, "determinism across thread counts", c13_determinism),
    ];
    let mut runs = Runs::default();
    let mut failed = Vec::new();
    // the largest ensembles first, so smaller criteria reuse their prefixes
    let order = [9, 3, 1, 2, 4, 5, 6, 7, 8, 10, 11, 12, 13];
    let mut lines = Vec::new();
    for id in order {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let (_, name, check) = criteria[id as usize - 1];
        let start = Instant::now();
        let (pass, detail) = check(&mut runs);
        let line = format!(
            "[{}] {id:>2} {name}: {detail} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        println!("{line}");
        lines.push((id, line));
        if !pass {
            failed.push(id);
        }
    }
    lines.sort_by_key(|(id, _)| *id);
    println!("\nacceptance summary");
    for (_, line) in &lines {
        println!("{line}");
    }
    if failed.is_empty() {
        println!("all {} criteria passed", lines.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
