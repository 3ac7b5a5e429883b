use spinarrival::propagator::w_evolution;
use spinarrival::quadrature::{integrate, Tolerance};
use spinarrival::reference::{
    curve, flux_cdf, flux_density, flux_lobe_approx, flux_tail, linear_grid, log_grid, semiclassical_density,
    CurveKind,
};
use std::f64::consts::PI;

const L: f64 = 100.0;

#[test]
fn flux_is_nonnegative() {
    let grid = log_grid(0.01, 500.0, 2000);
    let c = curve(CurveKind::Flux, &grid, L).unwrap();
    assert!(c.density.iter().all(|&v| v >= -1e-12));
}

#[test]
fn main_lobe_tail() {
    let (f, tail) = (flux_density(400.0, L), flux_tail(400.0, L));
    assert!((f / tail - 1.0).abs() < 0.1, "{f} vs {tail}");
}

#[test]
fn lobe_train_at_short_times() {
    let (f, approx) = (flux_density(2.0, L), flux_lobe_approx(2.0, L).unwrap());
    assert!((approx / f - 1.0).abs() < 0.15, "{approx} vs {f}");
    // the approximation depends on L and tau only through L/tau, up to 1/L
    for &u in &[12.0, 20.5, 37.0] {
        let g = |l: f64| l * flux_lobe_approx(l / u, l).unwrap();
        assert!((g(100.0) - g(250.0)).abs() < 1e-13 * g(100.0));
    }
}

#[test]
fn semiclassical_differs_from_flux() {
    let tol = Tolerance::new(1e-9, 1e-8);
    let distance = integrate(|t: f64| (semiclassical_density(t, L) - flux_density(t, L)).abs(), 1e-3, 500.0, tol).value;
    assert!(distance > 0.2, "L1 distance {distance}");
}

#[test]
fn flux_peaks_after_lobe_edge() {
    let grid = linear_grid(0.5, 200.0, 8000);
    let peak = grid
        .iter()
        .copied()
        .max_by(|a, b| flux_density(*a, L).total_cmp(&flux_density(*b, L)))
        .unwrap();
    assert!(peak > L / (2.0 * PI), "peak at {peak}");
}

#[test]
fn refined_grid_reproduces_shared_points() {
    let coarse = log_grid(0.01, 500.0, 101);
    let mut fine = coarse.clone();
    fine.extend(coarse.windows(2).map(|p| 0.5 * (p[0] + p[1])));
    fine.sort_by(f64::total_cmp);
    for kind in CurveKind::ALL {
        if kind == CurveKind::FluxLobes {
            continue;
        }
        let a = curve(kind, &coarse, L).unwrap();
        let b = curve(kind, &fine, L).unwrap();
        for (t, v) in a.tau_grid.iter().zip(&a.density) {
            let j = b.tau_grid.iter().position(|s| s == t).unwrap();
            assert_eq!(v.to_bits(), b.density[j].to_bits(), "{kind:?} at {t}");
        }
    }
}

#[test]
fn removable_point_on_grid() {
    let c = curve(CurveKind::Semiclassical, &[L / PI - 1.0, L / PI, L / PI + 1.0], L).unwrap();
    assert!(c.density.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!((c.density[1] - PI / (2.0 * L)).abs() < 1e-15);
}

#[test]
fn cumulative_flux_is_lost_mass() {
    // the flux through L equals the decrease of the probability in (0, L)
    let l = 10.0;
    let taus = [0.5, 2.0, 5.0, 20.0];
    let cdf = flux_cdf(&taus, l).unwrap();
    let tol = Tolerance::new(1e-13, 1e-12);
    for (&t, &f) in taus.iter().zip(&cdf) {
        let inside = integrate(|z: f64| w_evolution(z, t).unwrap().norm_sqr(), 0.0, l, tol).value;
        assert!((f - (1.0 - 2.0 * inside)).abs() < 1e-8, "tau={t}: {f} vs {}", 1.0 - 2.0 * inside);
    }
}
