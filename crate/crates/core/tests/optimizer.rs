use fhs_core::fields::{bubble, dilate, translated_cutoff_family, unit_ball_bump, Grid, TrialFunction};
use fhs_core::optimizer::{
    mass_diagnostics, minimize_quotient, quotient_gradient, rayleigh_quotient, sobolev_estimate, strip_cover,
    window_mass_profile, MinimizeOptions, Termination, Window,
};
use fhs_core::params::{hardy_constant, Params};
use fhs_core::special::gamma;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dilation_covariance_needs_the_tied_weight() {
    let g = Grid::with_resolution(1, 2049).unwrap();
    let s = 0.4;
    let tied = Params::new(1, s, 3.0, 0.3 * hardy_constant(s).unwrap()).unwrap();
    let untied = tied.with_weight_exponent(tied.b + 0.1);
    let u = bubble(&g, &[16.0], 2.0, s).unwrap();
    let d = dilate(&u, 2).unwrap();
    let change = |p: &Params| (rayleigh_quotient(&d, p).unwrap() / rayleigh_quotient(&u, p).unwrap() - 1.0).abs();
    assert!(change(&tied) <= 0.01, "{}", change(&tied));
    assert!(change(&untied) >= 0.05, "{}", change(&untied));
}

fn index_of(g: &Grid, x: &[f64]) -> Vec<usize> {
    (0..g.n()).map(|a| ((x[a] - g.lower(a)) / g.h()).round() as usize).collect()
}

#[test]
fn gradient_matches_finite_differences_in_random_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points = [(1usize, 0.4, 3.0, 0.2), (1, 0.25, 2.5, -3.0), (2, 0.45, 2.0 * 2.0 / (2.0 - 0.9), 0.1)];
    for (n, s, p, lambda) in points {
        let g = Grid::with_resolution(n, if n == 1 { 513 } else { 33 }).unwrap();
        let params = Params::new(n, s, p, lambda).unwrap();
        let mut c = vec![0.0; n];
        c[0] = g.l1() / 4.0;
        let u = bubble(&g, &c, 2.0, s).unwrap();
        let grad = quotient_gradient(&u, &params).unwrap();
        for _ in 0..20 {
            let noise: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = TrialFunction::from_fn(g.clone(), |x| noise[g.flat_index(&index_of(&g, x))]).unwrap();
            let v = v.scaled(u.max_abs() / v.max_abs());
            let eps = 1e-5;
            let fd = (rayleigh_quotient(&u.axpy(eps, &v).unwrap(), &params).unwrap()
                - rayleigh_quotient(&u.axpy(-eps, &v).unwrap(), &params).unwrap())
                / (2.0 * eps);
            let dot: f64 = grad.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
            assert!((fd - dot).abs() <= 1e-4 * dot.abs().max(1e-8), "{fd} {dot}");
        }
    }
}

#[test]
fn restarting_from_a_minimizer_stops_at_once() {
    let g = Grid::with_resolution(1, 1025).unwrap();
    let params = Params::new(1, 0.4, 3.0, 0.0).unwrap();
    let init = bubble(&g, &[16.0], 1.0, 0.4).unwrap();
    let first = minimize_quotient(&params, &init, &MinimizeOptions::default()).unwrap();
    assert_eq!(first.termination, Termination::Tolerance);
    assert!(first.quotient_trace.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(first.best_quotient, *first.quotient_trace.last().unwrap());
    assert!(first.best_quotient > 0.0);
    let again = minimize_quotient(&params, &first.final_field, &MinimizeOptions::default()).unwrap();
    assert!(again.iterations <= 11, "{}", again.iterations);
    assert!((again.best_quotient - first.best_quotient).abs() <= 1e-7 * first.best_quotient);
}

#[test]
fn weighted_mass_moves_outward_along_the_concentrating_family() {
    let g = Grid::default_for(1).unwrap();
    let params = Params::new(1, 0.4, 3.0, 0.0).unwrap();
    let strips = strip_cover(&g, 64);
    let mut last = (0.0, 0.0);
    for h in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let phi = translated_cutoff_family(&g, &unit_ball_bump, h).unwrap();
        let profile = window_mass_profile(&phi, &params, &strips).unwrap();
        let outer = profile.masses[1] / profile.normalization;
        let centroid = mass_diagnostics(&phi, &params).unwrap().0.centroid_x1;
        assert!(outer > last.0 && centroid > last.1, "h = {h}: {outer} {centroid}");
        assert!(profile.masses.iter().sum::<f64>() <= profile.normalization * (1.0 + 1e-10));
        last = (outer, centroid);
    }
}

#[test]
fn mirror_windows_carry_equal_mass() {
    let g = Grid::with_resolution(2, 65).unwrap();
    let params = Params::new(2, 0.45, 3.0, 0.0).unwrap();
    let u = bubble(&g, &[8.0, 0.0], 2.0, 0.45).unwrap();
    let w = |z: f64| Window { x1: (4.0, 12.0), center: vec![z], radius: 3.0 };
    let profile = window_mass_profile(&u, &params, &[w(-4.0), w(4.0), w(0.0)]).unwrap();
    let (a, b) = (profile.masses[0], profile.masses[1]);
    assert!((a - b).abs() <= 1e-10 * a);
    let single = window_mass_profile(&u, &params, &strip_cover(&g, 1)).unwrap();
    assert!((single.masses[0] - single.normalization).abs() <= 1e-12 * single.normalization);
}

/// ∫|ξ|^{2s}|Û_s|² / ‖U_s‖²_{2*} in one dimension, from the Bessel-K form of
/// the transform of (1+x²)^{s−1/2} and ∫₀^∞K_s² = π²/(4cos πs).
fn bubble_quotient_1d(s: f64) -> f64 {
    let pi = std::f64::consts::PI;
    4f64.powf(s) * pi.powf(1.0 + 2.0 * s) / ((pi * s).cos() * gamma(0.5 - s).powi(2))
}

#[test]
fn sobolev_estimate_brackets_the_one_dimensional_bubble() {
    let g = Grid::default_for(1).unwrap();
    for s in [0.25, 0.4] {
        let est = sobolev_estimate(&g, s).unwrap();
        let exact = bubble_quotient_1d(s);
        assert!((est.value - exact).abs() <= 3.0 * est.uncertainty, "s = {s}: {est:?} vs {exact}");
        assert!((est.value / exact - 1.0).abs() < 0.01);
    }
}
