use fhs_core::fields::{
    bubble, dilate, read_csv, suite::smooth_suite, translated_cutoff_family, undilate, unit_ball_bump, write_csv, Grid,
    TrialFunction,
};
use fhs_core::quadform::{hardy_term, weighted_norm};
use proptest::prelude::*;

fn trace_is_zero(u: &TrialFunction) -> bool {
    let g = u.grid();
    (0..g.len()).filter(|&j| g.is_boundary(j)).all(|j| u.values()[j] == 0.0)
}

#[test]
fn csv_round_trip_is_bit_exact() {
    for n in 1..=3 {
        let g = Grid::with_resolution(n, 17).unwrap();
        for (_, u) in smooth_suite(&g).unwrap() {
            let mut buf = Vec::new();
            write_csv(&u, &mut buf).unwrap();
            assert_eq!(read_csv(buf.as_slice()).unwrap(), u);
        }
    }
}

#[test]
fn csv_rejects_nonzero_boundary_values() {
    let g = Grid::with_resolution(1, 9).unwrap();
    let mut buf = Vec::new();
    write_csv(&TrialFunction::zeros(g), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap().replacen("\n0.0\n", "\n1.0\n", 1);
    assert!(read_csv(text.as_bytes()).is_err());
}

#[test]
fn frozen_weight_limit_of_the_concentrating_family() {
    let g = Grid::default_for(1).unwrap();
    let s = 0.3;
    let phi = translated_cutoff_family(&g, &unit_ball_bump, 16.0).unwrap();
    let l2: f64 = phi.values().iter().map(|v| v * v).sum::<f64>() * g.h();
    let ratio = hardy_term(&phi, s).unwrap() / l2;
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn dilation_scales_the_critical_norm() {
    let g = Grid::with_resolution(2, 65).unwrap();
    let s = 0.45;
    let p = 2.0 * 2.0 / (2.0 - 2.0 * s);
    let u = bubble(&g, &[10.0, 2.0], 2.0, s).unwrap();
    let base = weighted_norm(&u, p, 0.0).unwrap();
    for beta in [2usize, 3] {
        let d = dilate(&u, beta).unwrap();
        let expect = base * (beta as f64).powf(-2.0 / p);
        assert!((weighted_norm(&d, p, 0.0).unwrap() / expect - 1.0).abs() < 1e-3);
        assert_eq!(undilate(&d, beta).unwrap(), u);
    }
    assert!(dilate(&u, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constructors_vanish_on_the_box_boundary(
        n in 1usize..=3,
        c in 0.15f64..0.85,
        scale in 0.2f64..6.0,
        s in 0.05f64..0.95,
        h in 1.0f64..4.0,
    ) {
        let g = Grid::with_resolution(n, 17).unwrap();
        let mut center = vec![0.0; n];
        center[0] = c * g.l1();
        if s < n as f64 / 2.0 {
            prop_assert!(trace_is_zero(&bubble(&g, &center, scale, s).unwrap()));
        }
        prop_assert!(trace_is_zero(&translated_cutoff_family(&g, &unit_ball_bump, h).unwrap()));
        let raw = TrialFunction::from_fn(g.clone(), |x| 1.0 + x[0]).unwrap();
        prop_assert!(trace_is_zero(&raw));
    }

    #[test]
    fn values_must_be_finite(bad in prop_oneof![Just(f64::NAN), Just(f64::INFINITY)]) {
        let g = Grid::with_resolution(1, 9).unwrap();
        let mut v = vec![0.0; 9];
        v[4] = bad;
        prop_assert!(TrialFunction::new(g, v).is_err());
    }
}
