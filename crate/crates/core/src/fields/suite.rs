//! Fixed collection of smooth test fields used by the consistency checks.

use super::families::{far_cutoff, unit_ball_bump};
use super::{Grid, TrialFunction};
use crate::error::Result;

type Profile = fn(&[f64], f64) -> f64;

fn r2_from(x: &[f64], c0: f64, c_lat: f64) -> f64 {
    let mut r2 = (x[0] - c0).powi(2);
    for (a, v) in x[1..].iter().enumerate() {
        r2 += (v - if a == 0 { c_lat } else { 0.0 }).powi(2);
    }
    r2
}

fn lateral2(x: &[f64]) -> f64 {
    x[1..].iter().map(|v| v * v).sum()
}

// Each profile receives the point and the normal extent L1.
const PROFILES: [(&str, Profile); 12] = [
    ("gauss_quarter", |x, l| (-r2_from(x, l / 4.0, 0.0)).exp()),
    ("gauss_narrow", |x, l| (-r2_from(x, l / 8.0, 0.0) / 0.5).exp()),
    ("gauss_wide", |x, l| (-r2_from(x, l / 4.0, 0.0) / 4.0).exp()),
    ("rational", |x, l| (1.0 + r2_from(x, l / 4.0, 0.0)).powi(-3)),
    ("wall_gauss", |x, _| x[0] * (-(x[0] * x[0] + lateral2(x)) / 2.0).exp()),
    ("wall_square", |x, _| x[0] * x[0] * (-x[0] - lateral2(x)).exp()),
    ("modulated", |x, l| (2.0 * x[0]).cos() * (-r2_from(x, l / 4.0, 0.0) / 2.0).exp()),
    ("anisotropic", |x, l| (-(x[0] - l / 5.0).powi(2) / 0.5 - lateral2(x) / 4.0).exp()),
    ("two_bumps", |x, l| (-r2_from(x, l / 8.0, 0.0)).exp() - 0.5 * (-r2_from(x, l / 4.0, 1.0)).exp()),
    ("compact", |x, l| {
        let mut y = [0.0; 3];
        for (a, v) in x.iter().enumerate() {
            y[a] = (v - if a == 0 { l / 4.0 } else { 0.0 }) / 2.0;
        }
        unit_ball_bump(&y[..x.len()])
    }),
    ("offset", |x, l| (-r2_from(x, 3.0 * l / 8.0, 2.0)).exp()),
    ("sech", |x, l| 1.0 / ((x[0] - l / 4.0).cosh() * (1.0 + lateral2(x)))),
];

/// Twelve smooth fields, each multiplied by 1 − e^{−x₁²} so that it vanishes at
/// the wall, and by the far-face cutoff.
pub fn smooth_suite(grid: &Grid) -> Result<Vec<(&'static str, TrialFunction)>> {
    let l1 = grid.l1();
    PROFILES
        .iter()
        .map(|&(name, f)| {
            let u =
                TrialFunction::from_fn(grid.clone(), |x| f(x, l1) * -(-x[0] * x[0]).exp_m1() * far_cutoff(grid, x))?;
            Ok((name, u))
        })
        .collect()
}
