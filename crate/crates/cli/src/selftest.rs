//! Quick invariant suite behind `fhs selftest`.

use fhs_core::fields::{bubble, dilate, suite::smooth_suite, translate_lateral, Grid, TrialFunction};
use fhs_core::optimizer::{quotient_gradient, rayleigh_quotient};
use fhs_core::params::{gamma_constant, hardy_constant};
use fhs_core::quadform::{commutator_defect, form_report, FORM_TOLERANCES};
use fhs_core::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::result::Check;

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_owned(), passed, detail }
}

fn grid_for(n: usize, resolution: Option<usize>) -> Result<Grid> {
    Ok(match resolution {
        Some(m) => Grid::with_resolution(n, m)?,
        None => Grid::default_for(n)?,
    })
}

fn constants() -> Result<Check> {
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let mut ok = (hardy_constant(0.5)? - inv_pi).abs() <= 1e-12 && (gamma_constant(0.5)? - inv_pi).abs() <= 1e-12;
    for k in 1..20 {
        let s = 0.05 * k as f64;
        if k != 10 {
            ok &= hardy_constant(s)? > gamma_constant(s)?;
        }
    }
    Ok(check("H_s vs γ_s", ok, "H_1/2 = γ_1/2 = 1/π and H_s > γ_s elsewhere on the 0.05 grid".into()))
}

fn forms(n: usize, resolution: Option<usize>) -> Result<Vec<Check>> {
    let g = grid_for(n, resolution)?;
    let (mut defect, mut decomposition, mut hardy_ratio) = (0f64, 0f64, f64::INFINITY);
    for s in [0.25, 0.75] {
        for (_, u) in smooth_suite(&g)? {
            let r = form_report(&u, s, 4)?;
            defect = defect.max(r.cross_check_defect);
            decomposition = decomposition.max(r.decomposition_residual);
            hardy_ratio = hardy_ratio.min(r.fourier_value / (hardy_constant(s)? * r.hardy_value));
        }
    }
    Ok(vec![
        check(
            &format!("backend agreement, n = {n}"),
            defect <= FORM_TOLERANCES.cross_check,
            format!("max relative defect {defect:.3e}"),
        ),
        check(
            &format!("half-space decomposition, n = {n}"),
            decomposition <= FORM_TOLERANCES.decomposition,
            format!("max residual {decomposition:.3e}"),
        ),
        check(&format!("Hardy inequality, n = {n}"), hardy_ratio >= 0.95, format!("min ratio to H_s {hardy_ratio:.4}")),
    ])
}

fn commutator(resolution: Option<usize>) -> Result<Check> {
    let g = grid_for(1, resolution)?;
    let u = TrialFunction::from_fn(g.clone(), |x| {
        let y = (x[0] - 6.0) / 4.0;
        if y.abs() < 1.0 {
            (1.0 - y * y).powi(3)
        } else {
            0.0
        }
    })?;
    let phi = TrialFunction::from_fn(g.clone(), |x| (-(x[0] - 6.0).powi(2) / 2.0).exp() * (x[0] / 2.0).min(1.0))?;
    let c = commutator_defect(&u, &phi, 0.4)?;
    let rel = ((c.defect - c.b_phi) / c.b_phi).abs();
    Ok(check("commutator identity", rel < 0.05, format!("relative difference {rel:.3e}")))
}

fn gradient() -> Result<Check> {
    let g = Grid::with_resolution(1, 513)?;
    let params = Params::new(1, 0.4, 3.0, 0.1)?;
    let u = bubble(&g, &[16.0], 2.0, 0.4)?;
    let grad = quotient_gradient(&u, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0f64;
    for _ in 0..5 {
        let noise: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = TrialFunction::from_fn(g.clone(), |x| noise[(x[0] / g.h()).round() as usize])?;
        let eps = 1e-5;
        let fd = (rayleigh_quotient(&u.axpy(eps, &v)?, &params)? - rayleigh_quotient(&u.axpy(-eps, &v)?, &params)?)
            / (2.0 * eps);
        let dot: f64 = grad.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
        worst = worst.max(((fd - dot) / dot).abs());
    }
    Ok(check("gradient vs finite differences", worst <= 1e-4, format!("max relative error {worst:.3e}")))
}

fn dilation() -> Result<Check> {
    let g = Grid::with_resolution(1, 2049)?;
    let params = Params::new(1, 0.4, 3.0, 0.1)?;
    let u = bubble(&g, &[16.0], 2.0, 0.4)?;
    let d = dilate(&u, 2)?;
    let change =
        |p: &Params| -> Result<f64> { Ok((rayleigh_quotient(&d, p)? / rayleigh_quotient(&u, p)? - 1.0).abs()) };
    let (tied, untied) = (change(&params)?, change(&params.with_weight_exponent(params.b + 0.1))?);
    Ok(check("dilation covariance", tied <= 0.01 && untied >= 0.05, format!("tied {tied:.2e}, untied {untied:.2e}")))
}

fn translation() -> Result<Check> {
    let g = Grid::with_resolution(2, 65)?;
    let u = TrialFunction::from_fn(g.clone(), |x| {
        let r2 = ((x[0] - 4.0) / 3.0).powi(2) + (x[1] / 4.0).powi(2);
        if r2 < 1.0 {
            x[0] * (1.0 - r2).powi(3)
        } else {
            0.0
        }
    })?;
    let v = translate_lateral(&u, &[5])?;
    let (a, b) = (form_report(&u, 0.6, 4)?, form_report(&v, 0.6, 4)?);
    let pairs = [
        (a.fourier_value, b.fourier_value),
        (a.gagliardo_value, b.gagliardo_value),
        (a.regional_value, b.regional_value),
        (a.hardy_value, b.hardy_value),
    ];
    let worst = pairs.iter().map(|(x, y)| ((x - y) / x).abs()).fold(0.0, f64::max);
    Ok(check("lateral translation invariance", worst <= 1e-12, format!("max relative change {worst:.1e}")))
}

/// Runs every check; `resolution` overrides the node count per axis.
pub fn run(resolution: Option<usize>) -> Result<Vec<Check>> {
    let mut out = vec![constants()?];
    out.extend(forms(1, resolution)?);
    out.extend(forms(2, resolution)?);
    out.push(commutator(resolution)?);
    out.push(gradient()?);
    out.push(dilation()?);
    out.push(translation()?);
    Ok(out)
}
