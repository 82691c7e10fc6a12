use fhs_core::fields::{translated_cutoff_family, unit_ball_bump};
use fhs_core::optimizer::{MinimizerReport, QuotientProblem};
use fhs_core::quadform::hardy_term;
use fhs_core::special::gauss_legendre;
use fhs_core::{Estimate, Grid, Params};
use log::warn;

use super::{options_with_padding, run_jobs, trace_curve, Job};
use crate::config::ExperimentConfig;
use crate::error::{config_err, Result};
use crate::result::{two_level, Check, Curve, ExperimentResult, Provenance, Table};

/// Quotient gap along φ_h(x) = φ(h(x − e₁)).
#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub lambda: f64,
    pub h: f64,
    pub quotient: Estimate,
    /// Q_λ(φ_h) − Q_0(φ_h).
    pub gap: Estimate,
    /// −λ·h^{−2s}∫(1+y₁/h)^{−2s}φ² / ‖φ‖²_{2*}, by tensor Gauss–Legendre.
    pub oracle_gap: Estimate,
    /// Leading term −λ·h^{−2s}∫φ² / ‖φ‖²_{2*}.
    pub frozen_gap: f64,
    /// ∫x₁^{−2s}φ_h² / ∫φ_h².
    pub hardy_ratio: Estimate,
}

/// Least-squares slope of ln|gap| against ln h.
#[derive(Clone, Debug)]
pub struct RateFit {
    pub lambda: f64,
    pub exponent: Estimate,
    pub expected: f64,
}

/// Minimized half-space quotient at λ ≤ 0 against the λ = 0 minimum.
#[derive(Clone, Debug)]
pub struct WholeSpaceRow {
    pub lambda: f64,
    pub half_space: Estimate,
    pub sobolev_disc: Estimate,
    /// (half_space − sobolev_disc) / sobolev_disc.
    pub relative_gap: Estimate,
}

pub struct CriticalUpper {
    pub s: f64,
    pub family: Vec<FamilyRow>,
    pub rates: Vec<RateFit>,
    pub whole_space: Vec<WholeSpaceRow>,
    pub traces: Vec<(String, MinimizerReport)>,
    pub warnings: Vec<String>,
    pub resolutions: [usize; 2],
}

/// ∫_{B₁} f(y) dy on a tensor Gauss–Legendre rule of `order` nodes per axis.
fn ball_integral(n: usize, order: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let (x, w) = gauss_legendre(order);
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    let mut y = vec![0.0; n];
    loop {
        let mut weight = 1.0;
        for a in 0..n {
            y[a] = x[idx[a]];
            weight *= w[idx[a]];
        }
        if y.iter().map(|v| v * v).sum::<f64>() < 1.0 {
            total += weight * f(&y);
        }
        let mut a = 0;
        while a < n {
            idx[a] += 1;
            if idx[a] < order {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if a == n {
            return total;
        }
    }
}

fn oracle_gap(params: &Params, h: f64, order: usize) -> (f64, f64) {
    let (n, s, p) = (params.n, params.s, params.p);
    let phi2 = |y: &[f64]| unit_ball_bump(y).powi(2);
    let weighted = ball_integral(n, order, |y| (1.0 + y[0] / h).powf(-2.0 * s) * phi2(y));
    let plain = ball_integral(n, order, phi2);
    let norm2 = ball_integral(n, order, |y| unit_ball_bump(y).powf(p)).powf(2.0 / p);
    let scale = -params.lambda * h.powf(-2.0 * s) / norm2;
    (scale * weighted, scale * plain)
}

fn family_point(problem: &QuotientProblem, zero: &QuotientProblem, grid: &Grid, h: f64) -> Result<(f64, f64, f64)> {
    let phi = translated_cutoff_family(grid, &unit_ball_bump, h)?;
    let q = problem.quotient(phi.values())?;
    let q0 = zero.quotient(phi.values())?;
    let l2: f64 = phi.values().iter().map(|v| v * v).sum::<f64>() * grid.cell_volume();
    let ratio = hardy_term(&phi, problem.params().s)? / l2;
    Ok((q, q - q0, ratio))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

pub fn critical_upper_rows(cfg: &ExperimentConfig) -> Result<CriticalUpper> {
    let params: Vec<Params> = cfg.points.iter().map(|p| p.params()).collect::<Result<_>>()?;
    let first = params[0];
    for p in &params {
        if !p.is_critical() {
            return config_err(format!("p = {} must equal 2*_s = {}", p.p, p.two_star));
        }
        if p.n != first.n || p.s != first.s {
            return config_err("all points must share n and s");
        }
    }
    let (n, s) = (first.n, first.s);
    let (coarse, fine) = cfg.grid.pair(n, 4097)?;
    let grids = [coarse.clone(), fine.clone()];
    let zero = first.with_coupling(0.0);
    let zero_problems: Vec<QuotientProblem> =
        grids.iter().map(|g| QuotientProblem::new(&zero, g, cfg.grid.padding)).collect::<fhs_core::Result<Vec<_>>>()?;

    let mut hs = Vec::new();
    let mut warnings = Vec::new();
    for &h in &cfg.h_values {
        if grids.iter().all(|g| translated_cutoff_family(g, &unit_ball_bump, h).is_ok()) {
            hs.push(h);
        } else {
            let msg = format!("h = {h}: support leaves the box, dropped from the family");
            warn!("{msg}");
            warnings.push(msg);
        }
    }

    let mut family = Vec::new();
    let mut rates = Vec::new();
    for p in params.iter().filter(|p| p.lambda >= 0.0) {
        let problems: Vec<QuotientProblem> =
            grids.iter().map(|g| QuotientProblem::new(p, g, cfg.grid.padding)).collect::<fhs_core::Result<Vec<_>>>()?;
        let mut logs = [Vec::new(), Vec::new()];
        for &h in &hs {
            let c = family_point(&problems[0], &zero_problems[0], &grids[0], h)?;
            let f = family_point(&problems[1], &zero_problems[1], &grids[1], h)?;
            let (o64, frozen) = oracle_gap(p, h, 64);
            let (o32, _) = oracle_gap(p, h, 32);
            if p.lambda > 0.0 {
                logs[0].push((h.ln(), c.1.abs().ln()));
                logs[1].push((h.ln(), f.1.abs().ln()));
            }
            family.push(FamilyRow {
                lambda: p.lambda,
                h,
                quotient: two_level(c.0, f.0),
                gap: two_level(c.1, f.1),
                oracle_gap: Estimate { value: o64, uncertainty: (o64 - o32).abs() },
                frozen_gap: frozen,
                hardy_ratio: two_level(c.2, f.2),
            });
        }
        if p.lambda > 0.0 && hs.len() >= 2 {
            rates.push(RateFit {
                lambda: p.lambda,
                exponent: two_level(slope(&logs[0]), slope(&logs[1])),
                expected: -2.0 * s,
            });
        }
    }

    let nonpositive: Vec<Params> = params.iter().copied().filter(|p| p.lambda < 0.0).collect();
    let mut jobs = vec![Job { params: zero, grid: coarse.clone() }, Job { params: zero, grid: fine.clone() }];
    for p in &nonpositive {
        jobs.push(Job { params: *p, grid: coarse.clone() });
        jobs.push(Job { params: *p, grid: fine.clone() });
    }
    let reports = run_jobs(&jobs, &options_with_padding(cfg))?;
    let sobolev_disc = two_level(reports[0].best_quotient, reports[1].best_quotient);
    let mut whole_space = Vec::new();
    let mut traces = vec![("sobolev_disc".to_owned(), reports[1].clone())];
    let rel = |a: &MinimizerReport, b: &MinimizerReport| (a.best_quotient - b.best_quotient) / b.best_quotient;
    if params.iter().any(|p| p.lambda == 0.0) {
        whole_space.push(WholeSpaceRow {
            lambda: 0.0,
            half_space: sobolev_disc,
            sobolev_disc,
            relative_gap: two_level(0.0, 0.0),
        });
    }
    for (i, p) in nonpositive.iter().enumerate() {
        let (c, f) = (&reports[2 + 2 * i], &reports[3 + 2 * i]);
        whole_space.push(WholeSpaceRow {
            lambda: p.lambda,
            half_space: two_level(c.best_quotient, f.best_quotient),
            sobolev_disc,
            relative_gap: two_level(rel(c, &reports[0]), rel(f, &reports[1])),
        });
        traces.push((format!("lambda_{i}"), f.clone()));
    }
    Ok(CriticalUpper { s, family, rates, whole_space, traces, warnings, resolutions: [coarse.m()[0], fine.m()[0]] })
}

pub fn critical_upper(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let out = critical_upper_rows(cfg)?;
    let mut family = Table::new("family");
    let mut curves: Vec<Curve> = Vec::new();
    for r in &out.family {
        family
            .row()
            .cell("lambda", r.lambda)
            .cell("h", r.h)
            .estimate("quotient", r.quotient)
            .estimate("gap", r.gap)
            .estimate("oracle_gap", r.oracle_gap)
            .cell("frozen_gap", r.frozen_gap)
            .estimate("hardy_ratio", r.hardy_ratio)
            .finish();
    }
    let mut lambdas: Vec<f64> = out.family.iter().map(|r| r.lambda).collect();
    lambdas.dedup();
    for (i, l) in lambdas.iter().enumerate() {
        curves.push(Curve {
            name: format!("gap_{i}"),
            x: "h".into(),
            y: "gap".into(),
            points: out.family.iter().filter(|r| r.lambda == *l).map(|r| (r.h, r.gap.value)).collect(),
        });
    }
    let mut rates = Table::new("rate_fit");
    for r in &out.rates {
        rates.row().cell("lambda", r.lambda).estimate("exponent", r.exponent).cell("expected", r.expected).finish();
    }
    let mut whole = Table::new("whole_space");
    for r in &out.whole_space {
        whole
            .row()
            .cell("lambda", r.lambda)
            .estimate("half_space", r.half_space)
            .estimate("sobolev_disc", r.sobolev_disc)
            .estimate("relative_gap", r.relative_gap)
            .finish();
    }
    curves.extend(out.traces.iter().map(|(name, r)| trace_curve(format!("trace_{name}"), r)));
    let zero_gap =
        out.family.iter().filter(|r| r.lambda == 0.0).all(|r| r.gap.value == 0.0 && r.gap.uncertainty == 0.0);
    let checks = vec![Check {
        name: "gap vanishes at zero coupling".into(),
        passed: zero_gap,
        detail: "Q_0(φ_h) − Q_0(φ_h) evaluated on both grids".into(),
    }];
    Ok(ExperimentResult {
        experiment: "critical_upper",
        exploratory: false,
        tables: vec![family, rates, whole],
        curves,
        checks,
        warnings: out.warnings,
        provenance: Provenance::new(cfg, vec![out.resolutions])?,
    })
}
