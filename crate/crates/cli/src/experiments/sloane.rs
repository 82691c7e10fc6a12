use fhs_core::fields::{suite::smooth_suite, wall_family_member};
use fhs_core::optimizer::MinimizerReport;
use fhs_core::quadform::{hardy_term, FourierOperator};
use fhs_core::{Estimate, Grid, Params, TrialFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{diagnostics_columns, options_with_padding, run_jobs, trace_curve, Job};
use crate::config::ExperimentConfig;
use crate::error::{config_err, Result};
use crate::result::{two_level, Check, ExperimentResult, Provenance, Table};

/// Multiplier of H_s used for the supercritical control.
pub const CONTROL_FACTOR: f64 = 1.02;
const RANDOM_COMBINATIONS: usize = 6;

pub struct SloaneEnergyRow {
    pub name: String,
    /// ⟨(−Δ)^s u, u⟩ − H_s∫x₁^{−2s}u², normalized by ∫u².
    pub energy: Estimate,
    /// Same with λ = 1.02·H_s.
    pub control_energy: Estimate,
    /// Form / (H_s·Hardy term).
    pub hardy_ratio: Estimate,
}

pub struct Sloane {
    pub params: Params,
    pub energies: Vec<SloaneEnergyRow>,
    pub coarse: MinimizerReport,
    pub fine: MinimizerReport,
    pub resolutions: Vec<[usize; 2]>,
}

impl Sloane {
    pub fn all_energies_positive(&self) -> bool {
        self.energies.iter().all(|r| r.energy.value > 0.0 && r.energy.value - 2.0 * r.energy.uncertainty > 0.0)
    }

    pub fn control_negative_found(&self) -> bool {
        self.energies.iter().any(|r| r.control_energy.value < 0.0)
    }

    pub fn trace_nonnegative(&self) -> bool {
        [&self.coarse, &self.fine].iter().all(|r| r.quotient_trace.iter().all(|q| *q >= 0.0))
    }
}

/// Named test fields on `grid`; the random combinations depend only on `seed`.
fn test_fields(grid: &Grid, s: f64, seed: u64) -> Result<Vec<(String, TrialFunction)>> {
    let suite = smooth_suite(grid)?;
    let mut out: Vec<(String, TrialFunction)> = suite.iter().map(|(n, u)| (n.to_string(), u.clone())).collect();
    let floor = (s - 0.5f64).max(0.0);
    for d in [1.0, 0.5, 0.25, 0.1] {
        out.push((format!("wall_alpha_{:.3}", floor + d), wall_family_member(grid, floor + d)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..RANDOM_COMBINATIONS {
        let mut acc = TrialFunction::zeros(grid.clone());
        for (_, u) in &suite {
            acc = acc.axpy(rng.random_range(-1.0..1.0), u)?;
        }
        out.push((format!("random_{k}"), acc));
    }
    Ok(out)
}

fn energies(grid: &Grid, params: &Params, padding: usize, seed: u64) -> Result<Vec<(String, [f64; 3])>> {
    let op = FourierOperator::new(grid, params.s, padding)?;
    test_fields(grid, params.s, seed)?
        .into_iter()
        .map(|(name, u)| {
            let form = op.form(&u)?;
            let hardy = hardy_term(&u, params.s)?;
            let l2: f64 = u.values().iter().map(|v| v * v).sum::<f64>() * grid.cell_volume();
            let h = params.hardy();
            Ok((name, [(form - h * hardy) / l2, (form - CONTROL_FACTOR * h * hardy) / l2, form / (h * hardy)]))
        })
        .collect()
}

pub fn sloane_rows(cfg: &ExperimentConfig) -> Result<Sloane> {
    if cfg.points.len() != 1 {
        return config_err("the λ = H_s experiment takes exactly one parameter point");
    }
    let params = cfg.points[0].params_any_coupling()?;
    if params.n < 2 {
        return config_err(format!("need n ≥ 2, got n = {}", params.n));
    }
    if !(params.s > 0.5 && params.s < 1.0) {
        return config_err(format!("need 1/2 < s < 1, got s = {}", params.s));
    }
    let h = params.hardy();
    if ((params.lambda - h) / h).abs() > 1e-12 {
        return config_err(format!("coupling must equal H_s = {h}, got {}", params.lambda));
    }
    if !params.is_critical() {
        return config_err(format!("p = {} must equal 2*_s = {}", params.p, params.two_star));
    }
    let egrid = Grid::default_for(params.n)?;
    let (ec, ef) = (
        energies(&egrid, &params, cfg.grid.padding, cfg.seed)?,
        energies(&egrid.refined(), &params, cfg.grid.padding, cfg.seed)?,
    );
    let rows = ec
        .into_iter()
        .zip(ef)
        .map(|((name, c), (_, f))| SloaneEnergyRow {
            name,
            energy: two_level(c[0], f[0]),
            control_energy: two_level(c[1], f[1]),
            hardy_ratio: two_level(c[2], f[2]),
        })
        .collect();
    let (coarse, fine) = cfg.grid.pair(params.n, 65)?;
    let jobs = [Job { params, grid: coarse.clone() }, Job { params, grid: fine.clone() }];
    let mut reports = run_jobs(&jobs, &options_with_padding(cfg))?.into_iter();
    Ok(Sloane {
        params,
        energies: rows,
        coarse: reports.next().expect("coarse run"),
        fine: reports.next().expect("fine run"),
        resolutions: vec![[egrid.m()[0], egrid.refined().m()[0]], [coarse.m()[0], fine.m()[0]]],
    })
}

pub fn sloane(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let out = sloane_rows(cfg)?;
    let mut energy = Table::new("energy");
    for r in &out.energies {
        energy
            .row()
            .cell("field", r.name.as_str())
            .estimate("energy", r.energy)
            .estimate("control_energy", r.control_energy)
            .estimate("hardy_ratio", r.hardy_ratio)
            .finish();
    }
    let mut minimum = Table::new("minimum");
    let p = out.params;
    let row = minimum
        .row()
        .cell("n", p.n)
        .cell("s", p.s)
        .cell("lambda", p.lambda)
        .estimate("quotient", two_level(out.coarse.best_quotient, out.fine.best_quotient));
    diagnostics_columns(row, &out.coarse, &out.fine).finish();
    let checks = vec![
        Check {
            name: "energy positive at λ = H_s".into(),
            passed: out.all_energies_positive(),
            detail: format!("{} fields", out.energies.len()),
        },
        Check {
            name: "quotient trace non-negative".into(),
            passed: out.trace_nonnegative(),
            detail: format!("final quotient {:.6e}", out.fine.best_quotient),
        },
    ];
    let mut warnings = Vec::new();
    if !out.control_negative_found() {
        warnings.push(format!(
            "no test field has negative energy at λ = {CONTROL_FACTOR}·H_s; the smallest discrete Hardy ratio is {:.4}",
            out.energies.iter().map(|r| r.hardy_ratio.value).fold(f64::INFINITY, f64::min)
        ));
    }
    Ok(ExperimentResult {
        experiment: "sloane",
        exploratory: false,
        tables: vec![energy, minimum],
        curves: vec![trace_curve("trace".into(), &out.fine)],
        checks,
        warnings,
        provenance: Provenance::new(cfg, out.resolutions)?,
    })
}
