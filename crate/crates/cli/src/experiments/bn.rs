use fhs_core::optimizer::{classify_run, sobolev_estimate, MinimizerReport, RunClass};
use fhs_core::{Estimate, Params};

use super::{diagnostics_columns, options_with_padding, run_jobs, trace_curve, Job};
use crate::config::ExperimentConfig;
use crate::error::{config_err, Result};
use crate::result::{two_level, Check, ExperimentResult, Provenance, Table};

pub struct BnRow {
    pub params: Params,
    /// "strict" for 0 < λ < H_s, "control" for λ ≤ 0.
    pub role: &'static str,
    pub half_space: Estimate,
    pub sobolev_disc: Estimate,
    /// Half-space minimum minus the λ = 0 minimum, per resolution.
    pub gap: Estimate,
    pub class: RunClass,
    pub coarse: MinimizerReport,
    pub fine: MinimizerReport,
}

impl BnRow {
    /// Strictly below the λ = 0 minimum by more than the gap's uncertainty.
    pub fn strictly_below(&self) -> bool {
        self.gap.value < 0.0 && -self.gap.value > self.gap.uncertainty
    }
}

pub struct BnOutput {
    pub rows: Vec<BnRow>,
    /// Bubble-based whole-space constant on the fine grid, for reference.
    pub sobolev_bubble: Estimate,
    pub resolutions: [usize; 2],
}

pub fn bn_rows(cfg: &ExperimentConfig) -> Result<BnOutput> {
    let params: Vec<Params> = cfg.points.iter().map(|p| p.params()).collect::<Result<_>>()?;
    let first = params[0];
    for p in &params {
        if !p.is_critical() {
            return config_err(format!("p = {} must equal 2*_s = {}", p.p, p.two_star));
        }
        if (p.n as f64) < 4.0 * p.s {
            return config_err(format!("need n ≥ 4s, got n = {}, s = {}", p.n, p.s));
        }
        if p.n != first.n || p.s != first.s {
            return config_err("all points must share n and s");
        }
    }
    let (coarse, fine) = cfg.grid.pair(first.n, 129)?;
    let zero = first.with_coupling(0.0);
    let mut jobs = vec![Job { params: zero, grid: coarse.clone() }, Job { params: zero, grid: fine.clone() }];
    for p in &params {
        jobs.push(Job { params: *p, grid: coarse.clone() });
        jobs.push(Job { params: *p, grid: fine.clone() });
    }
    let reports = run_jobs(&jobs, &options_with_padding(cfg))?;
    let (s0c, s0f) = (reports[0].best_quotient, reports[1].best_quotient);
    let rows = params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (c, f) = (reports[2 + 2 * i].clone(), reports[3 + 2 * i].clone());
            Ok(BnRow {
                params: *p,
                role: if p.lambda > 0.0 { "strict" } else { "control" },
                half_space: two_level(c.best_quotient, f.best_quotient),
                sobolev_disc: two_level(s0c, s0f),
                gap: two_level(c.best_quotient - s0c, f.best_quotient - s0f),
                class: classify_run(&[c.clone(), f.clone()])?,
                coarse: c,
                fine: f,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BnOutput { rows, sobolev_bubble: sobolev_estimate(&fine, first.s)?, resolutions: [coarse.m()[0], fine.m()[0]] })
}

pub fn bn(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let out = bn_rows(cfg)?;
    let mut table = Table::new("gap");
    let mut curves = Vec::new();
    let mut checks = Vec::new();
    for (i, r) in out.rows.iter().enumerate() {
        let row = table
            .row()
            .cell("n", r.params.n)
            .cell("s", r.params.s)
            .cell("lambda", r.params.lambda)
            .cell("role", r.role)
            .estimate("half_space", r.half_space)
            .estimate("sobolev_disc", r.sobolev_disc)
            .estimate("gap", r.gap)
            .estimate("sobolev_bubble", out.sobolev_bubble);
        diagnostics_columns(row, &r.coarse, &r.fine).cell("classification", r.class.to_string()).finish();
        curves.push(trace_curve(format!("trace_{i}"), &r.fine));
        let (name, passed) = if r.role == "strict" {
            ("not above the λ = 0 minimum", r.gap.value <= r.gap.uncertainty)
        } else {
            ("control not below the λ = 0 minimum", r.gap.value >= -r.gap.uncertainty)
        };
        checks.push(Check {
            name: format!("point {i}: {name}"),
            passed,
            detail: format!(
                "gap {:.4e} ± {:.1e}, strictly below: {}",
                r.gap.value,
                r.gap.uncertainty,
                r.strictly_below()
            ),
        });
    }
    Ok(ExperimentResult {
        experiment: "bn",
        exploratory: false,
        tables: vec![table],
        curves,
        checks,
        warnings: Vec::new(),
        provenance: Provenance::new(cfg, vec![out.resolutions])?,
    })
}
