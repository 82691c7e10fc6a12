use fhs_core::optimizer::{classify_run, MinimizerReport, RunClass};
use fhs_core::Params;

use super::{diagnostics_columns, options_with_padding, run_jobs, trace_curve, Job};
use crate::config::ExperimentConfig;
use crate::error::{config_err, Result};
use crate::result::{two_level, Check, ExperimentResult, Provenance, Table};

pub struct SubcriticalRow {
    pub params: Params,
    pub coarse: MinimizerReport,
    pub fine: MinimizerReport,
    pub class: RunClass,
}

impl SubcriticalRow {
    /// |Q_fine − Q_coarse| / Q_fine.
    pub fn relative_drift(&self) -> f64 {
        ((self.fine.best_quotient - self.coarse.best_quotient) / self.fine.best_quotient).abs()
    }
}

fn hypotheses(cfg: &ExperimentConfig) -> Result<Vec<Params>> {
    cfg.points
        .iter()
        .map(|p| {
            let params = p.params()?;
            if params.is_critical() {
                return config_err(format!(
                    "p = {} is the critical exponent; the subcritical run needs p < 2*_s",
                    params.p
                ));
            }
            Ok(params)
        })
        .collect()
}

pub fn subcritical_rows(cfg: &ExperimentConfig) -> Result<Vec<SubcriticalRow>> {
    let params = hypotheses(cfg)?;
    let mut jobs = Vec::new();
    for p in &params {
        let (coarse, fine) = cfg.grid.pair(p.n, 4097)?;
        jobs.push(Job { params: *p, grid: coarse });
        jobs.push(Job { params: *p, grid: fine });
    }
    let mut reports = run_jobs(&jobs, &options_with_padding(cfg))?.into_iter();
    params
        .into_iter()
        .map(|params| {
            let coarse = reports.next().expect("two reports per point");
            let fine = reports.next().expect("two reports per point");
            let class = classify_run(&[coarse.clone(), fine.clone()])?;
            Ok(SubcriticalRow { params, coarse, fine, class })
        })
        .collect()
}

pub fn subcritical(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let rows = subcritical_rows(cfg)?;
    let mut table = Table::new("best_quotient");
    let mut curves = Vec::new();
    let mut checks = Vec::new();
    let mut resolutions = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let p = r.params;
        let row = table
            .row()
            .cell("n", p.n)
            .cell("s", p.s)
            .cell("p", p.p)
            .cell("b", p.b)
            .cell("lambda", p.lambda)
            .estimate("quotient", two_level(r.coarse.best_quotient, r.fine.best_quotient));
        diagnostics_columns(row, &r.coarse, &r.fine).cell("classification", r.class.to_string()).finish();
        curves.push(trace_curve(format!("trace_{i}"), &r.fine));
        resolutions.push([r.coarse.final_field.grid().m()[0], r.fine.final_field.grid().m()[0]]);
        checks.push(Check {
            name: format!("point {i} attains"),
            passed: r.class == RunClass::Converged,
            detail: format!("classified {} with drift {:.3e}", r.class, r.relative_drift()),
        });
    }
    Ok(ExperimentResult {
        experiment: "subcritical",
        exploratory: false,
        tables: vec![table],
        curves,
        checks,
        warnings: Vec::new(),
        provenance: Provenance::new(cfg, resolutions)?,
    })
}
