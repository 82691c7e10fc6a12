use fhs_core::optimizer::{classify_run, MinimizerReport, RunClass};
use fhs_core::{Estimate, Grid, Params};

use super::{diagnostics_columns, options_with_padding, run_jobs, trace_curve, Job};
use crate::config::ExperimentConfig;
use crate::error::{config_err, Result};
use crate::result::{two_level, ExperimentResult, Provenance, Table};

pub struct ConjectureRow {
    pub params: Params,
    pub l1: f64,
    pub quotient: Estimate,
    pub sobolev_disc: Estimate,
    pub gap: Estimate,
    /// Label from the coarse/fine pair in this box.
    pub resolution_class: RunClass,
    pub coarse: MinimizerReport,
    pub fine: MinimizerReport,
}

pub struct ConjectureTrend {
    pub params: Params,
    pub boxes: Vec<f64>,
    /// Label from the fine runs across growing boxes.
    pub box_class: RunClass,
    pub box_class_coarse: RunClass,
}

pub struct ConjectureOutput {
    pub rows: Vec<ConjectureRow>,
    pub trends: Vec<ConjectureTrend>,
    pub resolutions: Vec<[usize; 2]>,
}

fn default_boxes(n: usize) -> (Vec<f64>, f64) {
    match n {
        1 => (vec![16.0, 32.0, 64.0], 1.0 / 32.0),
        2 => (vec![8.0, 16.0, 32.0], 0.5),
        _ => (vec![8.0, 12.0, 16.0], 1.0),
    }
}

/// Coarse grids for a box series sharing one spacing.
fn box_series(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Grid>> {
    let (mut boxes, mut h) = default_boxes(n);
    if !cfg.grid.boxes.is_empty() {
        boxes = cfg.grid.boxes.clone();
    }
    if boxes.len() < 3 {
        return config_err("the box series needs at least three sizes");
    }
    if let Some(m) = cfg.grid.resolution {
        h = boxes.iter().fold(0.0, |a: f64, b| a.max(*b)) / (m - 1) as f64;
    }
    boxes
        .iter()
        .map(|&l| {
            let cells = (l / h).round();
            if ((cells * h - l) / l).abs() > 1e-12 {
                return config_err(format!("box {l} is not a whole number of cells of width {h}"));
            }
            let m = cells as usize + 1;
            Ok(Grid::new(l, l / 2.0, &vec![m; n])?)
        })
        .collect()
}

pub fn conjecture_rows(cfg: &ExperimentConfig) -> Result<ConjectureOutput> {
    let params: Vec<Params> = cfg.points.iter().map(|p| p.params()).collect::<Result<_>>()?;
    for p in &params {
        let (n, s) = (p.n as f64, p.s);
        if !(2.0 * s < n && n < 4.0 * s) {
            return config_err(format!("n = {} and s = {s} lie outside the window 2s < n < 4s", p.n));
        }
        if !(p.lambda > 0.0) {
            return config_err(format!("coupling λ = {} must be positive", p.lambda));
        }
        if !p.is_critical() {
            return config_err(format!("p = {} must equal 2*_s = {}", p.p, p.two_star));
        }
    }
    let mut jobs = Vec::new();
    let mut layout = Vec::new();
    for p in &params {
        let grids = box_series(cfg, p.n)?;
        for g in &grids {
            for q in [*p, p.with_coupling(0.0)] {
                jobs.push(Job { params: q, grid: g.clone() });
                jobs.push(Job { params: q, grid: g.refined() });
            }
        }
        layout.push((*p, grids));
    }
    let reports = run_jobs(&jobs, &options_with_padding(cfg))?;
    let mut it = reports.into_iter();
    let mut rows = Vec::new();
    let mut trends = Vec::new();
    let mut resolutions = Vec::new();
    for (p, grids) in layout {
        let mut fines = Vec::new();
        let mut coarses = Vec::new();
        for g in &grids {
            let (c, f, zc, zf) = (it.next(), it.next(), it.next(), it.next());
            let (c, f, zc, zf) = (c.expect("job"), f.expect("job"), zc.expect("job"), zf.expect("job"));
            resolutions.push([g.m()[0], f.final_field.grid().m()[0]]);
            rows.push(ConjectureRow {
                params: p,
                l1: g.l1(),
                quotient: two_level(c.best_quotient, f.best_quotient),
                sobolev_disc: two_level(zc.best_quotient, zf.best_quotient),
                gap: two_level(c.best_quotient - zc.best_quotient, f.best_quotient - zf.best_quotient),
                resolution_class: classify_run(&[c.clone(), f.clone()])?,
                coarse: c.clone(),
                fine: f.clone(),
            });
            coarses.push(c);
            fines.push(f);
        }
        trends.push(ConjectureTrend {
            params: p,
            boxes: grids.iter().map(|g| g.l1()).collect(),
            box_class: classify_run(&fines)?,
            box_class_coarse: classify_run(&coarses)?,
        });
    }
    Ok(ConjectureOutput { rows, trends, resolutions })
}

pub fn conjecture(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let out = conjecture_rows(cfg)?;
    let mut boxes = Table::new("boxes");
    let mut curves = Vec::new();
    for (i, r) in out.rows.iter().enumerate() {
        let row = boxes
            .row()
            .cell("n", r.params.n)
            .cell("s", r.params.s)
            .cell("lambda", r.params.lambda)
            .cell("l1", r.l1)
            .estimate("quotient", r.quotient)
            .estimate("sobolev_disc", r.sobolev_disc)
            .estimate("gap", r.gap);
        diagnostics_columns(row, &r.coarse, &r.fine).cell("resolution_class", r.resolution_class.to_string()).finish();
        curves.push(trace_curve(format!("trace_{i}"), &r.fine));
    }
    let mut trend = Table::new("trend");
    for t in &out.trends {
        let boxes: Vec<String> = t.boxes.iter().map(|b| b.to_string()).collect();
        trend
            .row()
            .cell("n", t.params.n)
            .cell("s", t.params.s)
            .cell("lambda", t.params.lambda)
            .cell("boxes", boxes.join("|"))
            .cell("box_class", t.box_class.to_string())
            .cell("box_class_coarse", t.box_class_coarse.to_string())
            .finish();
    }
    Ok(ExperimentResult {
        experiment: "conjecture",
        exploratory: true,
        tables: vec![boxes, trend],
        curves,
        checks: Vec::new(),
        warnings: Vec::new(),
        provenance: Provenance::new(cfg, out.resolutions)?,
    })
}
