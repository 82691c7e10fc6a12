//! Experiment drivers. Each driver checks the hypotheses of the statement it
//! probes, runs every parameter point on a coarse and a fine grid, and reports
//! fine-grid values with half the coarse–fine difference as uncertainty.

mod bn;
mod conjecture;
mod critical_upper;
mod sloane;
mod subcritical;

pub use bn::{bn, bn_rows, BnOutput, BnRow};
pub use conjecture::{conjecture, conjecture_rows, ConjectureOutput, ConjectureRow, ConjectureTrend};
pub use critical_upper::{critical_upper, critical_upper_rows, CriticalUpper, FamilyRow, RateFit, WholeSpaceRow};
pub use sloane::{sloane, sloane_rows, Sloane, SloaneEnergyRow, CONTROL_FACTOR};
pub use subcritical::{subcritical, subcritical_rows, SubcriticalRow};

use fhs_core::fields::bubble;
use fhs_core::optimizer::{minimize_quotient, MinimizeOptions, MinimizerReport, Termination};
use fhs_core::{Grid, Params, TrialFunction};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::Result;
use crate::result::{Curve, ExperimentResult};

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentId::Subcritical => subcritical(cfg),
        ExperimentId::CriticalUpper => critical_upper(cfg),
        ExperimentId::Bn => bn(cfg),
        ExperimentId::Conjecture => conjecture(cfg),
        ExperimentId::Sloane => sloane(cfg),
    }
}

/// Order-preserving map, concurrent when the `parallel` feature is on.
pub(crate) fn dispatch<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Bubble of scale 1 centred at (max(2, L1/4), 0, …, 0).
pub fn default_init(grid: &Grid, s: f64) -> Result<TrialFunction> {
    let mut c = vec![0.0; grid.n()];
    c[0] = (grid.l1() / 4.0).max(2.0);
    Ok(bubble(grid, &c, 1.0, s)?)
}

/// One minimization from the default initial field.
#[derive(Clone, Debug)]
pub(crate) struct Job {
    pub params: Params,
    pub grid: Grid,
}

pub(crate) fn run_jobs(jobs: &[Job], opts: &MinimizeOptions) -> Result<Vec<MinimizerReport>> {
    dispatch(jobs, |j| {
        let init = default_init(&j.grid, j.params.s)?;
        Ok(minimize_quotient(&j.params, &init, opts)?)
    })
    .into_iter()
    .collect()
}

pub(crate) fn options_with_padding(cfg: &ExperimentConfig) -> MinimizeOptions {
    MinimizeOptions { padding: cfg.grid.padding, ..cfg.optimizer }
}

pub(crate) fn trace_curve(name: String, report: &MinimizerReport) -> Curve {
    Curve {
        name,
        x: "iteration".into(),
        y: "quotient".into(),
        points: report.quotient_trace.iter().enumerate().map(|(i, q)| (i as f64, *q)).collect(),
    }
}

pub(crate) fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Tolerance => "tolerance",
        Termination::MaxIters => "max_iters",
        Termination::Stall => "stall",
    }
}

/// Appends the diagnostics of a fine-grid report as estimate columns.
pub(crate) fn diagnostics_columns<'a>(
    row: crate::result::RowBuilder<'a>,
    coarse: &MinimizerReport,
    fine: &MinimizerReport,
) -> crate::result::RowBuilder<'a> {
    use crate::result::two_level;
    let (c, f) = (coarse.diagnostics, fine.diagnostics);
    row.estimate("centroid_x1", two_level(c.centroid_x1, f.centroid_x1))
        .estimate("rho90", two_level(c.rho90, f.rho90))
        .estimate("dominant_fraction", two_level(c.dominant_fraction, f.dominant_fraction))
        .estimate("el_residual", two_level(coarse.euler_lagrange_residual, fine.euler_lagrange_residual))
        .cell("termination", termination_name(fine.termination))
        .cell("iterations", fine.iterations)
}
