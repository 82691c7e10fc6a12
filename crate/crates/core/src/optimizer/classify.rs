//! Heuristic labels for the behaviour of minimizers across boxes and resolutions.

use serde::{Deserialize, Serialize};

use super::MinimizerReport;
use crate::error::{domain, Result};

/// A window must hold this fraction of the mass to count as dominant.
pub const DOMINANCE: f64 = 0.9;
/// ρ90 must shrink by this factor to count as concentration.
pub const SHRINK_FACTOR: f64 = 2.0;
/// Centroid drift in x₁, relative to L1, that counts as translation.
pub const DRIFT_FRACTION: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunClass {
    Converged,
    Concentrating,
    TranslatingX1,
    Vanishing,
}

impl std::fmt::Display for RunClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RunClass::Converged => "converged",
            RunClass::Concentrating => "concentrating",
            RunClass::TranslatingX1 => "translating_x1",
            RunClass::Vanishing => "vanishing",
        };
        f.write_str(s)
    }
}

/// Classifies a sequence of runs ordered by increasing resolution or box size.
///
/// * vanishing: the final dominant-window fraction is below 90% and below 90%
///   of the first one;
/// * translating_x1: the x₁-centroid moves by more than 25% of the largest L1;
/// * concentrating: the radius holding 90% of the mass shrinks at least twofold;
/// * converged: none of the above.
pub fn classify_run(reports: &[MinimizerReport]) -> Result<RunClass> {
    if reports.len() < 2 {
        return domain("classification needs at least two runs");
    }
    let first = &reports[0];
    for r in &reports[1..] {
        let (a, b) = (&first.params, &r.params);
        if r.final_field.grid().n() != first.final_field.grid().n() || a.s != b.s || a.p != b.p || a.lambda != b.lambda
        {
            return domain("runs differ in dimension or parameters");
        }
    }
    let last = reports.last().expect("non-empty");
    let (d0, d1) = (first.diagnostics, last.diagnostics);
    if d1.dominant_fraction < DOMINANCE && d1.dominant_fraction < DOMINANCE * d0.dominant_fraction {
        return Ok(RunClass::Vanishing);
    }
    let l1 = reports.iter().map(|r| r.final_field.grid().l1()).fold(0.0, f64::max);
    if (d1.centroid_x1 - d0.centroid_x1).abs() > DRIFT_FRACTION * l1 {
        return Ok(RunClass::TranslatingX1);
    }
    if d1.rho90 * SHRINK_FACTOR <= d0.rho90 {
        return Ok(RunClass::Concentrating);
    }
    Ok(RunClass::Converged)
}
