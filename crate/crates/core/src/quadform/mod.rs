//! Quadratic forms, singular-weight integrals and their consistency checks.

mod fourier;
mod gagliardo;
pub mod lattice;
mod weights;

use serde::Serialize;

pub use fourier::{FourierOperator, DEFAULT_PADDING};
pub use gagliardo::{GagliardoOperator, GagliardoParts};
pub use weights::{hardy_term, normal_weights, weighted_norm};

use crate::error::Result;
use crate::fields::TrialFunction;
use crate::params::{gamma_constant, Params};

/// ∫|ξ|^{2s}|û|² dξ with the default padding factor.
pub fn fourier_form(u: &TrialFunction, s: f64) -> Result<f64> {
    FourierOperator::new(u.grid(), s, DEFAULT_PADDING)?.form(u)
}

/// (C_{n,s}/2)∬(u(x)−u(y))²|x−y|^{−n−2s} dx dy.
pub fn gagliardo_form(u: &TrialFunction, s: f64) -> Result<f64> {
    GagliardoOperator::new(u.grid(), s)?.form(u)
}

pub fn bilinear_form(u: &TrialFunction, v: &TrialFunction, s: f64) -> Result<f64> {
    u.check_same_grid(v)?;
    GagliardoOperator::new(u.grid(), s)?.bilinear(u, v)
}

/// Gagliardo form with both points in the half-space x₁ > 0.
pub fn regional_form(u: &TrialFunction, s: f64) -> Result<f64> {
    GagliardoOperator::new(u.grid(), s)?.regional(u)
}

/// E(u) = ⟨(−Δ)^s u, u⟩ − λ∫x₁^{−2s}u², with the form from each backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Energy {
    pub fourier: f64,
    pub gagliardo: f64,
}

pub fn energy(u: &TrialFunction, params: &Params) -> Result<Energy> {
    let hardy = hardy_term(u, params.s)?;
    Ok(Energy {
        fourier: fourier_form(u, params.s)? - params.lambda * hardy,
        gagliardo: gagliardo_form(u, params.s)? - params.lambda * hardy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutatorDefect {
    /// G(φu) − B(u, φ²u).
    pub defect: f64,
    /// (C_{n,s}/2)∬u(x)u(y)(φ(x)−φ(y))²|x−y|^{−n−2s}, summed directly.
    pub b_phi: f64,
}

pub fn commutator_defect(u: &TrialFunction, phi: &TrialFunction, s: f64) -> Result<CommutatorDefect> {
    u.check_same_grid(phi)?;
    let op = GagliardoOperator::new(u.grid(), s)?;
    let phi_u = phi.product(u)?;
    let phi2_u = phi.product(&phi_u)?;
    let defect = op.form(&phi_u)? - op.bilinear(u, &phi2_u)?;
    let b_phi = op.pair_weighted_sum(u, phi)?;
    Ok(CommutatorDefect { defect, b_phi })
}

/// Tolerances declared alongside a [`FormReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormTolerances {
    pub cross_check: f64,
    pub decomposition: f64,
}

pub const FORM_TOLERANCES: FormTolerances = FormTolerances { cross_check: 5e-2, decomposition: 5e-2 };

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormMetadata {
    pub n: usize,
    pub extent: Vec<f64>,
    pub m: Vec<usize>,
    pub h: f64,
    pub s: f64,
    pub padding: usize,
    pub padded_size: usize,
    /// The exterior of the box is summed over the complete lattice complement,
    /// so there is no truncation radius.
    pub exterior: &'static str,
    pub tolerances: FormTolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormReport {
    pub fourier_value: f64,
    pub gagliardo_value: f64,
    pub regional_value: f64,
    pub hardy_value: f64,
    pub gagliardo_parts: GagliardoParts,
    /// |fourier − gagliardo| / fourier.
    pub cross_check_defect: f64,
    /// |gagliardo − regional − γ_s·hardy| / gagliardo.
    pub decomposition_residual: f64,
    pub metadata: FormMetadata,
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (diff / scale).abs()
    }
}

pub fn form_report(u: &TrialFunction, s: f64, padding: usize) -> Result<FormReport> {
    let grid = u.grid();
    let fop = FourierOperator::new(grid, s, padding)?;
    let gop = GagliardoOperator::new(grid, s)?;
    let fourier_value = fop.form(u)?;
    let parts = gop.parts(u)?;
    let gagliardo_value = parts.total();
    let regional_value = gagliardo_value - gop.lower_half_interaction(u)?;
    let hardy_value = hardy_term(u, s)?;
    let gamma = gamma_constant(s)?;
    Ok(FormReport {
        fourier_value,
        gagliardo_value,
        regional_value,
        hardy_value,
        gagliardo_parts: parts,
        cross_check_defect: relative(fourier_value - gagliardo_value, fourier_value),
        decomposition_residual: relative(gagliardo_value - regional_value - gamma * hardy_value, gagliardo_value),
        metadata: FormMetadata {
            n: grid.n(),
            extent: grid.extent().to_vec(),
            m: grid.m().to_vec(),
            h: grid.h(),
            s,
            padding,
            padded_size: fop.padded_size(),
            exterior: "lattice complement",
            tolerances: FORM_TOLERANCES,
        },
    })
}
