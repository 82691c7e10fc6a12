//! Discrete fractional Hardy–Sobolev problems on half-spaces.
//!
//! Fields live on uniform boxes `[0, L1] × [−L′, L′]^{n−1}` and vanish on the
//! box boundary. [`quadform`] evaluates the fractional form ⟨(−Δ)^s u, u⟩ in
//! Fourier and in Gagliardo (lattice) form, the regional half-space form and
//! the singular-weight integrals; [`optimizer`] minimizes the Hardy–Sobolev
//! Rayleigh quotient and classifies the behaviour of minimizing sequences.

// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod fields;
pub mod optimizer;
pub mod par;
pub mod params;
pub mod quadform;
pub mod special;

pub use error::{Error, Result};
pub use fields::{Grid, TrialFunction};
pub use params::{ConstantsTable, Estimate, Params};
