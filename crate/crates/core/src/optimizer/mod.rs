//! Hardy–Sobolev Rayleigh quotient, its gradient, and preconditioned descent.
//!
//! Q(u) = (⟨(−Δ)^s u, u⟩ − λ∫x₁^{−2s}u²) / ‖x₁^{−b}u‖²_p, with the form taken
//! from the Fourier backend.

mod classify;
mod windows;

use std::io::Write;

use log::debug;
use serde::{Deserialize, Serialize};

pub use classify::{classify_run, RunClass, DOMINANCE, DRIFT_FRACTION, SHRINK_FACTOR};
pub use windows::{mass_density, sliding_windows, strip_cover, window_mass_profile, Window, WindowProfile};

use crate::error::{domain, Error, Result};
use crate::fields::{Grid, TrialFunction};
use crate::par;
use crate::params::Params;
use crate::quadform::{normal_weights, FourierOperator, DEFAULT_PADDING};

/// Discrete quotient on a fixed grid.
pub struct QuotientProblem {
    params: Params,
    grid: Grid,
    form: FourierOperator,
    hardy: Vec<f64>,
    norm: Vec<f64>,
}

/// All pieces of one quotient evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub form: f64,
    pub hardy: f64,
    pub energy: f64,
    pub norm: f64,
    pub quotient: f64,
}

impl QuotientProblem {
    pub fn new(params: &Params, grid: &Grid, padding: usize) -> Result<Self> {
        if params.n != grid.n() {
            return domain(format!("parameters are for n = {}, grid has n = {}", params.n, grid.n()));
        }
        Ok(Self {
            params: *params,
            grid: grid.clone(),
            form: FourierOperator::new(grid, params.s, padding)?,
            hardy: normal_weights(grid, 2.0 * params.s, 2.0)?,
            norm: normal_weights(grid, params.p * params.b, params.p)?,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn stride(&self) -> usize {
        self.grid.stride(0)
    }

    pub fn evaluate(&self, v: &[f64]) -> Evaluation {
        let st = self.stride();
        let p = self.params.p;
        let form = self.form.form_values(v);
        let hardy = par::sum_by(v.len(), |j| self.hardy[j / st] * v[j] * v[j]);
        let norm = par::sum_by(v.len(), |j| self.norm[j / st] * v[j].abs().powf(p)).powf(1.0 / p);
        let energy = form - self.params.lambda * hardy;
        Evaluation { form, hardy, energy, norm, quotient: energy / (norm * norm) }
    }

    pub fn quotient(&self, v: &[f64]) -> Result<f64> {
        let e = self.evaluate(v);
        if e.norm == 0.0 {
            return Err(Error::Undefined("quotient of a field with zero weighted norm".into()));
        }
        Ok(e.quotient)
    }

    /// A·v − λW·v, the first variation of the energy (halved).
    fn energy_operator(&self, v: &[f64]) -> Vec<f64> {
        let st = self.stride();
        let mut out = self.form.apply_values(v);
        let lambda = self.params.lambda;
        for (j, o) in out.iter_mut().enumerate() {
            *o -= lambda * self.hardy[j / st] * v[j];
        }
        out
    }

    /// 2(Av − λWv)/N² − 2E·N^{−3}·∂N, zero on boundary nodes.
    pub fn gradient(&self, v: &[f64]) -> Result<Vec<f64>> {
        let e = self.evaluate(v);
        if e.norm == 0.0 {
            return Err(Error::Undefined("gradient at a field with zero weighted norm".into()));
        }
        Ok(self.gradient_with(v, &e))
    }

    fn gradient_with(&self, v: &[f64], e: &Evaluation) -> Vec<f64> {
        let st = self.stride();
        let p = self.params.p;
        let n2 = e.norm * e.norm;
        let dn_scale = e.norm.powf(1.0 - p);
        let mut g = self.energy_operator(v);
        for (j, gj) in g.iter_mut().enumerate() {
            if self.grid.is_boundary(j) {
                *gj = 0.0;
                continue;
            }
            let dn = dn_scale * self.norm[j / st] * v[j].abs().powf(p - 2.0) * v[j];
            *gj = 2.0 * *gj / n2 - 2.0 * e.energy / (n2 * e.norm) * dn;
        }
        g
    }

    /// Relative residual of A u − λW u = V|u|^{p−2}u after rescaling u so that
    /// N^{p−2} = Q (interior nodes, Euclidean norms).
    pub fn euler_lagrange_residual(&self, v: &[f64]) -> Result<f64> {
        let e = self.evaluate(v);
        if e.norm == 0.0 || !(e.quotient > 0.0) {
            return Err(Error::Undefined("residual needs a field with positive quotient".into()));
        }
        let p = self.params.p;
        let target = e.quotient.powf(1.0 / (p - 2.0));
        let scale = target / e.norm;
        let w: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let lhs = self.energy_operator(&w);
        let st = self.stride();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..w.len() {
            if self.grid.is_boundary(j) {
                continue;
            }
            let rhs = self.norm[j / st] * w[j].abs().powf(p - 2.0) * w[j];
            num += (lhs[j] - rhs).powi(2);
            den += lhs[j].powi(2);
        }
        Ok((num / den).sqrt())
    }

    /// Newton-scaled descent direction −(N²/2hⁿ)·(|ξ|^{2s}+μ)^{−1} g.
    fn direction(&self, g: &[f64], norm: f64, mu: f64) -> Vec<f64> {
        let scale = -norm * norm / (2.0 * self.grid.cell_volume());
        let mut d = self.form.precondition(g, mu);
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = if self.grid.is_boundary(j) { 0.0 } else { scale * *dj };
        }
        d
    }
}

fn check_field(u: &TrialFunction, params: &Params) -> Result<QuotientProblem> {
    if u.is_zero() {
        return Err(Error::Undefined("the zero field has no quotient".into()));
    }
    QuotientProblem::new(params, u.grid(), DEFAULT_PADDING)
}

/// (⟨(−Δ)^s u, u⟩ − λ∫x₁^{−2s}u²) / ‖x₁^{−b}u‖²_p.
pub fn rayleigh_quotient(u: &TrialFunction, params: &Params) -> Result<f64> {
    check_field(u, params)?.quotient(u.values())
}

pub fn quotient_gradient(u: &TrialFunction, params: &Params) -> Result<TrialFunction> {
    let g = check_field(u, params)?.gradient(u.values())?;
    TrialFunction::new(u.grid().clone(), g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Backtracking {
    pub armijo: f64,
    pub shrink: f64,
    pub max_halvings: usize,
}

impl Default for Backtracking {
    fn default() -> Self {
        Self { armijo: 1e-4, shrink: 0.5, max_halvings: 60 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop when the quotient changes by less than `tol` (relative) over 10 iterations.
    pub tol: f64,
    pub backtracking: Backtracking,
    /// Shift μ of the preconditioner (|ξ|^{2s} + μ)^{−1}.
    pub preconditioner_shift: f64,
    pub padding: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-8,
            backtracking: Backtracking::default(),
            preconditioner_shift: 0.1,
            padding: DEFAULT_PADDING,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIters,
    Stall,
}

/// Summary of where the weighted p-mass of a field sits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassDiagnostics {
    pub centroid_x1: f64,
    /// Radius about the centroid holding 90% of the mass.
    pub rho90: f64,
    /// Largest fraction of the mass held by one sliding window.
    pub dominant_fraction: f64,
}

pub fn mass_diagnostics(u: &TrialFunction, params: &Params) -> Result<(MassDiagnostics, WindowProfile)> {
    let g = u.grid();
    let n = g.n();
    let density = mass_density(u, params)?;
    let total: f64 = density.iter().sum();
    if total == 0.0 {
        return Err(Error::Undefined("field carries no weighted mass".into()));
    }
    let mut centroid = [0.0; 3];
    for (j, d) in density.iter().enumerate() {
        let x = g.point(j);
        for a in 0..n {
            centroid[a] += d * x[a] / total;
        }
    }
    let mut radial: Vec<(f64, f64)> = density
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 0.0)
        .map(|(j, d)| {
            let x = g.point(j);
            let r2: f64 = (0..n).map(|a| (x[a] - centroid[a]).powi(2)).sum();
            (r2.sqrt(), *d)
        })
        .collect();
    radial.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let mut rho90 = radial.last().map_or(0.0, |r| r.0);
    for (r, d) in &radial {
        acc += d;
        if acc >= 0.9 * total {
            rho90 = *r;
            break;
        }
    }
    let profile = window_mass_profile(u, params, &sliding_windows(g))?;
    let dominant_fraction = profile.dominant().map_or(0.0, |d| d.1);
    Ok((MassDiagnostics { centroid_x1: centroid[0], rho90, dominant_fraction }, profile))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub params: Params,
    pub options: MinimizeOptions,
    pub quotient_trace: Vec<f64>,
    /// Last entry of the trace.
    pub best_quotient: f64,
    pub termination: Termination,
    pub iterations: usize,
    /// Euclidean norm of the quotient gradient at the final field.
    pub gradient_norm: f64,
    pub euler_lagrange_residual: f64,
    pub diagnostics: MassDiagnostics,
    pub window_profile: WindowProfile,
    /// Minimizer normalized to unit weighted norm.
    pub final_field: TrialFunction,
}

impl MinimizerReport {
    /// Final field rescaled so that ‖x₁^{−b}u‖_p^p = Q^{p/(p−2)}.
    pub fn normalized_field(&self) -> TrialFunction {
        let p = self.params.p;
        self.final_field.scaled(self.best_quotient.max(0.0).powf(1.0 / (p - 2.0)))
    }

    /// Two-column CSV `iteration,quotient`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "quotient"])?;
        for (i, q) in self.quotient_trace.iter().enumerate() {
            w.write_record([i.to_string(), format!("{q:?}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Whole-space Sobolev constant from the quotient of the bubble U_s.
///
/// The bubble is centred in the box at scales σ = 8h, 4h, 2h. Truncation to
/// the box perturbs the quotient by roughly c·σ^{n−2s}, which is removed by
/// Richardson extrapolation over consecutive scales; the change between the
/// two extrapolants is reported as the uncertainty.
pub fn sobolev_estimate(grid: &Grid, s: f64) -> Result<crate::params::Estimate> {
    let n = grid.n();
    let params = Params::critical(n, s, 0.0)?;
    let problem = QuotientProblem::new(&params, grid, DEFAULT_PADDING)?;
    let mut center = vec![0.0; n];
    center[0] = grid.l1() / 2.0;
    let q: Vec<f64> = [8.0, 4.0, 2.0]
        .iter()
        .map(|k| {
            let u = crate::fields::bubble(grid, &center, k * grid.h(), s)?;
            problem.quotient(u.values())
        })
        .collect::<Result<_>>()?;
    let r = 2f64.powf(n as f64 - 2.0 * s);
    let extrapolate = |coarse: f64, fine: f64| (fine * r - coarse) / (r - 1.0);
    let (e1, e2) = (extrapolate(q[0], q[1]), extrapolate(q[1], q[2]));
    Ok(crate::params::Estimate { value: e2, uncertainty: (e2 - e1).abs() })
}

/// Preconditioned gradient descent on the unit sphere of the weighted norm.
pub fn minimize_quotient(params: &Params, init: &TrialFunction, opts: &MinimizeOptions) -> Result<MinimizerReport> {
    let problem = QuotientProblem::new(params, init.grid(), opts.padding)?;
    let n0 = problem.evaluate(init.values()).norm;
    if !(n0 > 0.0) {
        return Err(Error::Undefined("initial field has zero weighted norm".into()));
    }
    let mut u: Vec<f64> = init.values().iter().map(|v| v / n0).collect();
    let mut eval = problem.evaluate(&u);
    let mut trace = vec![eval.quotient];
    let bt = opts.backtracking;
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let g = problem.gradient_with(&u, &eval);
        let mut d = problem.direction(&g, eval.norm, opts.preconditioner_shift);
        let mut slope: f64 = par::sum_by(g.len(), |j| g[j] * d[j]);
        if !(slope < 0.0) {
            d = g.iter().map(|x| -x).collect();
            slope = par::sum_by(g.len(), |j| g[j] * d[j]);
        }
        if -slope <= 0.1 * opts.tol * eval.quotient.abs() {
            termination = Termination::Tolerance;
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=bt.max_halvings {
            let mut v: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let nv = problem.evaluate(&v).norm;
            if nv > 0.0 && nv.is_finite() {
                v.iter_mut().for_each(|x| *x /= nv);
                let ev = problem.evaluate(&v);
                if ev.quotient < eval.quotient && ev.quotient <= eval.quotient + bt.armijo * t * slope {
                    accepted = Some((v, ev));
                    break;
                }
            }
            t *= bt.shrink;
        }
        let Some((v, ev)) = accepted else {
            termination = Termination::Stall;
            break;
        };
        u = v;
        eval = ev;
        trace.push(eval.quotient);
        iterations += 1;
        if iterations % 100 == 0 {
            debug!("iteration {iterations}: quotient {:.10e}, step {t}", eval.quotient);
        }
        if trace.len() > 10 {
            let old = trace[trace.len() - 11];
            if (old - eval.quotient).abs() < opts.tol * eval.quotient.abs() {
                termination = Termination::Tolerance;
                break;
            }
        }
    }
    let g = problem.gradient_with(&u, &eval);
    let gradient_norm = par::sum_by(g.len(), |j| g[j] * g[j]).sqrt();
    let euler_lagrange_residual = problem.euler_lagrange_residual(&u).unwrap_or(f64::NAN);
    let final_field = TrialFunction::with_zero_trace(init.grid().clone(), u);
    let (diagnostics, window_profile) = mass_diagnostics(&final_field, params)?;
    Ok(MinimizerReport {
        params: *params,
        options: *opts,
        best_quotient: *trace.last().expect("trace starts non-empty"),
        quotient_trace: trace,
        termination,
        iterations,
        gradient_norm,
        euler_lagrange_residual,
        diagnostics,
        window_profile,
        final_field,
    })
}
