//! Fourier form ∫|ξ|^{2s}|û|² dξ on a zero-padded periodic grid.
//!
//! With û(ξ) = (2π)^{−n/2}∫u e^{−ix·ξ} and the rectangle rule on the torus
//! of period P = Mh, the form is (h^n/M^n) Σ_k |ξ_k|^{2s}|DFT(u)_k|². The torus
//! form differs from the form on ℝⁿ by the interaction of u with its periodic
//! images; the leading terms of that interaction are moment-expanded and added
//! back, so the padding only has to separate the images, not make them negligible.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::gagliardo::{embed, restrict};
use crate::error::{domain, Error, Result};
use crate::fft::{next_smooth, FftNd};
use crate::fields::{Grid, TrialFunction};
use crate::par;
use crate::params::gagliardo_constant;
use crate::special::epstein_zeta;

pub const DEFAULT_PADDING: usize = 4;

/// Second-order image correction C·[a0 S0² + a2 (2 S0 S2 − 2|S1|²)],
/// with moments S_k of u about the box centre.
#[derive(Clone, Debug)]
struct ImageCorrection {
    c_ns: f64,
    a0: f64,
    a2: f64,
    center: [f64; 3],
}

pub struct FourierOperator {
    grid: Grid,
    s: f64,
    padding: usize,
    fft: FftNd,
    multiplier: Vec<f64>,
    image: Option<ImageCorrection>,
}

impl FourierOperator {
    pub fn new(grid: &Grid, s: f64, padding: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return domain(format!("order s = {s} must lie in (0, 1)"));
        }
        let mut op = Self::build(grid, s, padding)?;
        let n = grid.n();
        let q = n as f64 + 2.0 * s;
        let period = op.padded_size() as f64 * grid.h();
        let mut center = [0.0; 3];
        center[0] = grid.l1() / 2.0;
        op.image = Some(ImageCorrection {
            c_ns: gagliardo_constant(n, s)?,
            a0: period.powf(-q) * epstein_zeta(n, q),
            a2: q * (q + 2.0 - n as f64) / (2.0 * n as f64) * period.powf(-q - 2.0) * epstein_zeta(n, q + 2.0),
            center,
        });
        Ok(op)
    }

    /// Order s = 0: the multiplier is identically 1 and the form is ‖u‖₂².
    /// Pins the transform normalization.
    pub fn plancherel(grid: &Grid, padding: usize) -> Result<Self> {
        Self::build(grid, 0.0, padding)
    }

    fn build(grid: &Grid, s: f64, padding: usize) -> Result<Self> {
        if padding < 2 {
            return Err(Error::Domain(format!("padding factor {padding} must be at least 2")));
        }
        let n = grid.n();
        let big = *grid.m().iter().max().expect("non-empty grid");
        let size = next_smooth(padding * big);
        let dims = vec![size; n];
        let fft = FftNd::new(&dims);
        let dxi = 2.0 * PI / (size as f64 * grid.h());
        let freq = |i: usize| if i <= size / 2 { i as f64 } else { i as f64 - size as f64 };
        let mut multiplier = vec![0.0; fft.len()];
        par::fill(&mut multiplier, |k| {
            let mut rest = k;
            let mut r2 = 0.0;
            for _ in 0..n {
                let f = freq(rest % size);
                rest /= size;
                r2 += f * f;
            }
            (dxi * dxi * r2).powf(s)
        });
        Ok(Self { grid: grid.clone(), s, padding, fft, multiplier, image: None })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    /// Points per axis of the periodic grid.
    pub fn padded_size(&self) -> usize {
        self.fft.dims()[0]
    }

    fn torus_scale(&self) -> f64 {
        let g = &self.grid;
        (g.h() / self.padded_size() as f64).powi(g.n() as i32)
    }

    fn check(&self, u: &TrialFunction) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch("field and operator grids differ".into()));
        }
        Ok(())
    }

    fn transform(&self, v: &[f64]) -> Vec<Complex64> {
        let mut buf = embed(&self.grid, self.fft.dims(), v);
        self.fft.forward(&mut buf);
        buf
    }

    /// Raw moments (Σu, Σu·x, Σu|x|²) about the box centre, without h^n.
    fn moments(&self, v: &[f64], center: &[f64; 3]) -> (f64, [f64; 3], f64) {
        let g = &self.grid;
        let n = g.n();
        let s0 = par::sum_by(v.len(), |j| v[j]);
        let mut s1 = [0.0; 3];
        for (a, slot) in s1.iter_mut().enumerate().take(n) {
            *slot = par::sum_by(v.len(), |j| v[j] * (g.point(j)[a] - center[a]));
        }
        let s2 = par::sum_by(v.len(), |j| {
            let x = g.point(j);
            v[j] * (0..n).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>()
        });
        (s0, s1, s2)
    }

    fn image_value(&self, v: &[f64]) -> f64 {
        let Some(img) = &self.image else { return 0.0 };
        let (s0, s1, s2) = self.moments(v, &img.center);
        let s11: f64 = s1.iter().map(|x| x * x).sum();
        let vol2 = self.grid.cell_volume().powi(2);
        img.c_ns * vol2 * (img.a0 * s0 * s0 + img.a2 * (2.0 * s0 * s2 - 2.0 * s11))
    }

    pub fn form(&self, u: &TrialFunction) -> Result<f64> {
        self.check(u)?;
        Ok(self.form_values(u.values()))
    }

    pub(crate) fn form_values(&self, v: &[f64]) -> f64 {
        let spec = self.transform(v);
        let w = &self.multiplier;
        let torus = par::sum_by(spec.len(), |k| w[k] * spec[k].norm_sqr());
        torus * self.torus_scale() + self.image_value(v)
    }

    /// Matrix-free A·u with uᵀA u = form(u).
    pub fn apply(&self, u: &TrialFunction) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self.apply_values(u.values()))
    }

    pub(crate) fn apply_values(&self, v: &[f64]) -> Vec<f64> {
        let mut buf = self.transform(v);
        let w = &self.multiplier;
        par::for_each_chunk_mut(&mut buf, par::CHUNK, |start, chunk| {
            for (off, z) in chunk.iter_mut().enumerate() {
                *z *= w[start + off];
            }
        });
        self.fft.inverse(&mut buf);
        let mut out = vec![0.0; v.len()];
        restrict(&self.grid, self.fft.dims(), &buf, &mut out, self.torus_scale());
        if let Some(img) = &self.image {
            let g = &self.grid;
            let n = g.n();
            let (s0, s1, s2) = self.moments(v, &img.center);
            let coef = img.c_ns * g.cell_volume().powi(2);
            for (j, slot) in out.iter_mut().enumerate() {
                let x = g.point(j);
                let mut r2 = 0.0;
                let mut xs1 = 0.0;
                for a in 0..n {
                    let d = x[a] - img.center[a];
                    r2 += d * d;
                    xs1 += d * s1[a];
                }
                *slot += coef * (img.a0 * s0 + img.a2 * (s2 + r2 * s0 - 2.0 * xs1));
            }
        }
        out
    }

    /// Applies the inverse of the periodic operator (|ξ|^{2s} + μ), without the
    /// h^n/M^n form scaling. Used as a descent preconditioner.
    pub fn precondition(&self, g: &[f64], mu: f64) -> Vec<f64> {
        let mut buf = self.transform(g);
        let w = &self.multiplier;
        par::for_each_chunk_mut(&mut buf, par::CHUNK, |start, chunk| {
            for (off, z) in chunk.iter_mut().enumerate() {
                *z /= w[start + off] + mu;
            }
        });
        self.fft.inverse(&mut buf);
        let mut out = vec![0.0; g.len()];
        restrict(&self.grid, self.fft.dims(), &buf, &mut out, 1.0 / self.fft.len() as f64);
        out
    }
}
