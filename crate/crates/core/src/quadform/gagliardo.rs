//! Gagliardo double sum on the lattice hZⁿ.
//!
//! With u extended by zero, the pair sum over all distinct lattice points is
//! h^{2n} Σ_{x≠y} (u(x)−u(y))² K(x−y) = 2h^{n−2s} [Z Σu² − Σ u (K⋆u)], where
//! Z is the kernel summed over the whole lattice and K⋆ the in-box
//! convolution (lattice units). Pairs closer than one cell are missing from
//! the sum; they are restored to leading order by a gradient term carrying
//! the analytically continued lattice sum Σ|k|^{2−n−2s}.

use rustfft::num_complex::Complex64;

use super::lattice::{lower_half_sums, near_diagonal_sum, self_sum};
use crate::error::Result;
use crate::fft::{next_smooth, FftNd};
use crate::fields::{Grid, TrialFunction};
use crate::par;
use crate::params::gagliardo_constant;

/// Above this many support nodes the direct pair loop of
/// [`GagliardoOperator::pair_weighted_sum`] switches to convolutions.
const DIRECT_PAIR_LIMIT: usize = 12_000;

enum Convolution {
    /// K(k) for k = 0..m (entry 0 unused).
    Direct(Vec<f64>),
    Spectral {
        fft: FftNd,
        kernel_hat: Vec<Complex64>,
    },
}

/// Lattice Gagliardo form on a fixed grid and order s.
pub struct GagliardoOperator {
    grid: Grid,
    s: f64,
    c_ns: f64,
    self_sum: f64,
    near_diag: f64,
    conv: Convolution,
}

/// The form split into its pieces.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GagliardoParts {
    /// Pairs with both nodes in the box.
    pub pair: f64,
    /// Pairs with one node outside the box, where u = 0.
    pub exterior: f64,
    /// Gradient correction for the excluded near-diagonal cell.
    pub near_diagonal: f64,
}

impl GagliardoParts {
    pub fn total(&self) -> f64 {
        self.pair + self.exterior + self.near_diagonal
    }
}

fn kernel(offset: &[i64], q: f64) -> f64 {
    let r2: i64 = offset.iter().map(|k| k * k).sum();
    if r2 == 0 {
        0.0
    } else {
        (r2 as f64).powf(-q / 2.0)
    }
}

impl GagliardoOperator {
    pub fn new(grid: &Grid, s: f64) -> Result<Self> {
        let n = grid.n();
        let c_ns = gagliardo_constant(n, s)?;
        let q = n as f64 + 2.0 * s;
        let conv = if n == 1 {
            let m = grid.m()[0];
            Convolution::Direct((0..m).map(|k| kernel(&[k as i64], q)).collect())
        } else {
            let dims: Vec<usize> = grid.m().iter().map(|&m| next_smooth(2 * m - 1)).collect();
            let fft = FftNd::new(&dims);
            let len = fft.len();
            let mut kernel_hat = vec![Complex64::default(); len];
            let stride = |a: usize| dims[a + 1..].iter().product::<usize>();
            par::for_each_chunk_mut(&mut kernel_hat, par::CHUNK, |start, chunk| {
                for (off, slot) in chunk.iter_mut().enumerate() {
                    let mut rest = start + off;
                    let mut k = [0i64; 3];
                    let mut inside = true;
                    for a in 0..n {
                        let i = (rest / stride(a)) % dims[a];
                        rest %= stride(a);
                        let m = grid.m()[a];
                        k[a] = if i < m {
                            i as i64
                        } else if i + m > dims[a] {
                            i as i64 - dims[a] as i64
                        } else {
                            inside = false;
                            0
                        };
                    }
                    if inside {
                        *slot = Complex64::new(kernel(&k[..n], q), 0.0);
                    }
                }
            });
            fft.forward(&mut kernel_hat);
            Convolution::Spectral { fft, kernel_hat }
        };
        Ok(Self { grid: grid.clone(), s, c_ns, self_sum: self_sum(n, s), near_diag: near_diagonal_sum(n, s), conv })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// h^{n−2s}, the common scale of every term in lattice units.
    fn scale(&self) -> f64 {
        self.grid.h().powf(self.grid.n() as f64 - 2.0 * self.s)
    }

    /// (K⋆v)_j = Σ_{k≠j, k in box} v_k |j−k|^{−n−2s}, lattice units.
    pub fn convolve(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        match &self.conv {
            Convolution::Direct(k) => {
                par::fill(&mut out, |j| {
                    let mut acc = par::Compensated::default();
                    for (i, &vi) in v.iter().enumerate() {
                        if vi != 0.0 && i != j {
                            acc.add(vi * k[i.abs_diff(j)]);
                        }
                    }
                    acc.value()
                });
            }
            Convolution::Spectral { fft, kernel_hat } => {
                let mut buf = embed(&self.grid, fft.dims(), v);
                fft.forward(&mut buf);
                par::for_each_chunk_mut(&mut buf, par::CHUNK, |start, chunk| {
                    for (off, z) in chunk.iter_mut().enumerate() {
                        *z *= kernel_hat[start + off];
                    }
                });
                fft.inverse(&mut buf);
                let norm = 1.0 / fft.len() as f64;
                restrict(&self.grid, fft.dims(), &buf, &mut out, norm);
            }
        }
        out
    }

    /// Σ_a Σ_j (Δ_a u)_j (Δ_a v)_j with central differences u_{j+e_a} − u_{j−e_a}
    /// and zero extension outside the box.
    fn difference_product(&self, u: &[f64], v: &[f64]) -> f64 {
        let g = &self.grid;
        let n = g.n();
        let strides: Vec<usize> = (0..n).map(|a| g.stride(a)).collect();
        par::sum_by(u.len(), |j| {
            let mi = g.multi_index(j);
            let mut acc = 0.0;
            for a in 0..n {
                let st = strides[a];
                let up = mi[a] + 1 < g.m()[a];
                let down = mi[a] > 0;
                let du = if up { u[j + st] } else { 0.0 } - if down { u[j - st] } else { 0.0 };
                let dv = if up { v[j + st] } else { 0.0 } - if down { v[j - st] } else { 0.0 };
                acc += du * dv;
            }
            acc
        })
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        par::sum_by(a.len(), |j| a[j] * b[j])
    }

    /// Symmetric bilinear form B(u, v) with B(u, u) the Gagliardo form.
    pub fn bilinear(&self, u: &TrialFunction, v: &TrialFunction) -> Result<f64> {
        self.check(u)?;
        u.check_same_grid(v)?;
        let (uv, vv) = (u.values(), v.values());
        let kv = self.convolve(vv);
        let ku = self.convolve(uv);
        // symmetrize the convolution term so that B(u,v) = B(v,u) to rounding
        let cross = 0.5 * (Self::dot(uv, &kv) + Self::dot(vv, &ku));
        let diag = Self::dot(uv, vv);
        let grad = self.difference_product(uv, vv);
        Ok(0.5 * self.c_ns * self.scale() * (2.0 * self.self_sum * diag - 2.0 * cross - 0.25 * self.near_diag * grad))
    }

    pub fn form(&self, u: &TrialFunction) -> Result<f64> {
        Ok(self.parts(u)?.total())
    }

    pub fn parts(&self, u: &TrialFunction) -> Result<GagliardoParts> {
        self.check(u)?;
        let uv = u.values();
        let ku = self.convolve(uv);
        let ones: Vec<f64> = vec![1.0; uv.len()];
        let inside = self.convolve(&ones);
        let pre = 0.5 * self.c_ns * self.scale();
        let pair = pre * 2.0 * par::sum_by(uv.len(), |j| uv[j] * (uv[j] * inside[j] - ku[j]));
        let exterior = pre * 2.0 * par::sum_by(uv.len(), |j| uv[j] * uv[j] * (self.self_sum - inside[j]));
        let near_diagonal = -pre * 0.25 * self.near_diag * self.difference_product(uv, uv);
        Ok(GagliardoParts { pair, exterior, near_diagonal })
    }

    /// C_{n,s} Σ_j u_j² Σ_{y in closed lower half-lattice} K(x_j − y) h^n, i.e. the
    /// interaction of u with ℝⁿ₋ (wall layer at half weight).
    pub fn lower_half_interaction(&self, u: &TrialFunction) -> Result<f64> {
        self.check(u)?;
        let g = &self.grid;
        let lower = lower_half_sums(g.n(), self.s, g.m()[0]);
        let stride = g.stride(0);
        let vals = u.values();
        let acc = par::sum_by(vals.len(), |j| vals[j] * vals[j] * lower[j / stride]);
        Ok(self.c_ns * self.scale() * acc)
    }

    /// Gagliardo form restricted to pairs in the half-space.
    pub fn regional(&self, u: &TrialFunction) -> Result<f64> {
        Ok(self.form(u)? - self.lower_half_interaction(u)?)
    }

    /// (C_{n,s}/2) h^{2n} Σ_{x≠y} u(x) u(y) (φ(x)−φ(y))² |x−y|^{−n−2s}, plus the
    /// near-diagonal gradient term of the same pair sum.
    pub fn pair_weighted_sum(&self, u: &TrialFunction, phi: &TrialFunction) -> Result<f64> {
        self.check(u)?;
        u.check_same_grid(phi)?;
        let g = &self.grid;
        let n = g.n();
        let q = n as f64 + 2.0 * self.s;
        let (uv, pv) = (u.values(), phi.values());
        let support: Vec<usize> = (0..uv.len()).filter(|&j| uv[j] != 0.0).collect();
        let pairs = if support.len() <= DIRECT_PAIR_LIMIT {
            let parts = par::map_collect(support.len(), |a| {
                let ja = support[a];
                let xa = g.multi_index(ja);
                let mut acc = par::Compensated::default();
                for &jb in &support {
                    if jb == ja {
                        continue;
                    }
                    let xb = g.multi_index(jb);
                    let mut off = [0i64; 3];
                    for d in 0..n {
                        off[d] = xa[d] as i64 - xb[d] as i64;
                    }
                    let dphi = pv[ja] - pv[jb];
                    acc.add(uv[ja] * uv[jb] * dphi * dphi * kernel(&off[..n], q));
                }
                acc.value()
            });
            let mut total = par::Compensated::default();
            for p in parts {
                total.add(p);
            }
            total.value()
        } else {
            // (φx−φy)² = φx² + φy² − 2φxφy
            let ku = self.convolve(uv);
            let up: Vec<f64> = uv.iter().zip(pv).map(|(a, b)| a * b).collect();
            let kup = self.convolve(&up);
            2.0 * par::sum_by(uv.len(), |j| uv[j] * pv[j] * pv[j] * ku[j] - up[j] * kup[j])
        };
        // near-diagonal: u(x)u(y)(φ(x)−φ(y))² ≈ u(x)²|∇φ(x)|²|x−y|²
        let u2: Vec<f64> = uv.iter().map(|v| v * v).collect();
        let strides: Vec<usize> = (0..n).map(|a| g.stride(a)).collect();
        let grad = par::sum_by(uv.len(), |j| {
            if u2[j] == 0.0 {
                return 0.0;
            }
            let mi = g.multi_index(j);
            let mut acc = 0.0;
            for a in 0..n {
                let st = strides[a];
                let up = if mi[a] + 1 < g.m()[a] { pv[j + st] } else { 0.0 };
                let down = if mi[a] > 0 { pv[j - st] } else { 0.0 };
                acc += (up - down) * (up - down);
            }
            u2[j] * acc
        });
        Ok(0.5 * self.c_ns * self.scale() * (pairs - 0.25 * self.near_diag * grad))
    }

    fn check(&self, u: &TrialFunction) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(crate::Error::GridMismatch("field and operator grids differ".into()));
        }
        Ok(())
    }
}

/// Copies box values into the corner of a zeroed padded array.
pub(crate) fn embed(grid: &Grid, dims: &[usize], v: &[f64]) -> Vec<Complex64> {
    let total: usize = dims.iter().product();
    let mut buf = vec![Complex64::default(); total];
    let n = grid.n();
    let pad_stride = |a: usize| dims[a + 1..].iter().product::<usize>();
    for (j, &val) in v.iter().enumerate() {
        if val == 0.0 {
            continue;
        }
        let mi = grid.multi_index(j);
        let pos: usize = (0..n).map(|a| mi[a] * pad_stride(a)).sum();
        buf[pos] = Complex64::new(val, 0.0);
    }
    buf
}

/// `out[j] = scale · Re(buf[j])` for box nodes j.
pub(crate) fn restrict(grid: &Grid, dims: &[usize], buf: &[Complex64], out: &mut [f64], scale: f64) {
    let n = grid.n();
    let pad_strides: Vec<usize> = (0..n).map(|a| dims[a + 1..].iter().product()).collect();
    par::fill(out, |j| {
        let mi = grid.multi_index(j);
        let pos: usize = (0..n).map(|a| mi[a] * pad_strides[a]).sum();
        scale * buf[pos].re
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_convolution_matches_direct_sum() {
        let g = Grid::new(4.0, 2.0, &[9, 9]).unwrap();
        let op = GagliardoOperator::new(&g, 0.3).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|j| ((j * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let fast = op.convolve(&v);
        let q = 2.6;
        for j in 0..g.len() {
            let a = g.multi_index(j);
            let mut want = 0.0;
            for (i, &vi) in v.iter().enumerate() {
                let b = g.multi_index(i);
                want += vi * kernel(&[a[0] as i64 - b[0] as i64, a[1] as i64 - b[1] as i64], q);
            }
            assert!((fast[j] - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn parts_sum_to_form_and_pair_part_matches_double_loop() {
        let g = Grid::new(8.0, 0.0, &[17]).unwrap();
        let u = TrialFunction::from_fn(g.clone(), |x| (x[0] * 0.9).sin() * x[0] * (8.0 - x[0])).unwrap();
        let s = 0.4;
        let op = GagliardoOperator::new(&g, s).unwrap();
        let parts = op.parts(&u).unwrap();
        assert!((parts.total() - op.form(&u).unwrap()).abs() < 1e-12 * parts.total().abs());
        let h = g.h();
        let c = gagliardo_constant(1, s).unwrap();
        let vals = u.values();
        let mut pair = 0.0;
        for i in 0..17 {
            for j in 0..17 {
                if i != j {
                    let d = (vals[i] - vals[j]).powi(2);
                    pair += d * ((i as f64 - j as f64).abs() * h).powf(-1.0 - 2.0 * s);
                }
            }
        }
        let want = 0.5 * c * h * h * pair;
        assert!(((parts.pair - want) / want).abs() < 1e-12);
        assert!(parts.exterior > 0.0);
    }
}
