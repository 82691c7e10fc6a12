use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Uniform tensor grid on `[0, L1] × [−L′, L′]^{n−1}`.
///
/// All axes share one spacing `h`; the lattice forms rely on an isotropic lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    /// Full per-axis extents: `L1` on axis 0, `2L′` on the others.
    extent: Vec<f64>,
    m: Vec<usize>,
    h: f64,
}

const MIN_NODES: usize = 8;

impl Grid {
    /// `l1` is the normal extent, `half_width` the lateral half-width `L′`
    /// (ignored for n = 1), `m` the per-axis node counts.
    pub fn new(l1: f64, half_width: f64, m: &[usize]) -> Result<Self> {
        let n = m.len();
        if !(1..=3).contains(&n) {
            return domain(format!("grid dimension {n} must be 1, 2 or 3"));
        }
        if m.iter().any(|&k| k < MIN_NODES) {
            return domain(format!("every axis needs at least {MIN_NODES} nodes, got {m:?}"));
        }
        if !(l1 > 0.0 && l1.is_finite()) || (n > 1 && !(half_width > 0.0 && half_width.is_finite())) {
            return domain("box extents must be positive and finite");
        }
        let mut extent = vec![l1];
        extent.extend(std::iter::repeat_n(2.0 * half_width, n - 1));
        let h = l1 / (m[0] - 1) as f64;
        for a in 1..n {
            let ha = extent[a] / (m[a] - 1) as f64;
            if ((ha - h) / h).abs() > 1e-12 {
                return Err(Error::GridMismatch(format!(
                    "spacing must be equal on all axes: axis 0 has {h}, axis {a} has {ha}"
                )));
            }
        }
        Ok(Self { n, extent, m: m.to_vec(), h })
    }

    /// Default desk-scale grid for dimension `n`.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::with_resolution(1, 4097),
            2 => Self::with_resolution(2, 257),
            3 => Self::with_resolution(3, 65),
            _ => domain(format!("no default grid for n = {n}")),
        }
    }

    /// Default box for dimension `n` with `m` nodes per axis.
    pub fn with_resolution(n: usize, m: usize) -> Result<Self> {
        let (l1, hw) = match n {
            1 => (64.0, 0.0),
            2 => (32.0, 16.0),
            3 => (16.0, 8.0),
            _ => return domain(format!("no default box for n = {n}")),
        };
        Self::new(l1, hw, &vec![m; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn l1(&self) -> f64 {
        self.extent[0]
    }

    /// Lateral half-width `L′`, zero for n = 1.
    pub fn half_width(&self) -> f64 {
        if self.n > 1 {
            self.extent[1] / 2.0
        } else {
            0.0
        }
    }

    pub fn lower(&self, axis: usize) -> f64 {
        if axis == 0 {
            0.0
        } else {
            -self.extent[axis] / 2.0
        }
    }

    pub fn len(&self) -> usize {
        self.m.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    /// Row-major stride of `axis` (axis 0 slowest).
    pub fn stride(&self, axis: usize) -> usize {
        self.m[axis + 1..].iter().product()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lower(axis) + i as f64 * self.h
    }

    /// Multi-index of a flat node index; unused trailing slots are 0.
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rest = idx;
        for a in (0..self.n).rev() {
            out[a] = rest % self.m[a];
            rest /= self.m[a];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.m).fold(0, |acc, (&i, &m)| acc * m + i)
    }

    /// Node position; unused trailing coordinates are 0.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let mut x = [0.0; 3];
        for a in 0..self.n {
            x[a] = self.coord(a, mi[a]);
        }
        x
    }

    /// Index along the normal axis.
    pub fn normal_index(&self, idx: usize) -> usize {
        idx / self.stride(0)
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let mi = self.multi_index(idx);
        (0..self.n).any(|a| mi[a] == 0 || mi[a] + 1 == self.m[a])
    }

    /// Strictly inside the open box.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.n && (0..self.n).all(|a| x[a] > self.lower(a) && x[a] < self.lower(a) + self.extent[a])
    }

    /// Same box, `2(m−1)+1` nodes per axis.
    pub fn refined(&self) -> Self {
        let m: Vec<usize> = self.m.iter().map(|&k| 2 * (k - 1) + 1).collect();
        Self::new(self.l1(), self.half_width(), &m).expect("refinement of a valid grid")
    }

    /// Same box, `(m−1)/2+1` nodes per axis.
    pub fn coarsened(&self) -> Result<Self> {
        if self.m.iter().any(|k| (k - 1) % 2 != 0) {
            return domain("coarsening needs an even number of cells on every axis");
        }
        let m: Vec<usize> = self.m.iter().map(|&k| (k - 1) / 2 + 1).collect();
        Self::new(self.l1(), self.half_width(), &m)
    }

    /// Same node counts, every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.l1() * factor, self.half_width() * factor, &self.m)
    }

    pub fn same_nodes(&self, other: &Grid) -> bool {
        self.m == other.m && ((self.h - other.h) / self.h).abs() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_have_unit_aspect_spacing() {
        let g1 = Grid::default_for(1).unwrap();
        assert_eq!(g1.h(), 64.0 / 4096.0);
        let g2 = Grid::default_for(2).unwrap();
        assert_eq!(g2.h(), 0.125);
        assert_eq!(g2.len(), 257 * 257);
        let g3 = Grid::default_for(3).unwrap();
        assert_eq!(g3.h(), 0.25);
        assert_eq!(g3.lower(2), -8.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 1.0, &[4, 4]).is_err());
        assert!(Grid::new(32.0, 16.0, &[257, 129]).is_err());
        assert!(Grid::new(-1.0, 0.0, &[9]).is_err());
        assert!(Grid::new(1.0, 0.0, &[9, 9, 9, 9]).is_err());
    }

    #[test]
    fn index_round_trip_and_boundary() {
        let g = Grid::new(8.0, 4.0, &[9, 9]).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(idx)[..2]), idx);
        }
        assert!(g.is_boundary(0));
        assert!(g.is_boundary(g.flat_index(&[4, 8])));
        assert!(!g.is_boundary(g.flat_index(&[1, 4])));
        assert_eq!(g.point(g.flat_index(&[2, 4])), [2.0, 0.0, 0.0]);
        assert_eq!(g.normal_index(g.flat_index(&[3, 7])), 3);
    }

    #[test]
    fn refine_then_coarsen_is_identity() {
        let g = Grid::default_for(2).unwrap();
        assert_eq!(g.refined().coarsened().unwrap(), g);
        assert_eq!(g.refined().h(), g.h() / 2.0);
    }
}
