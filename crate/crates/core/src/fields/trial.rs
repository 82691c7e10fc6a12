use serde::{Deserialize, Serialize};

use super::Grid;
use crate::error::{domain, Error, Result};

/// Samples of a real field on a [`Grid`], exactly zero on the box boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl TrialFunction {
    /// Wraps node values; fails if any boundary value is nonzero or non-finite.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite value at node {i}"));
        }
        if let Some(i) = (0..grid.len()).find(|&i| grid.is_boundary(i) && values[i] != 0.0) {
            return domain(format!("nonzero value {} on boundary node {i}", values[i]));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Samples `f` at every node and sets boundary nodes to zero.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let n = grid.n();
        let values = (0..grid.len()).map(|i| if grid.is_boundary(i) { 0.0 } else { f(&grid.point(i)[..n]) }).collect();
        Self::new(grid, values)
    }

    /// Boundary nodes of `values` are overwritten with zero.
    pub(crate) fn with_zero_trace(grid: Grid, mut values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        for (i, v) in values.iter_mut().enumerate() {
            if grid.is_boundary(i) {
                *v = 0.0;
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let values = self.values.iter().map(|v| alpha * v).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// Pointwise `self + alpha·other`.
    pub fn axpy(&self, alpha: f64, other: &TrialFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + alpha * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// Pointwise product.
    pub fn product(&self, other: &TrialFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn check_same_grid(&self, other: &TrialFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_must_vanish() {
        let g = Grid::new(8.0, 0.0, &[9]).unwrap();
        let mut v = vec![1.0; 9];
        assert!(TrialFunction::new(g.clone(), v.clone()).is_err());
        v[0] = 0.0;
        v[8] = 0.0;
        assert!(TrialFunction::new(g.clone(), v).is_ok());
        let u = TrialFunction::from_fn(g.clone(), |_| 2.0).unwrap();
        assert_eq!(u.values()[0], 0.0);
        assert_eq!(u.values()[4], 2.0);
        assert!(TrialFunction::new(g, vec![0.0; 3]).is_err());
    }

    #[test]
    fn arithmetic_checks_grid() {
        let g = Grid::new(8.0, 0.0, &[9]).unwrap();
        let u = TrialFunction::from_fn(g.clone(), |x| x[0]).unwrap();
        let w = u.axpy(-1.0, &u).unwrap();
        assert!(w.is_zero());
        let other = TrialFunction::zeros(Grid::new(16.0, 0.0, &[9]).unwrap());
        assert!(u.axpy(1.0, &other).is_err());
    }
}
