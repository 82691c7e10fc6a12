//! Weighted p-mass in windows (a₁ ≤ x₁ < b₁) × B′_ρ(z).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fields::{Grid, TrialFunction};
use crate::params::Params;
use crate::quadform::normal_weights;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    /// Normal interval [lo, hi).
    pub x1: (f64, f64),
    /// Lateral centre z (empty for n = 1).
    pub center: Vec<f64>,
    /// Lateral radius ρ; ignored for n = 1.
    pub radius: f64,
}

impl Window {
    pub fn contains(&self, x: &[f64]) -> bool {
        if !(x[0] >= self.x1.0 && x[0] < self.x1.1) {
            return false;
        }
        let d2: f64 = x[1..].iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        x.len() == 1 || d2 < self.radius * self.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowProfile {
    pub windows: Vec<Window>,
    /// ∫_window x₁^{−pb}|u|^p for each window.
    pub masses: Vec<f64>,
    /// ∫ x₁^{−pb}|u|^p over the whole box.
    pub normalization: f64,
}

impl WindowProfile {
    /// Index and mass fraction of the heaviest window.
    pub fn dominant(&self) -> Option<(usize, f64)> {
        let (i, m) = self.masses.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        let frac = if self.normalization > 0.0 { m / self.normalization } else { 0.0 };
        Some((i, frac))
    }
}

/// Per-node weighted p-mass x₁^{−pb}|u|^p·(cell weight).
pub fn mass_density(u: &TrialFunction, params: &Params) -> Result<Vec<f64>> {
    let g = u.grid();
    let w = normal_weights(g, params.p * params.b, params.p)?;
    let stride = g.stride(0);
    Ok(u.values().iter().enumerate().map(|(j, v)| w[j / stride] * v.abs().powf(params.p)).collect())
}

pub fn window_mass_profile(u: &TrialFunction, params: &Params, windows: &[Window]) -> Result<WindowProfile> {
    let g = u.grid();
    let n = g.n();
    if windows.iter().any(|w| w.center.len() + 1 != n || !(w.x1.1 > w.x1.0)) {
        return domain("windows must have a non-empty normal interval and n−1 lateral coordinates");
    }
    let density = mass_density(u, params)?;
    let mut masses = vec![crate::par::Compensated::default(); windows.len()];
    let mut total = crate::par::Compensated::default();
    for (j, &d) in density.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        total.add(d);
        let x = g.point(j);
        for (k, w) in windows.iter().enumerate() {
            if w.contains(&x[..n]) {
                masses[k].add(d);
            }
        }
    }
    Ok(WindowProfile {
        windows: windows.to_vec(),
        masses: masses.iter().map(|m| m.value()).collect(),
        normalization: total.value(),
    })
}

/// Overlapping windows of normal length L1/4 started every L1/8, with lateral
/// balls of radius L1/4 centred on a lattice of spacing L1/8.
pub fn sliding_windows(grid: &Grid) -> Vec<Window> {
    let l1 = grid.l1();
    let len = l1 / 4.0;
    let step = l1 / 8.0;
    let n = grid.n();
    let hw = grid.half_width();
    let lateral: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        let k = (hw / step).floor() as i64;
        (-k..=k).map(|i| i as f64 * step).collect()
    };
    let mut centers: Vec<Vec<f64>> = vec![vec![]];
    for _ in 1..n {
        centers = centers
            .into_iter()
            .flat_map(|c| {
                lateral.iter().map(move |&z| {
                    let mut c = c.clone();
                    c.push(z);
                    c
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    let mut a = 0.0;
    while a + len <= l1 + 1e-12 {
        for c in &centers {
            out.push(Window { x1: (a, a + len), center: c.clone(), radius: len });
        }
        a += step;
    }
    out
}

/// `k` disjoint normal strips covering [0, L1] with unbounded lateral extent.
pub fn strip_cover(grid: &Grid, k: usize) -> Vec<Window> {
    let l1 = grid.l1();
    let width = l1 / k as f64;
    let radius = grid.half_width() * (grid.n() as f64).sqrt() * 2.0 + 1.0;
    (0..k)
        .map(|i| {
            let hi = if i + 1 == k { l1 + width } else { (i + 1) as f64 * width };
            Window { x1: (i as f64 * width, hi), center: vec![0.0; grid.n() - 1], radius }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{bubble, translated_cutoff_family, unit_ball_bump};

    fn params() -> Params {
        Params::new(2, 0.45, 3.0, 0.0).unwrap()
    }

    #[test]
    fn strip_cover_partitions_the_mass() {
        let g = Grid::with_resolution(2, 33).unwrap();
        let u = bubble(&g, &[8.0, 1.0], 2.0, 0.45).unwrap();
        let prof = window_mass_profile(&u, &params(), &strip_cover(&g, 5)).unwrap();
        let sum: f64 = prof.masses.iter().sum();
        assert!((sum - prof.normalization).abs() <= 1e-10 * prof.normalization);
        assert!(prof.masses.iter().all(|m| *m >= 0.0));
    }

    #[test]
    fn single_window_support_and_mirror_symmetry() {
        let g = Grid::with_resolution(2, 33).unwrap();
        let u = TrialFunction::from_fn(g.clone(), |x| unit_ball_bump(&[(x[0] - 8.0) / 3.0, x[1] / 3.0])).unwrap();
        let p = params();
        let all = Window { x1: (4.0, 12.0), center: vec![0.0], radius: 4.0 };
        let prof = window_mass_profile(&u, &p, &[all]).unwrap();
        assert!((prof.masses[0] - prof.normalization).abs() <= 1e-12 * prof.normalization);
        let left = Window { x1: (0.0, 32.0), center: vec![-8.0], radius: 8.0 };
        let right = Window { x1: (0.0, 32.0), center: vec![8.0], radius: 8.0 };
        let sym = TrialFunction::from_fn(g.clone(), |x| {
            unit_ball_bump(&[(x[0] - 8.0) / 3.0, (x[1] - 5.0) / 3.0])
                + unit_ball_bump(&[(x[0] - 8.0) / 3.0, (x[1] + 5.0) / 3.0])
        })
        .unwrap();
        let prof = window_mass_profile(&sym, &p, &[left, right]).unwrap();
        assert!((prof.masses[0] - prof.masses[1]).abs() <= 1e-10 * prof.masses[0]);
    }

    #[test]
    fn mass_migrates_outward_along_translated_family() {
        let g = Grid::with_resolution(1, 1025).unwrap();
        let p = Params::new(1, 0.3, 3.0, 0.0).unwrap();
        let wins = strip_cover(&g, 64);
        let mut last = f64::NEG_INFINITY;
        for c in [2.0, 3.0, 4.0, 5.0] {
            let u = translated_cutoff_family(&g, &unit_ball_bump, 1.0).unwrap();
            let shifted = TrialFunction::from_fn(g.clone(), |x| {
                let j = ((x[0] - (c - 1.0)) / g.h()).round();
                if j >= 0.0 && (j as usize) < g.len() {
                    u.values()[j as usize]
                } else {
                    0.0
                }
            })
            .unwrap();
            let prof = window_mass_profile(&shifted, &p, &wins).unwrap();
            let centroid: f64 =
                prof.masses.iter().zip(&prof.windows).map(|(m, w)| m * 0.5 * (w.x1.0 + w.x1.1)).sum::<f64>()
                    / prof.normalization;
            assert!(centroid > last);
            last = centroid;
        }
    }

    #[test]
    fn sliding_windows_shape() {
        let g1 = Grid::with_resolution(1, 65).unwrap();
        assert_eq!(sliding_windows(&g1).len(), 7);
        let g2 = Grid::with_resolution(2, 33).unwrap();
        assert_eq!(sliding_windows(&g2).len(), 7 * 9);
    }
}
