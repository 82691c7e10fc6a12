//! Node weights for integrals of x₁^{−γ}|u|^k over the box.
//!
//! Interior nodes use the trapezoid rule. On the first cell [0, h] the field
//! is the linear interpolant u₁x₁/h, so ∫₀ʰ x₁^{−γ}|u|^k dx₁ = |u₁|^k h^{1−γ}/(k+1−γ)
//! exactly; this replaces the half trapezoid weight the node would get from the cell.

use crate::error::{domain, Result};
use crate::fields::{Grid, TrialFunction};
use crate::par;

/// Weights along the normal axis, index i ↔ x₁ = ih, including the lateral cell volume.
pub fn normal_weights(grid: &Grid, gamma: f64, k: f64) -> Result<Vec<f64>> {
    if !(gamma < k + 1.0) || !gamma.is_finite() {
        return domain(format!("weight x^-{gamma} is not integrable against |u|^{k} at the wall"));
    }
    let h = grid.h();
    let lateral = h.powi(grid.n() as i32 - 1);
    let m0 = grid.m()[0];
    let mut w = vec![0.0; m0];
    for (i, wi) in w.iter_mut().enumerate().skip(1) {
        *wi = if i == 1 {
            h.powf(1.0 - gamma) * (0.5 + 1.0 / (k + 1.0 - gamma))
        } else {
            h * (i as f64 * h).powf(-gamma)
        } * lateral;
    }
    Ok(w)
}

/// Weighted sum Σ_j w_{i(j)} f(u_j).
pub(crate) fn weighted_sum<F: Fn(f64) -> f64 + Sync>(u: &TrialFunction, w: &[f64], f: F) -> f64 {
    let g = u.grid();
    let stride = g.stride(0);
    let vals = u.values();
    par::sum_by(vals.len(), |j| w[j / stride] * f(vals[j]))
}

/// ∫ x₁^{−2s} u² dx.
pub fn hardy_term(u: &TrialFunction, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    let w = normal_weights(u.grid(), 2.0 * s, 2.0)?;
    Ok(weighted_sum(u, &w, |v| v * v))
}

/// (∫ x₁^{−pb} |u|^p dx)^{1/p}.
pub fn weighted_norm(u: &TrialFunction, p: f64, b: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) || !(b >= 0.0 && b.is_finite()) {
        return domain(format!("need p >= 1 and b >= 0, got p = {p}, b = {b}"));
    }
    let w = normal_weights(u.grid(), p * b, p)?;
    Ok(weighted_sum(u, &w, |v| v.abs().powf(p)).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gauss_legendre;

    #[test]
    fn first_cell_weight_matches_gauss_legendre_sub_quadrature() {
        let (x, w) = gauss_legendre(32);
        for (gamma, k) in [(0.5, 2.0), (0.8, 2.0), (0.7, 3.0), (0.0, 2.5)] {
            let g = Grid::new(1.0, 0.0, &[11]).unwrap();
            let h = g.h();
            // node 1's share: exact first cell plus half of the trapezoid on [h, 2h]
            let cell: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| {
                    let t = 0.5 * h * (xi + 1.0);
                    0.5 * h * wi * t.powf(-gamma) * (t / h).powf(k)
                })
                .sum();
            let want = cell + 0.5 * h * h.powf(-gamma);
            let got = normal_weights(&g, gamma, k).unwrap()[1];
            assert!(((got - want) / want).abs() < 2e-3, "{gamma} {k}: {got} vs {want}");
        }
    }

    #[test]
    fn hardy_term_closed_form() {
        // u = x on [0,1], then linear down to 0 at 1.5, s = 1/4
        let g = Grid::new(2.0, 0.0, &[257]).unwrap();
        let u = TrialFunction::from_fn(g, |x| {
            let t = x[0];
            if t <= 1.0 {
                t
            } else if t <= 1.5 {
                3.0 - 2.0 * t
            } else {
                0.0
            }
        })
        .unwrap();
        // ∫₁^{1.5} x^{-1/2}(3−2x)² dx with antiderivative 18√x − 8x^{3/2} + (8/5)x^{5/2}
        let f = |x: f64| 18.0 * x.sqrt() - 8.0 * x.powf(1.5) + 1.6 * x.powf(2.5);
        let want = 0.4 + f(1.5) - f(1.0);
        let got = hardy_term(&u, 0.25).unwrap();
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    }

    #[test]
    fn weighted_norm_closed_form_and_plain_norm() {
        let g = Grid::new(2.0, 0.0, &[4097]).unwrap();
        let u = TrialFunction::from_fn(g.clone(), |x| if x[0] <= 1.0 { x[0] } else { 0.0 }).unwrap();
        let got = weighted_norm(&u, 2.0, 0.5).unwrap();
        assert!((got - 0.5f64.sqrt()).abs() < 1e-3);
        // b = 0: plain Lᵖ norm, here ∫₀¹ x³ dx = 1/4 up to the jump
        let plain = weighted_norm(&u, 3.0, 0.0).unwrap();
        assert!((plain - 0.25f64.powf(1.0 / 3.0)).abs() < 1e-3);
        assert_eq!(weighted_norm(&TrialFunction::zeros(g.clone()), 3.0, 0.1).unwrap(), 0.0);
        assert_eq!(hardy_term(&TrialFunction::zeros(g), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn weights_are_dilation_homogeneous() {
        let g = Grid::with_resolution(2, 33).unwrap();
        let g2 = g.scaled(0.5).unwrap();
        let a = normal_weights(&g, 0.6, 2.0).unwrap();
        let b = normal_weights(&g2, 0.6, 2.0).unwrap();
        let factor = 0.5f64.powf(2.0 - 0.6);
        for (x, y) in a.iter().zip(&b) {
            assert!((x * factor - y).abs() <= 1e-14 * x.abs());
        }
    }
}
