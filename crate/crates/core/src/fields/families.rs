use super::{Grid, TrialFunction};
use crate::error::{domain, Result};

/// Profile supported in the closed unit ball, evaluated at a point of ℝⁿ.
pub type UnitBallProfile = dyn Fn(&[f64]) -> f64 + Sync;

/// Fraction of each axis extent over which the boundary cutoff ramps.
const CUTOFF_LAYER: f64 = 0.1;

/// U_s((x−c)/scale) with U_s(y) = (1+|y|²)^{(2s−n)/2}.
pub fn bubble_profile(x: &[f64], center: &[f64], scale: f64, s: f64) -> f64 {
    let n = x.len() as f64;
    let r2: f64 = x.iter().zip(center).map(|(a, c)| ((a - c) / scale).powi(2)).sum();
    (1.0 + r2).powf((2.0 * s - n) / 2.0)
}

/// C² ramp 10r³ − 15r⁴ + 6r⁵ on [0, 1], clamped outside.
fn smoothstep(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    r * r * r * (10.0 + r * (-15.0 + 6.0 * r))
}

/// Product cutoff: 1 on the inner 80% of every axis, 0 on the box boundary.
pub fn boundary_cutoff(grid: &Grid, x: &[f64]) -> f64 {
    (0..grid.n())
        .map(|a| {
            let lo = grid.lower(a);
            let ext = grid.extent()[a];
            let layer = CUTOFF_LAYER * ext;
            smoothstep((x[a] - lo) / layer) * smoothstep((lo + ext - x[a]) / layer)
        })
        .product()
}

/// Like [`boundary_cutoff`] but equal to 1 near the wall x₁ = 0, for fields
/// that already vanish there.
pub fn far_cutoff(grid: &Grid, x: &[f64]) -> f64 {
    (0..grid.n())
        .map(|a| {
            let lo = grid.lower(a);
            let ext = grid.extent()[a];
            let layer = CUTOFF_LAYER * ext;
            let low = if a == 0 { 1.0 } else { smoothstep((x[a] - lo) / layer) };
            low * smoothstep((lo + ext - x[a]) / layer)
        })
        .product()
}

/// Bubble centred at `center`, multiplied by [`boundary_cutoff`].
pub fn bubble(grid: &Grid, center: &[f64], scale: f64, s: f64) -> Result<TrialFunction> {
    if !(scale > 0.0 && scale.is_finite()) {
        return domain(format!("bubble scale {scale} must be positive"));
    }
    if !grid.contains_interior(center) {
        return domain(format!("bubble centre {center:?} is not inside the box"));
    }
    TrialFunction::from_fn(grid.clone(), |x| bubble_profile(x, center, scale, s) * boundary_cutoff(grid, x))
}

/// (1 − |y|²)³ inside the unit ball.
pub fn unit_ball_bump(y: &[f64]) -> f64 {
    let r2: f64 = y.iter().map(|v| v * v).sum();
    if r2 < 1.0 {
        (1.0 - r2).powi(3)
    } else {
        0.0
    }
}

/// Samples x ↦ φ(h(x − e₁)) for a profile φ supported in the unit ball.
pub fn translated_cutoff_family(grid: &Grid, profile: &UnitBallProfile, h: f64) -> Result<TrialFunction> {
    if !(h >= 1.0 && h.is_finite()) {
        return domain(format!("concentration parameter {h} must be at least 1"));
    }
    let r = 1.0 / h;
    if 1.0 + r >= grid.l1() || (grid.n() > 1 && r >= grid.half_width()) {
        return domain(format!("support of radius {r} around e1 escapes the box"));
    }
    TrialFunction::from_fn(grid.clone(), |x| {
        let mut y = [0.0; 3];
        for (a, v) in x.iter().enumerate() {
            y[a] = h * (v - if a == 0 { 1.0 } else { 0.0 });
        }
        profile(&y[..x.len()])
    })
}

/// x₁^α e^{−x₁} (times e^{−|x′|²} laterally), cut off at the box boundary.
/// Smaller α pushes mass against the wall.
pub fn wall_family_member(grid: &Grid, alpha: f64) -> Result<TrialFunction> {
    if !(alpha > 0.0) {
        return domain("wall exponent must be positive");
    }
    TrialFunction::from_fn(grid.clone(), |x| {
        let lateral: f64 = x[1..].iter().map(|v| v * v).sum();
        x[0].powf(alpha) * (-x[0] - lateral).exp() * far_cutoff(grid, x)
    })
}

/// x ↦ u(βx): the same node values on a box shrunk by β.
pub fn dilate(u: &TrialFunction, beta: usize) -> Result<TrialFunction> {
    if beta == 0 {
        return domain("dilation factor must be a positive integer");
    }
    let grid = u.grid().scaled(1.0 / beta as f64)?;
    TrialFunction::new(grid, u.values().to_vec())
}

/// Inverse of [`dilate`].
pub fn undilate(u: &TrialFunction, beta: usize) -> Result<TrialFunction> {
    if beta == 0 {
        return domain("dilation factor must be a positive integer");
    }
    let grid = u.grid().scaled(beta as f64)?;
    TrialFunction::new(grid, u.values().to_vec())
}

/// Shifts a field by whole cells along the lateral axes. Fails if nonzero
/// values would leave the box or land on its boundary.
pub fn translate_lateral(u: &TrialFunction, cells: &[i64]) -> Result<TrialFunction> {
    let grid = u.grid();
    let n = grid.n();
    if cells.len() + 1 != n {
        return domain(format!("need {} lateral shifts, got {}", n - 1, cells.len()));
    }
    let mut out = vec![0.0; grid.len()];
    for (idx, &v) in u.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let mut mi = grid.multi_index(idx);
        for a in 1..n {
            let j = mi[a] as i64 + cells[a - 1];
            if j <= 0 || j + 1 >= grid.m()[a] as i64 {
                return domain("translation moves the support onto or past the box boundary");
            }
            mi[a] = j as usize;
        }
        out[grid.flat_index(&mi[..n])] = v;
    }
    TrialFunction::new(grid.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_values() {
        assert_eq!(bubble_profile(&[3.0], &[3.0], 1.0, 0.25), 1.0);
        let v = bubble_profile(&[4.0], &[3.0], 1.0, 0.25);
        assert!((v - 2f64.powf(-0.25)).abs() < 1e-15);
        assert!((v - 0.8409).abs() < 1e-4);
        let a = bubble_profile(&[1.0, 2.0], &[0.0, 0.0], 2.0, 0.4);
        let b = bubble_profile(&[2.0, -1.0], &[0.0, 0.0], 2.0, 0.4);
        assert_eq!(a, b);
    }

    #[test]
    fn cutoff_is_one_inside_and_zero_on_faces() {
        let g = Grid::new(10.0, 5.0, &[11, 11]).unwrap();
        assert_eq!(boundary_cutoff(&g, &[5.0, 0.0]), 1.0);
        assert_eq!(boundary_cutoff(&g, &[1.0, 3.9]), 1.0);
        assert_eq!(boundary_cutoff(&g, &[0.0, 0.0]), 0.0);
        assert_eq!(boundary_cutoff(&g, &[5.0, 5.0]), 0.0);
        assert!(boundary_cutoff(&g, &[0.5, 0.0]) < 1.0);
    }

    #[test]
    fn bubble_rejects_outside_centre() {
        let g = Grid::with_resolution(1, 65).unwrap();
        assert!(bubble(&g, &[0.0], 1.0, 0.3).is_err());
        assert!(bubble(&g, &[70.0], 1.0, 0.3).is_err());
        assert!(bubble(&g, &[16.0], 0.0, 0.3).is_err());
        let u = bubble(&g, &[16.0], 1.0, 0.3).unwrap();
        assert_eq!(u.values()[16], 1.0);
    }

    #[test]
    fn family_support_shrinks_with_h() {
        let g = Grid::with_resolution(1, 4097).unwrap();
        let width = |h: f64| {
            let u = translated_cutoff_family(&g, &unit_ball_bump, h).unwrap();
            (u.values().iter().filter(|v| **v > 0.0).count() + 1) as f64 * g.h()
        };
        let (w2, w4) = (width(2.0), width(4.0));
        assert!((w2 / w4 - 2.0).abs() < 0.02, "{w2} {w4}");
        let u1 = translated_cutoff_family(&g, &unit_ball_bump, 1.0).unwrap();
        assert_eq!(u1.values()[64], 1.0);
        assert!(translated_cutoff_family(&g, &unit_ball_bump, 0.5).is_err());
        let tiny = Grid::new(1.5, 0.0, &[16]).unwrap();
        assert!(translated_cutoff_family(&tiny, &unit_ball_bump, 1.0).is_err());
    }

    #[test]
    fn dilation_round_trip() {
        let g = Grid::with_resolution(2, 33).unwrap();
        let u = bubble(&g, &[8.0, 1.0], 2.0, 0.45).unwrap();
        assert_eq!(dilate(&u, 1).unwrap(), u);
        let d = dilate(&u, 2).unwrap();
        assert_eq!(d.grid().l1(), 16.0);
        assert_eq!(undilate(&d, 2).unwrap(), u);
    }

    #[test]
    fn lateral_translation_moves_values() {
        let g = Grid::with_resolution(2, 33).unwrap();
        let cut = TrialFunction::from_fn(g.clone(), |x| unit_ball_bump(&[(x[0] - 8.0) / 3.0, x[1] / 3.0])).unwrap();
        let t = translate_lateral(&cut, &[3]).unwrap();
        let i = g.flat_index(&[8, 16]);
        let j = g.flat_index(&[8, 19]);
        assert_eq!(t.values()[j], cut.values()[i]);
        assert!(translate_lateral(&cut, &[40]).is_err());
    }
}
