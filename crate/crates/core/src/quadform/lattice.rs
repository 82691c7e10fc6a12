//! Lattice sums of the kernel |k|^{−n−2s}, in lattice units (h = 1).

use std::f64::consts::PI;

use crate::special::{epstein_zeta, gamma, hurwitz_zeta, laplace_tail, lower_gamma, upper_tail};

/// Layers closer than this are summed exactly; farther ones use the
/// continuum layer integral, whose error is below e^{−2π·EXACT_LAYERS}.
const EXACT_LAYERS: usize = 9;

/// Σ_{k≠0} |k|^{−n−2s}: the kernel summed over the whole lattice.
pub fn self_sum(n: usize, s: f64) -> f64 {
    epstein_zeta(n, n as f64 + 2.0 * s)
}

/// Coefficient of the near-diagonal gradient correction,
/// Z_n(n+2s−2)/n, the analytic continuation of Σ_{k≠0}|k|²|k|^{−n−2s}/n.
pub fn near_diagonal_sum(n: usize, s: f64) -> f64 {
    epstein_zeta(n, n as f64 + 2.0 * s - 2.0) / n as f64
}

/// Kernel summed over one lattice layer at normal distance `d` ≥ 1:
/// L(d) = Σ_{k′∈Z^{n−1}} (d² + |k′|²)^{−(n+2s)/2}.
pub fn layer_sum(n: usize, s: f64, d: usize) -> f64 {
    assert!(d >= 1);
    let q = (n as f64 + 2.0 * s) / 2.0;
    let df = d as f64;
    if n == 1 {
        return df.powf(-2.0 * q);
    }
    let dl = (n - 1) as f64;
    let a = q - dl / 2.0;
    if d >= EXACT_LAYERS {
        return layer_coefficient(n, s) * df.powf(-2.0 * a);
    }
    // Mellin representation split at t = 1, Poisson summation on (0, 1).
    let x0 = PI * df * df;
    let mut acc = lower_gamma(a, x0) / x0.powf(a);
    let r = 4i64;
    let lateral: Vec<i64> = if n == 2 {
        (-r..=r).map(|k| k * k).collect()
    } else {
        let mut v = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                v.push(i * i + j * j);
            }
        }
        v
    };
    for &k2 in &lateral {
        acc += upper_tail(q, PI * (df * df + k2 as f64));
        if k2 > 0 {
            acc += laplace_tail(|u| u.powf(-a - 1.0) * (-x0 / u).exp(), PI * k2 as f64);
        }
    }
    PI.powf(q) / gamma(q) * acc
}

/// c with L(d) ≈ c·d^{−1−2s} for large d.
pub fn layer_coefficient(n: usize, s: f64) -> f64 {
    let q = (n as f64 + 2.0 * s) / 2.0;
    let dl = (n - 1) as f64;
    PI.powf(dl / 2.0) * gamma(q - dl / 2.0) / gamma(q)
}

/// For every normal index i in 0..m0: Σ_{d≥i+1} L(d) + ½L(i), the kernel
/// summed over the closed lower half-lattice with the wall layer at half weight.
/// Entry 0 is unused and set to 0.
pub fn lower_half_sums(n: usize, s: f64, m0: usize) -> Vec<f64> {
    let c = layer_coefficient(n, s);
    let sigma = 1.0 + 2.0 * s;
    let exact: Vec<f64> = (1..EXACT_LAYERS).map(|d| layer_sum(n, s, d)).collect();
    let layer = |d: usize| if d < EXACT_LAYERS { exact[d - 1] } else { c * (d as f64).powf(-sigma) };
    // suffix[i] = Σ_{d≥i} L(d)
    let tail = c * hurwitz_zeta(sigma, EXACT_LAYERS as f64);
    let mut out = vec![0.0; m0];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let from = i + 1;
        let suffix = if from >= EXACT_LAYERS {
            c * hurwitz_zeta(sigma, from as f64)
        } else {
            (from..EXACT_LAYERS).map(layer).sum::<f64>() + tail
        };
        *slot = suffix + 0.5 * layer(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_layer(n: usize, s: f64, d: usize, r: i64) -> f64 {
        let q = (n as f64 + 2.0 * s) / 2.0;
        let d2 = (d * d) as f64;
        let mut acc = 0.0;
        if n == 2 {
            for k in -r..=r {
                acc += (d2 + (k * k) as f64).powf(-q);
            }
        } else {
            for i in -r..=r {
                for j in -r..=r {
                    acc += (d2 + (i * i + j * j) as f64).powf(-q);
                }
            }
        }
        acc
    }

    #[test]
    fn layer_sum_against_truncated_direct_sum() {
        // n = 2 with truncation tail ≈ 2·∫_R^∞ k^{-2q} dk
        for &(s, d) in &[(0.45, 1usize), (0.8, 3), (0.2, 12)] {
            let r = 200_000i64;
            let q = (2.0 + 2.0 * s) / 2.0;
            let tail = 2.0 * (r as f64).powf(1.0 - 2.0 * q) / (2.0 * q - 1.0);
            let want = direct_layer(2, s, d, r) + tail;
            let got = layer_sum(2, s, d);
            assert!(((got - want) / want).abs() < 1e-9, "s={s} d={d}: {got} vs {want}");
        }
        // n = 3, tail ≈ 2π R^{2−2q}/(2q−2)
        let (s, d, r) = (0.75, 2usize, 600i64);
        let q = (3.0 + 2.0 * s) / 2.0;
        let tail = 2.0 * PI * (r as f64 + 0.5).powf(2.0 - 2.0 * q) / (2.0 * q - 2.0);
        let want = direct_layer(3, s, d, r) + tail;
        let got = layer_sum(3, s, d);
        assert!(((got - want) / want).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn layers_add_up_to_the_self_sum() {
        // Σ_{k≠0} = 2·Σ_{d≥1} L(d) + (wall layer without the origin)
        for n in 1..=3 {
            let s = 0.35;
            let lower = lower_half_sums(n, s, 3);
            // lower[1] = Σ_{d≥2} L(d) + ½L(1); Σ_{d≥1} L = lower[1] + ½ L(1)
            let all_layers = lower[1] + 0.5 * layer_sum(n, s, 1);
            let wall = if n == 1 { 0.0 } else { epstein_zeta(n - 1, n as f64 + 2.0 * s) };
            let total = 2.0 * all_layers + wall;
            let want = self_sum(n, s);
            assert!(((total - want) / want).abs() < 1e-10, "n={n}: {total} vs {want}");
        }
    }

    #[test]
    fn lower_sums_continue_smoothly_past_exact_layers() {
        let v = lower_half_sums(2, 0.6, 40);
        for w in v[1..].windows(2) {
            assert!(w[1] < w[0]);
        }
        // far from the wall Σ_{d>i} c d^{-1-2s} ≈ c i^{-2s}/(2s)
        let c = layer_coefficient(2, 0.6);
        let approx = c * 39f64.powf(-1.2) / 1.2;
        assert!(((v[39] - approx) / approx).abs() < 0.05);
    }
}
