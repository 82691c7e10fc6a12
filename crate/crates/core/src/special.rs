//! Special functions: Γ, Gauss–Legendre rules, lattice (Epstein) zeta sums,
//! the Hurwitz zeta function and an upper incomplete integral used by both.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Γ(x), backed by statrs (Lanczos, ~15 digits).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// 1/Γ(x), equal to 0 at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / gamma(x)
}

/// Lower incomplete Γ function γ(a, x) = ∫_0^x t^{a−1} e^{−t} dt.
pub fn lower_gamma(a: f64, x: f64) -> f64 {
    statrs::function::gamma::gamma_lr(a, x) * gamma(a)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite 16-point Gauss–Legendre rule on [0, 40], for integrals against e^{−y}.
fn laplace_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(16);
        let panels = [0.0, 1.0, 2.5, 5.0, 9.0, 15.0, 24.0, 40.0];
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for pair in panels.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for (xi, wi) in x.iter().zip(&w) {
                let y = 0.5 * (b - a) * xi + 0.5 * (a + b);
                nodes.push(y);
                weights.push(0.5 * (b - a) * wi * (-y).exp());
            }
        }
        (nodes, weights)
    })
}

/// ∫_1^∞ g(t) e^{−x t} dt for x ≳ 1 and slowly varying g.
pub fn laplace_tail<F: Fn(f64) -> f64>(g: F, x: f64) -> f64 {
    let (nodes, weights) = laplace_rule();
    let mut acc = 0.0;
    for (y, w) in nodes.iter().zip(weights) {
        acc += w * g(1.0 + y / x);
    }
    acc * (-x).exp() / x
}

/// ∫_1^∞ t^{a−1} e^{−x t} dt.
pub fn upper_tail(a: f64, x: f64) -> f64 {
    laplace_tail(|t| t.powf(a - 1.0), x)
}

/// Number of points of Zⁿ at each squared radius r² ≤ 16, inside the cube |k_i| ≤ 4.
fn shell_counts(n: usize) -> Vec<(u32, f64)> {
    let mut counts = vec![0.0f64; 16 * n + 1];
    let side = 9usize;
    let total = side.pow(n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut r2 = 0usize;
        for _ in 0..n {
            let k = (rest % side) as i64 - 4;
            rest /= side;
            r2 += (k * k) as usize;
        }
        counts[r2] += 1.0;
    }
    counts.into_iter().enumerate().filter(|&(r2, c)| r2 > 0 && c > 0.0).map(|(r2, c)| (r2 as u32, c)).collect()
}

/// Epstein zeta Σ_{k∈Zⁿ∖0} |k|^{−σ}, analytically continued to all σ ≠ n.
///
/// Uses the theta-function splitting at t = 1; terms with |k|² > 16 are below
/// e^{−25π} and dropped.
pub fn epstein_zeta(n: usize, sigma: f64) -> f64 {
    assert!((1..=3).contains(&n), "lattice dimension must be 1..=3");
    let nf = n as f64;
    let a = sigma / 2.0;
    let c = (nf - sigma) / 2.0;
    let mut acc = 0.0;
    for (r2, count) in shell_counts(n) {
        let x = PI * r2 as f64;
        acc += count * (upper_tail(a, x) + upper_tail(c, x));
    }
    PI.powf(a) * ((acc - 2.0 / (nf - sigma)) * rgamma(a) - rgamma(a + 1.0))
}

/// Hurwitz zeta Σ_{k≥0} (k+q)^{−σ} for σ > 1, q > 0 (Euler–Maclaurin).
pub fn hurwitz_zeta(sigma: f64, q: f64) -> f64 {
    assert!(sigma > 1.0 && q > 0.0);
    const SHIFT: usize = 12;
    let mut acc = 0.0;
    for k in 0..SHIFT {
        acc += (k as f64 + q).powf(-sigma);
    }
    let a = q + SHIFT as f64;
    acc += a.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * a.powf(-sigma);
    // Bernoulli corrections B_{2j}/(2j)! · σ(σ+1)…(σ+2j−2) · a^{−σ−2j+1}
    const B: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut rising = sigma;
    let mut fact = 2.0;
    let mut pow = a.powf(-sigma - 1.0);
    for (j, bj) in B.iter().enumerate() {
        acc += bj / fact * rising * pow;
        let k = 2.0 * (j as f64 + 1.0);
        rising *= (sigma + k - 1.0) * (sigma + k);
        fact *= (k + 1.0) * (k + 2.0);
        pow /= a * a;
    }
    acc
}
