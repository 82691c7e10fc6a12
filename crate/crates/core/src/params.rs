//! Problem data (n, s, p, λ), derived exponents and the closed-form constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special::gamma;

/// Relative slack used when deciding whether p sits exactly at 2*_s.
const CRITICAL_TOL: f64 = 1e-12;

fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} must lie in (0, 1)"));
    }
    Ok(())
}

fn check_dimension(n: usize) -> Result<()> {
    if !(1..=3).contains(&n) {
        return domain(format!("dimension n = {n} must be 1, 2 or 3"));
    }
    Ok(())
}

/// H_s = Γ(s+½)²/π, the sharp constant of the half-space Hardy inequality.
pub fn hardy_constant(s: f64) -> Result<f64> {
    check_order(s)?;
    let g = gamma(s + 0.5);
    Ok(g * g / PI)
}

/// C_{n,s} = s·2^{2s}·Γ(n/2+s) / (π^{n/2}·Γ(1−s)).
pub fn gagliardo_constant(n: usize, s: f64) -> Result<f64> {
    if n == 0 {
        return domain("dimension must be positive");
    }
    check_order(s)?;
    let nh = n as f64 / 2.0;
    Ok(s * 4f64.powf(s) * gamma(nh + s) / (PI.powf(nh) * gamma(1.0 - s)))
}

/// γ_s = 2^{2s−1}·Γ(s+½) / (√π·Γ(1−s)), the coefficient of the Hardy term
/// produced by the lower half-space in the Gagliardo form.
pub fn gamma_constant(s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(2f64.powf(2.0 * s - 1.0) * gamma(s + 0.5) / (PI.sqrt() * gamma(1.0 - s)))
}

/// Critical exponent 2n/(n−2s).
pub fn critical_exponent(n: usize, s: f64) -> Result<f64> {
    check_dimension(n)?;
    check_order(s)?;
    let nf = n as f64;
    if nf <= 2.0 * s {
        return domain(format!("need n > 2s, got n = {n}, s = {s}"));
    }
    Ok(2.0 * nf / (nf - 2.0 * s))
}

/// Returns (2*_s, b) with b = n·(1/p − 1/2*_s).
pub fn derive_exponents(n: usize, s: f64, p: f64) -> Result<(f64, f64)> {
    let two_star = critical_exponent(n, s)?;
    if (p - two_star).abs() <= CRITICAL_TOL * two_star {
        return Ok((two_star, 0.0));
    }
    if !(p > 2.0 && p < two_star) {
        return domain(format!("exponent p = {p} must lie in (2, {two_star}]"));
    }
    Ok((two_star, n as f64 * (1.0 / p - 1.0 / two_star)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub s: f64,
    pub p: f64,
    pub lambda: f64,
    pub two_star: f64,
    pub b: f64,
}

impl Params {
    /// Validated parameters: 0 < s < 1, n > 2s, 2 < p ≤ 2*_s, λ < H_s.
    pub fn new(n: usize, s: f64, p: f64, lambda: f64) -> Result<Self> {
        let params = Self::with_any_coupling(n, s, p, lambda)?;
        let hs = hardy_constant(s)?;
        if !(lambda < hs) {
            return domain(format!("coupling λ = {lambda} must be below H_s = {hs}"));
        }
        Ok(params)
    }

    /// Critical-exponent parameters, p = 2*_s.
    pub fn critical(n: usize, s: f64, lambda: f64) -> Result<Self> {
        Self::new(n, s, critical_exponent(n, s)?, lambda)
    }

    /// Same checks as [`Params::new`] except the bound on λ. Used for probes at
    /// or beyond the Hardy threshold, where the quotient may be unbounded below.
    pub fn with_any_coupling(n: usize, s: f64, p: f64, lambda: f64) -> Result<Self> {
        check_dimension(n)?;
        check_order(s)?;
        if !lambda.is_finite() {
            return domain("coupling must be finite");
        }
        let (two_star, b) = derive_exponents(n, s, p)?;
        let p = if b == 0.0 { two_star } else { p };
        Ok(Self { n, s, p, lambda, two_star, b })
    }

    /// Replaces the weight exponent, breaking its tie to p. The result no
    /// longer satisfies the scaling relation and the quotient loses its
    /// dilation invariance.
    pub fn with_weight_exponent(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_coupling(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn hardy(&self) -> f64 {
        hardy_constant(self.s).expect("validated order")
    }

    pub fn is_critical(&self) -> bool {
        self.b == 0.0
    }
}

/// Numerical estimate with a symmetric uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub uncertainty: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub n: usize,
    pub s: f64,
    pub hardy: f64,
    pub gagliardo: f64,
    pub gamma: f64,
    /// Whole-space Sobolev constant; computed numerically, absent until filled in.
    pub sobolev_estimate: Option<Estimate>,
}

impl ConstantsTable {
    pub fn new(n: usize, s: f64) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            s,
            hardy: hardy_constant(s)?,
            gagliardo: gagliardo_constant(n, s)?,
            gamma: gamma_constant(s)?,
            sobolev_estimate: None,
        })
    }

    pub fn with_sobolev(mut self, est: Estimate) -> Self {
        self.sobolev_estimate = Some(est);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Γ via a 50-factor shift followed by the Stirling series; independent of statrs.
    fn gamma_oracle(x: f64) -> f64 {
        let mut prod = 1.0;
        for k in 0..50 {
            prod *= x + k as f64;
        }
        let z = x + 50.0;
        let series =
            1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5)) - 1.0 / (1680.0 * z.powi(7));
        let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
        ln.exp() / prod
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_agrees_with_product_oracle() {
        for x in [0.05, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.3, 3.7] {
            assert!(rel(gamma(x), gamma_oracle(x)) < 1e-12, "x = {x}");
        }
        assert!(rel(gamma_oracle(0.5), PI.sqrt()) < 1e-13);
    }

    #[test]
    fn hardy_constant_reference_values() {
        assert!((hardy_constant(0.5).unwrap() - 1.0 / PI).abs() < 1e-12);
        assert!((hardy_constant(1.0 - 1e-9).unwrap() - 0.25).abs() < 1e-8);
        let want = gamma_oracle(1.25).powi(2) / PI;
        assert!(rel(hardy_constant(0.75).unwrap(), want) < 1e-12);
        assert!((hardy_constant(0.75).unwrap() - 0.2615).abs() < 1e-4);
        assert!(hardy_constant(0.0).is_err());
        assert!(hardy_constant(1.0).is_err());
        assert!(hardy_constant(f64::NAN).is_err());
    }

    #[test]
    fn gagliardo_constant_reference_values() {
        assert!(rel(gagliardo_constant(1, 0.5).unwrap(), 1.0 / PI) < 1e-12);
        assert!(rel(gagliardo_constant(2, 0.5).unwrap(), 1.0 / (2.0 * PI)) < 1e-12);
        for n in 1..=3 {
            let s = 0.3;
            let nh = n as f64 / 2.0;
            let want = s * 4f64.powf(s) * gamma_oracle(nh + s) / (PI.powf(nh) * gamma_oracle(1.0 - s));
            assert!(rel(gagliardo_constant(n, s).unwrap(), want) < 1e-12);
        }
        assert!(gagliardo_constant(2, 1e-10).unwrap() < 1e-9);
        assert!(gagliardo_constant(0, 0.5).is_err());
        assert!(gagliardo_constant(1, 1.5).is_err());
    }

    #[test]
    fn gamma_constant_reference_values() {
        assert!((gamma_constant(0.5).unwrap() - 1.0 / PI).abs() < 1e-12);
        assert!(rel(gamma_constant(0.25).unwrap(), 1.0 / (2.0 * PI).sqrt()) < 1e-12);
        assert!(gamma_constant(1.0 - 1e-10).unwrap() < 1e-8);
        assert!(gamma_constant(-0.1).is_err());
    }

    #[test]
    fn hardy_exceeds_gamma_off_the_midpoint() {
        for k in 1..20 {
            let s = 0.05 * k as f64;
            let (h, g) = (hardy_constant(s).unwrap(), gamma_constant(s).unwrap());
            if k == 10 {
                assert!((h - g).abs() < 1e-12);
            } else {
                assert!(h > g, "s = {s}");
            }
        }
    }

    #[test]
    fn exponent_examples() {
        let (ts, b) = derive_exponents(3, 0.5, 3.0).unwrap();
        assert!((ts - 3.0).abs() < 1e-12 && b == 0.0);
        let (ts, b) = derive_exponents(1, 0.4, 3.0).unwrap();
        assert!((ts - 10.0).abs() < 1e-12);
        assert!((b - 7.0 / 30.0).abs() < 1e-12);
        assert!(b > 0.0 && b < 0.4);
        let (_, b) = derive_exponents(1, 0.25, 2.0 + 1e-9).unwrap();
        assert!((b - 0.25).abs() < 1e-8);
        assert!(derive_exponents(1, 0.4, 2.0).is_err());
        assert!(derive_exponents(1, 0.4, 10.5).is_err());
        assert!(derive_exponents(1, 0.5, 3.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(1, 0.4, 3.0, 0.5 * hardy_constant(0.4).unwrap()).is_ok());
        assert!(Params::new(1, 0.4, 3.0, hardy_constant(0.4).unwrap()).is_err());
        assert!(Params::with_any_coupling(2, 0.75, 8.0, hardy_constant(0.75).unwrap()).is_ok());
        let p = Params::critical(2, 0.45, 0.0).unwrap();
        assert!(p.is_critical() && (p.p - 4.0 / 1.1).abs() < 1e-12);
        assert!(Params::new(4, 0.5, 3.0, 0.0).is_err());
    }

    #[test]
    fn constants_table_positive() {
        for n in 1..=3 {
            for k in 1..20 {
                let t = ConstantsTable::new(n, 0.05 * k as f64).unwrap();
                for v in [t.hardy, t.gagliardo, t.gamma] {
                    assert!(v.is_finite() && v > 0.0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn b_decreases_in_p(n in 1usize..=3, s in 0.05f64..0.95, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            prop_assume!((n as f64) > 2.0 * s + 1e-3);
            let ts = critical_exponent(n, s).unwrap();
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            prop_assume!(hi - lo > 1e-6 && lo > 1e-6);
            let p1 = 2.0 + lo * (ts - 2.0);
            let p2 = 2.0 + hi * (ts - 2.0);
            let (_, b1) = derive_exponents(n, s, p1).unwrap();
            let (_, b2) = derive_exponents(n, s, p2).unwrap();
            prop_assert!(b1 > b2);
            prop_assert!(b1 < s && b2 >= 0.0);
        }

        #[test]
        fn constants_finite_on_admissible_grid(n in 1usize..=3, s in 0.001f64..0.999) {
            let t = ConstantsTable::new(n, s).unwrap();
            prop_assert!(t.hardy > 0.0 && t.gagliardo > 0.0 && t.gamma > 0.0);
            prop_assert!(t.hardy.is_finite() && t.gagliardo.is_finite() && t.gamma.is_finite());
        }
    }
}
