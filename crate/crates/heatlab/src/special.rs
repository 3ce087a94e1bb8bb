//! Special functions used by the geometry and the regime constants.
//!
//! Gamma and the regularized incomplete beta are delegated to `statrs`
//! (Cephes-style implementations, ~1e-14 relative). The exponentially scaled
//! Bessel `e^{-x} I_0(x)` and a certified Riemann zeta tail are implemented
//! here because no pre-vetted crate exposes them in the form we need.

use crate::error::{Error, Result};

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    statrs::function::beta::beta_reg(a, b, x)
}

/// Exponentially scaled modified Bessel function `e^{-x} I_0(x)`, `x >= 0`.
///
/// Power series below the switch point, asymptotic series above; both sides
/// agree to ~1e-14 at the junction.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 30.0 {
        // I_0(x) = sum_k (x^2/4)^k / (k!)^2, all terms positive.
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut k = 0.0f64;
        while term > 1e-18 * sum {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
        }
        sum * (-x).exp()
    } else {
        // e^{-x} I_0(x) ~ (2 pi x)^{-1/2} sum_k a_k / x^k,
        // a_0 = 1, a_k = a_{k-1} (2k-1)^2 / (8k). Truncated at the smallest
        // term; for x >= 30 that is below 1e-14 relative.
        let mut a = 1.0f64;
        let mut sum = 1.0f64;
        let mut prev = f64::INFINITY;
        for k in 1..=16 {
            let kf = k as f64;
            a *= (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (8.0 * kf);
            let term = a / x.powi(k as i32);
            if term.abs() >= prev {
                break;
            }
            sum += term;
            prev = term.abs();
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Riemann zeta ζ(s) for s > 1 with a certified error bound, by partial sum
/// plus Euler–Maclaurin tail correction. Returns (value, error bound).
pub fn zeta(s: f64) -> Result<(f64, f64)> {
    if s <= 1.0 {
        return Err(Error::InvalidInput(format!("zeta requires s > 1, got {s}")));
    }
    let n = 2000.0f64;
    let mut partial = crate::quad::KahanSum::new();
    let mut i = 1.0f64;
    while i < n {
        partial.add(i.powf(-s));
        i += 1.0;
    }
    // Sum_{k>=N} k^{-s} = N^{1-s}/(s-1) + N^{-s}/2 + s N^{-s-1}/12
    //                     - s(s+1)(s+2) N^{-s-3}/720 + R
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0;
    let err = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
    Ok((partial.value() + tail, err.abs() + 1e-13))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_spot_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(4.0) - 6.0).abs() < 1e-12);
        assert!((gamma(0.75) - 1.225_416_702_465_177_6).abs() < 1e-13);
    }

    #[test]
    fn regularized_beta_endpoints_and_symmetry() {
        assert_eq!(regularized_beta(1.5, 0.5, 0.0), 0.0);
        assert_eq!(regularized_beta(1.5, 0.5, 1.0), 1.0);
        for &x in &[0.1, 0.37, 0.5, 0.81, 0.99] {
            let a = 1.5;
            let b = 0.5;
            let lhs = regularized_beta(a, b, x);
            let rhs = 1.0 - regularized_beta(b, a, 1.0 - x);
            assert!((lhs - rhs).abs() < 1e-12, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn bessel_i0_scaled_reference_values() {
        // I_0(1) = 1.2660658777520084
        assert!((bessel_i0_scaled(1.0) - 1.266_065_877_752_008_4 * (-1.0f64).exp()).abs() < 1e-14);
        // I_0(5) = 27.239871823604442
        assert!((bessel_i0_scaled(5.0) - 27.239_871_823_604_442 * (-5.0f64).exp()).abs() < 1e-14);
        assert_eq!(bessel_i0_scaled(0.0), 1.0);
    }

    #[test]
    fn bessel_i0_scaled_matches_integral_representation() {
        // e^{-x} I_0(x) = (1/pi) ∫_0^pi e^{-x (1 - cos θ)} dθ
        for &x in &[0.5, 3.0, 12.0, 29.9, 30.1, 80.0, 400.0] {
            let quad = crate::quad::integrate(
                |th| (-x * (1.0 - th.cos())).exp(),
                0.0,
                PI,
                1e-13,
                400,
            )
            .unwrap();
            let expected = quad.value / PI;
            let got = bessel_i0_scaled(x);
            assert!(
                (got - expected).abs() <= 1e-12 * expected.max(1e-3),
                "x={x}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn zeta_reference_values() {
        let (z2, e2) = zeta(2.0).unwrap();
        assert!((z2 - PI * PI / 6.0).abs() < e2 + 1e-12);
        let (z32, e32) = zeta(1.5).unwrap();
        assert!((z32 - 2.612_375_348_685_488).abs() < e32 + 1e-11, "got {z32}");
        let (z3, _) = zeta(3.0).unwrap();
        assert!((z3 - 1.202_056_903_159_594_2).abs() < 1e-12);
    }
}
