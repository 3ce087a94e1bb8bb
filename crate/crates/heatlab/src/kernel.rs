//! The Euclidean heat kernel and explicit two-sided kernel-bound constants.
//!
//! In `R^m` the kernel is the Gaussian `(4πt)^{-m/2} e^{-d²/(4t)}` and the
//! ball volumes appearing in the two-sided bound are `|B(x; √t)| = ω_m
//! t^{m/2}`, so an admissible comparison constant can be written in closed
//! form; from it the sandwich constants `K1, K2, L1, L2` follow.

use crate::geometry::unit_ball_volume;
use serde::Serialize;

/// Gaussian heat kernel `(4πt)^{-m/2} e^{-d²/(4t)}` as a function of the
/// distance `d = |x - y|` and time `t > 0`.
#[inline]
pub fn heat_kernel(m: usize, d: f64, t: f64) -> f64 {
    debug_assert!(t > 0.0 && d >= 0.0);
    (4.0 * std::f64::consts::PI * t).powf(-(m as f64) / 2.0) * (-d * d / (4.0 * t)).exp()
}

/// The comparison constant `C` for `R^m` together with the derived sandwich
/// constants. `K1 = L1 = C^{-2} e^{-C}`; `K2` and `L2` are the explicit upper
/// sandwich constants (astronomically loose — reports should always show the
/// realized ratios next to them).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LiYauConstants {
    pub dim: usize,
    pub c: f64,
    pub k1: f64,
    pub k2: f64,
    pub l1: f64,
    pub l2: f64,
}

/// Smallest constant of the family `max(2^m, 4, (4π)^{m/2}/ω_m)`.
///
/// With this `C` both Gaussian bounds hold for all `d ≥ 0, t > 0`: the lower
/// bound reduces to `(4π)^{m/2}/(C ω_m) ≤ e^{(C - 1/4) d²/t}` and the upper
/// to `ω_m/((4π)^{m/2} C) ≤ e^{(1/4 - 1/C) d²/t}`, both of which only need
/// `C ≥ max(4, (4π)^{m/2}/ω_m)`; volume doubling holds with slack since
/// `|B(x;2R)| = 2^m |B(x;R)|` and `C ≥ 2^m`.
pub fn liyau_constant(m: usize) -> LiYauConstants {
    assert!(m >= 2, "dimension must be >= 2");
    let omega = unit_ball_volume(m);
    let four_pi = 4.0 * std::f64::consts::PI;
    let c = (2.0f64)
        .powi(m as i32)
        .max(4.0)
        .max(four_pi.powf(m as f64 / 2.0) / omega);

    let log2c = c.ln() / (2.0f64).ln();
    let k1 = c.powi(-2) * (-c).exp();
    // K2 = 2 C^{15/4} (C ln(2 C^{7/2 + log2 C}))^{(3 ln C)/(4 ln 2)}
    let k2 = 2.0
        * c.powf(15.0 / 4.0)
        * (c * (2.0 * c.powf(3.5 + log2c)).ln()).powf(0.75 * log2c);
    let l1 = k1;
    // L2 = 4 C^{15/4} (C ln(2 C^{7 + log2 C}))^{1 + (3 ln C)/(4 ln 2)}
    let l2 = 4.0
        * c.powf(15.0 / 4.0)
        * (c * (2.0 * c.powf(7.0 + log2c)).ln()).powf(1.0 + 0.75 * log2c);

    LiYauConstants { dim: m, c, k1, k2, l1, l2 }
}

/// Polynomial volume-ratio bound implied by doubling: `C (r2/r1)^{log2 C}`.
/// In `R^m` the true ratio is `(r2/r1)^m`, dominated whenever `C ≥ 2^m`.
pub fn doubling_ratio_bound(c: f64, r1: f64, r2: f64) -> f64 {
    debug_assert!(r2 >= r1 && r1 > 0.0);
    c * (r2 / r1).powf(c.ln() / (2.0f64).ln())
}

/// Lower Gaussian comparison bound at distance `d`, time `t` (the `R^m`
/// instantiation, with `|B(·;√t)| = ω_m t^{m/2}`).
pub fn liyau_lower(m: usize, c: f64, d: f64, t: f64) -> f64 {
    let ball = unit_ball_volume(m) * t.powf(m as f64 / 2.0);
    (-c * d * d / t).exp() / (c * ball)
}

/// Upper Gaussian comparison bound at distance `d`, time `t`.
pub fn liyau_upper(m: usize, c: f64, d: f64, t: f64) -> f64 {
    let ball = unit_ball_volume(m) * t.powf(m as f64 / 2.0);
    c * (-d * d / (c * t)).exp() / ball
}
