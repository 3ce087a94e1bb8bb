//! The local volume functionals `μ_Ω(x;R) = |B(x;R) ∩ Ω|` and
//! `ν_Ω(x;R) = |B(x;R) - Ω|`, and their normalized integrals
//!
//! `G_μ(t) = ∫_Ω μ_Ω(x;√t)/|B(x;√t)| dx`,
//! `G_ν(t) = ∫_Ω ν_Ω(x;√t)/|B(x;√t)| dx`,
//!
//! which sandwich the heat content and the heat loss. For disjoint ball
//! unions μ is an exact finite sum of lens volumes, so only the outer
//! integral over Ω is sampled; the normalized integrand lies in [0, 1],
//! which keeps the Monte Carlo variance small.

use crate::error::Result;
use crate::estimators::Estimate;
use crate::geometry::{ball_volume, lens_volume, BallUnion};
use crate::quad;
use crate::rng::{mc_mean2, StreamKey};
use serde::Serialize;

/// `μ_Ω(x; R) = Σ_j |B(x;R) ∩ B(z_j;r_j)|` (exact by disjointness).
pub fn mu(omega: &BallUnion, x: &[f64], big_r: f64) -> f64 {
    debug_assert!(big_r > 0.0);
    let m = omega.dim();
    let mut acc = 0.0;
    omega.for_each_near(x, big_r, |j| {
        let c = omega.center(j);
        let d: f64 = x
            .iter()
            .zip(c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        acc += lens_volume(m, big_r, omega.radius(j), d);
    });
    acc
}

/// `ν_Ω(x; R) = ω_m R^m - μ_Ω(x; R)`.
pub fn nu(omega: &BallUnion, x: &[f64], big_r: f64) -> f64 {
    ball_volume(omega.dim(), big_r) - mu(omega, x, big_r)
}

/// Paired Monte Carlo estimates of (G_μ(t), G_ν(t)) from shared draws, so
/// `G_μ + G_ν = |Ω|` exactly per sample (the integrands are complementary).
pub fn g_pair(omega: &BallUnion, t: f64, n: u64, key: StreamKey) -> (Estimate, Estimate) {
    assert!(t > 0.0 && n >= 2);
    let m = omega.dim();
    let big_r = t.sqrt();
    let ball_r = ball_volume(m, big_r);
    let vol = omega.total_volume();
    let (mu_mom, nu_mom) = mc_mean2(key, n, |rng| {
        let mut x = [0.0f64; 8];
        omega.sample_into(rng, &mut x[..m]);
        let ratio = (mu(omega, &x[..m], big_r) / ball_r).clamp(0.0, 1.0);
        (ratio, 1.0 - ratio)
    });
    (
        Estimate::monte_carlo(vol * mu_mom.mean, vol * mu_mom.se, n),
        Estimate::monte_carlo(vol * nu_mom.mean, vol * nu_mom.se, n),
    )
}

/// Monte Carlo `G_μ(t) = |Ω| E_x[μ(x;√t)/(ω_m t^{m/2})]`, `x` uniform on Ω.
pub fn g_mu(omega: &BallUnion, t: f64, n: u64, key: StreamKey) -> Estimate {
    g_pair(omega, t, n, key).0
}

/// Monte Carlo `G_ν(t) = |Ω| - G_μ(t)` with shared samples (finite unions
/// always have finite measure, so this is unconditionally defined).
pub fn g_nu(omega: &BallUnion, t: f64, n: u64, key: StreamKey) -> Estimate {
    g_pair(omega, t, n, key).1
}

/// Deterministic radial evaluation of G_μ for a single ball of radius `r`
/// (μ depends on |x| only): `G_μ = (ω_m t^{m/2})^{-1} ∫_0^r m ω_m ρ^{m-1}
/// lens(m, √t, r, ρ) dρ`. Used as a quadrature cross-check of the Monte
/// Carlo path.
pub fn g_mu_ball_quadrature(m: usize, r: f64, t: f64, tol: f64) -> Result<Estimate> {
    let big_r = t.sqrt();
    let norm = ball_volume(m, big_r);
    let q = quad::integrate(
        |rho| {
            m as f64
                * crate::geometry::unit_ball_volume(m)
                * rho.powi(m as i32 - 1)
                * lens_volume(m, big_r, r, rho)
        },
        0.0,
        r,
        tol * norm,
        4000,
    )?;
    Ok(Estimate::deterministic(q.value / norm, q.error / norm, tol))
}

/// One (t, G_μ, G_ν) record, as emitted by the `functionals` CLI subcommand.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionalValue {
    pub t: f64,
    pub g_mu: Estimate,
    pub g_nu: Estimate,
}
