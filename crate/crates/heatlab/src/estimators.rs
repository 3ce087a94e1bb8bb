//! Estimators for the heat content `H_Ω(t) = ∫_Ω ∫_Ω p(x,y;t)` and the heat
//! loss `F_Ω(t) = |Ω| - H_Ω(t)`.
//!
//! Single balls are handled by a deterministic 1-D radial quadrature through
//! the lens reduction
//!
//! `H_B(t) = ∫_0^{2r} m ω_m s^{m-1} (4πt)^{-m/2} e^{-s²/(4t)} |B ∩ (B + s e1)| ds`,
//!
//! with the Gaussian tail truncated under an explicit bound. General ball
//! unions use the probabilistic form `H_Ω(t) = |Ω| · P(x + √(2t) Z ∈ Ω)`
//! with `x` uniform on Ω and `Z` standard normal. Pair cross terms
//! `∫_{B_i} ∫_{B_j} p` reduce to a 1-D integral against the noncentral
//! radial density of `|z_j - z_i + V|`, `V ~ N(0, 2tI)`, for m = 2, 3, and
//! fall back to Monte Carlo in higher dimension.

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, lens_deficiency, lens_volume, unit_ball_volume, BallUnion};
use crate::quad;
use crate::rng::{mc_mean, StreamKey};
use crate::special::bessel_i0_scaled;
use serde::Serialize;

/// How an [`Estimate`]'s error field is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateKind {
    /// `error` is a certified absolute bound (quadrature + analytic tails).
    DeterministicTol,
    /// `error` is a one-sigma standard error.
    MonteCarloSe,
}

/// A numeric value with an error bound and its provenance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub kind: EstimateKind,
    /// Sample count for Monte Carlo estimates, requested tolerance for
    /// deterministic ones.
    pub n_or_tol: f64,
}

impl Estimate {
    pub fn deterministic(value: f64, error: f64, tol: f64) -> Self {
        Self { value, error, kind: EstimateKind::DeterministicTol, n_or_tol: tol }
    }

    pub fn monte_carlo(value: f64, se: f64, n: u64) -> Self {
        Self { value, error: se, kind: EstimateKind::MonteCarloSe, n_or_tol: n as f64 }
    }
}

/// Radial Gaussian weight `m ω_m s^{m-1} (4πt)^{-m/2} e^{-s²/(4t)}` — the
/// density of the jump length `|√(2t) Z|`.
#[inline]
fn radial_weight(m: usize, s: f64, t: f64) -> f64 {
    m as f64
        * unit_ball_volume(m)
        * s.powi(m as i32 - 1)
        * (4.0 * std::f64::consts::PI * t).powf(-(m as f64) / 2.0)
        * (-s * s / (4.0 * t)).exp()
}

/// Truncation point `s0` with radial Gaussian tail mass bounded by
/// `cap · 2^{m/2} e^{-s0²/(8t)} ≤ budget`, together with that bound.
fn gaussian_cutoff(m: usize, t: f64, cap: f64, budget: f64) -> (f64, f64) {
    let ratio = cap * (2.0f64).powf(m as f64 / 2.0) / budget;
    if ratio <= 1.0 {
        return (0.0, cap.min(budget));
    }
    let s0 = (8.0 * t * ratio.ln()).sqrt();
    let tail = cap * (2.0f64).powf(m as f64 / 2.0) * (-s0 * s0 / (8.0 * t)).exp();
    (s0, tail)
}

/// Deterministic (H, F) for a single ball of radius `r`, certified absolute
/// error `<= tol` on both.
///
/// For `√t < r/50` the loss F is integrated directly (the integrand carries
/// the stable deficiency `ω r^m - lens`, so no catastrophic cancellation in
/// `|B| - H` at small t); otherwise H is integrated and F complemented.
pub fn ball_heat_pair(m: usize, r: f64, t: f64, tol: f64) -> Result<(Estimate, Estimate)> {
    if m < 2 || r <= 0.0 || t <= 0.0 || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "ball_heat_pair: bad arguments m={m} r={r} t={t} tol={tol}"
        )));
    }
    let vol = ball_volume(m, r);
    let small_t = t.sqrt() < r / 50.0;
    let (s0, tail_bound) = gaussian_cutoff(m, t, vol, tol / 4.0);

    let s_cut = s0.min(2.0 * r);
    let tail = if s0 < 2.0 * r { tail_bound } else { 0.0 };
    let q = if small_t {
        // F = ∫_0^{s_cut} w(s) (ω r^m - lens) ds + (full-deficiency tail)
        quad::integrate(
            |s| radial_weight(m, s, t) * lens_deficiency(m, r, s),
            0.0,
            s_cut,
            tol / 2.0,
            4000,
        )?
    } else {
        quad::integrate(
            |s| radial_weight(m, s, t) * lens_volume(m, r, r, s),
            0.0,
            s_cut,
            tol / 2.0,
            4000,
        )?
    };
    let value = q.value + 0.5 * tail;
    let error = q.error + 0.5 * tail;

    if small_t {
        let f = Estimate::deterministic(value, error, tol);
        let h = Estimate::deterministic(vol - value, error, tol);
        Ok((h, f))
    } else {
        let h = Estimate::deterministic(value, error, tol);
        let f = Estimate::deterministic(vol - value, error, tol);
        Ok((h, f))
    }
}

/// Heat content of a single ball by certified quadrature.
pub fn heat_content_ball(m: usize, r: f64, t: f64, tol: f64) -> Result<Estimate> {
    ball_heat_pair(m, r, t, tol).map(|(h, _)| h)
}

/// Heat loss of a single ball by certified quadrature.
pub fn heat_loss_ball(m: usize, r: f64, t: f64, tol: f64) -> Result<Estimate> {
    ball_heat_pair(m, r, t, tol).map(|(_, f)| f)
}

/// Monte Carlo (H, F) for an arbitrary ball union with shared draws:
/// `H = |Ω| p̂`, `F = |Ω| - H`, `p̂` the fraction of Gaussian jumps that stay
/// in Ω. Unbiased, binomial standard errors, bitwise deterministic per key.
pub fn heat_pair_mc(omega: &BallUnion, t: f64, n: u64, key: StreamKey) -> (Estimate, Estimate) {
    assert!(t > 0.0 && n >= 2);
    let m = omega.dim();
    let step = (2.0 * t).sqrt();
    let vol = omega.total_volume();
    let mom = mc_mean(key, n, |rng| {
        let mut x = [0.0f64; 8];
        let mut y = [0.0f64; 8];
        omega.sample_into(rng, &mut x[..m]);
        for d in 0..m {
            let g: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
            y[d] = x[d] + step * g;
        }
        if omega.contains_point(&y[..m]) {
            1.0
        } else {
            0.0
        }
    });
    let h = Estimate::monte_carlo(vol * mom.mean, vol * mom.se, n);
    let f = Estimate::monte_carlo(vol - h.value, vol * mom.se, n);
    (h, f)
}

/// Monte Carlo heat content (see [`heat_pair_mc`]).
pub fn heat_content_mc(omega: &BallUnion, t: f64, n: u64, key: StreamKey) -> Estimate {
    heat_pair_mc(omega, t, n, key).0
}

/// Monte Carlo heat loss, sharing the indicator draws with
/// [`heat_content_mc`] at the same key, so `H + F = |Ω|` up to one rounding.
pub fn heat_loss_mc(omega: &BallUnion, t: f64, n: u64, key: StreamKey) -> Estimate {
    heat_pair_mc(omega, t, n, key).1
}

/// A priori bound `(4πt)^{-m/2} |B_i| |B_j| e^{-dist(B_i,B_j)²/(4t)}` on the
/// pair cross term.
pub fn cross_term_bound(m: usize, zi: &[f64], ri: f64, zj: &[f64], rj: f64, t: f64) -> f64 {
    let d = dist(zi, zj);
    let gap = (d - ri - rj).max(0.0);
    (4.0 * std::f64::consts::PI * t).powf(-(m as f64) / 2.0)
        * ball_volume(m, ri)
        * ball_volume(m, rj)
        * (-gap * gap / (4.0 * t)).exp()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Radial density of `|w + V|` at ρ, where `|w| = d` and `V ~ N(0, 2tI_m)`,
/// for m = 2 (Rice) and m = 3 (elementary two-sided Gaussian difference).
fn noncentral_radial_density(m: usize, rho: f64, d: f64, t: f64) -> f64 {
    debug_assert!(m == 2 || m == 3);
    if rho <= 0.0 {
        return 0.0;
    }
    let gauss = (-(rho - d) * (rho - d) / (4.0 * t)).exp();
    if m == 2 {
        rho / (2.0 * t) * gauss * bessel_i0_scaled(rho * d / (2.0 * t))
    } else {
        let sqrt_4pit = (4.0 * std::f64::consts::PI * t).sqrt();
        let x = rho * d / t;
        if x < 1e-6 {
            // (1 - e^{-x})/d -> ρ/t as d -> 0
            rho / sqrt_4pit * gauss * (rho / t) * (1.0 - 0.5 * x + x * x / 6.0)
        } else {
            rho / (d * sqrt_4pit) * gauss * (-(-x).exp_m1())
        }
    }
}

/// Off-diagonal contribution `∫_{B_i} ∫_{B_j} p(x,y;t) dy dx` for two
/// disjoint balls. Deterministic quadrature against the noncentral radial
/// density for m = 2, 3; two-stage Monte Carlo over uniform pairs for
/// m >= 4 (failing like the quadrature ops when `tol` is out of reach).
#[allow(clippy::too_many_arguments)]
pub fn cross_term(
    m: usize,
    zi: &[f64],
    ri: f64,
    zj: &[f64],
    rj: f64,
    t: f64,
    tol: f64,
    key: StreamKey,
) -> Result<Estimate> {
    if t <= 0.0 || tol <= 0.0 {
        return Err(Error::InvalidInput("cross_term: t and tol must be positive".into()));
    }
    let d = dist(zi, zj);
    if m == 2 || m == 3 {
        let upper = ri + rj;
        let q = quad::integrate(
            |rho| noncentral_radial_density(m, rho, d, t) * lens_volume(m, ri, rj, rho),
            0.0,
            upper,
            tol,
            4000,
        )?;
        return Ok(Estimate::deterministic(q.value, q.error, tol));
    }

    // Monte Carlo over uniform pairs: |B_i||B_j| E[p(|x-y|; t)].
    let vi = ball_volume(m, ri);
    let vj = ball_volume(m, rj);
    let bi = BallUnion::new(m, vec![(zi.to_vec(), ri)], "cross-i")?;
    let bj = BallUnion::new(m, vec![(zj.to_vec(), rj)], "cross-j")?;
    let sample_p = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut x = [0.0f64; 8];
        let mut y = [0.0f64; 8];
        bi.sample_into(rng, &mut x[..m]);
        bj.sample_into(rng, &mut y[..m]);
        crate::kernel::heat_kernel(m, dist(&x[..m], &y[..m]), t)
    };
    let pilot = mc_mean(key, 1 << 16, &sample_p);
    let pilot_sd = pilot.se * ((1u64 << 16) as f64).sqrt();
    let needed = ((3.0 * pilot_sd * vi * vj / tol).powi(2)).clamp(1e5, 5e7) as u64;
    let mom = mc_mean(key.substream(1), needed, &sample_p);
    let est = Estimate::monte_carlo(vi * vj * mom.mean, vi * vj * mom.se, needed);
    if est.error > tol {
        return Err(Error::QuadratureBudget {
            value: est.value,
            requested: tol,
            achieved: est.error,
        });
    }
    Ok(est)
}
