//! Numerical verification of the sandwich inequalities, the lattice
//! decoupling bound, the sum–integral lemma, and the basic monotonicity /
//! convexity facts. Each verifier produces a [`VerificationReport`] whose
//! rows carry enough data to re-derive the verdict.

use crate::error::{Error, Result};
use crate::estimators::Estimate;
use crate::functionals::mu;
use crate::geometry::{ball_volume, BallUnion, SeparationGap};
use crate::kernel::liyau_constant;
use crate::quad::KahanSum;
use crate::rng::{mc_mean2, StreamKey};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    T1,
    T2,
    T3i,
    T3ii,
    #[serde(rename = "L2")]
    LemmaTwo,
    #[serde(rename = "FACTS")]
    Facts,
}

/// One verified grid point. `pass` holds iff the inequality
/// `lower ≤ mid ≤ upper` holds with `slack · sigma` tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportRow {
    pub t: f64,
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Per-theorem verification record.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub theorem_id: TheoremId,
    #[serde(rename = "grid")]
    pub t_grid: Vec<f64>,
    pub rows: Vec<ReportRow>,
    pub passed: bool,
    pub notes: String,
}

/// Sampling budget and slack policy for the statistical verifiers.
#[derive(Debug, Clone, Copy)]
pub struct VerifyBudget {
    pub samples: u64,
    pub key: StreamKey,
    /// Pass/fail slack in combined standard errors (default 3).
    pub slack: f64,
    /// Absolute tolerance for the deterministic quadrature parts.
    pub tol: f64,
}

impl VerifyBudget {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            key: StreamKey::new(seed, 0),
            slack: 3.0,
            tol: 1e-10,
        }
    }
}

fn require_sorted(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidInput("t grid must be nonempty and positive".into()));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("t grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Shared-draw Monte Carlo of (H_Ω(t), G_μ(t)): one uniform x per sample
/// feeds both the jump indicator and the normalized μ integrand, so the
/// sandwich margin estimates are positively correlated.
pub fn h_and_g_mu_mc(
    omega: &BallUnion,
    t: f64,
    n: u64,
    key: StreamKey,
) -> (Estimate, Estimate) {
    let m = omega.dim();
    let step = (2.0 * t).sqrt();
    let big_r = t.sqrt();
    let ball_r = ball_volume(m, big_r);
    let vol = omega.total_volume();
    let (h_mom, g_mom) = mc_mean2(key, n, |rng| {
        let mut x = [0.0f64; 8];
        let mut y = [0.0f64; 8];
        omega.sample_into(rng, &mut x[..m]);
        for d in 0..m {
            let g: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
            y[d] = x[d] + step * g;
        }
        let hit = if omega.contains_point(&y[..m]) { 1.0 } else { 0.0 };
        let ratio = (mu(omega, &x[..m], big_r) / ball_r).clamp(0.0, 1.0);
        (hit, ratio)
    });
    (
        Estimate::monte_carlo(vol * h_mom.mean, vol * h_mom.se, n),
        Estimate::monte_carlo(vol * g_mom.mean, vol * g_mom.se, n),
    )
}

/// Verify `K1 G_μ(t) ≤ H_Ω(t) ≤ K2 G_μ(t)` across the grid. Also records
/// the realized ratios `H/G_μ` in the notes, to show actual tightness next
/// to the loose explicit constants.
pub fn verify_theorem1(
    omega: &BallUnion,
    t_grid: &[f64],
    budget: &VerifyBudget,
) -> Result<VerificationReport> {
    require_sorted(t_grid)?;
    let k = liyau_constant(omega.dim());
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for (idx, &t) in t_grid.iter().enumerate() {
        let (h, g) = h_and_g_mu_mc(omega, t, budget.samples, budget.key.substream(idx as u64));
        let lower = k.k1 * g.value;
        let upper = k.k2 * g.value;
        let sigma_lo = h.error + k.k1 * g.error;
        let sigma_hi = h.error + k.k2 * g.error;
        let pass = h.value - lower >= -budget.slack * sigma_lo
            && upper - h.value >= -budget.slack * sigma_hi;
        if g.value > 0.0 {
            let ratio = h.value / g.value;
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
        }
        rows.push(ReportRow {
            t,
            lower,
            mid: h.value,
            upper,
            sigma: sigma_hi,
            pass,
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(VerificationReport {
        theorem_id: TheoremId::T1,
        t_grid: t_grid.to_vec(),
        rows,
        passed,
        notes: format!(
            "omega = {}; C = {:.6}, K1 = {:.6e}, K2 = {:.6e}; realized H/G_mu in [{:.4}, {:.4}]; \
             samples = {}, slack = {} se",
            omega.label(),
            k.c,
            k.k1,
            k.k2,
            ratio_min,
            ratio_max,
            budget.samples,
            budget.slack
        ),
    })
}

/// Verify `L1 G_ν(t) ≤ F_Ω(t) ≤ L2 G_ν(t)` across the grid (finite-measure
/// unions only, which every `BallUnion` is).
pub fn verify_theorem2(
    omega: &BallUnion,
    t_grid: &[f64],
    budget: &VerifyBudget,
) -> Result<VerificationReport> {
    require_sorted(t_grid)?;
    let k = liyau_constant(omega.dim());
    let m = omega.dim();
    let vol = omega.total_volume();
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for (idx, &t) in t_grid.iter().enumerate() {
        let step = (2.0 * t).sqrt();
        let big_r = t.sqrt();
        let ball_r = ball_volume(m, big_r);
        let (f_mom, gn_mom) = mc_mean2(
            budget.key.substream(idx as u64),
            budget.samples,
            |rng| {
                let mut x = [0.0f64; 8];
                let mut y = [0.0f64; 8];
                omega.sample_into(rng, &mut x[..m]);
                for d in 0..m {
                    let g: f64 =
                        rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
                    y[d] = x[d] + step * g;
                }
                let miss = if omega.contains_point(&y[..m]) { 0.0 } else { 1.0 };
                let ratio = (mu(omega, &x[..m], big_r) / ball_r).clamp(0.0, 1.0);
                (miss, 1.0 - ratio)
            },
        );
        let f = Estimate::monte_carlo(vol * f_mom.mean, vol * f_mom.se, budget.samples);
        let gn = Estimate::monte_carlo(vol * gn_mom.mean, vol * gn_mom.se, budget.samples);
        let lower = k.l1 * gn.value;
        let upper = k.l2 * gn.value;
        let sigma_lo = f.error + k.l1 * gn.error;
        let sigma_hi = f.error + k.l2 * gn.error;
        let pass = f.value - lower >= -budget.slack * sigma_lo
            && upper - f.value >= -budget.slack * sigma_hi;
        if gn.value > 0.0 {
            let ratio = f.value / gn.value;
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
        }
        rows.push(ReportRow {
            t,
            lower,
            mid: f.value,
            upper,
            sigma: sigma_hi,
            pass,
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(VerificationReport {
        theorem_id: TheoremId::T2,
        t_grid: t_grid.to_vec(),
        rows,
        passed,
        notes: format!(
            "omega = {}; C = {:.6}, L1 = {:.6e}, L2 = {:.6e}; realized F/G_nu in [{:.4}, {:.4}]; \
             samples = {}, slack = {} se",
            omega.label(),
            k.c,
            k.l1,
            k.l2,
            ratio_min,
            ratio_max,
            budget.samples,
            budget.slack
        ),
    })
}

/// Whether `Σ_i (a i^{-α})^{2m}` converges, i.e. `2 m α > 1`. For a
/// positive-gap lattice family this is exactly the finite-heat-content
/// criterion.
pub fn summability_criterion(m: usize, alpha: f64) -> bool {
    2.0 * m as f64 * alpha > 1.0
}

/// Verify the decoupling bound on a lattice window:
/// `|H_Ω - Σ_i H_{B_i}| ≤ ω_m² e^{-δ²/(8t)} (√2/δ + (4πt)^{-1/2})^m Σ r_i^{2m}`
/// with the measured left side within `slack` standard errors of the right.
pub fn verify_decoupling(
    window: &BallUnion,
    delta: SeparationGap,
    t_grid: &[f64],
    budget: &VerifyBudget,
) -> Result<VerificationReport> {
    require_sorted(t_grid)?;
    let m = window.dim();
    let omega_m = crate::geometry::unit_ball_volume(m);
    let sum_r2m: f64 = {
        let mut k = KahanSum::new();
        window
            .radii()
            .iter()
            .for_each(|&r| k.add(r.powi(2 * m as i32)));
        k.value()
    };
    // Group equal radii so the per-ball quadrature runs once per distinct r.
    let mut groups: Vec<(f64, f64)> = Vec::new(); // (radius, count)
    {
        let mut radii: Vec<f64> = window.radii().to_vec();
        radii.sort_by(f64::total_cmp);
        for r in radii {
            match groups.last_mut() {
                Some((r0, c)) if *r0 == r => *c += 1.0,
                _ => groups.push((r, 1.0)),
            }
        }
    }

    let mut rows = Vec::with_capacity(t_grid.len());
    for (idx, &t) in t_grid.iter().enumerate() {
        let mut sum_h = KahanSum::new();
        let mut sum_tol = 0.0;
        for &(r, count) in &groups {
            let h = crate::estimators::heat_content_ball(m, r, t, budget.tol)?;
            sum_h.add(count * h.value);
            sum_tol += count * h.error;
        }
        let h_mc = crate::estimators::heat_content_mc(
            window,
            t,
            budget.samples,
            budget.key.substream(idx as u64),
        );
        let lhs = (h_mc.value - sum_h.value()).abs();
        let rhs = omega_m * omega_m
            * (-delta.delta * delta.delta / (8.0 * t)).exp()
            * ((2.0f64).sqrt() / delta.delta
                + (4.0 * std::f64::consts::PI * t).powf(-0.5))
            .powi(m as i32)
            * sum_r2m;
        let sigma = h_mc.error + sum_tol;
        let pass = lhs <= rhs + budget.slack * sigma;
        rows.push(ReportRow {
            t,
            lower: 0.0,
            mid: lhs,
            upper: rhs,
            sigma,
            pass,
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(VerificationReport {
        theorem_id: TheoremId::T3ii,
        t_grid: t_grid.to_vec(),
        rows,
        passed,
        notes: format!(
            "window = {} ({} balls), delta = {}, sum r^2m = {:.6e}, samples = {}",
            window.label(),
            window.len(),
            delta.delta,
            sum_r2m,
            budget.samples
        ),
    })
}

/// Result of the sum–integral comparison: `lhs = |Σ f(i)g(i) - ∫ f g|`,
/// `rhs = Σ f(i+1)(g(i) - g(i+1))`, and the numerical slack (quadrature
/// tolerance plus the finite-horizon edge term `f(N+1) g(N+1)`).
#[derive(Debug, Clone, Copy)]
pub struct Lemma2Gap {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Compare `Σ_{i=1}^{N} f(i) g(i)` against `∫_1^{N+1} f g` for an
/// increasing `f` and a decreasing `g` (both nonnegative); the gap is
/// bounded by `Σ f(i+1)(g(i) - g(i+1))` up to the returned slack. The
/// integral side is computed by adaptive quadrature of the callbacks, not by
/// Riemann sums. Monotonicity is validated on the integer samples and
/// violations are rejected.
pub fn lemma2_gap(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    n_terms: usize,
) -> Result<Lemma2Gap> {
    if n_terms < 2 {
        return Err(Error::InvalidInput("lemma2_gap needs at least 2 terms".into()));
    }
    let n = n_terms;
    let fv: Vec<f64> = (1..=n + 1).map(|i| f(i as f64)).collect();
    let gv: Vec<f64> = (1..=n + 1).map(|i| g(i as f64)).collect();
    for i in 0..n {
        let tol_f = 1e-12 * fv[i].abs().max(1.0);
        let tol_g = 1e-12 * gv[i].abs().max(1.0);
        if fv[i + 1] < fv[i] - tol_f {
            return Err(Error::NonMonotonic(format!(
                "f({}) = {} > f({}) = {}",
                i + 1,
                fv[i],
                i + 2,
                fv[i + 1]
            )));
        }
        if gv[i + 1] > gv[i] + tol_g {
            return Err(Error::NonMonotonic(format!(
                "g({}) = {} < g({}) = {}",
                i + 1,
                gv[i],
                i + 2,
                gv[i + 1]
            )));
        }
        if fv[i] < 0.0 || gv[i] < 0.0 {
            return Err(Error::InvalidInput("f and g must be nonnegative".into()));
        }
    }

    let mut sum = KahanSum::new();
    let mut rhs = KahanSum::new();
    for i in 0..n {
        sum.add(fv[i] * gv[i]);
        rhs.add(fv[i + 1] * (gv[i] - gv[i + 1]));
    }
    let qtol = 1e-10 * (1.0 + sum.value().abs());
    let integral = crate::quad::integrate(
        |x| f(x) * g(x),
        1.0,
        (n + 1) as f64,
        qtol,
        20_000,
    )?;
    let lhs = (sum.value() - integral.value).abs();
    Ok(Lemma2Gap {
        lhs,
        rhs: rhs.value(),
        slack: integral.error + fv[n] * gv[n],
    })
}

/// Check the basic shape facts on precomputed grids: H strictly decreasing
/// and log-convex; F increasing, concave, and subadditive (the latter on
/// grid pairs where `2t` is itself a grid point). All inequalities carry
/// `slack` times the propagated errors.
pub fn verify_basic_facts(
    h_grid: &[(f64, Estimate)],
    f_grid: Option<&[(f64, Estimate)]>,
) -> Result<VerificationReport> {
    let ts: Vec<f64> = h_grid.iter().map(|&(t, _)| t).collect();
    require_sorted(&ts)?;
    if let Some(fg) = f_grid {
        let fts: Vec<f64> = fg.iter().map(|&(t, _)| t).collect();
        require_sorted(&fts)?;
    }
    let slack = 3.0;
    let mut rows = Vec::new();
    let mut checks = [0usize; 5]; // decreasing, log-convex, increasing, concave, subadditive
    let mut worst_by_t: std::collections::BTreeMap<u64, (f64, f64, f64)> =
        std::collections::BTreeMap::new();
    let mut record = |t: f64, margin: f64, allowed: f64, sigma: f64| {
        let e = worst_by_t
            .entry(t.to_bits())
            .or_insert((f64::INFINITY, 0.0, 0.0));
        if margin - allowed < e.0 - e.1 {
            *e = (margin, allowed, sigma);
        }
    };

    // H decreasing: H(t_k) - H(t_{k+1}) >= -slack * (e_k + e_{k+1}).
    for w in h_grid.windows(2) {
        let (t0, h0) = w[0];
        let (_, h1) = w[1];
        let sigma = h0.error + h1.error;
        record(t0, h0.value - h1.value, -slack * sigma, sigma);
        checks[0] += 1;
    }
    // H log-convex: ln H(t_k) <= w ln H(t_{k-1}) + (1-w) ln H(t_{k+1}) + slack_ln,
    // w = (t_{k+1} - t_k)/(t_{k+1} - t_{k-1}). On an arithmetic triple this is
    // H(t_k)^2 <= H(t_{k-1}) H(t_{k+1}).
    for w in h_grid.windows(3) {
        let (ta, ha) = w[0];
        let (tb, hb) = w[1];
        let (tc, hc) = w[2];
        if ha.value <= 0.0 || hb.value <= 0.0 || hc.value <= 0.0 {
            continue;
        }
        let lam = (tc - tb) / (tc - ta);
        let rel = |e: &Estimate| e.error / e.value;
        let sigma_ln = rel(&ha) * lam + rel(&hc) * (1.0 - lam) + rel(&hb);
        let margin = lam * ha.value.ln() + (1.0 - lam) * hc.value.ln() - hb.value.ln();
        record(tb, margin, -slack * sigma_ln, sigma_ln);
        checks[1] += 1;
    }

    if let Some(fg) = f_grid {
        // F increasing.
        for w in fg.windows(2) {
            let (t0, f0) = w[0];
            let (_, f1) = w[1];
            let sigma = f0.error + f1.error;
            record(t0, f1.value - f0.value, -slack * sigma, sigma);
            checks[2] += 1;
        }
        // F concave: F(t_k) >= w F(t_{k-1}) + (1-w) F(t_{k+1}) - slack.
        for w in fg.windows(3) {
            let (ta, fa) = w[0];
            let (tb, fb) = w[1];
            let (tc, fc) = w[2];
            let lam = (tc - tb) / (tc - ta);
            let sigma = lam * fa.error + (1.0 - lam) * fc.error + fb.error;
            let margin = fb.value - (lam * fa.value + (1.0 - lam) * fc.value);
            record(tb, margin, -slack * sigma, sigma);
            checks[3] += 1;
        }
        // F subadditive: F(2t) <= 2 F(t) where 2t is on the grid.
        for (k, &(tk, fk)) in fg.iter().enumerate() {
            if let Some(&(tj, fj)) = fg[k..]
                .iter()
                .find(|&&(tj, _)| (tj - 2.0 * tk).abs() <= 1e-9 * tj)
            {
                let sigma = 2.0 * fk.error + fj.error;
                record(tj, 2.0 * fk.value - fj.value, -slack * sigma, sigma);
                checks[4] += 1;
            }
        }
    }

    let mut passed = true;
    for (&tb, &(margin, allowed, sigma)) in &worst_by_t {
        let pass = margin >= allowed;
        passed &= pass;
        rows.push(ReportRow {
            t: f64::from_bits(tb),
            lower: allowed,
            mid: margin,
            upper: margin,
            sigma,
            pass,
        });
    }
    Ok(VerificationReport {
        theorem_id: TheoremId::Facts,
        t_grid: ts,
        rows,
        passed,
        notes: format!(
            "checks: {} H-monotone, {} H-log-convex, {} F-monotone, {} F-concave, \
             {} F-subadditive; margins are worst-case per grid point, pass iff margin >= lower",
            checks[0], checks[1], checks[2], checks[3], checks[4]
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ball_heat_pair;
    use crate::geometry::separation_delta;

    #[test]
    fn summability_examples() {
        assert!(summability_criterion(2, 0.4));
        assert!(!summability_criterion(2, 0.25)); // boundary is excluded
        assert!(summability_criterion(3, 0.2));
        assert!(!summability_criterion(3, 1.0 / 6.0));
    }

    #[test]
    fn theorem1_single_disk_passes_with_wide_margins() {
        let disk = BallUnion::single_ball(2, 1.0).unwrap();
        let grid: Vec<f64> = (0..8).map(|i| 10f64.powf(-4.0 + 5.0 * i as f64 / 7.0)).collect();
        let budget = VerifyBudget::new(100_000, 42);
        let report = verify_theorem1(&disk, &grid, &budget).unwrap();
        assert!(report.passed, "{report:?}");
        // Lower margins are enormous: mid/lower >= 10 (canary against
        // inverted constants wiring).
        for row in &report.rows {
            assert!(row.mid / row.lower >= 10.0, "suspiciously tight: {row:?}");
        }
    }

    #[test]
    fn theorem1_ratio_tends_to_one_at_small_t() {
        let disk = BallUnion::single_ball(2, 1.0).unwrap();
        let budget = VerifyBudget::new(200_000, 1);
        let report = verify_theorem1(&disk, &[1e-6, 1e-5], &budget).unwrap();
        for row in &report.rows {
            let g = row.lower / 1.144_727_430_545_886_2e-3; // G = lower / K1
            let ratio = row.mid / g;
            assert!((ratio - 1.0).abs() < 0.01, "H/G = {ratio} at t = {}", row.t);
        }
    }

    #[test]
    fn theorem2_single_disk_passes() {
        let disk = BallUnion::single_ball(2, 1.0).unwrap();
        let grid: Vec<f64> = (0..8).map(|i| 10f64.powf(-3.0 + 5.0 * i as f64 / 7.0)).collect();
        let budget = VerifyBudget::new(100_000, 43);
        let report = verify_theorem2(&disk, &grid, &budget).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn theorem2_ratio_tends_to_one_at_large_t() {
        let disk = BallUnion::single_ball(2, 1.0).unwrap();
        let budget = VerifyBudget::new(200_000, 2);
        let report = verify_theorem2(&disk, &[1e5, 1e6], &budget).unwrap();
        for row in &report.rows {
            let g = row.lower / 1.144_727_430_545_886_2e-3;
            let ratio = row.mid / g;
            assert!((ratio - 1.0).abs() < 0.02, "F/G_nu = {ratio} at t = {}", row.t);
        }
    }

    #[test]
    fn decoupling_on_small_window() {
        let window = BallUnion::lattice_window(2, 2, 0.25).unwrap();
        let delta = separation_delta(&window, 1.0).unwrap();
        let grid = [0.01, 0.05, 0.2, 1.0];
        let budget = VerifyBudget::new(200_000, 3);
        let report = verify_decoupling(&window, delta, &grid, &budget).unwrap();
        assert!(report.passed, "{report:?}");
        // Single ball: LHS = 0 <= RHS trivially.
        let single = BallUnion::single_ball(2, 0.25).unwrap();
        let d = SeparationGap { delta: f64::INFINITY };
        let r = verify_decoupling(&single, d, &[0.05], &budget).unwrap();
        assert!(r.passed);
        assert!(r.rows[0].mid <= r.rows[0].sigma * 4.0);
    }

    #[test]
    fn lemma2_zeta_example() {
        // f ≡ 1, g = x^{-2}: |Σ g(i) - ∫_1^∞ g| = ζ(2) - 1 ≈ 0.6449 ≤ g(1) = 1.
        let gap = lemma2_gap(|_| 1.0, |x| x.powi(-2), 200_000).unwrap();
        let zeta2 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert!(
            (gap.lhs - (zeta2 - 1.0)).abs() < 2e-5,
            "lhs = {} vs ζ(2)-1 = {}",
            gap.lhs,
            zeta2 - 1.0
        );
        assert!(gap.rhs <= 1.0 + 1e-9 && gap.rhs > 0.6);
        assert!(gap.lhs <= gap.rhs + gap.slack);
    }

    #[test]
    fn lemma2_degenerate_constant_pair() {
        let gap = lemma2_gap(|_| 2.5, |_| 2.5, 1000).unwrap();
        assert!(gap.lhs <= gap.rhs + gap.slack + 1e-9);
        assert!(gap.rhs.abs() < 1e-12);
        // lhs is the edge effect |Σ - ∫| = c² |N - N| = 0 here since the
        // integral runs to N+1 and the sum has N terms of the same constant.
        assert!(gap.lhs < 1e-7);
    }

    #[test]
    fn lemma2_rejects_non_monotone_input() {
        let r = lemma2_gap(|x| (x * 1.7).sin().abs(), |x| x.powi(-2), 100);
        assert!(matches!(r, Err(Error::NonMonotonic(_))));
        let r = lemma2_gap(|x| x, |x| (x * 0.3).cos().abs(), 100);
        assert!(matches!(r, Err(Error::NonMonotonic(_))));
    }

    #[test]
    fn basic_facts_on_disk_quadrature_grid() {
        // Dyadic grid so the subadditivity pairs exist exactly.
        let grid: Vec<f64> = (0..25).map(|i| 1e-4 * (2.0f64).powi(i)).collect();
        let mut h_grid = Vec::new();
        let mut f_grid = Vec::new();
        for &t in &grid {
            let (h, f) = ball_heat_pair(2, 1.0, t, 1e-11).unwrap();
            h_grid.push((t, h));
            f_grid.push((t, f));
        }
        let report = verify_basic_facts(&h_grid, Some(&f_grid)).unwrap();
        assert!(report.passed, "{}", report.notes);
        assert!(report.notes.contains("23 F-subadditive") || report.notes.contains("24 F-subadditive"),
            "subadditive pairs should be found: {}", report.notes);
    }

    #[test]
    fn basic_facts_degenerate_and_shuffled() {
        let zero = Estimate::deterministic(0.0, 0.0, 0.0);
        let h = vec![(1.0, Estimate::deterministic(1.0, 1e-12, 1e-12)), (2.0, Estimate::deterministic(0.5, 1e-12, 1e-12))];
        let f = vec![(1.0, zero), (2.0, zero)];
        let report = verify_basic_facts(&h, Some(&f)).unwrap();
        assert!(report.passed);

        let shuffled = vec![(2.0, zero), (1.0, zero)];
        assert!(verify_basic_facts(&shuffled, None).is_err());
    }

    #[test]
    fn report_serializes_to_schema() {
        let report = VerificationReport {
            theorem_id: TheoremId::LemmaTwo,
            t_grid: vec![1.0],
            rows: vec![ReportRow { t: 1.0, lower: 0.0, mid: 0.5, upper: 1.0, sigma: 0.0, pass: true }],
            passed: true,
            notes: "x".into(),
        };
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"theorem_id\":\"L2\""));
        assert!(json.contains("\"grid\":[1.0]"));
        assert!(json.contains("\"rows\":[{\"t\":1.0"));
        assert!(json.contains("\"passed\":true"));
    }
}
