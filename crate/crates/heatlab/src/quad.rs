//! Adaptive Gauss–Kronrod quadrature with an explicit absolute error budget.
//!
//! The integrators here return the pair (value, error estimate). The error
//! is the usual QUADPACK-style rescaled Kronrod–Gauss difference summed over
//! panels; callers treat it as a certificate and propagate it into the
//! `Estimate` error field together with any analytic tail bounds.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Compensated (Kahan–Neumaier) accumulator for long sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// 15-point Kronrod abscissae (positive half), QUADPACK values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 7-point Gauss weights.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod weights.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Gauss–Kronrod panel on [a, b]. Returns (value, error).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    for (j, wg) in WG.iter().enumerate().take(3) {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    res_gauss += WG[3] * f_center;

    for j in 0..4 {
        let jtwm1 = 2 * j;
        if jtwm1 >= 7 {
            break;
        }
        let x = half * XGK[jtwm1];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let abs_half = half.abs();
    (value, rescale_error(err, res_abs * abs_half, res_asc * abs_half))
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.a == other.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; tie-break on left endpoint for determinism
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Adaptively integrate `f` on [a, b] to absolute tolerance `tol`.
///
/// Fails with `Error::QuadratureBudget` (carrying the best value and the
/// achieved error) when `max_panels` bisections are not enough.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "integrate: bad interval [{a}, {b}] or tol {tol}"
        )));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, panels: 0 });
    }

    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut err_sum = e;

    while err_sum > tol && heap.len() < max_panels {
        let worst = heap.pop().expect("heap non-empty");
        // Stop refining when the panel has collapsed to machine width.
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        err_sum += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Deterministic final reduction: sort panels by position, Kahan-sum.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = KahanSum::new();
    let mut error = KahanSum::new();
    for p in &panels {
        value.add(p.value);
        error.add(p.error);
    }
    let result = QuadResult {
        value: value.value(),
        error: error.value(),
        panels: panels.len(),
    };

    if !result.value.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integrate: non-finite result on [{a}, {b}]"
        )));
    }
    if result.error > tol {
        return Err(Error::QuadratureBudget {
            value: result.value,
            requested: tol,
            achieved: result.error,
        });
    }
    Ok(result)
}

/// Integrate a power-weighted integrand `∫_0^upper s^p g(s) ds` with
/// `p > -1`, flattening the endpoint singularity by the substitution
/// `u = s^{p+1}`:
///
/// `∫_0^X s^p g(s) ds = (p+1)^{-1} ∫_0^{X^{p+1}} g(u^{1/(p+1)}) du`.
pub fn integrate_power_weighted<F: Fn(f64) -> f64>(
    p: f64,
    g: F,
    upper: f64,
    tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if p <= -1.0 {
        return Err(Error::InvalidInput(format!(
            "power weight s^{p} is not integrable at 0"
        )));
    }
    let q = p + 1.0;
    let u_max = upper.powf(q);
    let inner_tol = tol * q;
    let res = integrate(|u| g(u.powf(1.0 / q)), 0.0, u_max, inner_tol, max_panels)?;
    Ok(QuadResult {
        value: res.value / q,
        error: res.error / q,
        panels: res.panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 100).unwrap();
        assert!((r.value - 8.0).abs() < 1e-12, "got {}", r.value);
    }

    #[test]
    fn gaussian_matches_erf_value() {
        // ∫_0^5 e^{-x^2} dx = sqrt(pi)/2 * erf(5)
        let r = integrate(|x| (-x * x).exp(), 0.0, 5.0, 1e-13, 400).unwrap();
        let expected = 0.886_226_925_452_757_9; // sqrt(pi)/2, erf(5) = 1 to 1e-11
        assert!((r.value - expected).abs() < 1e-11, "got {}", r.value);
    }

    #[test]
    fn sqrt_singularity_via_flattening() {
        // ∫_0^1 s^{-1/2} ds = 2
        let r = integrate_power_weighted(-0.5, |_| 1.0, 1.0, 1e-12, 200).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "got {}", r.value);
        // ∫_0^1 s^{-0.6} e^s ds against a reference computed by series:
        // Σ_k 1/(k! (k+0.4)) = 2.987709938..., checked by high-N partial sum.
        let reference: f64 = (0..60).map(|k| {
            let kf: f64 = (1..=k).map(|j| j as f64).product::<f64>().max(1.0);
            1.0 / (kf * (k as f64 + 0.4))
        }).sum();
        let r = integrate_power_weighted(-0.6, |s| s.exp(), 1.0, 1e-12, 400).unwrap();
        assert!((r.value - reference).abs() < 1e-10, "got {} want {}", r.value, reference);
    }

    #[test]
    fn budget_exhaustion_reports_best_value() {
        let res = integrate(|x| (1e6 * x).sin() / (x + 1e-3), 0.0, 1.0, 1e-14, 8);
        match res {
            Err(Error::QuadratureBudget { achieved, .. }) => assert!(achieved > 1e-14),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn kahan_sum_handles_many_small_terms() {
        let mut k = KahanSum::new();
        for _ in 0..10_000_000 {
            k.add(0.1);
        }
        assert!((k.value() - 1_000_000.0).abs() < 1e-6);
    }
}
