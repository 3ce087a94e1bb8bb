//! Euclidean geometry of balls and pairwise disjoint ball unions: volumes,
//! surface measures, lens (two-ball intersection) volumes, membership with a
//! spatial hash, uniform sampling, separation gaps.

use crate::error::{Error, Result};
use crate::rng::{splitmix64, StreamKey};
use crate::special::regularized_beta;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::HashMap;

/// Volume of the unit ball in `R^m`, by the two-step recursion
/// `ω_m = ω_{m-2} · 2π/m` (exact up to rounding, no Gamma evaluation).
pub fn unit_ball_volume(m: usize) -> f64 {
    assert!(m >= 1, "dimension must be positive");
    let mut even = 1.0f64; // ω_0
    let mut odd = 2.0f64; // ω_1
    for k in 2..=m {
        let next = 2.0 * std::f64::consts::PI / k as f64
            * if k % 2 == 0 { even } else { odd };
        if k % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
    }
    if m % 2 == 0 {
        even
    } else {
        odd
    }
}

/// Volume `ω_m r^m` of a ball of radius `r` in `R^m`.
pub fn ball_volume(m: usize, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    unit_ball_volume(m) * r.powi(m as i32)
}

/// Surface measure `m ω_m r^{m-1}` of a sphere of radius `r` in `R^m`, m >= 2.
pub fn ball_perimeter(m: usize, r: f64) -> f64 {
    debug_assert!(m >= 2 && r > 0.0);
    m as f64 * unit_ball_volume(m) * r.powi(m as i32 - 1)
}

/// Volume of a hyperspherical cap of a ball of radius `r`, cut by a plane at
/// signed distance `d` from the center (`d >= 0`: minority cap of height
/// `r - d`; `d < 0`: majority cap). Uses the regularized incomplete beta.
fn cap_volume(m: usize, r: f64, d: f64) -> f64 {
    let x = (1.0 - (d / r) * (d / r)).clamp(0.0, 1.0);
    let half = 0.5 * ball_volume(m, r) * regularized_beta((m as f64 + 1.0) / 2.0, 0.5, x);
    if d >= 0.0 {
        half
    } else {
        ball_volume(m, r) - half
    }
}

/// Volume of `B(0; r1) ∩ B(s·e_1; r2)` in `R^m`.
///
/// Symmetric in (r1, r2), continuous and nonincreasing in `s`. The signed
/// distance from center i to the radical plane is taken from the difference
/// form `d1 = (s² + (r1-r2)(r1+r2)) / (2s)` (exact scaling at small `s`);
/// near external tangency the cap height is instead expanded in
/// `u = r1 + r2 - s`, where the difference form would cancel.
pub fn lens_volume(m: usize, r1: f64, r2: f64, s: f64) -> f64 {
    debug_assert!(r1 > 0.0 && r2 > 0.0 && s >= 0.0);
    if s >= r1 + r2 {
        return 0.0;
    }
    if s <= (r1 - r2).abs() {
        return ball_volume(m, r1.min(r2));
    }
    let u = r1 + r2 - s;
    let cap_of = |ra: f64, rb: f64| {
        // cap of the ball with radius ra against the other radius rb
        let d = (s * s + (ra - rb) * (ra + rb)) / (2.0 * s);
        if d > 0.9 * ra {
            // h = u (rb + s - ra) / (2s); no cancellation in this regime
            let h = u * (rb + s - ra) / (2.0 * s);
            cap_volume(m, ra, ra - h)
        } else {
            cap_volume(m, ra, d)
        }
    };
    cap_of(r1, r2) + cap_of(r2, r1)
}

/// Deficiency `ω_m r^m - lens_volume(m, r, r, s)` for equal radii, computed
/// without cancellation via the complementary incomplete beta:
/// `deficiency = ω_m r^m · I_{(s/2r)^2}(1/2, (m+1)/2)`.
pub fn lens_deficiency(m: usize, r: f64, s: f64) -> f64 {
    debug_assert!(r > 0.0 && s >= 0.0);
    if s >= 2.0 * r {
        return ball_volume(m, r);
    }
    let y = (s / (2.0 * r)).powi(2);
    ball_volume(m, r) * regularized_beta(0.5, (m as f64 + 1.0) / 2.0, y)
}

/// A nonempty, pairwise disjoint union of open balls in `R^m`.
///
/// Interiors must be disjoint (touching closures are allowed); the total
/// volume is then exactly `Σ ω_m r_i^m`. Membership queries go through a
/// spatial hash with cell size `max_i r_i`.
#[derive(Debug, Clone)]
pub struct BallUnion {
    dim: usize,
    centers: Vec<f64>, // flat, len = dim * n
    radii: Vec<f64>,
    label: String,
    total_volume: f64,
    max_radius: f64,
    volume_cdf: Vec<f64>,
    grid: SpatialGrid,
}

impl BallUnion {
    /// Build and validate a ball union. `centers[i]` is the center of ball
    /// `i`; all balls must have positive radius and pairwise disjoint
    /// interiors (hard error otherwise — every downstream formula assumes
    /// disjointness).
    pub fn new(dim: usize, balls: Vec<(Vec<f64>, f64)>, label: impl Into<String>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidGeometry(format!(
                "dimension must be >= 2, got {dim}"
            )));
        }
        if balls.is_empty() {
            return Err(Error::InvalidGeometry("empty ball union".into()));
        }
        let n = balls.len();
        let mut centers = Vec::with_capacity(dim * n);
        let mut radii = Vec::with_capacity(n);
        for (i, (c, r)) in balls.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c.len() });
            }
            if !(r.is_finite() && *r > 0.0) || c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGeometry(format!("ball {i}: non-finite data or r <= 0")));
            }
            centers.extend_from_slice(c);
            radii.push(*r);
        }
        // Disjointness with tolerance zero: |z_i - z_j| >= r_i + r_j.
        for i in 0..n {
            for j in (i + 1)..n {
                let d2: f64 = (0..dim)
                    .map(|d| {
                        let diff = centers[i * dim + d] - centers[j * dim + d];
                        diff * diff
                    })
                    .sum();
                let rsum = radii[i] + radii[j];
                if d2 < rsum * rsum {
                    return Err(Error::OverlappingBalls { i, j, gap: d2.sqrt() - rsum });
                }
            }
        }
        let volumes: Vec<f64> = radii.iter().map(|&r| ball_volume(dim, r)).collect();
        let total_volume: f64 = {
            let mut k = crate::quad::KahanSum::new();
            volumes.iter().for_each(|&v| k.add(v));
            k.value()
        };
        let mut volume_cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for v in &volumes {
            acc += v / total_volume;
            volume_cdf.push(acc);
        }
        *volume_cdf.last_mut().expect("nonempty") = 1.0;
        let max_radius = radii.iter().cloned().fold(0.0, f64::max);
        let grid = SpatialGrid::build(dim, &centers, &radii, max_radius);
        Ok(Self {
            dim,
            centers,
            radii,
            label: label.into(),
            total_volume,
            max_radius,
            volume_cdf,
            grid,
        })
    }

    /// Single ball `B(0; r)`.
    pub fn single_ball(dim: usize, r: f64) -> Result<Self> {
        Self::new(dim, vec![(vec![0.0; dim], r)], format!("ball(m={dim}, r={r})"))
    }

    /// All lattice points `z` in `Z^m` with `|z|_∞ <= half_width`, each with
    /// the constant radius `r` (needs `r <= 1/2`), in shell/lexicographic
    /// enumeration order.
    pub fn lattice_window(dim: usize, half_width: usize, r: f64) -> Result<Self> {
        let count = (2 * half_width + 1).pow(dim as u32);
        let centers = lattice_enumeration(dim, count);
        let balls = centers
            .into_iter()
            .map(|z| (z.iter().map(|&c| c as f64).collect(), r))
            .collect();
        Self::new(
            dim,
            balls,
            format!("lattice-window(m={dim}, k={half_width}, r={r})"),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty unions
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Exact total volume `Σ ω_m r_i^m`.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Membership with dimension checking.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.contains_point(x))
    }

    /// Membership fast path (`|x - z_i| < r_i` for some i).
    #[inline]
    pub fn contains_point(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        let mut found = false;
        self.grid.point_candidates(x, |i| {
            let i = i as usize;
            let c = &self.centers[i * self.dim..(i + 1) * self.dim];
            let mut d2 = 0.0;
            for d in 0..self.dim {
                let diff = x[d] - c[d];
                d2 += diff * diff;
            }
            if d2 < self.radii[i] * self.radii[i] {
                found = true;
                return false; // stop
            }
            true
        });
        found
    }

    /// Visit every ball whose center is within `reach + r_i` of `x`
    /// (superset of the balls a ball of radius `reach` around `x` can meet).
    pub fn for_each_near(&self, x: &[f64], reach: f64, mut visit: impl FnMut(usize)) {
        debug_assert_eq!(x.len(), self.dim);
        let n = self.len();
        let limit = reach + self.max_radius;
        // Small unions: linear scan beats cell iteration and needs no dedup.
        if n <= 4096 || !self.grid.box_is_cheap(reach, n) {
            for i in 0..n {
                let c = self.center(i);
                let mut d2 = 0.0;
                for d in 0..self.dim {
                    let diff = x[d] - c[d];
                    d2 += diff * diff;
                }
                let lim = reach + self.radii[i];
                if d2 < lim * lim {
                    visit(i);
                }
            }
            return;
        }
        let cell = self.grid.cell;
        let dim = self.dim;
        self.grid.box_candidates(x, limit, |cursor, query_lo, i| {
            let i = i as usize;
            let c = &self.centers[i * dim..(i + 1) * dim];
            // A ball spanning several cells appears in several buckets;
            // accept it only from its canonical cell inside the query box.
            for d in 0..dim {
                let ball_lo = ((c[d] - self.radii[i]) / cell).floor() as i64;
                if cursor[d] != ball_lo.max(query_lo[d]) {
                    return;
                }
            }
            let mut d2 = 0.0;
            for d in 0..dim {
                let diff = x[d] - c[d];
                d2 += diff * diff;
            }
            let lim = reach + self.radii[i];
            if d2 < lim * lim {
                visit(i);
            }
        });
    }

    /// Draw one uniform point of the union into `out` (length `dim`).
    ///
    /// Ball `i` is chosen with probability `r_i^m / Σ r_j^m`, then a point is
    /// drawn uniformly in that ball by the polar method (isotropic Gaussian
    /// direction, radius `r U^{1/m}`).
    #[inline]
    pub fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let u: f64 = rng.random();
        let i = self.volume_cdf.partition_point(|&c| c <= u).min(self.len() - 1);
        let center = self.center(i);
        let r = self.radii[i];
        loop {
            let mut norm2 = 0.0;
            for slot in out.iter_mut() {
                let g: f64 = StandardNormal.sample(rng);
                *slot = g;
                norm2 += g * g;
            }
            if norm2 > 1e-300 {
                let v: f64 = rng.random();
                let scale = r * v.powf(1.0 / self.dim as f64) / norm2.sqrt();
                for (slot, c) in out.iter_mut().zip(center) {
                    *slot = c + *slot * scale;
                }
                return;
            }
        }
    }

    /// `n` i.i.d. uniform points on the union, deterministic for a fixed key.
    pub fn sample_uniform(&self, n: usize, key: StreamKey) -> Result<Vec<Vec<f64>>> {
        if n == 0 {
            return Err(Error::InvalidInput("sample_uniform: n must be >= 1".into()));
        }
        let mut rng = crate::rng::chunk_rng(key, 0);
        let mut buf = vec![0.0; self.dim];
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            self.sample_into(&mut rng, &mut buf);
            points.push(buf.clone());
        }
        Ok(points)
    }
}

/// Separation gap δ of a ball union.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationGap {
    pub delta: f64,
}

/// For unions generated on a lattice of the given spacing (all centers are
/// integer multiples of `lattice_spacing`), returns `spacing - 2 max_i r_i`
/// and errors if that is not positive. For anything else returns the generic
/// gap `min_{i≠j} (|z_i - z_j| - r_i - r_j)` (infinite for a single ball).
pub fn separation_delta(omega: &BallUnion, lattice_spacing: f64) -> Result<SeparationGap> {
    let on_lattice = lattice_spacing > 0.0
        && omega.centers.iter().all(|&c| {
            let q = c / lattice_spacing;
            (q - q.round()).abs() <= 1e-9
        });
    if on_lattice {
        let delta = lattice_spacing - 2.0 * omega.max_radius();
        if delta <= 0.0 {
            return Err(Error::NonPositiveGap { delta });
        }
        return Ok(SeparationGap { delta });
    }
    let n = omega.len();
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = (0..omega.dim)
                .map(|d| {
                    let diff = omega.center(i)[d] - omega.center(j)[d];
                    diff * diff
                })
                .sum::<f64>()
                .sqrt();
            gap = gap.min(d - omega.radius(i) - omega.radius(j));
        }
    }
    if gap <= 0.0 {
        return Err(Error::NonPositiveGap { delta: gap });
    }
    Ok(SeparationGap { delta: gap })
}

/// Deterministic enumeration of `Z^m`: shells of increasing `|z|_∞`, each
/// shell in lexicographic order. Returns the first `count` points.
pub fn lattice_enumeration(m: usize, count: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(count);
    let mut shell: i64 = 0;
    while out.len() < count {
        // Lexicographic walk over the cube [-shell, shell]^m, keeping the
        // points whose infinity norm equals the shell index.
        let mut point = vec![-shell; m];
        'walk: loop {
            if point.iter().map(|z| z.abs()).max().unwrap() == shell {
                out.push(point.clone());
                if out.len() == count {
                    break;
                }
            }
            for d in (0..m).rev() {
                if point[d] < shell {
                    point[d] += 1;
                    for p in point.iter_mut().skip(d + 1) {
                        *p = -shell;
                    }
                    continue 'walk;
                }
            }
            break;
        }
        shell += 1;
    }
    out
}

/// Spatial hash over integer cells of side `cell`. Each ball is inserted in
/// every cell its bounding box meets, so a point query only inspects its own
/// cell. Cell keys are mixed into a u64; key collisions merely add candidate
/// balls, never lose one.
#[derive(Debug, Clone)]
struct SpatialGrid {
    dim: usize,
    cell: f64,
    buckets: HashMap<u64, Vec<u32>>,
}

impl SpatialGrid {
    fn build(dim: usize, centers: &[f64], radii: &[f64], max_radius: f64) -> Self {
        let cell = max_radius.max(1e-300);
        let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
        let mut lo = vec![0i64; dim];
        let mut hi = vec![0i64; dim];
        let mut cursor = vec![0i64; dim];
        for i in 0..radii.len() {
            let c = &centers[i * dim..(i + 1) * dim];
            for d in 0..dim {
                lo[d] = ((c[d] - radii[i]) / cell).floor() as i64;
                hi[d] = ((c[d] + radii[i]) / cell).floor() as i64;
            }
            cursor.copy_from_slice(&lo);
            'odometer: loop {
                buckets.entry(Self::key(&cursor)).or_default().push(i as u32);
                for d in (0..dim).rev() {
                    if cursor[d] < hi[d] {
                        cursor[d] += 1;
                        for dd in (d + 1)..dim {
                            cursor[dd] = lo[dd];
                        }
                        continue 'odometer;
                    }
                }
                break;
            }
        }
        Self { dim, cell, buckets }
    }

    #[inline]
    fn key(cell_coords: &[i64]) -> u64 {
        let mut k = 0xcbf2_9ce4_8422_2325u64;
        for &c in cell_coords {
            k = splitmix64(k ^ (c as u64));
        }
        k
    }

    /// Visit candidate ball indices for a point query; `visit` returns false
    /// to stop early.
    #[inline]
    fn point_candidates(&self, x: &[f64], mut visit: impl FnMut(u32) -> bool) {
        let mut k = 0xcbf2_9ce4_8422_2325u64;
        for d in 0..self.dim {
            let c = (x[d] / self.cell).floor() as i64;
            k = splitmix64(k ^ (c as u64));
        }
        if let Some(bucket) = self.buckets.get(&k) {
            for &i in bucket {
                if !visit(i) {
                    return;
                }
            }
        }
    }

    /// Whether a box query of the given reach visits fewer cells than balls.
    fn box_is_cheap(&self, reach: f64, n_balls: usize) -> bool {
        let width = (2.0 * reach / self.cell).ceil() + 2.0;
        width.powi(self.dim as i32) < n_balls as f64
    }

    /// Visit every (cell, ball) pair for cells within `limit` of `x`
    /// (component-wise). The callback receives the current cell coordinates,
    /// the low corner of the query box, and the candidate ball index; the
    /// caller is responsible for deduplicating balls that span several cells.
    fn box_candidates(&self, x: &[f64], limit: f64, mut visit: impl FnMut(&[i64], &[i64], u32)) {
        let dim = self.dim;
        let mut lo = vec![0i64; dim];
        let mut hi = vec![0i64; dim];
        for d in 0..dim {
            lo[d] = ((x[d] - limit) / self.cell).floor() as i64;
            hi[d] = ((x[d] + limit) / self.cell).floor() as i64;
        }
        let mut cursor = lo.clone();
        'odometer: loop {
            if let Some(bucket) = self.buckets.get(&Self::key(&cursor)) {
                for &i in bucket {
                    visit(&cursor, &lo, i);
                }
            }
            for d in (0..dim).rev() {
                if cursor[d] < hi[d] {
                    cursor[d] += 1;
                    for dd in (d + 1)..dim {
                        cursor[dd] = lo[dd];
                    }
                    continue 'odometer;
                }
            }
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // Closed-form planar lens (independent oracle for the beta-function
    // implementation): circular segment areas on both sides of the chord.
    fn lens2_closed(r1: f64, r2: f64, s: f64) -> f64 {
        if s >= r1 + r2 {
            return 0.0;
        }
        if s <= (r1 - r2).abs() {
            return PI * r1.min(r2) * r1.min(r2);
        }
        let d1 = (s * s + r1 * r1 - r2 * r2) / (2.0 * s);
        let d2 = s - d1;
        let seg = |r: f64, d: f64| {
            r * r * (d / r).clamp(-1.0, 1.0).acos() - d * (r * r - d * d).max(0.0).sqrt()
        };
        seg(r1, d1) + seg(r2, d2)
    }

    // Closed-form spherical lens in R^3.
    fn lens3_closed(r1: f64, r2: f64, s: f64) -> f64 {
        if s >= r1 + r2 {
            return 0.0;
        }
        if s <= (r1 - r2).abs() {
            return ball_volume(3, r1.min(r2));
        }
        PI * (r1 + r2 - s).powi(2)
            * (s * s + 2.0 * s * r2 - 3.0 * r2 * r2 + 2.0 * s * r1 + 6.0 * r1 * r2
                - 3.0 * r1 * r1)
            / (12.0 * s)
    }

    #[test]
    fn ball_volume_examples() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-15);
        assert!((ball_volume(3, 1.0) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((ball_volume(2, 0.25) - PI / 16.0).abs() < 1e-16);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn ball_perimeter_examples() {
        assert!((ball_perimeter(2, 1.0) - 2.0 * PI).abs() < 1e-15);
        assert!((ball_perimeter(3, 1.0) - 4.0 * PI).abs() < 1e-14);
        assert!((ball_perimeter(2, 0.25) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn doubling_ratio_is_exactly_two_to_m() {
        for m in 2..=6 {
            for &r in &[0.17, 1.0, 3.75, 123.456] {
                let ratio = ball_volume(m, 2.0 * r) / ball_volume(m, r);
                assert_eq!(ratio, (2.0f64).powi(m as i32), "m={m}, r={r}");
            }
        }
    }

    #[test]
    fn lens_volume_trivial_cases() {
        assert!((lens_volume(2, 1.0, 1.0, 0.0) - PI).abs() < 1e-15);
        assert_eq!(lens_volume(2, 1.0, 1.0, 2.5), 0.0);
        // Internal tangency / containment.
        assert!((lens_volume(2, 2.0, 0.5, 1.0) - PI * 0.25).abs() < 1e-15);
    }

    #[test]
    fn lens_volume_unit_disks_at_unit_distance() {
        // 2π/3 - √3/2, also the planar closed form 2cos^{-1}(s/2) - (s/2)√(4-s²).
        let expected = 2.0 * PI / 3.0 - 3.0f64.sqrt() / 2.0;
        assert!((expected - 1.228_369_698_608_756_7).abs() < 1e-15);
        let got = lens_volume(2, 1.0, 1.0, 1.0);
        assert!((got - expected).abs() < 1e-13, "got {got}");
        assert!((lens2_closed(1.0, 1.0, 1.0) - expected).abs() < 1e-13);
    }

    #[test]
    fn lens_volume_matches_closed_forms() {
        let cases = [
            (1.0, 1.0, 0.3),
            (1.0, 1.0, 1.7),
            (1.0, 1.0, 1.999_999),
            (0.8, 1.3, 0.9),
            (0.8, 1.3, 2.05),
            (2.0, 0.3, 1.9),
            (0.25, 0.25, 0.45),
        ];
        // The acos-based closed form itself loses digits near tangency, so
        // compare with an absolute floor at its accuracy (~1e-13).
        for &(r1, r2, s) in &cases {
            let got2 = lens_volume(2, r1, r2, s);
            let want2 = lens2_closed(r1, r2, s);
            assert!(
                (got2 - want2).abs() < 1e-12 * want2.max(1.0),
                "m=2 ({r1},{r2},{s}): {got2} vs {want2}"
            );
            let got3 = lens_volume(3, r1, r2, s);
            let want3 = lens3_closed(r1, r2, s);
            assert!(
                (got3 - want3).abs() < 1e-12 * want3.max(1.0),
                "m=3 ({r1},{r2},{s}): {got3} vs {want3}"
            );
        }
    }

    #[test]
    fn lens_deficiency_is_stable_complement() {
        // Where the direct difference ω r^m - lens carries enough digits the
        // two paths must agree.
        for m in 2..=4 {
            for &s in &[1e-3, 0.1, 0.5, 1.3, 1.999, 2.0, 3.0] {
                let direct = ball_volume(m, 1.0) - lens_volume(m, 1.0, 1.0, s);
                let stable = lens_deficiency(m, 1.0, s);
                assert!(
                    (direct - stable).abs() <= 1e-12 * ball_volume(m, 1.0),
                    "m={m} s={s}: {direct} vs {stable}"
                );
            }
        }
        // At tiny separation the direct difference underflows to ~0 while the
        // complement form still resolves the linear law
        // deficiency ≈ ω_{m-1} r^{m-1} s (cross-section times displacement).
        for m in 2..=4 {
            let s = 1e-9;
            let expected = unit_ball_volume(m - 1) * s;
            let got = lens_deficiency(m, 1.0, s);
            assert!(
                (got / expected - 1.0).abs() < 1e-3,
                "m={m}: {got} vs linear law {expected}"
            );
        }
    }

    #[test]
    fn lens_monte_carlo_oracle_random_triples() {
        // Hit-count oracle: sample uniformly in B(0; r1), count the fraction
        // inside B(s e1; r2); lens = ω_m r1^m * fraction.
        let mut failures = Vec::new();
        for case in 0..100u64 {
            let m = if case % 2 == 0 { 2 } else { 3 };
            let h = |k: u64| {
                // deterministic pseudo-random parameters per case
                (splitmix64(case.wrapping_mul(0x9e37).wrapping_add(k)) >> 11) as f64
                    / (1u64 << 53) as f64
            };
            let r1 = 0.2 + 1.8 * h(1);
            let r2 = 0.2 + 1.8 * h(2);
            let s = (r1 + r2) * 1.05 * h(3);
            let omega = BallUnion::single_ball(m, r1).unwrap();
            let mut center2 = vec![0.0; m];
            center2[0] = s;
            let n = 1_000_000u64;
            let mom = crate::rng::mc_mean(StreamKey::new(0xFEED, case), n, |rng| {
                let mut buf = [0.0f64; 3];
                omega.sample_into(rng, &mut buf[..m]);
                let mut d2 = 0.0;
                for d in 0..m {
                    let diff = buf[d] - center2[d];
                    d2 += diff * diff;
                }
                if d2 < r2 * r2 {
                    1.0
                } else {
                    0.0
                }
            });
            let vol1 = ball_volume(m, r1);
            let mc = vol1 * mom.mean;
            let sigma = vol1 * mom.se;
            let exact = lens_volume(m, r1, r2, s);
            if (mc - exact).abs() > 4.0 * sigma.max(1e-12) {
                failures.push((m, r1, r2, s, mc, exact, sigma));
            }
        }
        assert!(failures.is_empty(), "lens MC oracle mismatches: {failures:?}");
    }

    proptest! {
        #[test]
        fn lens_symmetry_and_bounds(
            m in 2usize..=5,
            r1 in 0.1f64..3.0,
            r2 in 0.1f64..3.0,
            frac in 0.0f64..1.2,
        ) {
            let s = (r1 + r2) * frac;
            let a = lens_volume(m, r1, r2, s);
            let b = lens_volume(m, r2, r1, s);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            prop_assert!(a >= 0.0);
            prop_assert!(a <= ball_volume(m, r1.min(r2)) * (1.0 + 1e-12));
        }

        #[test]
        fn lens_monotone_nonincreasing_in_s(
            m in 2usize..=4,
            r1 in 0.1f64..2.0,
            r2 in 0.1f64..2.0,
            f1 in 0.0f64..1.0,
            f2 in 0.0f64..1.0,
        ) {
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let s_lo = (r1 + r2) * lo;
            let s_hi = (r1 + r2) * hi;
            let a = lens_volume(m, r1, r2, s_lo);
            let b = lens_volume(m, r1, r2, s_hi);
            prop_assert!(a + 1e-12 * a.max(1.0) >= b, "lens not monotone: {a} < {b}");
        }
    }

    #[test]
    fn contains_basic() {
        let disk = BallUnion::single_ball(2, 1.0).unwrap();
        assert!(disk.contains(&[0.0, 0.0]).unwrap());
        assert!(!disk.contains(&[2.0, 0.0]).unwrap());
        assert!(matches!(
            disk.contains(&[0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let two = BallUnion::new(
            2,
            vec![(vec![0.0, 0.0], 1.0), (vec![3.0, 0.0], 1.0)],
            "two disks",
        )
        .unwrap();
        assert!(two.contains(&[3.5, 0.0]).unwrap());
        assert!(!two.contains(&[1.5, 0.0]).unwrap());
    }

    #[test]
    fn overlap_is_a_hard_error() {
        let bad = BallUnion::new(
            2,
            vec![(vec![0.0, 0.0], 1.0), (vec![1.5, 0.0], 1.0)],
            "overlapping",
        );
        assert!(matches!(bad, Err(Error::OverlappingBalls { .. })));
        // Touching closures are fine.
        let ok = BallUnion::new(
            2,
            vec![(vec![0.0, 0.0], 1.0), (vec![2.0, 0.0], 1.0)],
            "tangent",
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn sampling_statistics_match_uniform_law() {
        // E|x|^2 = m/(m+2) on the unit ball.
        for m in [2usize, 3] {
            let ball = BallUnion::single_ball(m, 1.0).unwrap();
            let mom = crate::rng::mc_mean(StreamKey::new(7, m as u64), 1_000_000, |rng| {
                let mut buf = [0.0f64; 3];
                ball.sample_into(rng, &mut buf[..m]);
                buf[..m].iter().map(|x| x * x).sum::<f64>()
            });
            let expected = m as f64 / (m as f64 + 2.0);
            assert!(
                (mom.mean - expected).abs() < 3.0 * mom.se,
                "m={m}: {} vs {expected} (se {})",
                mom.mean,
                mom.se
            );
        }
    }

    #[test]
    fn sampling_ball_fractions_and_means() {
        let two = BallUnion::new(
            2,
            vec![(vec![0.0, 0.0], 1.0), (vec![5.0, 0.0], 1.0)],
            "two equal disks",
        )
        .unwrap();
        let n = 1_000_000u64;
        let frac = crate::rng::mc_mean(StreamKey::new(11, 0), n, |rng| {
            let mut buf = [0.0f64; 2];
            two.sample_into(rng, &mut buf);
            if buf[0] < 2.5 {
                1.0
            } else {
                0.0
            }
        });
        assert!(
            (frac.mean - 0.5).abs() < 3.0 * frac.se,
            "fraction {} se {}",
            frac.mean,
            frac.se
        );
        // Per-coordinate mean of the second disk's points is its center.
        let pts = two.sample_uniform(200_000, StreamKey::new(11, 1)).unwrap();
        let (mut sx, mut sy, mut count) = (0.0f64, 0.0f64, 0.0f64);
        for p in pts.iter().filter(|p| p[0] > 2.5) {
            sx += p[0];
            sy += p[1];
            count += 1.0;
        }
        let se = 0.5 / count.sqrt(); // sd of a coordinate in the unit disk is 1/2
        assert!((sx / count - 5.0).abs() < 4.0 * se);
        assert!((sy / count - 0.0).abs() < 4.0 * se);
    }

    #[test]
    fn sample_uniform_rejects_zero_n() {
        let disk = BallUnion::single_ball(2, 1.0).unwrap();
        assert!(disk.sample_uniform(0, StreamKey::new(0, 0)).is_err());
    }

    #[test]
    fn separation_delta_cases() {
        let window = BallUnion::lattice_window(2, 1, 0.25).unwrap();
        let gap = separation_delta(&window, 1.0).unwrap();
        assert_eq!(gap.delta, 0.5);

        let touching = BallUnion::lattice_window(2, 1, 0.5).unwrap();
        assert!(matches!(
            separation_delta(&touching, 1.0),
            Err(Error::NonPositiveGap { .. })
        ));

        let generic = BallUnion::new(
            2,
            vec![(vec![0.0, 0.0], 1.0), (vec![3.0, 0.0], 1.0)],
            "generic",
        )
        .unwrap();
        let gap = separation_delta(&generic, 0.0).unwrap();
        assert!((gap.delta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_enumeration_is_shell_ordered() {
        let pts = lattice_enumeration(2, 9);
        assert_eq!(pts[0], vec![0, 0]);
        for p in &pts[1..] {
            assert_eq!(p.iter().map(|z| z.abs()).max().unwrap(), 1);
        }
        let pts = lattice_enumeration(3, 100);
        let norms: Vec<i64> = pts
            .iter()
            .map(|p| p.iter().map(|z| z.abs()).max().unwrap())
            .collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]), "shells not monotone");
        assert_eq!(norms[0], 0);
        assert_eq!(pts.len(), 100);
    }

    #[test]
    fn window_membership_against_brute_force() {
        let window = BallUnion::lattice_window(2, 3, 0.25).unwrap();
        for case in 0..2000u64 {
            let h = |k: u64| {
                (splitmix64(case.wrapping_mul(31).wrapping_add(k)) >> 11) as f64
                    / (1u64 << 53) as f64
            };
            let x = [-4.0 + 8.0 * h(1), -4.0 + 8.0 * h(2)];
            let brute = (0..window.len()).any(|i| {
                let c = window.center(i);
                let dx = x[0] - c[0];
                let dy = x[1] - c[1];
                dx * dx + dy * dy < 0.0625
            });
            assert_eq!(window.contains_point(&x), brute, "x = {x:?}");
        }
    }
}
