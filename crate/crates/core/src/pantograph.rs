//! Pantographic orbits `Pan(n, a, h)`: symmetric `(4 + 2n)`-periodic orbits
//! with a vertical chord on each half-ellipse and `n` segment bounces on each
//! crossing between the caps.
//!
//! Everything here is driven by `t = tan λ` of the marked point
//! `P = (h + a cos λ, sin λ)`, the unique root in `(1/a, ∞)` of
//!
//! ```text
//! n = h (a²t² − 1)/(2at) + ((a² − 2)t² − 1)/(2t √(1 + t²)).
//! ```
//!
//! Linear stability is governed by `Δₙ = δ₁ δ₂` with `δⱼ = lⱼK/cos β − 1`;
//! the half-period map has trace `±(4Δ − 2)`, the sign being `(−1)ⁿ`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Billiard, PhasePoint, TangentMatrix};
use crate::error::{domain, Error, Result};
use crate::geometry::{build_stadium, Piece};
use crate::roots::{bisect, grow_upper, newton_polish};
use crate::tolerance::ToleranceSet;

/// Lower bound on `h` for `Pan(n, a, h)` to exist.
pub fn existence_threshold(n: u32, a: f64) -> f64 {
    if n >= 2 && a > 2.0 {
        (n - 1) as f64 * (a * (a - 2.0)).sqrt()
    } else {
        0.0
    }
}

fn check_shape(a: f64, h: f64) -> Result<()> {
    if !a.is_finite() || !h.is_finite() || a <= 1.0 {
        return domain(format!("invalid shape a = {a}, h = {h}"));
    }
    Ok(())
}

fn check_exists(n: u32, a: f64, h: f64) -> Result<()> {
    check_shape(a, h)?;
    let threshold = existence_threshold(n, a);
    if h <= threshold || h <= 0.0 {
        return Err(Error::Existence { n, a, h, threshold });
    }
    Ok(())
}

/// Residual of the orbit equation at `t`.
fn orbit_equation(n: u32, a: f64, h: f64, t: f64) -> f64 {
    let slope = (a * a * t * t - 1.0) / (2.0 * a * t);
    let offset = ((a * a - 2.0) * t * t - 1.0) / (2.0 * t * (1.0 + t * t).sqrt());
    slope * h + offset - n as f64
}

fn orbit_equation_dt(a: f64, h: f64, t: f64) -> f64 {
    let slope = (a * a * t * t + 1.0) / (2.0 * a * t * t);
    let r = (1.0 + t * t).sqrt();
    let num = (a * a - 2.0) * t * t - 1.0;
    let den = 2.0 * t * r;
    let dnum = 2.0 * (a * a - 2.0) * t;
    let dden = 2.0 * (1.0 + 2.0 * t * t) / r;
    slope * h + (dnum * den - num * dden) / (den * den)
}

/// `t = tan λ` of the marked point of `Pan(n, a, h)`.
pub fn solve_t(n: u32, a: f64, h: f64) -> Result<f64> {
    check_exists(n, a, h)?;
    let f = |t: f64| orbit_equation(n, a, h, t);
    let lo = 1.0 / a;
    let hi = grow_upper(f, 2.0 / a)?;
    let (lo, hi) = bisect(f, lo, hi, 0.0);
    let t = newton_polish(f, |t| orbit_equation_dt(a, h, t), 0.5 * (lo + hi), lo, hi);
    if !t.is_finite() || f(t).abs() > 1e-10 * (1.0 + n as f64 + h * a * t) {
        return Err(Error::Convergence(format!(
            "orbit equation residual {} at t = {t}",
            f(t)
        )));
    }
    Ok(t)
}

/// Geometry and stability factors of `Pan(n, a, h)` from closed-form expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaFactors {
    pub t: f64,
    pub lambda: f64,
    pub beta: f64,
    /// Length of the vertical chord, `2 sin λ`.
    pub l1: f64,
    /// Length of a crossing path between the caps.
    pub l2: f64,
    pub curvature: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
}

pub fn delta_from_t(n: u32, a: f64, h: f64, t: f64) -> DeltaFactors {
    let r = (1.0 + t * t).sqrt();
    let (sin_l, cos_l) = (t / r, 1.0 / r);
    let cos_beta = a * t / (1.0 + a * a * t * t).sqrt();
    let curvature = a / (a * a * sin_l * sin_l + cos_l * cos_l).powf(1.5);
    let l1 = 2.0 * sin_l;
    let l2 = 2.0 * (h + a * cos_l).hypot(n as f64 + sin_l);
    let delta1 = l1 * curvature / cos_beta - 1.0;
    let delta2 = l2 * curvature / cos_beta - 1.0;
    DeltaFactors {
        t,
        lambda: t.atan(),
        beta: (1.0 / (a * t)).atan(),
        l1,
        l2,
        curvature,
        delta1,
        delta2,
        delta: delta1 * delta2,
    }
}

pub fn delta(n: u32, a: f64, h: f64) -> Result<DeltaFactors> {
    let t = solve_t(n, a, h)?;
    Ok(delta_from_t(n, a, h, t))
}

/// `Lₙ(a)`, the limit of `Δₙ(a, h)` as `h → 0⁺` for `1 < a < √2`.
pub fn small_h_limit(n: u32, a: f64) -> f64 {
    let x = 1.0 / (a * a);
    (2.0 * x - 1.0) * (2.0 * (n + 1) as f64 * x - 1.0)
}

/// `hₙ⁰(a) = n a √(a² − 2)`, where `Δₙ` vanishes (zero below `a = √2`).
pub fn zero_level(n: u32, a: f64) -> f64 {
    if a <= SQRT_2 {
        0.0
    } else {
        n as f64 * a * (a * a - 2.0).sqrt()
    }
}

/// `c_jk = (1 + cos(jπ/k))/2`, the value of `Δ` at a resonance of order `k`.
pub fn resonance_constant(j: u32, k: u32) -> Result<f64> {
    if k < 2 || j < 1 || j >= k {
        return domain(format!("resonance indices require 1 ≤ j < k, k ≥ 2 (got j = {j}, k = {k})"));
    }
    Ok(0.5 * (1.0 + (j as f64 * PI / k as f64).cos()))
}

/// A resonance `μᵏ = 1` with `j/k` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: u32,
    pub j: u32,
    pub c: f64,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All resonance levels of order `2 ≤ k ≤ max(q, 2)`, sorted by increasing `c`.
pub fn resonance_levels(q: u32) -> Vec<Resonance> {
    let mut out = Vec::new();
    for k in 2..=q.max(2) {
        for j in 1..k {
            if gcd(j, k) == 1 {
                let c = 0.5 * (1.0 + (j as f64 * PI / k as f64).cos());
                out.push(Resonance { k, j, c });
            }
        }
    }
    out.sort_by(|x, y| x.c.total_cmp(&y.c));
    out
}

/// `αₙᶜ`: the unique `a ∈ (1, √2]` with `Lₙ(a) = c`.
pub fn alpha(n: u32, c: f64) -> Result<f64> {
    let top = (2 * n + 1) as f64;
    if !(c > 0.0 && c <= top) {
        return domain(format!("alpha requires 0 < c ≤ {top}, got c = {c}"));
    }
    if c == top {
        return Ok(1.0);
    }
    // Lₙ is strictly decreasing on (1, √2): bisect on c − Lₙ(a).
    let (lo, hi) = bisect(|a| c - small_h_limit(n, a), 1.0, SQRT_2, 0.0);
    Ok(0.5 * (lo + hi))
}

/// `hₙᶜ(a)`: the unique `h` with `Δₙ(a, h) = c`.
pub fn level_curve_h(n: u32, c: f64, a: f64) -> Result<f64> {
    check_shape(a, 0.0)?;
    if !(c >= 0.0) || !c.is_finite() {
        return domain(format!("level must be non-negative, got c = {c}"));
    }
    let below_sqrt2 = a * a < 2.0;
    if below_sqrt2 && c <= small_h_limit(n, a) {
        return domain(format!(
            "level Δ{n} = {c} is not reached for a = {a} (the h → 0 limit is {})",
            small_h_limit(n, a)
        ));
    }
    let h_lo = zero_level(n, a);
    if c == 0.0 {
        return Ok(h_lo);
    }
    let g = |h: f64| match delta(n, a, h) {
        Ok(d) => d.delta - c,
        Err(_) => -1.0,
    };
    let h_hi = grow_upper(g, (2.0 * h_lo).max(1.0))?;
    let (lo, hi) = bisect(g, h_lo, h_hi, 1e-15);
    Ok(0.5 * (lo + hi))
}

/// An open interval of `h` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// A cut of the ellipticity strip at a resonance level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCut {
    pub resonance: Resonance,
    pub h: f64,
}

/// The ellipticity range of `h` for fixed `(n, a)` and its resonance cuts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripPartition {
    pub ellipticity: Interval,
    pub cuts: Vec<ResonanceCut>,
    pub intervals: Vec<Interval>,
}

/// Splits the ellipticity strip of `Pan(n, a, ·)` at every resonance of
/// order `≤ q` (and always at `Δ = 1/2`).
pub fn strip_partition(n: u32, a: f64, q: u32) -> Result<StripPartition> {
    check_shape(a, 0.0)?;
    let below_sqrt2 = a * a < 2.0;
    let floor = if below_sqrt2 { small_h_limit(n, a) } else { 0.0 };
    if floor >= 1.0 {
        return domain(format!(
            "Pan({n}, {a}, h) is never elliptic: a must exceed alpha = {}",
            alpha(n, 1.0)?
        ));
    }
    let lo = zero_level(n, a);
    let hi = level_curve_h(n, 1.0, a)?;
    let cuts = resonance_levels(q)
        .into_iter()
        .filter(|r| r.c > floor && r.c < 1.0)
        .map(|r| Ok(ResonanceCut { resonance: r, h: level_curve_h(n, r.c, a)? }))
        .collect::<Result<Vec<_>>>()?;
    let mut edges = vec![lo];
    edges.extend(cuts.iter().map(|c| c.h));
    edges.push(hi);
    let intervals = edges
        .windows(2)
        .map(|w| Interval { lo: w[0], hi: w[1] })
        .collect();
    Ok(StripPartition {
        ellipticity: Interval { lo, hi },
        cuts,
        intervals,
    })
}

/// Open `h`-intervals on which `Pan(n, a, h)` is elliptic without resonances of order `≤ q`.
pub fn nonresonant_intervals(n: u32, a: f64, q: u32) -> Result<Vec<Interval>> {
    Ok(strip_partition(n, a, q)?.intervals)
}

/// Largest `n` with `a > αₙ¹`, i.e. `n < 2(a² − 1)/(2 − a²)`.
pub fn max_elliptic_n(a: f64) -> Option<u32> {
    if a * a >= 2.0 {
        return None;
    }
    let bound = 2.0 * (a * a - 1.0) / (2.0 - a * a);
    let mut n = bound.floor() as u32;
    if n as f64 == bound && n > 0 {
        n -= 1;
    }
    Some(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosBound {
    pub a: f64,
    /// `H(a) = max hₙ¹(a)` over the admissible `n`.
    pub h: f64,
    pub n_max: u32,
    /// The `n` attaining the maximum.
    pub argmax: u32,
}

/// `H(a)` for `1 < a < √2`.
pub fn chaos_bound(a: f64) -> Result<ChaosBound> {
    check_shape(a, 0.0)?;
    let Some(n_max) = max_elliptic_n(a) else {
        return domain(format!("chaos bound requires a < √2, got a = {a}"));
    };
    let mut best = ChaosBound { a, h: 0.0, n_max, argmax: 0 };
    for n in 0..=n_max {
        if small_h_limit(n, a) >= 1.0 {
            continue;
        }
        let h = level_curve_h(n, 1.0, a)?;
        if h > best.h {
            best.h = h;
            best.argmax = n;
        }
    }
    Ok(best)
}

/// For `a > √2` and each `n ≤ n_max`, the interval `(hₙ⁰, min(hₙ¹, hₙ₊₁⁰))`
/// on which `Pan(n, a, h)` is elliptic below the next zero level.
pub fn unbounded_island_intervals(a: f64, n_max: u32) -> Result<Vec<(u32, Interval)>> {
    check_shape(a, 0.0)?;
    if a <= SQRT_2 {
        return domain(format!("unbounded island intervals require a > √2, got a = {a}"));
    }
    (0..=n_max)
        .map(|n| {
            let hi = level_curve_h(n, 1.0, a)?.min(zero_level(n + 1, a));
            Ok((n, Interval { lo: zero_level(n, a), hi }))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StabilityClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Resonant { k: u32, j: u32 },
}

/// Linear stability of `Pan(n, a, h)`.
///
/// `half_trace = 4Δ − 2` is the trace of the product `M₁M₂`; the full
/// monodromy is its square, so the full-period eigenvalue is `μ = e^{2iφ}`
/// with `cos φ = 2Δ − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: u32,
    pub a: f64,
    pub h: f64,
    pub delta: f64,
    pub half_trace: f64,
    pub class: StabilityClass,
    /// Half-map rotation angle, present when `0 ≤ Δ ≤ 1`.
    pub phi: Option<f64>,
    /// Full-map eigenvalue `(Re μ, Im μ)`.
    pub mu: Option<[f64; 2]>,
    /// Full-map rotation number `φ/π`.
    pub rotation_number: Option<f64>,
}

impl StabilityReport {
    pub fn mu_complex(&self) -> Option<Complex64> {
        self.mu.map(|[re, im]| Complex64::new(re, im))
    }
}

pub fn classify_delta(delta: f64, q: u32, tol: &ToleranceSet) -> StabilityClass {
    if (delta.abs() <= tol.parabolic) || ((delta - 1.0).abs() <= tol.parabolic) {
        return StabilityClass::Parabolic;
    }
    if !(0.0..=1.0).contains(&delta) {
        return StabilityClass::Hyperbolic;
    }
    let mut levels = resonance_levels(q);
    levels.sort_by_key(|r| (r.k, r.j));
    for r in levels {
        if (delta - r.c).abs() <= tol.resonance {
            return StabilityClass::Resonant { k: r.k, j: r.j };
        }
    }
    StabilityClass::Elliptic
}

pub fn classify(n: u32, a: f64, h: f64, q: u32, tol: &ToleranceSet) -> Result<StabilityReport> {
    let d = delta(n, a, h)?;
    Ok(stability_from_delta(n, a, h, d.delta, q, tol))
}

pub fn stability_from_delta(n: u32, a: f64, h: f64, delta: f64, q: u32, tol: &ToleranceSet) -> StabilityReport {
    let class = classify_delta(delta, q, tol);
    let phi = (0.0..=1.0)
        .contains(&delta)
        .then(|| (2.0 * delta - 1.0).clamp(-1.0, 1.0).acos());
    StabilityReport {
        n,
        a,
        h,
        delta,
        half_trace: 4.0 * delta - 2.0,
        class,
        phi,
        mu: phi.map(|p| [(2.0 * p).cos(), (2.0 * p).sin()]),
        rotation_number: phi.map(|p| p / PI),
    }
}

/// A fully constructed pantographic orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PantographOrbit {
    pub n: u32,
    pub a: f64,
    pub h: f64,
    pub factors: DeltaFactors,
    /// Impacts in order, starting at the marked point `P` with the chord
    /// that heads into the crossing path.
    pub impacts: Vec<PhasePoint>,
    pub positions: Vec<[f64; 2]>,
    pub pieces: Vec<Piece>,
    pub closure_residual: f64,
}

impl PantographOrbit {
    pub fn period(&self) -> usize {
        self.impacts.len()
    }

    pub fn start(&self) -> PhasePoint {
        self.impacts[0]
    }

    /// Derivative of `T^{2+n}` at `P` (maps `P` to its centrally symmetric image).
    pub fn half_monodromy(&self, billiard: &Billiard) -> Result<TangentMatrix> {
        billiard.monodromy(self.start(), self.period() / 2)
    }

    pub fn monodromy(&self, billiard: &Billiard) -> Result<TangentMatrix> {
        billiard.monodromy(self.start(), self.period())
    }
}

fn expected_pieces(n: u32) -> Vec<Piece> {
    let flats = |first: Piece| {
        (0..n).map(move |i| {
            let top_first = first == Piece::TopSegment;
            if (i % 2 == 0) == top_first {
                Piece::TopSegment
            } else {
                Piece::BottomSegment
            }
        })
    };
    // Flat impacts alternate bottom/top through both crossings.
    let second = if n % 2 == 0 { Piece::BottomSegment } else { Piece::TopSegment };
    let mut out: Vec<Piece> = flats(Piece::BottomSegment).collect();
    out.extend([Piece::LeftEllipse, Piece::LeftEllipse]);
    out.extend(flats(second));
    out.extend([Piece::RightEllipse, Piece::RightEllipse]);
    out
}

/// Number of direction reversals in the cyclic sequence of x-coordinates.
fn x_turns(xs: &[f64]) -> usize {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let signs: Vec<f64> = (0..xs.len())
        .map(|i| xs[(i + 1) % xs.len()] - xs[i])
        .filter(|d| d.abs() > 1e-9 * scale)
        .map(f64::signum)
        .collect();
    (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count()
}

/// Builds `Pan(n, a, h)` from the closed-form marked point and refines it as
/// a fixed point of `T^{4+2n}`.
pub fn materialize_orbit(n: u32, a: f64, h: f64, tol: &ToleranceSet) -> Result<PantographOrbit> {
    let factors = delta(n, a, h)?;
    let billiard = Billiard::with_tolerances(build_stadium(a, h)?, *tol);
    let period = 4 + 2 * n as usize;
    let mut start = PhasePoint::new(billiard.params.ellipse_arc(factors.lambda), factors.beta);

    let closure = |p: PhasePoint| -> Result<(PhasePoint, f64)> {
        let end = billiard.iterate(p, period)?;
        Ok((end, billiard.phase_distance(end, p)))
    };
    let (mut end, mut residual) = closure(start)?;
    for _ in 0..8 {
        if residual <= 1e-3 * tol.closure {
            break;
        }
        let m = billiard.monodromy(start, period)?.matrix - nalgebra::Matrix2::identity();
        let Some(inv) = m.try_inverse() else { break };
        let defect = nalgebra::Vector2::new(
            billiard.params.arc_difference(end.s, start.s),
            end.beta - start.beta,
        );
        let delta = inv * defect;
        let candidate = PhasePoint::new(
            billiard.params.wrap(start.s - delta[0]),
            start.beta - delta[1],
        );
        let (e, r) = closure(candidate)?;
        if r >= residual {
            break;
        }
        start = candidate;
        end = e;
        residual = r;
    }
    let _ = end;
    if residual > tol.closure {
        return Err(Error::Refinement { residual });
    }

    let mut impacts = vec![start];
    let mut positions = Vec::with_capacity(period);
    let mut pieces = Vec::with_capacity(period);
    for bounce in billiard.orbit(start).take(period) {
        let b = bounce?;
        if impacts.len() == 1 {
            positions.push([b.source.position.x, b.source.position.y]);
        }
        pieces.push(b.target.piece);
        if pieces.len() < period {
            impacts.push(b.to());
            positions.push([b.target.position.x, b.target.position.y]);
        }
    }
    if pieces != expected_pieces(n) {
        return Err(Error::Pattern {
            n,
            reason: format!("impact pieces {pieces:?}"),
        });
    }
    let xs: Vec<f64> = positions.iter().map(|p| p[0]).collect();
    if x_turns(&xs) > 2 {
        return Err(Error::Pattern {
            n,
            reason: "orbit crosses some vertical line more than twice".into(),
        });
    }
    // Report pieces aligned with impacts (the last target is the start).
    pieces.rotate_right(1);
    Ok(PantographOrbit {
        n,
        a,
        h,
        factors,
        impacts,
        positions,
        pieces,
        closure_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: ToleranceSet = ToleranceSet {
        graze: 1e-9,
        corner: 1e-10,
        chord_eps: 1e-12,
        parabolic: 1e-9,
        resonance: 1e-9,
        closure: 1e-9,
    };

    #[test]
    fn closed_form_anchor() {
        let t = solve_t(0, SQRT_2, 1.0).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        let d = delta(0, SQRT_2, 1.0).unwrap();
        assert!((d.delta1 - 1.0 / 3.0).abs() < 1e-12);
        assert!((d.delta2 - 3.0).abs() < 1e-12);
        assert!((d.delta - 1.0).abs() < 1e-12);
        assert!((d.l1 - SQRT_2).abs() < 1e-12);
        assert!((d.l2 - 3.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn solve_t_reference_values() {
        let t = solve_t(0, SQRT_2, 0.5).unwrap();
        assert!((t - 1.1878).abs() < 1e-4, "{t}");
        assert!(orbit_equation(0, SQRT_2, 0.5, t).abs() < 1e-12);
        let t = solve_t(0, SQRT_2, 100.0).unwrap();
        assert!((t - 0.7112).abs() < 1e-4, "{t}");
        assert!(t > 1.0 / SQRT_2);
    }

    #[test]
    fn existence_thresholds() {
        assert!((existence_threshold(2, 3.0) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(existence_threshold(5, 1.5), 0.0);
        assert_eq!(existence_threshold(0, 10.0), 0.0);
        assert_eq!(existence_threshold(1, 10.0), 0.0);
        assert_eq!(existence_threshold(3, 2.0), 0.0);
        assert!(matches!(solve_t(2, 3.0, 1.0), Err(Error::Existence { .. })));
        assert!(solve_t(2, 3.0, 1.8).is_ok());
        assert!(matches!(solve_t(0, 1.5, 0.0), Err(Error::Existence { .. })));
        assert!(matches!(solve_t(0, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn delta_reference_values() {
        let d = delta(0, SQRT_2, 0.5).unwrap();
        assert!((d.delta - 0.430_932_123).abs() < 1e-8, "{d:?}");
        assert!((d.delta1 - 0.261_667_754).abs() < 1e-8);
        assert!((d.delta2 - 1.646_867_509).abs() < 1e-8);
    }

    #[test]
    fn delta1_closed_form_identity() {
        for &(n, a, h) in &[(0, 1.2, 0.3), (1, 1.7, 2.0), (3, 2.5, 9.0), (2, 1.9, 0.05)] {
            let d = delta(n, a, h).unwrap();
            let t = d.t;
            let closed = 2.0 * (1.0 + t * t) / (1.0 + a * a * t * t) - 1.0;
            assert!((d.delta1 - closed).abs() < 1e-10);
            assert!(((1.0 / (a * t)).atan() - d.beta).abs() < 1e-15);
        }
    }

    #[test]
    fn small_h_limit_of_delta() {
        for n in 0..3 {
            let a = 1.15;
            let d = delta(n, a, 1e-7).unwrap();
            assert!((d.delta - small_h_limit(n, a)).abs() < 1e-5, "n={n} {d:?}");
        }
    }

    #[test]
    fn resonance_constants() {
        assert!((resonance_constant(1, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((resonance_constant(1, 3).unwrap() - 0.75).abs() < 1e-15);
        assert!((resonance_constant(3, 4).unwrap() - 0.146_446_609).abs() < 1e-9);
        assert!(resonance_constant(0, 3).is_err());
        assert!(resonance_constant(3, 3).is_err());
        assert!(resonance_constant(1, 1).is_err());
        let levels: Vec<f64> = resonance_levels(4).iter().map(|r| r.c).collect();
        assert_eq!(levels.len(), 5);
    }

    /// Closed-form root of (2x − 1)(2(n+1)x − 1) = c with x = 1/a².
    fn alpha_closed_form(n: u32, c: f64) -> f64 {
        let m = (n + 1) as f64;
        let b = 2.0 * (n + 2) as f64;
        let x = (b + (b * b - 16.0 * m * (1.0 - c)).sqrt()) / (8.0 * m);
        (1.0 / x).sqrt()
    }

    #[test]
    fn alpha_values() {
        assert!((alpha(1, 1.0).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let expected = (2.0 / (1.0 + 1.0 / SQRT_2)).sqrt();
        assert!((alpha(0, 0.5).unwrap() - expected).abs() < 1e-12);
        assert_eq!(alpha(4, 9.0).unwrap(), 1.0);
        for n in 0..5 {
            for &c in &[0.1, 0.5, 0.75, 1.0] {
                assert!((alpha(n, c).unwrap() - alpha_closed_form(n, c)).abs() < 1e-12);
            }
            assert!(alpha(n, 0.25).unwrap() > alpha(n, 0.75).unwrap());
        }
        assert!(alpha(0, 0.0).is_err());
        assert!(alpha(0, 1.5).is_err());
    }

    #[test]
    fn level_curves() {
        assert!((level_curve_h(0, 1.0, SQRT_2).unwrap() - 1.0).abs() < 1e-10);
        assert!((level_curve_h(1, 0.0, 2.0).unwrap() - 2.0 * SQRT_2).abs() < 1e-14);
        let a = 1.8;
        let h1 = level_curve_h(2, 0.3, a).unwrap();
        let h2 = level_curve_h(2, 0.6, a).unwrap();
        assert!(h1 < h2);
        assert!((delta(2, a, h1).unwrap().delta - 0.3).abs() < 1e-10);
        assert!(level_curve_h(1, 1.0, 1.1).is_err());
    }

    #[test]
    fn partition_at_sqrt2() {
        let part = strip_partition(0, SQRT_2, 4).unwrap();
        assert_eq!(part.intervals.len(), 6);
        assert_eq!(part.cuts.len(), 5);
        for cut in &part.cuts {
            let d = delta(0, SQRT_2, cut.h).unwrap().delta;
            assert!((d - cut.resonance.c).abs() < 1e-9);
        }
        assert!(part.cuts.windows(2).all(|w| w[0].h < w[1].h));
        assert_eq!(nonresonant_intervals(0, SQRT_2, 2).unwrap().len(), 2);
        assert!(nonresonant_intervals(1, 1.1, 4).is_err());
    }

    #[test]
    fn chaos_bound_admissible_n() {
        let b = chaos_bound(1.2).unwrap();
        assert_eq!(b.n_max, 1);
        let h0 = level_curve_h(0, 1.0, 1.2).unwrap();
        let h1 = level_curve_h(1, 1.0, 1.2).unwrap();
        assert!((b.h - h0.max(h1)).abs() < 1e-15);
        assert_eq!(chaos_bound(1.05).unwrap().n_max, 0);
        assert!(chaos_bound(SQRT_2).is_err());
    }

    #[test]
    fn island_intervals_at_a_1_6() {
        let ivs = unbounded_island_intervals(1.6, 5).unwrap();
        for (n, iv) in &ivs {
            assert!(!iv.is_empty());
            assert!((iv.lo - *n as f64 * 1.6 * 0.56f64.sqrt()).abs() < 1e-12);
        }
        let ivs = unbounded_island_intervals(2.0, 0).unwrap();
        assert!(ivs[0].1.hi < 2.0);
        assert!(unbounded_island_intervals(SQRT_2, 3).is_err());
    }

    #[test]
    fn classification() {
        let r = classify(0, SQRT_2, 0.5, 4, &TOL).unwrap();
        assert_eq!(r.class, StabilityClass::Elliptic);
        assert!((r.half_trace + 0.276_271_508).abs() < 1e-8);
        assert!((r.phi.unwrap() - 1.7093).abs() < 1e-4);
        assert!((r.rotation_number.unwrap() - 0.5441).abs() < 1e-4);
        let r = classify(0, SQRT_2, 1.0, 4, &TOL).unwrap();
        assert_eq!(r.class, StabilityClass::Parabolic);
        for n in 0..=4 {
            let r = classify(n, 2.0, 2.0, 4, &TOL).unwrap();
            assert_ne!(r.class, StabilityClass::Elliptic, "n = {n}");
        }
        let h = level_curve_h(0, 0.75, SQRT_2).unwrap();
        let r = classify(0, SQRT_2, h, 4, &TOL).unwrap();
        assert_eq!(r.class, StabilityClass::Resonant { k: 3, j: 1 });
    }

    #[test]
    fn expected_piece_pattern() {
        use Piece::*;
        assert_eq!(expected_pieces(0), vec![LeftEllipse, LeftEllipse, RightEllipse, RightEllipse]);
        assert_eq!(
            expected_pieces(1),
            vec![BottomSegment, LeftEllipse, LeftEllipse, TopSegment, RightEllipse, RightEllipse]
        );
    }

    #[test]
    fn materialize_closed_form_orbit() {
        let orbit = materialize_orbit(0, SQRT_2, 1.0, &TOL).unwrap();
        assert_eq!(orbit.period(), 4);
        let r = 0.5f64.sqrt();
        let expected = [[2.0, r], [-2.0, r], [-2.0, -r], [2.0, -r]];
        for e in &expected {
            let hit = orbit
                .positions
                .iter()
                .any(|p| (p[0] - e[0]).abs() < 1e-12 && (p[1] - e[1]).abs() < 1e-12);
            assert!(hit, "missing vertex {e:?} in {:?}", orbit.positions);
        }
        assert!(orbit.closure_residual < 1e-9);
    }

    #[test]
    fn materialize_larger_orbits() {
        let orbit = materialize_orbit(3, 1.3, 0.4, &TOL).unwrap();
        assert_eq!(orbit.period(), 10);
        let orbit = materialize_orbit(1, 2.0, 2.0, &TOL).unwrap();
        assert_eq!(orbit.period(), 6);
        assert!(orbit.closure_residual < 1e-9);
        let r = classify(1, 2.0, 2.0, 4, &TOL).unwrap();
        assert_ne!(r.class, StabilityClass::Elliptic);
    }

    #[test]
    fn half_trace_matches_delta() {
        for &(n, a, h) in &[(0, SQRT_2, 0.5), (1, 1.3, 0.7), (2, 1.6, 3.0), (3, 1.25, 0.2)] {
            let orbit = materialize_orbit(n, a, h, &TOL).unwrap();
            let billiard = Billiard::new(build_stadium(a, h).unwrap());
            let half = orbit.half_monodromy(&billiard).unwrap();
            let expected = 4.0 * orbit.factors.delta - 2.0;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((half.trace() - sign * expected).abs() < 1e-7);
            let full = orbit.monodromy(&billiard).unwrap();
            assert!((full.determinant() - 1.0).abs() < 1e-8);
            assert!((full.trace() - (expected * expected - 2.0)).abs() < 1e-7);
        }
    }
}
