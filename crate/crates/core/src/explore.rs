//! Phase-space sampling: orbit clouds for portraits, probes of the
//! neighbourhood of a periodic point, and a finite-time Lyapunov indicator.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Billiard, PhasePoint};
use crate::error::{domain, Result};
use crate::geometry::build_stadium;
use crate::normalform::LinearChart;
use crate::tolerance::ToleranceSet;

/// Longest subsampling stride tried by [`orbit_diameter`].
pub const MAX_STRIDE: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Seeds {
    Explicit { points: Vec<PhasePoint> },
    /// Uniform in `(s, sin β)`, drawn from ChaCha8 seeded with `rng_seed`.
    Random { count: usize, rng_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub a: f64,
    pub h: f64,
    pub seeds: Seeds,
    pub iterations: usize,
    /// Iterates discarded before recording.
    pub skip: usize,
    pub tol: ToleranceSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTrace {
    pub seed: usize,
    pub start: PhasePoint,
    /// Recorded iterates; the first one is the image of the last skipped point.
    pub points: Vec<PhasePoint>,
    /// Error code of the failure that ended the orbit early.
    pub truncated: Option<String>,
}

impl SeedTrace {
    pub fn is_truncated(&self) -> bool {
        self.truncated.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub a: f64,
    pub h: f64,
    pub length: f64,
    pub traces: Vec<SeedTrace>,
}

/// `count` points uniform in `(s, sin β)`, away from grazing.
pub fn sample_seeds(billiard: &Billiard, count: usize, rng_seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let limit = std::f64::consts::FRAC_PI_2 - billiard.tol.graze;
    let mut seeds = Vec::with_capacity(count);
    while seeds.len() < count {
        let s = rng.gen_range(0.0..billiard.params.length);
        let beta = rng.gen_range(-1.0f64..1.0).asin();
        if beta.abs() < limit {
            seeds.push(PhasePoint::new(s, beta));
        }
    }
    seeds
}

/// Orbit of every seed, in seed order.
///
/// Seeds run in parallel on the current rayon pool; the result does not
/// depend on the number of threads.
pub fn phase_portrait(spec: &PortraitSpec) -> Result<Portrait> {
    if spec.iterations == 0 {
        return domain("portrait needs at least one iteration");
    }
    let billiard = Billiard::with_tolerances(build_stadium(spec.a, spec.h)?, spec.tol);
    let seeds = match &spec.seeds {
        Seeds::Explicit { points } => points.clone(),
        Seeds::Random { count, rng_seed } => sample_seeds(&billiard, *count, *rng_seed),
    };
    let traces = seeds
        .par_iter()
        .enumerate()
        .map(|(seed, &start)| trace(&billiard, seed, start, spec.skip, spec.iterations))
        .collect();
    Ok(Portrait {
        a: spec.a,
        h: spec.h,
        length: billiard.params.length,
        traces,
    })
}

fn trace(billiard: &Billiard, seed: usize, start: PhasePoint, skip: usize, iterations: usize) -> SeedTrace {
    let mut points = Vec::with_capacity(iterations);
    let mut truncated = None;
    for (k, bounce) in billiard.orbit(start).take(skip + iterations).enumerate() {
        match bounce {
            Ok(b) if k >= skip => points.push(b.to()),
            Ok(_) => {}
            Err(e) => {
                truncated = Some(e.code().to_string());
                break;
            }
        }
    }
    SeedTrace {
        seed,
        start,
        points,
        truncated,
    }
}

/// Size of an orbit in the unit-area chart `(s/L, sin β / 2)`.
///
/// An orbit in an island chain of period `k` hops between `k` components,
/// so every `k`-th iterate is also taken on its own; the result is the
/// smallest extent over strides `1..=MAX_STRIDE`. The extent is the larger
/// of the two coordinate ranges, the `s` range taken on the circle.
pub fn orbit_diameter(points: &[PhasePoint], length: f64) -> f64 {
    (1..=MAX_STRIDE.min(points.len().max(1)))
        .map(|k| {
            let sub: Vec<PhasePoint> = points.iter().step_by(k).copied().collect();
            extent(&sub, length)
        })
        .fold(f64::INFINITY, f64::min)
}

fn extent(points: &[PhasePoint], length: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut s: Vec<f64> = points.iter().map(|p| p.s.rem_euclid(length) / length).collect();
    s.sort_by(f64::total_cmp);
    let mut gap = 1.0 - s[s.len() - 1] + s[0];
    for w in s.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    let (lo, hi) = points
        .iter()
        .map(|p| 0.5 * p.beta.sin())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (1.0 - gap).max(hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    Bounded,
    Escaping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusProbe {
    pub radius: f64,
    pub verdict: ProbeVerdict,
    /// Seeds that left `3 × radius` or whose orbit was truncated.
    pub escaped: usize,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub center: PhasePoint,
    pub period: usize,
    pub radii: Vec<RadiusProbe>,
    pub largest_bounded: Option<f64>,
}

/// Seeds per probing circle.
pub const PROBE_SEEDS: usize = 8;

/// Deviation coordinates around a periodic point: `(Δs, Δ sin β)`, mapped
/// through the normalizing chart of the monodromy when it is elliptic so
/// that invariant curves are close to circles.
struct ProbeChart {
    center: PhasePoint,
    linear: Option<LinearChart>,
}

impl ProbeChart {
    fn new(billiard: &Billiard, center: PhasePoint, period: usize) -> Result<Self> {
        let m = billiard.monodromy(center, period)?.matrix;
        let c = center.beta.cos();
        let canonical = Matrix2::new(m[(0, 0)], m[(0, 1)] / c, c * m[(1, 0)], m[(1, 1)]);
        let linear = if canonical.trace().abs() < 2.0 {
            LinearChart::from_matrix(&canonical).ok()
        } else {
            None
        };
        Ok(Self { center, linear })
    }

    fn radius(&self, billiard: &Billiard, p: PhasePoint) -> f64 {
        let x = [
            billiard.params.arc_difference(p.s, self.center.s),
            p.beta.sin() - self.center.beta.sin(),
        ];
        match &self.linear {
            Some(chart) => chart.to_complex(x).norm(),
            None => x[0].hypot(x[1]),
        }
    }

    fn seed(&self, billiard: &Billiard, radius: f64, theta: f64) -> Option<PhasePoint> {
        let x = match &self.linear {
            Some(chart) => chart.from_complex(Complex64::from_polar(radius, theta)),
            None => [radius * theta.cos(), radius * theta.sin()],
        };
        let sine = self.center.beta.sin() + x[1];
        (sine.abs() < 1.0).then(|| PhasePoint::new(billiard.params.wrap(self.center.s + x[0]), sine.asin()))
    }
}

/// Follows seeds on circles of the given radii around the periodic point
/// `center` under the `period`-th iterate of the map. A radius is Bounded
/// when every seed stays within three times the radius for `iterations`
/// returns. Radii are measured in the normalized chart of the linearized
/// return map when it is elliptic, and in `(s, sin β)` otherwise.
pub fn island_probe(
    billiard: &Billiard,
    center: PhasePoint,
    period: usize,
    radii: &[f64],
    iterations: usize,
) -> Result<ProbeReport> {
    if period == 0 {
        return domain("probe needs a positive period");
    }
    let closure = billiard.phase_distance(billiard.iterate(center, period)?, center);
    if closure > 1e-9 {
        return domain(format!("probe center is not periodic (closure {closure:e})"));
    }
    let chart = ProbeChart::new(billiard, center, period)?;
    let probes: Vec<RadiusProbe> = radii
        .par_iter()
        .map(|&radius| {
            let escaped = (0..PROBE_SEEDS)
                .filter(|&k| {
                    let theta = std::f64::consts::TAU * k as f64 / PROBE_SEEDS as f64;
                    match chart.seed(billiard, radius, theta) {
                        Some(seed) => !stays_close(billiard, &chart, seed, period, 3.0 * radius, iterations),
                        None => true,
                    }
                })
                .count();
            RadiusProbe {
                radius,
                verdict: if escaped == 0 {
                    ProbeVerdict::Bounded
                } else {
                    ProbeVerdict::Escaping
                },
                escaped,
                seeds: PROBE_SEEDS,
            }
        })
        .collect();
    let largest_bounded = probes
        .iter()
        .filter(|p| p.verdict == ProbeVerdict::Bounded)
        .map(|p| p.radius)
        .reduce(f64::max);
    Ok(ProbeReport {
        center,
        period,
        radii: probes,
        largest_bounded,
    })
}

fn stays_close(billiard: &Billiard, chart: &ProbeChart, seed: PhasePoint, period: usize, bound: f64, iterations: usize) -> bool {
    let mut p = seed;
    for _ in 0..iterations {
        match billiard.iterate(p, period) {
            Ok(q) if chart.radius(billiard, q) <= bound => p = q,
            _ => return false,
        }
    }
    true
}

/// Mean logarithmic growth rate per bounce of the tangent map along the
/// orbit of `p`.
///
/// The product of derivatives is renormalized by its largest entry after
/// every bounce and the logarithms of the scale factors are accumulated,
/// so the value estimates the growth of the sup norm; it is clamped at 0.
pub fn lyapunov_indicator(billiard: &Billiard, p: PhasePoint, iterations: usize) -> Result<f64> {
    if iterations == 0 {
        return domain("lyapunov indicator needs at least one iteration");
    }
    let mut product = Matrix2::<f64>::identity();
    let mut log_scale = 0.0;
    for bounce in billiard.orbit(p).take(iterations) {
        product = bounce?.tangent_matrix().matrix * product;
        let norm = product.amax();
        log_scale += norm.ln();
        product /= norm;
    }
    Ok((log_scale / iterations as f64).max(0.0))
}

/// Lyapunov indicators of several starting points, in input order.
pub fn lyapunov_scan(a: f64, h: f64, points: &[PhasePoint], iterations: usize, tol: &ToleranceSet) -> Result<Vec<Result<f64>>> {
    let billiard = Billiard::with_tolerances(build_stadium(a, h)?, *tol);
    Ok(points
        .par_iter()
        .map(|&p| lyapunov_indicator(&billiard, p, iterations))
        .collect())
}
