//! Jets of the return map at a periodic point.
//!
//! Two independent routes: central finite differences of the numerical map
//! with Richardson extrapolation, and propagation of truncated power series
//! through every bounce.

use std::collections::HashMap;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::flight;
use crate::dynamics::{Billiard, Bounce, PhasePoint};
use crate::error::{domain, Error, Result};
use crate::geometry::{ellipse_speed, Piece};
use crate::pantograph::PantographOrbit;
use crate::series::{monomials, RealSeries};
use crate::tolerance::ToleranceSet;

/// Coordinates in which a jet is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Chart {
    /// Area-preserving coordinates with the standard form `dx ∧ dy`.
    Canonical,
    /// Billiard deviations `(s − s*, β − β*)`; the map preserves `cos β ds ∧ dβ`.
    Billiard { beta: f64 },
}

/// Truncated Taylor expansion of a planar map around a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub chart: Chart,
    pub components: [RealSeries; 2],
}

impl Jet2 {
    pub fn new(chart: Chart, components: [RealSeries; 2]) -> Self {
        assert_eq!(components[0].order(), components[1].order());
        Self { chart, components }
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }

    pub fn linear_part(&self) -> Matrix2<f64> {
        let [f, g] = &self.components;
        Matrix2::new(f.get(1, 0), f.get(0, 1), g.get(1, 0), g.get(0, 1))
    }

    pub fn constant_part(&self) -> [f64; 2] {
        [self.components[0].constant_term(), self.components[1].constant_term()]
    }

    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        [self.components[0].eval(x[0], x[1]), self.components[1].eval(x[0], x[1])]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.chart, [self.components[0].truncate(order), self.components[1].truncate(order)])
    }

    /// Re-expresses a billiard-chart jet in the canonical chart `(s − s*, sin β − sin β*)`.
    pub fn to_canonical(&self) -> Self {
        let Chart::Billiard { beta } = self.chart else {
            return self.clone();
        };
        let order = self.order();
        let (sin_b, _) = beta.sin_cos();
        let x = RealSeries::var_x(order, 0.0);
        let p = RealSeries::var_y(order, 0.0);
        // Solve sin(β* + y) = sin β* + p for y by Newton iteration on series.
        let mut y = p.scale(1.0 / beta.cos());
        for _ in 0..=order {
            let (s, c) = y.add_scalar(beta).sin_cos();
            let residual = &s.add_scalar(-sin_b) - &p;
            y = &y - &residual.div(&c);
        }
        let f = self.components[0].compose(&x, &y);
        let g = self.components[1].compose(&x, &y);
        let (sin_g, _) = g.add_scalar(beta).sin_cos();
        Self::new(Chart::Canonical, [f, sin_g.add_scalar(-sin_b)])
    }

    /// Largest coefficient mismatch relative to the per-degree scale of `self`.
    ///
    /// Returns `(relative gap, component, i, j, self value, other value)`.
    pub fn relative_gap(&self, other: &Jet2) -> (f64, usize, usize, usize, f64, f64) {
        let order = self.order().min(other.order());
        let mut worst = (0.0, 0, 0, 0, 0.0, 0.0);
        for comp in 0..2 {
            let (a, b) = (&self.components[comp], &other.components[comp]);
            for d in 1..=order {
                let scale = (0..=d).fold(0.0f64, |m, j| m.max(a.get(d - j, j).abs()));
                for j in 0..=d {
                    let (x, y) = (a.get(d - j, j), b.get(d - j, j));
                    let rel = (x - y).abs() / scale.max(f64::MIN_POSITIVE);
                    if rel > worst.0 {
                        worst = (rel, comp, d - j, j, x, y);
                    }
                }
            }
        }
        worst
    }

    /// Fails with [`Error::JetDisagreement`] unless every coefficient agrees
    /// with `other` to `rel_tol` relative to its degree's scale.
    pub fn check_agreement(&self, other: &Jet2, rel_tol: f64) -> Result<f64> {
        let (gap, component, i, j, x, y) = self.relative_gap(other);
        if gap > rel_tol {
            return Err(Error::JetDisagreement {
                component,
                i,
                j,
                series: x,
                fd: y,
            });
        }
        Ok(gap)
    }
}

/// Central stencils for the k-th derivative (second-order accurate).
fn stencil(k: usize) -> &'static [(i64, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        5 => &[(-3, -0.5), (-2, 2.0), (-1, -2.5), (1, 2.5), (2, -2.0), (3, 0.5)],
        _ => unreachable!("derivative order above 5"),
    }
}

pub const MAX_ORDER: usize = 5;

/// Jet of `f` at the origin by finite differences.
///
/// For each total degree the raw tensor stencils are evaluated on a
/// geometric ladder of power-of-two steps, Richardson-extrapolated over
/// windows of the ladder, and each coefficient takes the estimate that
/// differs least from its neighbours. `scale` is the typical size of a
/// deviation on which `f` is smooth.
pub fn finite_difference_jet<F>(f: F, order: usize, chart: Chart, scale: f64) -> Result<Jet2>
where
    F: Fn([f64; 2]) -> Result<[f64; 2]>,
{
    let lift = |d: [f64; 2]| f(d).map(|v| [TwoFloat::from(v[0]), TwoFloat::from(v[1])]);
    fd_jet(lift, order, chart, scale, f64::EPSILON)
}

const LADDER: usize = 6;
const DEPTH: usize = 3;

fn fd_jet<F>(f: F, order: usize, chart: Chart, scale: f64, noise: f64) -> Result<Jet2>
where
    F: Fn([f64; 2]) -> Result<[TwoFloat; 2]>,
{
    if order > MAX_ORDER {
        return domain(format!("jet order {order} exceeds {MAX_ORDER}"));
    }
    let origin = f([0.0, 0.0])?;
    let mut comps = [RealSeries::zero(order), RealSeries::zero(order)];
    comps[0].set(0, 0, origin[0].hi() + origin[0].lo());
    comps[1].set(0, 0, origin[1].hi() + origin[1].lo());

    for d in 1..=order {
        // Power-of-two steps keep every sample point exact.
        let target = scale * 8.0 * noise.powf(1.0 / (d + 2 * DEPTH) as f64);
        let base = 2f64.powi(target.log2().round() as i32);
        let mut cache: HashMap<(usize, i64, i64), Result<[TwoFloat; 2]>> = HashMap::new();
        let mut sample = |level: usize, a: i64, b: i64| -> Result<[TwoFloat; 2]> {
            cache
                .entry((level, a, b))
                .or_insert_with(|| {
                    let h = base / (1u64 << level) as f64;
                    f([a as f64 * h, b as f64 * h])
                })
                .clone()
        };
        let mut raw = |level: usize| -> Result<Vec<[TwoFloat; 2]>> {
            let norm = (base / (1u64 << level) as f64).powi(d as i32);
            (0..=d)
                .map(|j| {
                    let mut acc = [TwoFloat::from(0.0); 2];
                    for &(a, wa) in stencil(d - j) {
                        for &(b, wb) in stencil(j) {
                            let v = sample(level, a, b)?;
                            acc[0] += v[0] * (wa * wb);
                            acc[1] += v[1] * (wa * wb);
                        }
                    }
                    Ok([acc[0] / norm, acc[1] / norm])
                })
                .collect()
        };
        let levels: Vec<_> = (0..LADDER + DEPTH - 1).map(&mut raw).collect();
        let estimates: Vec<Result<Vec<[TwoFloat; 2]>>> = (0..LADDER)
            .map(|start| {
                let window = levels[start..start + DEPTH].iter().cloned().collect::<Result<Vec<_>>>()?;
                Ok(richardson(window))
            })
            .collect();
        let chosen = select_estimates(&estimates, d + 1)?;
        for (j, value) in chosen.iter().enumerate() {
            let i = d - j;
            let fact = factorial(i) * factorial(j);
            comps[0].set(i, j, value[0] / fact);
            comps[1].set(i, j, value[1] / fact);
        }
    }
    Ok(Jet2::new(chart, comps))
}

/// Picks, per coefficient, the ladder estimate that differs least from both
/// of its neighbours.
fn select_estimates(estimates: &[Result<Vec<[TwoFloat; 2]>>], width: usize) -> Result<Vec<[f64; 2]>> {
    let ok: Vec<Option<&Vec<[TwoFloat; 2]>>> = estimates.iter().map(|e| e.as_ref().ok()).collect();
    let value = |e: &Vec<[TwoFloat; 2]>, j: usize, c: usize| e[j][c].hi() + e[j][c].lo();
    let mut chosen = vec![[f64::NAN; 2]; width];
    for j in 0..width {
        for c in 0..2 {
            let mut best: Option<(f64, f64)> = None;
            for (k, e) in ok.iter().enumerate() {
                let Some(e) = e else { continue };
                let v = value(e, j, c);
                let spread = [k.checked_sub(1), Some(k + 1)]
                    .into_iter()
                    .flatten()
                    .filter_map(|m| ok.get(m).copied().flatten())
                    .map(|n| (value(n, j, c) - v).abs())
                    .reduce(f64::max);
                if let Some(spread) = spread {
                    if best.is_none_or(|(b, _)| spread < b) {
                        best = Some((spread, v));
                    }
                }
            }
            let Some((_, v)) = best else {
                return Err(estimates
                    .iter()
                    .rev()
                    .find_map(|e| e.as_ref().err().cloned())
                    .unwrap_or(Error::Convergence("no finite-difference estimate".into())));
            };
            chosen[j][c] = v;
        }
    }
    Ok(chosen)
}

/// Extrapolates estimates at steps `h, h/2, h/4, …` whose errors are even in `h`.
fn richardson(mut table: Vec<Vec<[TwoFloat; 2]>>) -> Vec<[TwoFloat; 2]> {
    let mut factor = 1.0;
    while table.len() > 1 {
        factor *= 4.0;
        table = table
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .map(|(coarse, fine)| {
                        let r = |c: usize| (fine[c] * factor - coarse[c]) / (factor - 1.0);
                        [r(0), r(1)]
                    })
                    .collect()
            })
            .collect();
    }
    table.pop().unwrap_or_default()
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// The `period`-th iterate of the billiard map near a periodic point,
/// restricted to the itinerary of that point.
#[derive(Debug, Clone)]
pub struct ReturnMap {
    pub billiard: Billiard,
    pub start: PhasePoint,
    pub period: usize,
    itinerary: Vec<Piece>,
    bounces: Vec<Bounce>,
}

impl ReturnMap {
    pub(super) fn bounces(&self) -> &[Bounce] {
        &self.bounces
    }

    pub fn new(billiard: Billiard, start: PhasePoint, period: usize) -> Result<Self> {
        if period == 0 {
            return domain("return map needs a positive period");
        }
        let bounces = billiard.orbit(start).take(period).collect::<Result<Vec<_>>>()?;
        let itinerary = bounces.iter().map(|b| b.target.piece).collect();
        Ok(Self {
            billiard,
            start,
            period,
            itinerary,
            bounces,
        })
    }

    pub fn for_orbit(orbit: &PantographOrbit, tol: &ToleranceSet) -> Result<Self> {
        let params = crate::geometry::build_stadium(orbit.a, orbit.h)?;
        Self::new(Billiard::with_tolerances(params, *tol), orbit.start(), orbit.period())
    }

    pub fn itinerary(&self) -> &[Piece] {
        &self.itinerary
    }

    /// Applies the map, failing if the impact pieces differ from the reference orbit.
    pub fn apply(&self, p: PhasePoint) -> Result<PhasePoint> {
        let mut last = p;
        for (k, bounce) in self.billiard.orbit(p).take(self.period).enumerate() {
            let b = bounce?;
            if b.target.piece != self.itinerary[k] {
                return Err(Error::ItineraryChange { bounce: k });
            }
            last = b.to();
        }
        Ok(last)
    }

    /// The map in billiard deviations `(s − s*, β − β*)`.
    pub fn deviation(&self, d: [f64; 2]) -> Result<[f64; 2]> {
        let params = &self.billiard.params;
        let p = PhasePoint::new(params.wrap(self.start.s + d[0]), self.start.beta + d[1]);
        let q = self.apply(p)?;
        Ok([params.arc_difference(q.s, self.start.s), q.beta - self.start.beta])
    }

    /// The map in canonical deviations `(s − s*, sin β − sin β*)`.
    pub fn canonical(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let b = self.start.beta;
        let arg = b.sin() + x[1];
        if arg.abs() >= 1.0 {
            return Err(Error::Grazing { s: self.start.s + x[0], beta: arg.signum() * std::f64::consts::FRAC_PI_2 });
        }
        let d = self.deviation([x[0], arg.asin() - b])?;
        Ok([d[0], (b + d[1]).sin() - b.sin()])
    }

    pub fn finite_difference_jet(&self, order: usize) -> Result<Jet2> {
        fd_jet(
            |d| flight::forced_deviation(self, d),
            order,
            Chart::Billiard { beta: self.start.beta },
            0.03,
            flight::NOISE,
        )
    }

    /// Jet obtained by pushing truncated power series through each bounce.
    pub fn series_jet(&self, order: usize) -> Result<Jet2> {
        if order > MAX_ORDER {
            return domain(format!("jet order {order} exceeds {MAX_ORDER}"));
        }
        let params = &self.billiard.params;
        let (a, h) = (params.a, params.h);
        let first = &self.bounces[0].source;
        let mut local = match first.piece {
            Piece::RightEllipse | Piece::LeftEllipse => {
                let taylor = arc_taylor(a, first.local, order);
                invert_univariate(&taylor, &RealSeries::var_x(order, 0.0)).add_scalar(first.local)
            }
            _ => RealSeries::var_x(order, first.local),
        };
        let mut beta = RealSeries::var_y(order, self.start.beta);
        let mut piece = first.piece;

        for bounce in &self.bounces {
            let frame = Frame::new(piece, &local, a, h);
            let (sb, cb) = beta.sin_cos();
            let vx = &(&frame.nx * &cb) + &(&frame.tx * &sb);
            let vy = &(&frame.ny * &cb) + &(&frame.ty * &sb);
            let target = bounce.target.piece;
            let tau = match target {
                Piece::TopSegment => frame.py.scale(-1.0).add_scalar(1.0).div(&vy),
                Piece::BottomSegment => frame.py.scale(-1.0).add_scalar(-1.0).div(&vy),
                Piece::RightEllipse | Piece::LeftEllipse => {
                    let center = if target == Piece::RightEllipse { h } else { -h };
                    let x = frame.px.add_scalar(-center);
                    let qa = &(&vx * &vx).scale(1.0 / (a * a)) + &(&vy * &vy);
                    let qb = &(&x * &vx).scale(1.0 / (a * a)) + &(&frame.py * &vy);
                    if target == piece {
                        qb.scale(-2.0).div(&qa)
                    } else {
                        let qc = (&(&x * &x).scale(1.0 / (a * a)) + &(&frame.py * &frame.py)).add_scalar(-1.0);
                        let mut tau = RealSeries::constant(order, bounce.chord);
                        for _ in 0..=order + 1 {
                            let f = &(&(&(&qa * &tau) + &qb.scale(2.0)) * &tau) + &qc;
                            let df = (&(&qa * &tau) + &qb).scale(2.0);
                            tau = &tau - &f.div(&df);
                        }
                        tau
                    }
                }
            };
            let hx = &frame.px + &(&tau * &vx);
            let hy = &frame.py + &(&tau * &vy);
            local = match target {
                Piece::TopSegment => hx.scale(-1.0).add_scalar(h),
                Piece::BottomSegment => hx.add_scalar(h),
                Piece::RightEllipse => hy.atan2(&hx.add_scalar(-h).scale(1.0 / a)),
                Piece::LeftEllipse => hy.scale(-1.0).atan2(&hx.add_scalar(h).scale(-1.0 / a)),
            };
            let expected = bounce.target.local;
            if (local.constant_term() - expected).abs() > 1e-7 * (1.0 + expected.abs()) {
                return Err(Error::Convergence(format!(
                    "series impact {} differs from numerical impact {expected}",
                    local.constant_term()
                )));
            }
            piece = target;
            let out = Frame::new(piece, &local, a, h);
            let vt = &(&vx * &out.tx) + &(&vy * &out.ty);
            let vn = &(&vx * &out.nx) + &(&vy * &out.ny);
            beta = vt.atan2(&vn.scale(-1.0));
        }

        let last = &self.bounces[self.period - 1].target;
        let offset = params.arc_difference(last.s, self.start.s);
        let ds = match piece {
            Piece::RightEllipse | Piece::LeftEllipse => {
                let taylor = arc_taylor(a, last.local, order);
                RealSeries::horner(&local.add_scalar(-last.local), &taylor)
            }
            _ => local.add_scalar(-last.local),
        };
        Ok(Jet2::new(
            Chart::Billiard { beta: self.start.beta },
            [ds.add_scalar(offset), beta.add_scalar(-self.start.beta)],
        ))
    }
}

/// Position, tangent and inward normal along a piece as series in the local coordinate.
struct Frame {
    px: RealSeries,
    py: RealSeries,
    tx: RealSeries,
    ty: RealSeries,
    nx: RealSeries,
    ny: RealSeries,
}

impl Frame {
    fn new(piece: Piece, local: &RealSeries, a: f64, h: f64) -> Self {
        let order = local.order();
        let c = |v: f64| RealSeries::constant(order, v);
        let (px, py, tx, ty) = match piece {
            Piece::TopSegment => (local.scale(-1.0).add_scalar(h), c(1.0), c(-1.0), c(0.0)),
            Piece::BottomSegment => (local.add_scalar(-h), c(-1.0), c(1.0), c(0.0)),
            Piece::RightEllipse | Piece::LeftEllipse => {
                let (s, co) = local.sin_cos();
                let g = (&(&s * &s).scale(a * a) + &(&co * &co)).sqrt().recip();
                let sign = if piece == Piece::RightEllipse { 1.0 } else { -1.0 };
                (
                    co.scale(sign * a).add_scalar(sign * h),
                    s.scale(sign),
                    (&s * &g).scale(-sign * a),
                    (&co * &g).scale(sign),
                )
            }
        };
        Self {
            nx: ty.scale(-1.0),
            ny: tx.clone(),
            px,
            py,
            tx,
            ty,
        }
    }
}

/// Taylor coefficients of `S(λ₀ + w) − S(λ₀)` in `w`.
fn arc_taylor(a: f64, lambda0: f64, order: usize) -> Vec<f64> {
    let w = RealSeries::var_x(order, lambda0);
    let (s, c) = w.sin_cos();
    let speed = (&(&s * &s).scale(a * a) + &(&c * &c)).sqrt();
    debug_assert!((speed.constant_term() - ellipse_speed(a, lambda0)).abs() < 1e-14);
    speed.integrate_x()
}

/// Solves `P(w) = target` for a series `w` without constant term.
fn invert_univariate(poly: &[f64], target: &RealSeries) -> RealSeries {
    let deriv: Vec<f64> = poly.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let mut w = target.scale(1.0 / poly[1]);
    for _ in 0..=target.order() {
        let f = &RealSeries::horner(&w, poly) - target;
        let df = RealSeries::horner(&w, &deriv);
        w = &w - &f.div(&df);
    }
    w
}

/// Which route produced a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JetMethod {
    FiniteDifference,
    Series,
    /// Series jet, accepted only if it matches the finite-difference jet.
    CrossValidated,
}

/// Relative agreement required between the two jet routes.
pub const JET_AGREEMENT: f64 = 1e-5;

/// Jet of the return map `T^{4+2n}` at the marked point of a pantographic orbit.
pub fn return_map_jet(orbit: &PantographOrbit, order: usize, method: JetMethod, tol: &ToleranceSet) -> Result<Jet2> {
    if !(1..=MAX_ORDER).contains(&order) {
        return domain(format!("jet order must lie in 1..={MAX_ORDER}, got {order}"));
    }
    if orbit.closure_residual > tol.closure {
        return Err(Error::Refinement { residual: orbit.closure_residual });
    }
    let map = ReturnMap::for_orbit(orbit, tol)?;
    match method {
        JetMethod::FiniteDifference => map.finite_difference_jet(order),
        JetMethod::Series => map.series_jet(order),
        JetMethod::CrossValidated => {
            let series = map.series_jet(order)?;
            let fd = map.finite_difference_jet(order)?;
            series.check_agreement(&fd, JET_AGREEMENT)?;
            Ok(series)
        }
    }
}

/// Coefficient list `(component, i, j, value)` in storage order.
pub fn coefficient_table(jet: &Jet2) -> Vec<(usize, usize, usize, f64)> {
    let mut out = Vec::new();
    for (c, comp) in jet.components.iter().enumerate() {
        for (i, j) in monomials(jet.order()) {
            out.push((c, i, j, comp.get(i, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_stadium;
    use crate::pantograph::materialize_orbit;
    use std::f64::consts::SQRT_2;

    #[test]
    fn finite_differences_reproduce_a_polynomial() {
        let mut f = RealSeries::zero(5);
        let mut g = RealSeries::zero(5);
        for (k, (i, j)) in monomials(5).enumerate() {
            f.set(i, j, 0.1 * k as f64 - 0.7);
            g.set(i, j, (k as f64).sin());
        }
        f.set(0, 0, 0.0);
        g.set(0, 0, 0.0);
        let poly = Jet2::new(Chart::Canonical, [f, g]);
        let jet = finite_difference_jet(|x| Ok(poly.eval(x)), 5, Chart::Canonical, 1.0).unwrap();
        let (gap, ..) = poly.relative_gap(&jet);
        assert!(gap < 1e-8, "gap {gap}");
    }

    #[test]
    fn arc_taylor_inverse_round_trip() {
        let a = 1.7;
        let poly = arc_taylor(a, 0.4, 5);
        assert!((poly[1] - ellipse_speed(a, 0.4)).abs() < 1e-15);
        let x = RealSeries::var_x(5, 0.0);
        let w = invert_univariate(&poly, &x);
        let back = RealSeries::horner(&w, &poly);
        assert!((&back - &x).max_abs() < 1e-13);
    }

    #[test]
    fn series_linear_part_matches_monodromy() {
        let tol = ToleranceSet::default();
        let orbit = materialize_orbit(1, 1.3, 0.7, &tol).unwrap();
        let map = ReturnMap::for_orbit(&orbit, &tol).unwrap();
        let jet = map.series_jet(1).unwrap();
        let billiard = Billiard::new(build_stadium(1.3, 0.7).unwrap());
        let m = orbit.monodromy(&billiard).unwrap().matrix;
        assert!((jet.linear_part() - m).abs().max() < 1e-9);
        let c = jet.constant_part();
        assert!(c[0].abs() < 1e-9 && c[1].abs() < 1e-9);
    }

    #[test]
    fn series_and_finite_differences_agree() {
        let tol = ToleranceSet::default();
        for &(n, a, h) in &[(0, SQRT_2, 0.5), (1, 1.25, 0.3), (2, 1.6, 2.5)] {
            let orbit = materialize_orbit(n, a, h, &tol).unwrap();
            let map = ReturnMap::for_orbit(&orbit, &tol).unwrap();
            let series = map.series_jet(5).unwrap();
            let fd = map.finite_difference_jet(5).unwrap();
            let gap = series.relative_gap(&fd);
            assert!(gap.0 < 1e-10, "n={n} a={a} h={h}: {gap:?}");
        }
    }

    #[test]
    fn canonical_chart_has_unit_determinant() {
        let tol = ToleranceSet::default();
        let orbit = materialize_orbit(0, SQRT_2, 0.5, &tol).unwrap();
        let jet = return_map_jet(&orbit, 3, JetMethod::Series, &tol).unwrap().to_canonical();
        assert!((jet.linear_part().determinant() - 1.0).abs() < 1e-10);
        let map = ReturnMap::for_orbit(&orbit, &tol).unwrap();
        let x = [3e-4, -2e-4];
        let exact = map.canonical(x).unwrap();
        let approx = jet.eval(x);
        assert!((exact[0] - approx[0]).abs() < 1e-9 && (exact[1] - approx[1]).abs() < 1e-9, "{exact:?} {approx:?}");
    }
}
