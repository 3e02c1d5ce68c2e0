//! The stadium boundary: two half-ellipses with semi-axes `a` and 1 joined by
//! two horizontal segments of length `2h`.
//!
//! Arc length `s` starts at the rightmost vertex `(a + h, 0)` and increases
//! counterclockwise. Ellipse pieces are parametrized by `λ ∈ [-π/2, π/2]`:
//! the right cap is `(h + a cos λ, sin λ)` and the left cap is its image under
//! the central symmetry, `(-h - a cos λ, -sin λ)`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::{integrate, Chebyshev};

pub type Vec2 = Vector2<f64>;

/// Degree + 1 of the per-panel interpolants.
const PANEL_NODES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Piece {
    RightEllipse,
    TopSegment,
    LeftEllipse,
    BottomSegment,
}

impl Piece {
    pub fn is_ellipse(self) -> bool {
        matches!(self, Piece::RightEllipse | Piece::LeftEllipse)
    }
}

/// A resolved location on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub piece: Piece,
    /// `λ` on ellipse pieces, `u ∈ [0, 2h]` on segments.
    pub local: f64,
    pub s: f64,
    pub position: Vec2,
    /// Unit tangent, counterclockwise.
    pub tangent: Vec2,
    /// Unit inward normal.
    pub normal: Vec2,
    pub curvature: f64,
}

/// Speed of the ellipse parametrization, `|dγ/dλ|`.
#[inline]
pub(crate) fn ellipse_speed(a: f64, lambda: f64) -> f64 {
    let (s, c) = lambda.sin_cos();
    (a * a * s * s + c * c).sqrt()
}

/// Curvature of the ellipse `(a cos λ, sin λ)`.
#[inline]
pub fn ellipse_curvature(a: f64, lambda: f64) -> f64 {
    let g = ellipse_speed(a, lambda);
    a / (g * g * g)
}

/// Piecewise Chebyshev tables for `S(λ) = ∫₀^λ |γ'|` on `[0, π/2]` and its inverse.
#[derive(Debug)]
struct ArcTable {
    a: f64,
    breaks: Vec<f64>,
    arcs: Vec<f64>,
    forward: Vec<Chebyshev>,
    inverse: Vec<Chebyshev>,
}

impl ArcTable {
    fn new(a: f64) -> Self {
        // Branch points of the speed sit at imaginary distance asinh(1/√(a²-1))
        // from λ = 0; panels no wider than that keep the interpolants at
        // machine precision.
        let reach = (1.0 / (a * a - 1.0).sqrt()).asinh();
        let panels = ((FRAC_PI_2 / reach.min(0.5)).ceil() as usize).max(4);
        let breaks: Vec<f64> = (0..=panels)
            .map(|k| FRAC_PI_2 * k as f64 / panels as f64)
            .collect();
        let speed = |l: f64| ellipse_speed(a, l);
        let mut arcs = vec![0.0];
        let mut forward = Vec::with_capacity(panels);
        for k in 0..panels {
            let (lo, hi) = (breaks[k], breaks[k + 1]);
            let base = arcs[k];
            let nodes = Chebyshev::nodes(lo, hi, PANEL_NODES);
            let samples: Vec<f64> = nodes
                .iter()
                .map(|&x| base + integrate(speed, lo, x, 1e-15))
                .collect();
            forward.push(Chebyshev::from_samples(lo, hi, &samples));
            arcs.push(base + integrate(speed, lo, hi, 1e-15));
        }
        let mut table = Self {
            a,
            breaks,
            arcs,
            forward,
            inverse: Vec::new(),
        };
        let inverse = (0..panels)
            .map(|k| {
                let (lo, hi) = (table.arcs[k], table.arcs[k + 1]);
                let nodes = Chebyshev::nodes(lo, hi, PANEL_NODES);
                let samples: Vec<f64> = nodes
                    .iter()
                    .map(|&s| table.newton_inverse(k, s, table.linear_guess(k, s)))
                    .collect();
                Chebyshev::from_samples(lo, hi, &samples)
            })
            .collect();
        table.inverse = inverse;
        table
    }

    fn quarter(&self) -> f64 {
        *self.arcs.last().unwrap()
    }

    fn panel_of_lambda(&self, lambda: f64) -> usize {
        let n = self.forward.len();
        let k = (lambda / FRAC_PI_2 * n as f64).floor() as isize;
        k.clamp(0, n as isize - 1) as usize
    }

    fn panel_of_arc(&self, s: f64) -> usize {
        match self
            .arcs
            .binary_search_by(|v| v.partial_cmp(&s).expect("finite arc length"))
        {
            Ok(k) => k.min(self.forward.len() - 1),
            Err(k) => k.saturating_sub(1).min(self.forward.len() - 1),
        }
    }

    fn linear_guess(&self, k: usize, s: f64) -> f64 {
        let (s0, s1) = (self.arcs[k], self.arcs[k + 1]);
        let (l0, l1) = (self.breaks[k], self.breaks[k + 1]);
        l0 + (l1 - l0) * (s - s0) / (s1 - s0)
    }

    fn newton_inverse(&self, k: usize, s: f64, mut lambda: f64) -> f64 {
        for _ in 0..30 {
            let step = (self.forward[k].eval(lambda) - s) / ellipse_speed(self.a, lambda);
            lambda -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        lambda
    }

    /// `S(λ)` for `λ ∈ [-π/2, π/2]` (odd in λ).
    fn arc(&self, lambda: f64) -> f64 {
        let m = lambda.abs().min(FRAC_PI_2);
        if m == 0.0 {
            return 0.0;
        }
        let v = self.forward[self.panel_of_lambda(m)].eval(m);
        v.copysign(lambda)
    }

    /// Inverse of [`ArcTable::arc`] for `S ∈ [-s_q, s_q]`.
    fn lambda(&self, s: f64) -> f64 {
        let m = s.abs().min(self.quarter());
        let k = self.panel_of_arc(m);
        let guess = self.inverse[k].eval(m);
        let lambda = guess - (self.forward[k].eval(guess) - m) / ellipse_speed(self.a, guess);
        lambda.copysign(s)
    }
}

/// Shape parameters of the stadium together with derived lengths.
#[derive(Debug, Clone)]
pub struct StadiumParams {
    pub a: f64,
    pub h: f64,
    /// Arc length of a quarter ellipse.
    pub quarter_arc: f64,
    /// Total boundary length `4h + 4·s_q`.
    pub length: f64,
    table: Arc<ArcTable>,
}

impl PartialEq for StadiumParams {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.h == other.h
    }
}

/// Builds the stadium with semi-axes `a > 1`, 1 and half segment length `h ≥ 0`.
pub fn build_stadium(a: f64, h: f64) -> Result<StadiumParams> {
    if !a.is_finite() || !h.is_finite() {
        return domain(format!("non-finite stadium parameters a = {a}, h = {h}"));
    }
    if a <= 1.0 {
        return domain(format!("major semi-axis must exceed 1, got a = {a}"));
    }
    if h < 0.0 {
        return domain(format!("segment half-length must be non-negative, got h = {h}"));
    }
    let quarter_arc = integrate(|l| ellipse_speed(a, l), 0.0, FRAC_PI_2, 1e-14);
    let table = Arc::new(ArcTable::new(a));
    Ok(StadiumParams {
        a,
        h,
        quarter_arc,
        length: 4.0 * h + 4.0 * quarter_arc,
        table,
    })
}

impl StadiumParams {
    /// Arc-length positions of the four junctions, counterclockwise from the
    /// top-right one. Empty for the pure ellipse (`h = 0`).
    pub fn junctions(&self) -> Vec<f64> {
        if self.h == 0.0 {
            return Vec::new();
        }
        let (q, h) = (self.quarter_arc, self.h);
        vec![q, q + 2.0 * h, 3.0 * q + 2.0 * h, 3.0 * q + 4.0 * h]
    }

    /// Reduces `s` into `[0, L)`.
    pub fn wrap(&self, s: f64) -> f64 {
        let r = s.rem_euclid(self.length);
        if r >= self.length {
            0.0
        } else {
            r
        }
    }

    /// Signed circular distance `s1 - s0` in `[-L/2, L/2)`.
    pub fn arc_difference(&self, s1: f64, s0: f64) -> f64 {
        let d = (s1 - s0).rem_euclid(self.length);
        if d >= 0.5 * self.length {
            d - self.length
        } else {
            d
        }
    }

    /// Signed ellipse arc length `S(λ)` measured from the vertex `λ = 0`.
    pub fn ellipse_arc(&self, lambda: f64) -> f64 {
        self.table.arc(lambda)
    }

    /// Inverse of [`StadiumParams::ellipse_arc`].
    pub fn ellipse_lambda(&self, arc: f64) -> f64 {
        self.table.lambda(arc)
    }

    pub fn point_at(&self, s: f64) -> BoundaryPoint {
        let s = self.wrap(s);
        let (q, h, l) = (self.quarter_arc, self.h, self.length);
        let (piece, local) = if s < q {
            (Piece::RightEllipse, self.ellipse_lambda(s))
        } else if s < q + 2.0 * h {
            (Piece::TopSegment, s - q)
        } else if s < 3.0 * q + 2.0 * h {
            (Piece::LeftEllipse, self.ellipse_lambda(s - 2.0 * q - 2.0 * h))
        } else if s < 3.0 * q + 4.0 * h {
            (Piece::BottomSegment, s - 3.0 * q - 2.0 * h)
        } else {
            (Piece::RightEllipse, self.ellipse_lambda(s - l))
        };
        self.resolve(piece, local, s)
    }

    /// Global arc length of the point with the given local coordinate.
    pub fn arclength_of(&self, piece: Piece, local: f64) -> Result<f64> {
        self.check_local(piece, local)?;
        Ok(self.arclength_unchecked(piece, local))
    }

    pub(crate) fn arclength_unchecked(&self, piece: Piece, local: f64) -> f64 {
        let (q, h) = (self.quarter_arc, self.h);
        let s = match piece {
            Piece::RightEllipse => self.ellipse_arc(local),
            Piece::TopSegment => q + local,
            Piece::LeftEllipse => 2.0 * q + 2.0 * h + self.ellipse_arc(local),
            Piece::BottomSegment => 3.0 * q + 2.0 * h + local,
        };
        self.wrap(s)
    }

    fn check_local(&self, piece: Piece, local: f64) -> Result<()> {
        let ok = match piece {
            Piece::RightEllipse | Piece::LeftEllipse => local.abs() <= FRAC_PI_2,
            Piece::TopSegment | Piece::BottomSegment => (0.0..=2.0 * self.h).contains(&local),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("local coordinate {local} outside the range of {piece:?}"))
        }
    }

    /// Boundary point for a piece-local coordinate.
    pub fn point_on(&self, piece: Piece, local: f64) -> Result<BoundaryPoint> {
        self.check_local(piece, local)?;
        Ok(self.resolve(piece, local, self.arclength_unchecked(piece, local)))
    }

    pub(crate) fn resolve(&self, piece: Piece, local: f64, s: f64) -> BoundaryPoint {
        let (a, h) = (self.a, self.h);
        let (position, tangent, curvature) = match piece {
            Piece::RightEllipse => {
                let (sn, cs) = local.sin_cos();
                let g = ellipse_speed(a, local);
                (
                    Vec2::new(h + a * cs, sn),
                    Vec2::new(-a * sn / g, cs / g),
                    a / (g * g * g),
                )
            }
            Piece::LeftEllipse => {
                let (sn, cs) = local.sin_cos();
                let g = ellipse_speed(a, local);
                (
                    Vec2::new(-h - a * cs, -sn),
                    Vec2::new(a * sn / g, -cs / g),
                    a / (g * g * g),
                )
            }
            Piece::TopSegment => (Vec2::new(h - local, 1.0), Vec2::new(-1.0, 0.0), 0.0),
            Piece::BottomSegment => (Vec2::new(-h + local, -1.0), Vec2::new(1.0, 0.0), 0.0),
        };
        BoundaryPoint {
            piece,
            local,
            s,
            position,
            tangent,
            normal: Vec2::new(-tangent.y, tangent.x),
            curvature,
        }
    }
}
