//! The billiard map on the annulus `[0, L) × (-π/2, π/2)` and its derivative.
//!
//! A phase point `(s, β)` launches a chord from `point_at(s)` in the direction
//! `cos β · N + sin β · T`, where `N` is the inward normal and `T` the
//! counterclockwise tangent. The map preserves `cos β dβ ds`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Piece, StadiumParams, Vec2};
use crate::tolerance::ToleranceSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub s: f64,
    pub beta: f64,
}

impl PhasePoint {
    pub fn new(s: f64, beta: f64) -> Self {
        Self { s, beta }
    }

    /// Time reversal `R(s, β) = (s, -β)`.
    pub fn reversed(self) -> Self {
        Self::new(self.s, -self.beta)
    }
}

/// Derivative of the billiard map in `(s, β)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentMatrix {
    pub matrix: Matrix2<f64>,
    pub cos_from: f64,
    pub cos_to: f64,
}

impl TangentMatrix {
    pub fn identity(cos_beta: f64) -> Self {
        Self {
            matrix: Matrix2::identity(),
            cos_from: cos_beta,
            cos_to: cos_beta,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &TangentMatrix) -> TangentMatrix {
        TangentMatrix {
            matrix: next.matrix * self.matrix,
            cos_from: self.cos_from,
            cos_to: next.cos_to,
        }
    }
}

/// One application of the map, with the resolved impact points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounce {
    pub source: BoundaryPoint,
    pub beta_out: f64,
    pub target: BoundaryPoint,
    pub beta_in: f64,
    pub chord: f64,
}

impl Bounce {
    pub fn from(&self) -> PhasePoint {
        PhasePoint::new(self.source.s, self.beta_out)
    }

    pub fn to(&self) -> PhasePoint {
        PhasePoint::new(self.target.s, self.beta_in)
    }

    /// Outgoing unit direction of the chord.
    pub fn direction(&self) -> Vec2 {
        let (sn, cs) = self.beta_out.sin_cos();
        self.source.normal * cs + self.source.tangent * sn
    }

    /// Derivative of this bounce in `(s, β)`.
    ///
    /// With `τ` the chord length and `K`, `K'` the curvatures at source and
    /// target the matrix is
    /// `1/cos β' · [[τK − cos β, −τ], [K cos β' + K' cos β − τKK', τK' − cos β']]`.
    pub fn tangent_matrix(&self) -> TangentMatrix {
        let (k0, k1) = (self.source.curvature, self.target.curvature);
        let (c0, c1) = (self.beta_out.cos(), self.beta_in.cos());
        let tau = self.chord;
        let m = Matrix2::new(
            tau * k0 - c0,
            -tau,
            k0 * c1 + k1 * c0 - tau * k0 * k1,
            tau * k1 - c1,
        ) / c1;
        TangentMatrix {
            matrix: m,
            cos_from: c0,
            cos_to: c1,
        }
    }
}

/// The billiard in a fixed stadium.
#[derive(Debug, Clone)]
pub struct Billiard {
    pub params: StadiumParams,
    pub tol: ToleranceSet,
}

impl Billiard {
    pub fn new(params: StadiumParams) -> Self {
        Self::with_tolerances(params, ToleranceSet::default())
    }

    pub fn with_tolerances(params: StadiumParams, tol: ToleranceSet) -> Self {
        Self { params, tol }
    }

    /// Next impact of the chord leaving `p`.
    pub fn step(&self, p: PhasePoint) -> Result<Bounce> {
        let source = self.params.point_at(p.s);
        self.flight(&source, p.beta)
    }

    /// Inverse map, realized as `R ∘ T ∘ R`.
    pub fn step_back(&self, p: PhasePoint) -> Result<PhasePoint> {
        Ok(self.step(p.reversed())?.to().reversed())
    }

    pub fn tangent_matrix(&self, p: PhasePoint) -> Result<TangentMatrix> {
        Ok(self.step(p)?.tangent_matrix())
    }

    /// Ordered product of `period` per-bounce derivatives along the orbit of `p`.
    pub fn monodromy(&self, p: PhasePoint, period: usize) -> Result<TangentMatrix> {
        let mut acc = TangentMatrix::identity(p.beta.cos());
        for bounce in self.orbit(p).take(period) {
            acc = acc.then(&bounce?.tangent_matrix());
        }
        Ok(acc)
    }

    /// Iterator over successive bounces starting at `p`; stops after the first error.
    pub fn orbit(&self, p: PhasePoint) -> Orbit<'_> {
        Orbit {
            billiard: self,
            current: Some((self.params.point_at(p.s), p.beta)),
        }
    }

    /// Applies the map `count` times.
    pub fn iterate(&self, p: PhasePoint, count: usize) -> Result<PhasePoint> {
        let mut last = PhasePoint::new(self.params.wrap(p.s), p.beta);
        for bounce in self.orbit(p).take(count) {
            last = bounce?.to();
        }
        Ok(last)
    }

    /// Follows the chord leaving `source` at angle `beta` to its next impact.
    pub fn flight(&self, source: &BoundaryPoint, beta: f64) -> Result<Bounce> {
        if !beta.is_finite() || beta.abs() >= FRAC_PI_2 - self.tol.graze {
            return Err(Error::Grazing { s: source.s, beta });
        }
        let (sn, cs) = beta.sin_cos();
        let v = source.normal * cs + source.tangent * sn;
        let (piece, local, chord) = self
            .first_hit(source, v)
            .ok_or_else(|| Error::Convergence(format!("no forward impact from s = {}", source.s)))?;
        let s = self.params.arclength_unchecked(piece, local);
        for &j in &self.params.junctions() {
            if self.params.arc_difference(s, j).abs() < self.tol.corner {
                return Err(Error::Corner { s, junction: j });
            }
        }
        let target = self.params.resolve(piece, local, s);
        let beta_in = v.dot(&target.tangent).atan2(-v.dot(&target.normal));
        Ok(Bounce {
            source: *source,
            beta_out: beta,
            target,
            beta_in,
            chord,
        })
    }

    /// Smallest forward ray parameter over the four pieces.
    fn first_hit(&self, source: &BoundaryPoint, v: Vec2) -> Option<(Piece, f64, f64)> {
        let (a, h) = (self.params.a, self.params.h);
        let p = source.position;
        let eps = self.tol.chord_eps * self.params.length;
        let slack = 1e-12 * (a + h);
        let mut best: Option<(Piece, f64, f64)> = None;
        let mut offer = |piece: Piece, local: f64, tau: f64| {
            if tau > eps && best.is_none_or(|(_, _, t)| tau < t) {
                best = Some((piece, local, tau));
            }
        };

        if h > 0.0 {
            if v.y > 0.0 && source.piece != Piece::TopSegment {
                let tau = (1.0 - p.y) / v.y;
                let x = p.x + tau * v.x;
                if x.abs() <= h + slack {
                    offer(Piece::TopSegment, (h - x).clamp(0.0, 2.0 * h), tau);
                }
            }
            if v.y < 0.0 && source.piece != Piece::BottomSegment {
                let tau = (-1.0 - p.y) / v.y;
                let x = p.x + tau * v.x;
                if x.abs() <= h + slack {
                    offer(Piece::BottomSegment, (x + h).clamp(0.0, 2.0 * h), tau);
                }
            }
        }

        for (piece, center, side) in [(Piece::RightEllipse, h, 1.0), (Piece::LeftEllipse, -h, -1.0)] {
            let x = p.x - center;
            let qa = v.x * v.x / (a * a) + v.y * v.y;
            let qb = x * v.x / (a * a) + p.y * v.y;
            let roots: [Option<f64>; 2] = if source.piece == piece {
                // The source lies on this ellipse: τ = 0 is the trivial root.
                [Some(-2.0 * qb / qa), None]
            } else {
                let qc = x * x / (a * a) + p.y * p.y - 1.0;
                let disc = qb * qb - qa * qc;
                if disc < 0.0 {
                    [None, None]
                } else {
                    let q = -(qb + disc.sqrt().copysign(qb));
                    if q == 0.0 {
                        [Some(0.0), None]
                    } else {
                        [Some(q / qa), Some(qc / q)]
                    }
                }
            };
            for tau in roots.into_iter().flatten() {
                let hit = p + v * tau;
                if side * (hit.x - center) < -slack {
                    continue;
                }
                let lambda = if side > 0.0 {
                    hit.y.atan2((hit.x - h) / a)
                } else {
                    (-hit.y).atan2(-(hit.x + h) / a)
                };
                offer(piece, lambda.clamp(-FRAC_PI_2, FRAC_PI_2), tau);
            }
        }
        best
    }

    /// Reflection `(x, y) → (-x, y)` of the table acting on phase space.
    pub fn mirror_x(&self, p: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.params.wrap(0.5 * self.params.length - p.s), -p.beta)
    }

    /// Reflection `(x, y) → (x, -y)` of the table acting on phase space.
    pub fn mirror_y(&self, p: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.params.wrap(-p.s), -p.beta)
    }

    /// Central symmetry `(x, y) → (-x, -y)`.
    pub fn rotate_half(&self, p: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.params.wrap(p.s + 0.5 * self.params.length), p.beta)
    }

    /// Distance between phase points, with `s` measured on the circle.
    pub fn phase_distance(&self, p: PhasePoint, q: PhasePoint) -> f64 {
        self.params
            .arc_difference(p.s, q.s)
            .abs()
            .max((p.beta - q.beta).abs())
    }

    /// First integral of the pure ellipse (`h = 0`): the product of the
    /// moments of the chord about the two foci.
    pub fn ellipse_invariant(&self, p: PhasePoint) -> f64 {
        let b = self.params.point_at(p.s);
        let (sn, cs) = p.beta.sin_cos();
        let v = b.normal * cs + b.tangent * sn;
        let f = (self.params.a * self.params.a - 1.0).sqrt();
        let cross = |q: Vec2| q.x * v.y - q.y * v.x;
        let p0 = b.position - Vec2::new(self.params.h, 0.0);
        cross(p0 - Vec2::new(f, 0.0)) * cross(p0 + Vec2::new(f, 0.0))
    }
}

/// Iterator returned by [`Billiard::orbit`].
pub struct Orbit<'a> {
    billiard: &'a Billiard,
    current: Option<(BoundaryPoint, f64)>,
}

impl Iterator for Orbit<'_> {
    type Item = Result<Bounce>;

    fn next(&mut self) -> Option<Self::Item> {
        let (point, beta) = self.current.take()?;
        match self.billiard.flight(&point, beta) {
            Ok(bounce) => {
                self.current = Some((bounce.target, bounce.beta_in));
                Some(Ok(bounce))
            }
            Err(e) => Some(Err(e)),
        }
    }
}
