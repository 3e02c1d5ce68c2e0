//! The return map along a fixed itinerary, evaluated in double-double
//! arithmetic for the finite-difference jet.
//!
//! Segments are extended to full lines and caps to full ellipses, so the
//! map stays analytic past the points where the true orbit would slip onto
//! a neighbouring piece.

use twofloat::TwoFloat;

use super::jet::ReturnMap;
use crate::error::{Error, Result};
use crate::geometry::Piece;
use crate::quad::{WGK, XGK};

/// Relative evaluation noise of [`forced_deviation`].
pub(super) const NOISE: f64 = 1e-21;

type Dd = TwoFloat;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

/// Quotient refined by two residual corrections; the crate's own division
/// is only accurate to double precision.
fn div(a: Dd, b: Dd) -> Dd {
    let q0 = dd(a.hi() / b.hi());
    let q1 = q0 + (a - b * q0).hi() / b.hi();
    q1 + (a - b * q1).hi() / b.hi()
}

fn atan2(y: Dd, x: Dd) -> Dd {
    let t0 = y.hi().atan2(x.hi());
    let (s, c) = (dd(t0).sin(), dd(t0).cos());
    // One Newton step on tan(θ - θ₀).
    dd(t0) + div(y * c - x * s, x * c + y * s)
}

fn speed(a: f64, lambda: Dd) -> Dd {
    let (s, c) = (lambda.sin(), lambda.cos());
    (s * s * (a * a) + c * c).sqrt()
}

/// Ellipse arc length between two parameters, by a fixed Kronrod rule on
/// two panels.
fn arc(a: f64, l0: Dd, l1: Dd) -> Dd {
    let mut total = dd(0.0);
    let half = (l1 - l0) / 2.0;
    for panel in 0..2 {
        let lo = l0 + half * panel as f64;
        let hw = half / 2.0;
        let c = lo + hw;
        let mut acc = speed(a, c) * WGK[7];
        for j in 0..7 {
            let dx = hw * XGK[j];
            acc += (speed(a, c - dx) + speed(a, c + dx)) * WGK[j];
        }
        total += acc * hw;
    }
    total
}

struct Frame {
    position: [Dd; 2],
    tangent: [Dd; 2],
}

impl Frame {
    fn normal(&self) -> [Dd; 2] {
        [-self.tangent[1], self.tangent[0]]
    }
}

fn frame(a: f64, h: f64, piece: Piece, local: Dd) -> Frame {
    match piece {
        Piece::RightEllipse | Piece::LeftEllipse => {
            let sign = if piece == Piece::RightEllipse { 1.0 } else { -1.0 };
            let (sn, cs) = (local.sin(), local.cos());
            let g = speed(a, local);
            Frame {
                position: [(cs * a + h) * sign, sn * sign],
                tangent: [-div(sn * a, g) * sign, div(cs, g) * sign],
            }
        }
        Piece::TopSegment => Frame {
            position: [dd(h) - local, dd(1.0)],
            tangent: [dd(-1.0), dd(0.0)],
        },
        Piece::BottomSegment => Frame {
            position: [local - h, dd(-1.0)],
            tangent: [dd(1.0), dd(0.0)],
        },
    }
}

fn dot(u: [Dd; 2], v: [Dd; 2]) -> Dd {
    u[0] * v[0] + u[1] * v[1]
}

/// Deviation of the image of `(s*, β*) + d` from the periodic point.
pub(super) fn forced_deviation(map: &ReturnMap, d: [f64; 2]) -> Result<[Dd; 2]> {
    let params = &map.billiard.params;
    let (a, h) = (params.a, params.h);
    let bounces = map.bounces();
    let first = &bounces[0].source;
    let mut piece = first.piece;
    let mut local = if piece.is_ellipse() {
        let l0 = dd(first.local);
        let mut l = l0 + d[0] / speed(a, l0).hi();
        for _ in 0..8 {
            let step = div(arc(a, l0, l) - d[0], speed(a, l));
            l -= step;
            if step.hi().abs() < 1e-30 {
                break;
            }
        }
        l
    } else {
        dd(first.local) + d[0]
    };
    let mut beta = dd(map.start.beta) + d[1];
    let graze = std::f64::consts::FRAC_PI_2 - map.billiard.tol.graze;

    for (index, bounce) in bounces.iter().enumerate() {
        if !(beta.hi().abs() < graze) {
            return Err(Error::Grazing {
                s: map.start.s + d[0],
                beta: beta.hi(),
            });
        }
        let src = frame(a, h, piece, local);
        let (sn, cs) = (beta.sin(), beta.cos());
        let nrm = src.normal();
        let v = [nrm[0] * cs + src.tangent[0] * sn, nrm[1] * cs + src.tangent[1] * sn];
        let p = src.position;
        let target = bounce.target.piece;
        let tau = match target {
            Piece::TopSegment => div(dd(1.0) - p[1], v[1]),
            Piece::BottomSegment => div(dd(-1.0) - p[1], v[1]),
            Piece::RightEllipse | Piece::LeftEllipse => {
                let center = if target == Piece::RightEllipse { h } else { -h };
                let x = p[0] - center;
                let qa = v[0] * v[0] / (a * a) + v[1] * v[1];
                let qb = x * v[0] / (a * a) + p[1] * v[1];
                if target == piece {
                    -div(qb * 2.0, qa)
                } else {
                    let qc = x * x / (a * a) + p[1] * p[1] - 1.0;
                    let disc = qb * qb - qa * qc;
                    if disc.hi() < 0.0 {
                        return Err(Error::ItineraryChange { bounce: index });
                    }
                    div(disc.sqrt() - qb, qa)
                }
            }
        };
        let hit = [p[0] + v[0] * tau, p[1] + v[1] * tau];
        local = match target {
            Piece::TopSegment => dd(h) - hit[0],
            Piece::BottomSegment => hit[0] + h,
            Piece::RightEllipse => atan2(hit[1], (hit[0] - h) / a),
            Piece::LeftEllipse => atan2(-hit[1], -(hit[0] + h) / a),
        };
        piece = target;
        let dst = frame(a, h, piece, local);
        beta = atan2(dot(v, dst.tangent), -dot(v, dst.normal()));
    }

    let last = &bounces[bounces.len() - 1].target;
    let offset = params.arc_difference(last.s, map.start.s);
    let ds = if piece.is_ellipse() {
        arc(a, dd(last.local), local)
    } else {
        local - last.local
    };
    Ok([ds + offset, beta - map.start.beta])
}
