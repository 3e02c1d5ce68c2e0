//! Rotation numbers of small invariant circles around an elliptic point.
//!
//! Orbits started at several radii in the linear eigen-coordinate are
//! followed for many iterations; weighted Birkhoff averages give the mean
//! rotation angle and the mean action, and a polynomial fit of one against
//! the other estimates the first twist coefficient.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::birkhoff::LinearChart;
use crate::error::{domain, Error, Result};

pub const DEFAULT_RADII: [f64; 4] = [1e-4, 2e-4, 4e-4, 8e-4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSample {
    pub radius: f64,
    /// Mean of `|ζ|²` along the orbit.
    pub action: f64,
    /// Mean rotation angle per iterate, in radians.
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationFit {
    /// Slope `dω/dI`.
    pub tau1: f64,
    /// Rotation angle extrapolated to zero action.
    pub intercept: f64,
    /// `intercept / 2π` reduced to `[0, 1)`.
    pub rotation_number: f64,
    pub samples: Vec<RotationSample>,
}

/// Intercept and slope at zero action of the least-squares polynomial of
/// `ω` in `I`: quadratic from three samples on, so the next twist term does
/// not bias the slope, and a straight line otherwise.
fn fit_slope(samples: &[RotationSample]) -> (f64, f64) {
    let scale = samples.iter().fold(0.0f64, |m, s| m.max(s.action));
    let degree = if samples.len() >= 3 { 2 } else { 1 };
    let rows = samples.len();
    let v = DMatrix::from_fn(rows, degree + 1, |i, j| (samples[i].action / scale).powi(j as i32));
    let w = DVector::from_iterator(rows, samples.iter().map(|s| s.omega));
    let c = (v.transpose() * &v)
        .lu()
        .solve(&(v.transpose() * w))
        .expect("distinct radii give distinct actions");
    (c[0], c[1] / scale)
}

fn bump(t: f64) -> f64 {
    (-1.0 / (t * (1.0 - t))).exp()
}

/// Fits the rotation angle against the action for orbits of `map` (a map in
/// canonical deviations fixing the origin) started at each radius.
pub fn rotation_number_fit<F>(map: F, chart: &LinearChart, radii: &[f64], iterations: usize) -> Result<RotationFit>
where
    F: Fn([f64; 2]) -> Result<[f64; 2]>,
{
    if radii.len() < 2 || iterations < 16 {
        return domain("rotation fit needs at least two radii and 16 iterations");
    }
    let arg_mu = chart.mu.arg();
    let weights: Vec<f64> = (0..iterations)
        .map(|k| bump((k as f64 + 1.0) / (iterations as f64 + 1.0)))
        .collect();
    let total: f64 = weights.iter().sum();

    let mut samples = Vec::with_capacity(radii.len());
    for &radius in radii {
        let mut x = chart.from_complex(Complex64::new(radius, 0.0));
        let mut z = chart.to_complex(x);
        let (mut omega, mut action) = (0.0, 0.0);
        for (k, w) in weights.iter().enumerate() {
            let next = map(x).map_err(|_| Error::Escape { iteration: k })?;
            let zn = chart.to_complex(next);
            if !(zn.norm() < 3.0 * radius) {
                return Err(Error::Escape { iteration: k });
            }
            omega += w * (arg_mu + (zn * (chart.mu * z).conj()).arg());
            action += w * z.norm_sqr();
            x = next;
            z = zn;
        }
        samples.push(RotationSample {
            radius,
            action: action / total,
            omega: omega / total,
        });
    }

    let (intercept, tau1) = fit_slope(&samples);
    Ok(RotationFit {
        tau1,
        intercept,
        rotation_number: (intercept / std::f64::consts::TAU).rem_euclid(1.0),
        samples,
    })
}
