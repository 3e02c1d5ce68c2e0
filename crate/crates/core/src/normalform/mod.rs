//! Birkhoff normal form and twist coefficients of the return map at an
//! elliptic pantographic orbit.
//!
//! In the normalized coordinate the map reads `ζ ↦ μζ e^{iτ(|ζ|²)} + …` with
//! `τ(I) = τ₁ I + τ₂ I² + …`; any nonzero `τ_m` surrounds the orbit by
//! invariant curves.

mod birkhoff;
pub mod fixtures;
mod flight;
mod jet;
mod oracle;

use serde::{Deserialize, Serialize};

pub use birkhoff::{normal_form, LinearChart, NormalForm};
pub use jet::{
    coefficient_table, finite_difference_jet, return_map_jet, Chart, Jet2, JetMethod, ReturnMap, JET_AGREEMENT,
    MAX_ORDER,
};
pub use oracle::{rotation_number_fit, RotationFit, RotationSample, DEFAULT_RADII};

use crate::error::{Error, Result};
use crate::pantograph::{classify, materialize_orbit, StabilityClass, StabilityReport};
use crate::tolerance::ToleranceSet;

/// Absolute floor of the noise estimate on `τ_m`.
pub const NOISE_FLOOR: f64 = 1e-12;
/// A twist coefficient counts as nonzero when it exceeds this multiple of its noise.
pub const NOISE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// `τ_m` is the first twist coefficient clearly above its noise.
    IslandCertified { m: usize },
    Inconclusive,
    ResonantSkip { k: u32, j: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistReport {
    pub q: u32,
    /// Full-map eigenvalue `(Re μ, Im μ)`.
    pub mu: [f64; 2],
    pub resonance_defects: Vec<(u32, f64)>,
    pub taus: Vec<f64>,
    /// Noise estimate per `τ_m`.
    pub noise: Vec<f64>,
    pub tau1_oracle: Option<f64>,
    pub oracle: Option<RotationFit>,
    pub residual_imag: f64,
    /// Relative gap between the finite-difference and series jets.
    pub jet_gap: Option<f64>,
    pub verdict: Verdict,
}

impl TwistReport {
    fn from_normal_form(nf: &NormalForm, q: u32, noise: Vec<f64>) -> Self {
        let verdict = verdict_for(&nf.taus, &noise);
        Self {
            q,
            mu: [nf.mu.re, nf.mu.im],
            resonance_defects: nf.resonance_defects.clone(),
            taus: nf.taus.clone(),
            noise,
            tau1_oracle: None,
            oracle: None,
            residual_imag: nf.residual_imag,
            jet_gap: None,
            verdict,
        }
    }

    pub fn tau1(&self) -> Option<f64> {
        self.taus.first().copied()
    }
}

fn verdict_for(taus: &[f64], noise: &[f64]) -> Verdict {
    taus.iter()
        .zip(noise)
        .position(|(t, n)| t.abs() > NOISE_FACTOR * n)
        .map_or(Verdict::Inconclusive, |i| Verdict::IslandCertified { m: i + 1 })
}

/// Normal form of a single jet; the noise estimate is the absolute floor.
pub fn birkhoff_coefficients(jet: &Jet2, q: u32, tol: &ToleranceSet) -> Result<TwistReport> {
    let nf = normal_form(jet, q, tol)?;
    let noise = vec![NOISE_FLOOR; nf.taus.len()];
    Ok(TwistReport::from_normal_form(&nf, q, noise))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistOptions {
    pub q: u32,
    /// Retry with `q + 2` when every twist coefficient is below noise.
    pub retry: bool,
    pub oracle: bool,
    pub radii: Vec<f64>,
    pub iterations: usize,
    pub tol: ToleranceSet,
}

impl Default for TwistOptions {
    fn default() -> Self {
        Self {
            q: 4,
            retry: true,
            oracle: true,
            radii: DEFAULT_RADII.to_vec(),
            iterations: 2000,
            tol: ToleranceSet::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistAnalysis {
    pub n: u32,
    pub a: f64,
    pub h: f64,
    pub stability: StabilityReport,
    pub report: TwistReport,
}

/// Materializes `Pan(n, a, h)`, checks it is elliptic and non-resonant, and
/// computes its twist coefficients with both jet routes and the rotation oracle.
pub fn twist_analysis(n: u32, a: f64, h: f64, options: &TwistOptions) -> Result<TwistAnalysis> {
    let tol = &options.tol;
    let stability = classify(n, a, h, options.q, tol)?;
    let skip = |k: u32, j: u32| {
        let mu = stability.mu.unwrap_or([f64::NAN, f64::NAN]);
        TwistReport {
            q: options.q,
            mu,
            resonance_defects: Vec::new(),
            taus: Vec::new(),
            noise: Vec::new(),
            tau1_oracle: None,
            oracle: None,
            residual_imag: 0.0,
            jet_gap: None,
            verdict: Verdict::ResonantSkip { k, j },
        }
    };
    match stability.class {
        StabilityClass::Elliptic => {}
        StabilityClass::Resonant { k, j } => {
            return Ok(TwistAnalysis {
                n,
                a,
                h,
                stability,
                report: skip(k, j),
            })
        }
        _ => return Err(Error::NotElliptic { trace: stability.half_trace }),
    }

    let orbit = materialize_orbit(n, a, h, tol)?;
    let map = ReturnMap::for_orbit(&orbit, tol)?;
    let mut q = options.q;
    let report = loop {
        let order = (q as usize - 1).min(MAX_ORDER);
        let series = map.series_jet(order)?;
        let fd = map.finite_difference_jet(order)?;
        let gap = series.check_agreement(&fd, JET_AGREEMENT)?;
        let nf = match normal_form(&series, q, tol) {
            Err(Error::Resonance { order, .. }) => {
                let j = resonance_numerator(&stability, order);
                break skip(order, j);
            }
            other => other?,
        };
        let nf_fd = normal_form(&fd, q, tol)?;
        let noise = nf
            .taus
            .iter()
            .zip(&nf_fd.taus)
            .map(|(a, b)| (a - b).abs().max(NOISE_FLOOR))
            .collect();
        let mut report = TwistReport::from_normal_form(&nf, q, noise);
        report.jet_gap = Some(gap);
        let retry = options.retry && report.verdict == Verdict::Inconclusive && (q as usize + 1) <= MAX_ORDER;
        if !retry {
            break report;
        }
        q += 2;
    };

    let mut report = report;
    if options.oracle && matches!(report.verdict, Verdict::IslandCertified { .. } | Verdict::Inconclusive) {
        let chart = LinearChart::from_matrix(&map.series_jet(1)?.to_canonical().linear_part())?;
        if let Ok(fit) = rotation_number_fit(|x| map.canonical(x), &chart, &options.radii, options.iterations) {
            report.tau1_oracle = Some(fit.tau1);
            report.oracle = Some(fit);
        }
    }
    Ok(TwistAnalysis {
        n,
        a,
        h,
        stability,
        report,
    })
}

/// The `j` with `μ = e^{±2πij/k}` closest to the computed half-map angle.
fn resonance_numerator(stability: &StabilityReport, k: u32) -> u32 {
    let phi = stability.phi.unwrap_or(0.0);
    let j = (phi * k as f64 / std::f64::consts::PI).round() as u32;
    j.clamp(1, k.saturating_sub(1).max(1))
}
