//! Symplectic Birkhoff normalization of an elliptic fixed point.
//!
//! The linear part is diagonalized in a complex coordinate `ζ` whose Poisson
//! bracket is `{ζ, ζ̄} = −i` (so `|ζ|²` is the action). Non-resonant monomials
//! are then removed degree by degree by conjugating with time-one maps of
//! polynomial Hamiltonians, leaving `ζ ↦ μζ(1 + Σ C_m |ζ|^{2m})`.

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::jet::Jet2;
use crate::error::{domain, Error, Result};
use crate::series::{monomials, ComplexSeries, RealSeries};
use crate::tolerance::ToleranceSet;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Complex eigen-coordinate of an elliptic 2×2 matrix.
///
/// `x = v ζ + v̄ ζ̄` and `ζ = u·x`; `v` is scaled so that the chart is
/// area-preserving with positive orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearChart {
    pub mu: Complex64,
    pub v: [Complex64; 2],
    pub u: [Complex64; 2],
}

impl LinearChart {
    pub fn from_matrix(m: &Matrix2<f64>) -> Result<Self> {
        let (tr, det) = (m.trace(), m.determinant());
        let disc = det - 0.25 * tr * tr;
        if !(det > 0.0) || !(disc > 0.0) {
            return Err(Error::NotElliptic { trace: tr });
        }
        let mut mu = Complex64::new(0.5 * tr, disc.sqrt());
        let mut v = if m[(0, 1)].abs() >= m[(1, 0)].abs() {
            [Complex64::new(m[(0, 1)], 0.0), mu - m[(0, 0)]]
        } else {
            [mu - m[(1, 1)], Complex64::new(m[(1, 0)], 0.0)]
        };
        let mut area = v[0].re * v[1].im - v[1].re * v[0].im;
        if area > 0.0 {
            mu = mu.conj();
            v = [v[0].conj(), v[1].conj()];
            area = -area;
        }
        let k = 1.0 / (-2.0 * area).sqrt();
        let v = [v[0] * k, v[1] * k];
        let d = v[0] * v[1].conj() - v[1] * v[0].conj();
        let u = [v[1].conj() / d, -v[0].conj() / d];
        Ok(Self { mu, v, u })
    }

    pub fn to_complex(&self, x: [f64; 2]) -> Complex64 {
        self.u[0] * x[0] + self.u[1] * x[1]
    }

    pub fn from_complex(&self, z: Complex64) -> [f64; 2] {
        [2.0 * (self.v[0] * z).re, 2.0 * (self.v[1] * z).re]
    }
}

/// Result of the normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub mu: Complex64,
    /// `|μᵏ − 1|` for `k = 1..=q`.
    pub resonance_defects: Vec<(u32, f64)>,
    /// Surviving coefficients `C_m` of `ζ^{m+1} ζ̄^m`.
    pub coefficients: Vec<Complex64>,
    pub taus: Vec<f64>,
    /// Largest `|Re log|` defect of the normal form (zero for an exact area-preserving map).
    pub residual_imag: f64,
}

/// `{f, g} = −i (f_ζ g_ζ̄ − f_ζ̄ g_ζ)`.
fn poisson(f: &ComplexSeries, g: &ComplexSeries) -> ComplexSeries {
    (&(&f.dx() * &g.dy()) - &(&f.dy() * &g.dx())).scale(-I)
}

/// `exp(L_χ) ζ` where `L_χ f = {f, χ}`; `sign` selects the inverse flow.
fn lie_flow(chi: &ComplexSeries, sign: f64) -> ComplexSeries {
    let order = chi.order();
    let mut term = ComplexSeries::var_x(order, Complex64::new(0.0, 0.0));
    let mut sum = term.clone();
    for k in 1..=order {
        term = poisson(&term, chi).scale(Complex64::new(sign / k as f64, 0.0));
        if term.is_zero() {
            break;
        }
        sum += term.clone();
    }
    sum
}

/// Normalizes the jet (any chart) of an area-preserving map up to order `q − 1`.
pub fn normal_form(jet: &Jet2, q: u32, tol: &ToleranceSet) -> Result<NormalForm> {
    if q < 2 || q as usize > jet.order() + 1 {
        return domain(format!("normal form order q = {q} needs a jet of order ≥ q − 1 (have {})", jet.order()));
    }
    let d = q as usize - 1;
    let jet = jet.to_canonical().truncate(d);
    let chart = LinearChart::from_matrix(&jet.linear_part())?;
    let mu = chart.mu;

    let resonance_defects: Vec<(u32, f64)> = (1..=q).map(|k| (k, (mu.powu(k) - 1.0).norm())).collect();
    if let Some(&(order, defect)) = resonance_defects.iter().find(|(_, e)| *e < tol.resonance) {
        return Err(Error::Resonance { order, defect });
    }

    // F(ζ, ζ̄) = u·f(vζ + v̄ζ̄) with the variables (x, y) of the series read as (ζ, ζ̄).
    // One extra degree of room holds the Hamiltonians; terms above d are never read.
    let zero = Complex64::new(0.0, 0.0);
    let work = d + 1;
    let z = ComplexSeries::var_x(work, zero);
    let zb = ComplexSeries::var_y(work, zero);
    let coord = |k: usize| &z.scale(chart.v[k]) + &zb.scale(chart.v[k].conj());
    let (x, y) = (coord(0), coord(1));
    let lift = |r: &RealSeries| ComplexSeries::from_real(&r.nonconstant().truncate(work)).compose(&x, &y);
    let mut f = &lift(&jet.components[0]).scale(chart.u[0]) + &lift(&jet.components[1]).scale(chart.u[1]);

    for m in 2..=d {
        let mut chi = ComplexSeries::zero(work);
        for (k, l) in monomials(d).filter(|&(k, l)| k + l == m) {
            if k == l + 1 {
                continue;
            }
            let x_kl = f.get(k, l) / (mu.powu(k as u32) * mu.conj().powu(l as u32) - mu);
            chi.set(k, l + 1, I * x_kl / (l as f64 + 1.0));
        }
        // A real Hamiltonian: χ_ab = conj χ_ba.
        chi.set(m + 1, 0, chi.get(0, m + 1).conj());
        let sym = (&chi + &chi.conj_swap()).scale(Complex64::new(0.5, 0.0));
        let phi = lie_flow(&sym, 1.0);
        let phi_inv = lie_flow(&sym, -1.0);
        let f_phi = f.compose(&phi, &phi.conj_swap());
        f = phi_inv.compose(&f_phi, &f_phi.conj_swap());
    }

    let s = (q as usize / 2).saturating_sub(1);
    let coefficients: Vec<Complex64> = (1..=s).map(|m| f.get(m + 1, m)).collect();
    // log(1 + Σ μ̄ C_m Iᵐ) = σ(I) + i τ(I), as a polynomial in I of degree s.
    let z_poly: Vec<Complex64> = std::iter::once(zero)
        .chain(coefficients.iter().map(|c| mu.conj() * c))
        .collect();
    let mut log = vec![zero; s + 1];
    let mut power = vec![zero; s + 1];
    power[0] = Complex64::new(1.0, 0.0);
    for k in 1..=s {
        power = poly_mul(&power, &z_poly, s);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        for (acc, p) in log.iter_mut().zip(&power) {
            *acc += p * (sign / k as f64);
        }
    }
    let taus = log[1..].iter().map(|c| c.im).collect();
    let residual_imag = log[1..].iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    Ok(NormalForm {
        mu,
        resonance_defects,
        coefficients,
        taus,
        residual_imag,
    })
}

fn poly_mul(a: &[Complex64], b: &[Complex64], degree: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); degree + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}
