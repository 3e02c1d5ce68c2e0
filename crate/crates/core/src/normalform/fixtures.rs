//! Synthetic area-preserving maps with known normal forms.

use num_complex::Complex64;

use super::jet::{Chart, Jet2};
use crate::series::ComplexSeries;

/// Jet of `ζ ↦ e^{iθ} ζ exp(i Σ τ_m |ζ|^{2m})` in the real chart
/// `ζ = (x + iy)/√2`, truncated at `order`.
pub fn twist_map(theta: f64, taus: &[f64], order: usize) -> Jet2 {
    let zero = Complex64::new(0.0, 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = &ComplexSeries::var_x(order, zero).scale(Complex64::new(r, 0.0))
        + &ComplexSeries::var_y(order, zero).scale(Complex64::new(0.0, r));
    let zb = &ComplexSeries::var_x(order, zero).scale(Complex64::new(r, 0.0))
        + &ComplexSeries::var_y(order, zero).scale(Complex64::new(0.0, -r));
    let action = &z * &zb;
    let mut phase = ComplexSeries::zero(order);
    let mut power = ComplexSeries::constant(order, Complex64::new(1.0, 0.0));
    for &t in taus {
        power = &power * &action;
        phase += power.scale(Complex64::new(0.0, t));
    }
    // exp of a series without constant term.
    let mut exp = ComplexSeries::constant(order, Complex64::new(1.0, 0.0));
    let mut term = exp.clone();
    for k in 1..=order {
        term = (&term * &phase).scale(Complex64::new(1.0 / k as f64, 0.0));
        exp += term.clone();
    }
    let image = (&z * &exp).scale(Complex64::from_polar(1.0, theta));
    let s2 = std::f64::consts::SQRT_2;
    Jet2::new(Chart::Canonical, [image.re().scale(s2), image.im().scale(s2)])
}

/// Jet of the rotation by `theta`.
pub fn linear_rotation(theta: f64, order: usize) -> Jet2 {
    twist_map(theta, &[], order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_fixture_is_linear() {
        let jet = linear_rotation(0.4, 4);
        let m = jet.linear_part();
        assert!((m[(0, 0)] - 0.4f64.cos()).abs() < 1e-15);
        assert!((m[(1, 0)] - 0.4f64.sin()).abs() < 1e-15);
        assert!(jet.components.iter().all(|c| c.nonconstant().truncate(4).coefficients()[3..].iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn twist_fixture_rotates_circles_rigidly() {
        let jet = twist_map(0.5, &[0.3], 3);
        let x = [1e-2, 0.0];
        let y = jet.eval(x);
        let r0 = x[0].hypot(x[1]);
        let r1 = y[0].hypot(y[1]);
        // Truncation error of exp(iτI) at cubic order is O(r⁵).
        assert!((r1 - r0).abs() < 1e-8);
        let angle = y[1].atan2(y[0]);
        assert!((angle - 0.5 - 0.3 * 0.5 * r0 * r0).abs() < 1e-8);
    }
}
