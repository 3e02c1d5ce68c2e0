//! Truncated bivariate power series `Σ c_ij xⁱ yʲ` with `i + j ≤ order`.
//!
//! Coefficients are stored by total degree: `(0,0), (1,0), (0,1), (2,0), (1,1), …`.
//! Real series support the elementary functions needed to push a jet
//! through a billiard bounce; complex series are used by the normal form.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait Coef:
    Copy + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
}

impl Coef for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Coef for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

#[inline]
pub fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

pub fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Exponent pairs in storage order.
pub fn monomials(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |j| (d - j, j)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series2<T> {
    order: usize,
    coef: Vec<T>,
}

pub type RealSeries = Series2<f64>;
pub type ComplexSeries = Series2<Complex64>;

impl<T: Coef> Series2<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coef: vec![T::zero(); len_for(order)],
        }
    }

    pub fn constant(order: usize, c: T) -> Self {
        let mut s = Self::zero(order);
        s.coef[0] = c;
        s
    }

    /// `c + x`.
    pub fn var_x(order: usize, c: T) -> Self {
        let mut s = Self::constant(order, c);
        if order >= 1 {
            s.coef[1] = T::from_f64(1.0);
        }
        s
    }

    /// `c + y`.
    pub fn var_y(order: usize, c: T) -> Self {
        let mut s = Self::constant(order, c);
        if order >= 1 {
            s.coef[2] = T::from_f64(1.0);
        }
        s
    }

    pub fn from_coefficients(order: usize, coef: Vec<T>) -> Self {
        assert_eq!(coef.len(), len_for(order), "coefficient count for order {order}");
        Self { order, coef }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coef
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i + j > self.order {
            T::zero()
        } else {
            self.coef[index(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.coef[index(i, j)] = value;
    }

    pub fn constant_term(&self) -> T {
        self.coef[0]
    }

    /// The series with its constant term removed.
    pub fn nonconstant(&self) -> Self {
        let mut s = self.clone();
        s.coef[0] = T::zero();
        s
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous(&self, d: usize) -> Self {
        let mut s = Self::zero(self.order);
        for j in 0..=d.min(self.order) {
            if d <= self.order {
                s.coef[index(d - j, j)] = self.coef[index(d - j, j)];
            }
        }
        s
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            order: self.order,
            coef: self.coef.iter().map(|&c| c * k).collect(),
        }
    }

    pub fn add_scalar(&self, k: T) -> Self {
        let mut s = self.clone();
        s.coef[0] = s.coef[0] + k;
        s
    }

    pub fn dx(&self) -> Self {
        let mut s = Self::zero(self.order);
        for (i, j) in monomials(self.order) {
            if i > 0 {
                s.coef[index(i - 1, j)] = self.coef[index(i, j)] * T::from_f64(i as f64);
            }
        }
        s
    }

    pub fn dy(&self) -> Self {
        let mut s = Self::zero(self.order);
        for (i, j) in monomials(self.order) {
            if j > 0 {
                s.coef[index(i, j - 1)] = self.coef[index(i, j)] * T::from_f64(j as f64);
            }
        }
        s
    }

    /// Whether every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(|&c| c == T::zero())
    }

    /// `self(p, q)`, truncated at the order of `p`.
    pub fn compose(&self, p: &Self, q: &Self) -> Self {
        let order = p.order;
        let mut p_pow = vec![Self::constant(order, T::from_f64(1.0))];
        let mut q_pow = vec![Self::constant(order, T::from_f64(1.0))];
        for k in 1..=self.order {
            p_pow.push(&p_pow[k - 1] * p);
            q_pow.push(&q_pow[k - 1] * q);
        }
        let mut out = Self::zero(order);
        for (i, j) in monomials(self.order) {
            let c = self.coef[index(i, j)];
            if c == T::zero() {
                continue;
            }
            out += (&p_pow[i] * &q_pow[j]).scale(c);
        }
        out
    }

    /// Evaluates the polynomial at a point.
    pub fn eval(&self, x: T, y: T) -> T {
        let mut xs = vec![T::from_f64(1.0)];
        let mut ys = vec![T::from_f64(1.0)];
        for k in 1..=self.order {
            xs.push(xs[k - 1] * x);
            ys.push(ys[k - 1] * y);
        }
        monomials(self.order).fold(T::zero(), |acc, (i, j)| acc + self.coef[index(i, j)] * xs[i] * ys[j])
    }

    /// `Σ c_k wᵏ` by Horner's rule.
    pub fn horner(w: &Self, coeffs: &[T]) -> Self {
        let mut acc = Self::zero(w.order);
        for &c in coeffs.iter().rev() {
            acc = (&acc * w).add_scalar(c);
        }
        acc
    }

    /// Same series with a different truncation order.
    pub fn truncate(&self, order: usize) -> Self {
        let mut s = Self::zero(order);
        for (i, j) in monomials(order.min(self.order)) {
            s.coef[index(i, j)] = self.coef[index(i, j)];
        }
        s
    }
}

impl<T: Coef> Add for &Series2<T> {
    type Output = Series2<T>;
    fn add(self, rhs: Self) -> Series2<T> {
        debug_assert_eq!(self.order, rhs.order);
        Series2 {
            order: self.order,
            coef: self.coef.iter().zip(&rhs.coef).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Coef> Sub for &Series2<T> {
    type Output = Series2<T>;
    fn sub(self, rhs: Self) -> Series2<T> {
        debug_assert_eq!(self.order, rhs.order);
        Series2 {
            order: self.order,
            coef: self.coef.iter().zip(&rhs.coef).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Coef> Neg for &Series2<T> {
    type Output = Series2<T>;
    fn neg(self) -> Series2<T> {
        Series2 {
            order: self.order,
            coef: self.coef.iter().map(|&a| -a).collect(),
        }
    }
}

impl<T: Coef> AddAssign for Series2<T> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.coef.iter_mut().zip(rhs.coef) {
            *a = *a + b;
        }
    }
}

impl<T: Coef> Mul for &Series2<T> {
    type Output = Series2<T>;
    fn mul(self, rhs: Self) -> Series2<T> {
        let order = self.order;
        let mut out = Series2::zero(order);
        for (i1, j1) in monomials(order) {
            let a = self.coef[index(i1, j1)];
            if a == T::zero() {
                continue;
            }
            for (i2, j2) in monomials(order - i1 - j1) {
                let k = index(i1 + i2, j1 + j2);
                out.coef[k] = out.coef[k] + a * rhs.coef[index(i2, j2)];
            }
        }
        out
    }
}

impl ComplexSeries {
    /// Coefficient-wise complex conjugate with the variables swapped, i.e.
    /// the conjugate function when the variables are `(ζ, ζ̄)`.
    pub fn conj_swap(&self) -> Self {
        let mut s = Self::zero(self.order);
        for (i, j) in monomials(self.order) {
            s.coef[index(j, i)] = self.coef[index(i, j)].conj();
        }
        s
    }

    pub fn from_real(r: &RealSeries) -> Self {
        Self {
            order: r.order,
            coef: r.coef.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn re(&self) -> RealSeries {
        Series2 {
            order: self.order,
            coef: self.coef.iter().map(|c| c.re).collect(),
        }
    }

    pub fn im(&self) -> RealSeries {
        Series2 {
            order: self.order,
            coef: self.coef.iter().map(|c| c.im).collect(),
        }
    }
}

impl RealSeries {
    fn split(&self) -> (f64, Self) {
        (self.coef[0], self.nonconstant())
    }

    pub fn recip(&self) -> Self {
        let (c, w) = self.split();
        let coeffs: Vec<f64> = (0..=self.order).map(|k| (-1f64).powi(k as i32) / c.powi(k as i32 + 1)).collect();
        Self::horner(&w, &coeffs)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self * &rhs.recip()
    }

    pub fn sqrt(&self) -> Self {
        let (c, w) = self.split();
        let root = c.sqrt();
        let mut coeffs = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for k in 0..=self.order {
            coeffs.push(root * binom / c.powi(k as i32));
            binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        }
        Self::horner(&w, &coeffs)
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let (c, w) = self.split();
        let (sc, cc) = c.sin_cos();
        let mut sin_w = Vec::with_capacity(self.order + 1);
        let mut cos_w = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                cos_w.push(sign / fact);
                sin_w.push(0.0);
            } else {
                sin_w.push(sign / fact);
                cos_w.push(0.0);
            }
        }
        let sw = Self::horner(&w, &sin_w);
        let cw = Self::horner(&w, &cos_w);
        let sin = &cw.scale(sc) + &sw.scale(cc);
        let cos = &cw.scale(cc) - &sw.scale(sc);
        (sin, cos)
    }

    /// `atan(w)` for a series without constant term.
    fn atan_nilpotent(w: &Self) -> Self {
        let coeffs: Vec<f64> = (0..=w.order)
            .map(|k| match k % 4 {
                1 => 1.0 / k as f64,
                3 => -1.0 / k as f64,
                _ => 0.0,
            })
            .collect();
        Self::horner(w, &coeffs)
    }

    pub fn atan(&self) -> Self {
        let c = self.coef[0];
        let num = self.add_scalar(-c);
        let den = self.scale(c).add_scalar(1.0);
        Self::atan_nilpotent(&num.div(&den)).add_scalar(c.atan())
    }

    /// `atan2(self, x)` on the branch of the constant terms.
    pub fn atan2(&self, x: &Self) -> Self {
        let (y0, x0) = (self.coef[0], x.coef[0]);
        let mut num = &x.scale(y0) - &self.scale(x0);
        num = num.scale(-1.0);
        num.coef[0] = 0.0;
        let den = &x.scale(x0) + &self.scale(y0);
        Self::atan_nilpotent(&num.div(&den)).add_scalar(y0.atan2(x0))
    }

    /// `∫₀ˣ self dx` for a series in `x` alone.
    pub fn integrate_x(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        for i in 0..self.order {
            out.push(self.coef[index(i, 0)] / (i + 1) as f64);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coef.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn indexing_is_graded() {
        let order = 4;
        let all: Vec<_> = monomials(order).collect();
        assert_eq!(all.len(), len_for(order));
        for (k, &(i, j)) in all.iter().enumerate() {
            assert_eq!(index(i, j), k);
        }
    }

    #[test]
    fn product_and_composition() {
        let x = RealSeries::var_x(3, 0.0);
        let y = RealSeries::var_y(3, 0.0);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.get(2, 0), 1.0);
        assert_eq!(p.get(0, 2), -1.0);
        assert_eq!(p.get(1, 1), 0.0);
        let sq = &p * &p;
        assert!(sq.is_zero());
        let sub = p.compose(&y, &x);
        assert_eq!(sub.get(0, 2), 1.0);
        assert_eq!(sub.get(2, 0), -1.0);
    }

    #[test]
    fn elementary_functions_match_point_values() {
        let order = 6;
        let (dx, dy) = (2e-3, 1e-3);
        let f = &RealSeries::var_x(order, 0.7) + &RealSeries::var_y(order, 0.0).scale(0.5);
        let v = 0.7 + dx + 0.5 * dy;
        let (s, c) = f.sin_cos();
        let checks: [(RealSeries, fn(f64) -> f64); 5] = [
            (f.recip(), |v| 1.0 / v),
            (f.sqrt(), f64::sqrt),
            (s, f64::sin),
            (c, f64::cos),
            (f.atan(), f64::atan),
        ];
        for (series, func) in &checks {
            assert!(close(series.eval(dx, dy), func(v), 1e-13), "{} vs {}", series.eval(dx, dy), func(v));
        }
        let g = f.scale(-1.5).add_scalar(0.4);
        let expect: f64 = (0.4 - 1.5 * v).atan2(v);
        assert!(close(g.atan2(&f).eval(dx, dy), expect, 1e-13));
    }

    #[test]
    fn derivatives_of_monomials() {
        let mut s = RealSeries::zero(4);
        s.set(2, 1, 3.0);
        assert_eq!(s.dx().get(1, 1), 6.0);
        assert_eq!(s.dy().get(2, 0), 3.0);
    }

    #[test]
    fn conjugation_swaps_variables() {
        let mut s = ComplexSeries::zero(3);
        s.set(2, 1, Complex64::new(1.0, 2.0));
        let c = s.conj_swap();
        assert_eq!(c.get(1, 2), Complex64::new(1.0, -2.0));
    }
}
