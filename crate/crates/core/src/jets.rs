//! Second-order forward differentiation.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to the chart coordinates. Arithmetic propagates all three exactly
//! through the product and chain rules.
//!
//! Each jet also records how many derivative orders are still trustworthy.
//! Seeds and constants start at order 2; [`Jet::derivative`] lowers it by one
//! (the gradient entry becomes the value, the Hessian row the gradient), and
//! binary operations keep the minimum. This lets a quantity built from first
//! derivatives, such as a connection coefficient, be differentiated once more
//! exactly, while accidental use of a truncated Hessian is caught.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::{Error, Result};

/// Largest chart dimension the jets can differentiate in.
pub const MAX_CHART_DIM: usize = 4;

const D: usize = MAX_CHART_DIM;

/// Denominators at or below this magnitude make a division fail.
pub const DIV_EPS: f64 = 1e-14;

#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    value: f64,
    grad: [f64; D],
    hess: [[f64; D]; D],
    order: u8,
}

pub type Jet2Scalar = Jet;

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Jet {
            value,
            grad: [0.0; D],
            hess: [[0.0; D]; D],
            order: 2,
        }
    }

    /// The coordinate `x^k` seeded at `value`.
    pub fn variable(value: f64, k: usize) -> Self {
        assert!(k < D, "coordinate index {k} exceeds MAX_CHART_DIM");
        let mut j = Jet::constant(value);
        j.grad[k] = 1.0;
        j
    }

    /// Coordinate seeds for the point `x`.
    pub fn seed(x: &[f64]) -> Result<Vec<Jet>> {
        if x.len() > D {
            return Err(Error::InvalidArgument(format!(
                "chart dimension {} exceeds the supported maximum {D}",
                x.len()
            )));
        }
        Ok(x.iter().enumerate().map(|(k, &v)| Jet::variable(v, k)).collect())
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64; D] {
        &self.grad
    }

    pub fn hess(&self) -> &[[f64; D]; D] {
        &self.hess
    }

    pub fn partial(&self, k: usize) -> f64 {
        self.grad[k]
    }

    pub fn second(&self, k: usize, l: usize) -> f64 {
        self.hess[k][l]
    }

    /// Number of exact derivative orders carried.
    pub fn order(&self) -> u8 {
        self.order
    }

    /// `∂_k` of this jet, one order lower.
    ///
    /// Panics when the jet carries no derivatives any more; that always
    /// indicates a pipeline differentiating more often than the input allows.
    pub fn derivative(&self, k: usize) -> Jet {
        assert!(self.order > 0, "differentiating an order-0 jet");
        let mut grad = [0.0; D];
        if self.order >= 2 {
            grad = self.hess[k];
        }
        Jet {
            value: self.grad[k],
            grad,
            hess: [[0.0; D]; D],
            order: self.order - 1,
        }
    }

    /// Directional derivative `Σ_k v^k ∂_k` along a jet-valued direction.
    pub fn directional(&self, v: &[Jet]) -> Jet {
        v.iter()
            .enumerate()
            .fold(Jet::constant(0.0), |acc, (k, vk)| acc + *vk * self.derivative(k))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }

    /// `f(self)` given `f`, `f'`, `f''` at the value.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let mut out = Jet {
            value: f0,
            grad: [0.0; D],
            hess: [[0.0; D]; D],
            order: self.order,
        };
        for k in 0..D {
            out.grad[k] = f1 * self.grad[k];
            for l in k..D {
                let h = f2 * self.grad[k] * self.grad[l] + f1 * self.hess[k][l];
                out.hess[k][l] = h;
                out.hess[l][k] = h;
            }
        }
        out
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let v = self.value;
        if v <= 0.0 {
            return self.chain(f64::NAN, f64::NAN, f64::NAN);
        }
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    /// Square root; radicands `<= 0` yield NaN.
    pub fn sqrt(self) -> Jet {
        let v = self.value;
        if v <= 0.0 {
            return self.chain(f64::NAN, f64::NAN, f64::NAN);
        }
        let r = v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * v))
    }

    pub fn checked_sqrt(self) -> Result<Jet> {
        if self.value > 0.0 {
            Ok(self.sqrt())
        } else {
            Err(Error::Evaluation(format!(
                "square root of non-positive value {}",
                self.value
            )))
        }
    }

    pub fn recip(self) -> Jet {
        let v = self.value;
        if v.abs() <= DIV_EPS {
            return self.chain(f64::NAN, f64::NAN, f64::NAN);
        }
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn checked_div(self, rhs: Jet) -> Result<Jet> {
        if rhs.value.abs() <= DIV_EPS {
            Err(Error::Evaluation(format!(
                "division by {} (|denominator| <= {DIV_EPS:e})",
                rhs.value
            )))
        } else {
            Ok(self / rhs)
        }
    }

    pub fn powi(self, e: i32) -> Jet {
        let v = self.value;
        match e {
            0 => Jet {
                order: self.order,
                ..Jet::constant(1.0)
            },
            1 => self,
            _ => {
                let ef = e as f64;
                self.chain(
                    v.powi(e),
                    ef * v.powi(e - 1),
                    ef * (ef - 1.0) * v.powi(e - 2),
                )
            }
        }
    }

    pub fn powf(self, e: f64) -> Jet {
        if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
            return self.powi(e as i32);
        }
        let v = self.value;
        if v <= 0.0 {
            return self.chain(f64::NAN, f64::NAN, f64::NAN);
        }
        self.chain(v.powf(e), e * v.powf(e - 1.0), e * (e - 1.0) * v.powf(e - 2.0))
    }

    /// `self^e` for a jet-valued exponent, as `exp(e ln self)`.
    pub fn pow(self, e: Jet) -> Jet {
        if e.grad.iter().all(|g| *g == 0.0) && e.hess.iter().flatten().all(|h| *h == 0.0) {
            let mut out = self.powf(e.value);
            out.order = out.order.min(e.order);
            return out;
        }
        (e * self.ln()).exp()
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("value", &self.value)
            .field("grad", &self.grad)
            .field("hess", &self.hess)
            .field("order", &self.order)
            .finish()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.value += rhs.value;
        for k in 0..D {
            self.grad[k] += rhs.grad[k];
            for l in 0..D {
                self.hess[k][l] += rhs.hess[k][l];
            }
        }
        self.order = self.order.min(rhs.order);
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        self.value -= rhs.value;
        for k in 0..D {
            self.grad[k] -= rhs.grad[k];
            for l in 0..D {
                self.hess[k][l] -= rhs.hess[k][l];
            }
        }
        self.order = self.order.min(rhs.order);
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = (&self, &rhs);
        let mut out = Jet {
            value: a.value * b.value,
            grad: [0.0; D],
            hess: [[0.0; D]; D],
            order: a.order.min(b.order),
        };
        for k in 0..D {
            out.grad[k] = a.value * b.grad[k] + b.value * a.grad[k];
            for l in k..D {
                let h = a.value * b.hess[k][l]
                    + b.value * a.hess[k][l]
                    + a.grad[k] * b.grad[l]
                    + b.grad[k] * a.grad[l];
                out.hess[k][l] = h;
                out.hess[l][k] = h;
            }
        }
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.value *= rhs;
        for k in 0..D {
            self.grad[k] *= rhs;
            for l in 0..D {
                self.hess[k][l] *= rhs;
            }
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * Jet::constant(rhs).recip().value
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}

/// Numeric type admitting both plain and jet evaluation, so a single field
/// definition serves value-only and differentiated evaluation.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, e: i32) -> Self;
    fn pow(self, e: Self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, e: i32) -> Self {
        f64::powi(self, e)
    }
    fn pow(self, e: Self) -> Self {
        if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
            f64::powi(self, e as i32)
        } else {
            f64::powf(self, e)
        }
    }
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(self) -> Self {
        Jet::sin(self)
    }
    fn cos(self) -> Self {
        Jet::cos(self)
    }
    fn exp(self) -> Self {
        Jet::exp(self)
    }
    fn ln(self) -> Self {
        Jet::ln(self)
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(self)
    }
    fn powi(self, e: i32) -> Self {
        Jet::powi(self, e)
    }
    fn pow(self, e: Self) -> Self {
        Jet::pow(self, e)
    }
}

/// Value, gradient and Hessian of `f` at `x`.
pub fn evaluate_with_jets<F>(f: F, x: &[f64]) -> Result<Jet>
where
    F: Fn(&[Jet]) -> Jet,
{
    let seeds = Jet::seed(x)?;
    let out = f(&seeds);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Evaluation(format!("non-finite result at {x:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Richardson-extrapolated central differences of a plain scalar function.
    fn fd_grad(f: &dyn Fn(&[f64]) -> f64, x: &[f64], k: usize) -> f64 {
        let central = |h: f64| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += h;
            m[k] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        };
        let h = 1e-4;
        (4.0 * central(h / 2.0) - central(h)) / 3.0
    }

    fn fd_hess(f: &dyn Fn(&[f64]) -> f64, x: &[f64], k: usize, l: usize) -> f64 {
        let g = |y: &[f64]| fd_grad(f, y, l);
        fd_grad(&g, x, k)
    }

    fn composite<S: Scalar>(x: &[S]) -> S {
        x[0].sin() * x[1].exp()
    }

    #[test]
    fn square_of_seed() {
        let x = Jet::variable(3.0, 0);
        let y = x * x;
        assert_eq!(y.value(), 9.0);
        assert_eq!(y.partial(0), 6.0);
        assert_eq!(y.second(0, 0), 2.0);
    }

    #[test]
    fn sin_at_zero() {
        let y = Jet::variable(0.0, 0).sin();
        assert_eq!((y.value(), y.partial(0), y.second(0, 0)), (0.0, 1.0, 0.0));
    }

    #[test]
    fn constants_and_seeds() {
        let c = Jet::constant(2.5);
        assert_eq!(c.grad(), &[0.0; D]);
        assert_eq!(c.hess(), &[[0.0; D]; D]);
        let x = Jet::variable(1.0, 2);
        assert_eq!(x.grad(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(x.hess(), &[[0.0; D]; D]);
    }

    #[test]
    fn composite_matches_finite_differences() {
        let x = [0.3, 0.2];
        let j = evaluate_with_jets(composite, &x).unwrap();
        let f = |v: &[f64]| composite(v);
        assert!((j.value() - f(&x)).abs() < 1e-15);
        for k in 0..2 {
            assert!((j.partial(k) - fd_grad(&f, &x, k)).abs() < 1e-6);
            for l in 0..2 {
                assert!((j.second(k, l) - fd_hess(&f, &x, k, l)).abs() < 1e-6);
            }
        }
    }

    fn mixed<S: Scalar>(x: &[S]) -> S {
        let r2 = x[0] * x[0] + x[1] * x[1] + 1.0;
        (x[0] * x[2]).cos() / r2.sqrt() + x[1].powi(3) * x[2].exp() - r2.ln() + x[0].pow(x[1] + 2.0)
    }

    #[test]
    fn all_operations_match_finite_differences() {
        let x = [0.7, -0.4, 0.25];
        let j = evaluate_with_jets(mixed, &x).unwrap();
        let f = |v: &[f64]| mixed(v);
        for k in 0..3 {
            assert!((j.partial(k) - fd_grad(&f, &x, k)).abs() < 1e-6, "grad {k}");
            for l in 0..3 {
                assert!((j.second(k, l) - fd_hess(&f, &x, k, l)).abs() < 1e-6, "hess {k}{l}");
                assert_eq!(j.second(k, l), j.second(l, k));
            }
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let x = Jet::seed(&[0.5, 1.5]).unwrap();
        let f = x[0] * x[0] * x[1];
        assert_eq!(f.order(), 2);
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 1);
        assert_eq!(fx.value(), 2.0 * 0.5 * 1.5);
        assert_eq!(fx.partial(1), 2.0 * 0.5);
        let fxy = fx.derivative(1);
        assert_eq!(fxy.order(), 0);
        assert_eq!(fxy.value(), 1.0);
        assert_eq!((fx * f).order(), 1);
    }

    #[test]
    #[should_panic(expected = "order-0")]
    fn third_derivative_panics() {
        let x = Jet::variable(1.0, 0);
        let _ = x.derivative(0).derivative(0).derivative(0);
    }

    #[test]
    fn domain_failures() {
        let z = Jet::constant(0.0);
        assert!(Jet::constant(1.0).checked_div(z).is_err());
        assert!(Jet::constant(-1.0).checked_sqrt().is_err());
        assert!(!(Jet::constant(1.0) / Jet::constant(1e-15)).is_finite());
        assert!(evaluate_with_jets(|v| v[0].sqrt(), &[-1.0]).is_err());
        assert!(Jet::seed(&[0.0; 5]).is_err());
    }
}
