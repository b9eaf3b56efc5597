//! Second-order forward-mode automatic differentiation.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to a fixed set of independent variables. Constants carry no
//! derivative storage at all, so mixing constants and variables is cheap.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Scalar arithmetic shared by plain floats and jets.
///
/// Metric formulas are written once against this trait and evaluated either
/// on `f64` or on [`Jet2`] to obtain exact first and second derivatives.
pub trait Real:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn try_recip(&self, op: &'static str) -> Result<Self>;
    fn try_sqrt(&self, op: &'static str) -> Result<Self>;

    fn try_div(&self, rhs: &Self, op: &'static str) -> Result<Self> {
        Ok(self.clone() * rhs.try_recip(op)?)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn try_recip(&self, op: &'static str) -> Result<Self> {
        if *self == 0.0 || !self.is_finite() {
            return Err(Error::domain(op, format!("division by {self}")));
        }
        Ok(1.0 / self)
    }
    fn try_sqrt(&self, op: &'static str) -> Result<Self> {
        if *self < 0.0 || self.is_nan() {
            return Err(Error::domain(op, format!("square root of {self}")));
        }
        Ok(self.sqrt())
    }
}

/// Value, gradient and Hessian of a scalar with respect to `k` variables.
///
/// The Hessian is stored densely in row-major order. An empty gradient
/// marks a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 { value, grad: Vec::new(), hess: Vec::new() }
    }

    /// The `index`-th of `nvars` independent variables, seeded at `value`.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range for {nvars} variables");
        let mut grad = vec![0.0; nvars];
        grad[index] = 1.0;
        Jet2 { value, grad, hess: vec![0.0; nvars * nvars] }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_constant(&self) -> bool {
        self.grad.is_empty()
    }

    /// Gradient padded with zeros to `k` entries.
    pub fn gradient(&self, k: usize) -> DVector<f64> {
        let mut g = DVector::zeros(k);
        for (i, v) in self.grad.iter().enumerate() {
            g[i] = *v;
        }
        g
    }

    /// Hessian padded with zeros to `k x k`.
    pub fn hessian(&self, k: usize) -> DMatrix<f64> {
        let m = self.grad.len();
        let mut h = DMatrix::zeros(k, k);
        for i in 0..m {
            for j in 0..m {
                h[(i, j)] = self.hess[i * m + j];
            }
        }
        h
    }

    fn scaled(&self, s: f64) -> Jet2 {
        Jet2 {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|h| h * s).collect(),
        }
    }

    /// Chain rule for a scalar function with derivatives `d1`, `d2` at the value.
    fn compose(&self, value: f64, d1: f64, d2: f64) -> Jet2 {
        let k = self.grad.len();
        let grad = self.grad.iter().map(|g| d1 * g).collect();
        let mut hess = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                hess[i * k + j] = d1 * self.hess[i * k + j] + d2 * self.grad[i] * self.grad[j];
            }
        }
        Jet2 { value, grad, hess }
    }

    fn check_dims(a: &Jet2, b: &Jet2) {
        assert_eq!(a.grad.len(), b.grad.len(), "jets over different variable sets");
    }
}

impl Real for Jet2 {
    fn cst(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn try_recip(&self, op: &'static str) -> Result<Self> {
        let x = self.value;
        if x == 0.0 || !x.is_finite() {
            return Err(Error::domain(op, format!("division by {x}")));
        }
        Ok(self.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)))
    }
    fn try_sqrt(&self, op: &'static str) -> Result<Self> {
        let x = self.value;
        if x < 0.0 || x.is_nan() {
            return Err(Error::domain(op, format!("square root of {x}")));
        }
        if x == 0.0 {
            if self.grad.iter().all(|g| *g == 0.0) && self.hess.iter().all(|h| *h == 0.0) {
                return Ok(Jet2 { value: 0.0, grad: self.grad.clone(), hess: self.hess.clone() });
            }
            return Err(Error::domain(op, "square root at zero with nonzero derivative"));
        }
        let r = x.sqrt();
        Ok(self.compose(r, 0.5 / r, -0.25 / (r * x)))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        if rhs.is_constant() {
            return self + rhs.value;
        }
        if self.is_constant() {
            return rhs + self.value;
        }
        Jet2::check_dims(&self, &rhs);
        let mut out = self;
        out.value += rhs.value;
        out.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a += b);
        out.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a += b);
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scaled(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        if rhs.is_constant() {
            return self.scaled(rhs.value);
        }
        if self.is_constant() {
            return rhs.scaled(self.value);
        }
        Jet2::check_dims(&self, &rhs);
        let k = self.grad.len();
        let (a, b) = (self.value, rhs.value);
        let grad = (0..k).map(|i| a * rhs.grad[i] + b * self.grad[i]).collect();
        let mut hess = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                hess[i * k + j] = a * rhs.hess[i * k + j]
                    + b * self.hess[i * k + j]
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j];
            }
        }
        Jet2 { value: a * b, grad, hess }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scaled(rhs)
    }
}

/// Evaluates `f` on jets seeded at `point`, returning value, gradient and Hessian.
pub fn jet2_eval<F>(f: F, point: &[f64]) -> Result<Jet2>
where
    F: Fn(&[Jet2]) -> Result<Jet2>,
{
    let k = point.len();
    let vars: Vec<Jet2> = point.iter().enumerate().map(|(i, &v)| Jet2::variable(v, i, k)).collect();
    let out = f(&vars)?;
    if out.is_constant() {
        return Ok(Jet2 { value: out.value, grad: vec![0.0; k], hess: vec![0.0; k * k] });
    }
    Ok(out)
}

/// Euclidean dot product of two slices of scalars.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::cst(0.0), |acc, (x, y)| acc + x.clone() * y.clone())
}
