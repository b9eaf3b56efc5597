//! Zermelo navigation: the bijection between a Riemannian metric `h` with a
//! wind `W` of `h`-length below one and a Randers metric `F = alpha + beta`.
//!
//! With `W_i = h_ij W^j` and `lambda = 1 - h(W, W)`:
//!
//! * `a_ij = h_ij / lambda + W_i W_j / lambda^2`
//! * `b_i = -W_i / lambda`
//!
//! and back, with `eps = 1 - |b|_a^2`: `h = eps (a - b b)`, `W^i = -b^i / eps`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{spd_check, Real};

/// Navigation data: a Riemannian metric and a wind vector at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationData {
    pub h: DMatrix<f64>,
    pub w: DVector<f64>,
}

/// Randers data: a Riemannian metric `a` and a one-form `b` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct RandersData {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

fn check_shapes(m: &DMatrix<f64>, v: &DVector<f64>) -> Result<()> {
    if !m.is_square() || m.nrows() != v.len() {
        return Err(Error::Validation(format!(
            "metric is {}x{} but vector has {} entries",
            m.nrows(),
            m.ncols(),
            v.len()
        )));
    }
    Ok(())
}

/// `lambda = 1 - h(W, W)`, which must be positive.
pub fn convexity_lambda(h: &DMatrix<f64>, w: &DVector<f64>) -> Result<f64> {
    let lambda = 1.0 - w.dot(&(h * w));
    if lambda <= 0.0 {
        return Err(Error::Convexity(format!("|W|_h^2 = {} is not below 1", 1.0 - lambda)));
    }
    Ok(lambda)
}

/// Randers data of the navigation problem `(h, W)`.
pub fn perturb(h: &DMatrix<f64>, w: &DVector<f64>) -> Result<RandersData> {
    check_shapes(h, w)?;
    spd_check(h)?;
    let lambda = convexity_lambda(h, w)?;
    let wl = h * w;
    let a = h / lambda + (&wl * wl.transpose()) / (lambda * lambda);
    let b = -wl / lambda;
    Ok(RandersData { a, b })
}

/// Navigation data of the Randers metric `(a, b)`; requires `|b|_a < 1`.
pub fn unperturb(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<NavigationData> {
    check_shapes(a, b)?;
    spd_check(a)?;
    // Solving rather than inverting keeps eps accurate when a is ill-conditioned.
    let b_up = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Convexity("metric a is not positive definite".into()))?
        .solve(b);
    let eps = 1.0 - b.dot(&b_up);
    if eps <= 0.0 {
        return Err(Error::Convexity(format!("|b|_a^2 = {} is not below 1", 1.0 - eps)));
    }
    let h = (a - b * b.transpose()) * eps;
    let w = -b_up / eps;
    Ok(NavigationData { h, w })
}

/// `F(y) = (sqrt(h(W, y)^2 + |y|^2 lambda) - h(W, y)) / lambda`.
pub fn randers_norm(h: &DMatrix<f64>, w: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    check_shapes(h, w)?;
    check_shapes(h, y)?;
    let hs: Vec<f64> = h.transpose().iter().copied().collect();
    navigation_norm_generic(&hs, w.as_slice(), y.as_slice())
}

/// `F(y) = sqrt(a(y, y)) + b(y)`.
pub fn randers_norm_ab(a: &DMatrix<f64>, b: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    check_shapes(a, b)?;
    Ok(y.dot(&(a * y)).try_sqrt("randers norm")? + b.dot(y))
}

/// Inverse fundamental form of the Riemannian part: `a^ij = lambda (h^ij - W^i W^j)`.
pub fn inverse_randers_metric(h: &DMatrix<f64>, w: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_shapes(h, w)?;
    let lambda = convexity_lambda(h, w)?;
    let h_inv = h
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Convexity("metric h is not positive definite".into()))?
        .inverse();
    Ok((h_inv - w * w.transpose()) * lambda)
}

/// `(h(W, y), h(y, y), 1 - h(W, W))`, rejecting winds that are too strong.
fn navigation_terms<T: Real>(h: &[T], w: &[T], y: &[T]) -> Result<(T, T, T)> {
    let n = y.len();
    let mut hwy = T::cst(0.0);
    let mut hww = T::cst(0.0);
    let mut hyy = T::cst(0.0);
    for i in 0..n {
        for j in 0..n {
            let hij = h[i * n + j].clone();
            hwy = hwy + hij.clone() * w[i].clone() * y[j].clone();
            hww = hww + hij.clone() * w[i].clone() * w[j].clone();
            hyy = hyy + hij * y[i].clone() * y[j].clone();
        }
    }
    let lambda = -hww + 1.0;
    if lambda.value() <= 0.0 {
        return Err(Error::Convexity(format!("|W|_h^2 = {} is not below 1", 1.0 - lambda.value())));
    }
    Ok((hwy, hyy, lambda))
}

/// Navigation norm on generic scalars. `h` is row-major `n x n`.
pub fn navigation_norm_generic<T: Real>(h: &[T], w: &[T], y: &[T]) -> Result<T> {
    let (hwy, hyy, lambda) = navigation_terms(h, w, y)?;
    let root = (hwy.square() + hyy * lambda.clone()).try_sqrt("navigation norm")?;
    (root - hwy).try_div(&lambda, "navigation norm")
}

/// Riemannian part `alpha^2 = a(y, y)` of the navigation Randers metric on
/// generic scalars.
pub fn alpha_squared_generic<T: Real>(h: &[T], w: &[T], y: &[T]) -> Result<T> {
    let (hwy, hyy, lambda) = navigation_terms(h, w, y)?;
    let inv = lambda.try_recip("alpha")?;
    Ok(hyy * inv.clone() + hwy.square() * inv.square())
}
