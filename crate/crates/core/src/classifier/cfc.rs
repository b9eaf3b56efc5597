//! Residuals of the Basic and Curvature equations characterizing constant
//! flag curvature Randers metrics `F = sqrt(a(y, y)) + b(y)`.
//!
//! Derivatives of `a` and `b` up to second order are taken with [`Jet2`]
//! arithmetic, so the residuals are limited by rounding only.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::finsler::FinslerMetric;
use crate::numerics::{Jet2, Real};
use crate::spaceforms::riemann_lowered;
use crate::winds::WindSpec;

/// A Randers metric given by its Riemannian part `a` and 1-form `b` as
/// functions of the chart point, on generic scalars.
pub trait RandersField {
    fn dim(&self) -> usize;
    /// `a_ij(x)`, row-major.
    fn a_generic<T: Real>(&self, x: &[T]) -> Result<Vec<T>>;
    /// `b_i(x)`.
    fn b_generic<T: Real>(&self, x: &[T]) -> Result<Vec<T>>;
}

/// The Randers data `(a, b)` of navigation under a wind, with `b`
/// optionally scaled (a scale other than 1 breaks constant curvature and
/// serves as a negative control).
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationField {
    pub wind: WindSpec,
    pub b_scale: f64,
}

impl NavigationField {
    pub fn new(wind: WindSpec) -> Self {
        NavigationField { wind, b_scale: 1.0 }
    }
}

fn lowered<T: Real>(h: &[T], w: &[T]) -> Vec<T> {
    let n = w.len();
    (0..n)
        .map(|i| (0..n).fold(T::cst(0.0), |acc, j| acc + h[i * n + j].clone() * w[j].clone()))
        .collect()
}

fn lambda_of<T: Real>(w: &[T], w_low: &[T]) -> Result<T> {
    let ww = w.iter().zip(w_low).fold(T::cst(0.0), |acc, (a, b)| acc + a.clone() * b.clone());
    let lambda = -ww + 1.0;
    if lambda.value() <= 0.0 {
        return Err(Error::Convexity(format!("|W|_h^2 = {} is not below 1", 1.0 - lambda.value())));
    }
    Ok(lambda)
}

impl RandersField for NavigationField {
    fn dim(&self) -> usize {
        self.wind.dim()
    }

    fn a_generic<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        let h = self.wind.model.metric_generic(x)?;
        let w = self.wind.wind_generic(x);
        let w_low = lowered(&h, &w);
        let inv = lambda_of(&w, &w_low)?.try_recip("navigation")?;
        let inv2 = inv.square();
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(h[i * n + j].clone() * inv.clone() + w_low[i].clone() * w_low[j].clone() * inv2.clone());
            }
        }
        Ok(a)
    }

    fn b_generic<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        let h = self.wind.model.metric_generic(x)?;
        let w = self.wind.wind_generic(x);
        let w_low = lowered(&h, &w);
        let inv = lambda_of(&w, &w_low)?.try_recip("navigation")?;
        Ok(w_low.into_iter().map(|v| -(v * inv.clone()) * self.b_scale).collect())
    }
}

/// The Finsler metric `F = sqrt(a(y, y)) + b(y)` of a Randers field.
#[derive(Debug, Clone, PartialEq)]
pub struct RandersMetric<R> {
    pub field: R,
}

impl<R: RandersField> FinslerMetric for RandersMetric<R> {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn norm_squared<T: Real>(&self, x: &[T], y: &[T]) -> Result<T> {
        let n = self.dim();
        let a = self.field.a_generic(x)?;
        let b = self.field.b_generic(x)?;
        let mut ayy = T::cst(0.0);
        let mut by = T::cst(0.0);
        for i in 0..n {
            by = by + b[i].clone() * y[i].clone();
            for j in 0..n {
                ayy = ayy + a[i * n + j].clone() * y[i].clone() * y[j].clone();
            }
        }
        Ok((ayy.try_sqrt("Randers norm")? + by).square())
    }
}

/// `a`, `b` and their derivatives at one point.
struct Jets {
    n: usize,
    a: DMatrix<f64>,
    /// `da[k][(i, j)] = d_k a_ij`.
    da: Vec<DMatrix<f64>>,
    /// `dda[(i * n + j)][(k, l)] = d_k d_l a_ij`.
    dda: Vec<DMatrix<f64>>,
    b: DVector<f64>,
    /// `db[(i, k)] = d_k b_i`.
    db: DMatrix<f64>,
}

fn jets<R: RandersField>(field: &R, x: &[f64]) -> Result<Jets> {
    let n = field.dim();
    if x.len() != n {
        return Err(Error::Validation(format!("expected a point of R^{n}, got {} entries", x.len())));
    }
    let xs: Vec<Jet2> = x.iter().enumerate().map(|(i, v)| Jet2::variable(*v, i, n)).collect();
    let a_j = field.a_generic(&xs)?;
    let b_j = field.b_generic(&xs)?;
    let a = DMatrix::from_fn(n, n, |i, j| a_j[i * n + j].value());
    let grads: Vec<DVector<f64>> = a_j.iter().map(|e| e.gradient(n)).collect();
    let da: Vec<DMatrix<f64>> = (0..n).map(|k| DMatrix::from_fn(n, n, |i, j| grads[i * n + j][k])).collect();
    let dda: Vec<DMatrix<f64>> = a_j.iter().map(|e| e.hessian(n)).collect();
    let b = DVector::from_fn(n, |i, _| b_j[i].value());
    let b_grads: Vec<DVector<f64>> = b_j.iter().map(|e| e.gradient(n)).collect();
    let db = DMatrix::from_fn(n, n, |i, k| b_grads[i][k]);
    Ok(Jets { n, a, da, dda, b, db })
}

/// Residuals of the characterization at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResiduals {
    pub basic: f64,
    pub curvature: f64,
    pub xi: f64,
    /// `theta_i theta^i`, square root taken.
    pub theta_norm: f64,
    /// `2 div b / (n - |b|^2)` computed from the data.
    pub sigma_numeric: f64,
    pub b_norm_squared: f64,
}

/// Basic and Curvature residuals at `x` for claimed constants `(K, sigma)`.
pub fn cfc_residuals_at<R: RandersField>(field: &R, x: &[f64], k: f64, sigma: f64) -> Result<PointResiduals> {
    let Jets { n, a, da, dda, b, db } = jets(field, x)?;
    let a_inv = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Convexity(format!("a is not positive definite at {x:?}")))?
        .inverse();
    let b_up = &a_inv * &b;
    let b2 = b.dot(&b_up);
    if b2 >= 1.0 {
        return Err(Error::Convexity(format!("|b|_a^2 = {b2} is not below 1 at {x:?}")));
    }
    // d_i b^k = a^kl (d_i b_l - d_i a_lm b^m)
    let db_up = DMatrix::from_fn(n, n, |kk, i| {
        (0..n)
            .map(|l| a_inv[(kk, l)] * (db[(l, i)] - (0..n).map(|m| da[i][(l, m)] * b_up[m]).sum::<f64>()))
            .sum::<f64>()
    });
    let curl = DMatrix::from_fn(n, n, |i, j| db[(i, j)] - db[(j, i)]);
    let theta = curl.transpose() * &b_up;
    let theta_norm = theta.dot(&(&a_inv * &theta)).max(0.0).sqrt();

    let mut div = db_up.trace();
    for kk in 0..n {
        div += 0.5 * b_up[kk] * (&a_inv * &da[kk]).trace();
    }
    let sigma_numeric = 2.0 * div / (n as f64 - b2);

    let mut basic: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut lie = 0.0;
            for kk in 0..n {
                lie += b_up[kk] * da[kk][(i, j)] + a[(kk, j)] * db_up[(kk, i)] + a[(i, kk)] * db_up[(kk, j)];
            }
            let rhs = sigma * (a[(i, j)] - b[i] * b[j]) - (b[i] * theta[j] + theta[i] * b[j]);
            basic = basic.max((lie - rhs).abs());
        }
    }

    // Christoffel symbols of a and their first derivatives.
    let first = |l: usize, i: usize, j: usize| 0.5 * (da[i][(l, j)] + da[j][(l, i)] - da[l][(i, j)]);
    let gamma: Vec<DMatrix<f64>> = (0..n)
        .map(|s| DMatrix::from_fn(n, n, |i, j| (0..n).map(|l| a_inv[(s, l)] * first(l, i, j)).sum::<f64>()))
        .collect();
    let d_inv: Vec<DMatrix<f64>> = (0..n).map(|kk| -(&a_inv * &da[kk] * &a_inv)).collect();
    let dd = |i: usize, j: usize, kk: usize, l: usize| dda[i * n + j][(kk, l)];
    let dgamma = |s: usize, i: usize, j: usize, kk: usize| -> f64 {
        (0..n)
            .map(|l| {
                d_inv[kk][(s, l)] * first(l, i, j)
                    + a_inv[(s, l)] * 0.5 * (dd(l, j, kk, i) + dd(l, i, kk, j) - dd(i, j, kk, l))
            })
            .sum()
    };
    let r = riemann_lowered(&a, &gamma, dgamma);

    let xi = (k - 3.0 * sigma * sigma / 16.0) + (k + sigma * sigma / 16.0) * b2 - 0.25 * theta_norm * theta_norm;
    // m[(h, k)] = curl^t_h curl_tk
    let m = curl.transpose() * &a_inv * &curl;
    let mut curvature: f64 = 0.0;
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    let rhs = xi * (a[(i, j)] * a[(h, kk)] - a[(i, kk)] * a[(h, j)])
                        - 0.25 * a[(i, j)] * m[(h, kk)]
                        + 0.25 * a[(i, kk)] * m[(h, j)]
                        + 0.25 * a[(h, j)] * m[(i, kk)]
                        - 0.25 * a[(h, kk)] * m[(i, j)]
                        - 0.25 * curl[(i, j)] * curl[(h, kk)]
                        + 0.25 * curl[(i, kk)] * curl[(h, j)]
                        + 0.5 * curl[(h, i)] * curl[(j, kk)];
                    curvature = curvature.max((r[((h * n + i) * n + j) * n + kk] - rhs).abs());
                }
            }
        }
    }
    Ok(PointResiduals { basic, curvature, xi, theta_norm, sigma_numeric, b_norm_squared: b2 })
}

/// Worst-case residuals over a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct CfcResiduals {
    /// Largest entry of the Basic equation defect.
    pub basic: f64,
    /// Largest entry of the Curvature equation defect.
    pub curvature: f64,
    /// `xi` at the first point.
    pub xi: f64,
    /// Largest `|theta|_a`.
    pub theta_norm: f64,
    /// Largest `|sigma_numeric - sigma|`.
    pub sigma_defect: f64,
    /// Standard deviation of sampled flag curvatures, when measured.
    pub sampled_flag_std: Option<f64>,
}

/// Evaluates [`cfc_residuals_at`] at every point and keeps the worst values.
pub fn cfc_residuals<R: RandersField>(field: &R, points: &[DVector<f64>], k: f64, sigma: f64) -> Result<CfcResiduals> {
    let mut out = CfcResiduals {
        basic: 0.0,
        curvature: 0.0,
        xi: f64::NAN,
        theta_norm: 0.0,
        sigma_defect: 0.0,
        sampled_flag_std: None,
    };
    for (idx, x) in points.iter().enumerate() {
        let r = cfc_residuals_at(field, x.as_slice(), k, sigma)?;
        if idx == 0 {
            out.xi = r.xi;
        }
        out.basic = out.basic.max(r.basic);
        out.curvature = out.curvature.max(r.curvature);
        out.theta_norm = out.theta_norm.max(r.theta_norm);
        out.sigma_defect = out.sigma_defect.max((r.sigma_numeric - sigma).abs());
    }
    Ok(out)
}

/// `theta_j = b^i curl_ij` of a Randers field at `x`.
pub fn theta_at<R: RandersField>(field: &R, x: &[f64]) -> Result<DVector<f64>> {
    let Jets { n, a, b, db, .. } = jets(field, x)?;
    let a_inv = a
        .cholesky()
        .ok_or_else(|| Error::Convexity(format!("a is not positive definite at {x:?}")))?
        .inverse();
    let b_up = a_inv * b;
    let curl = DMatrix::from_fn(n, n, |i, j| db[(i, j)] - db[(j, i)]);
    Ok(curl.transpose() * b_up)
}

/// `theta` from navigation data: `((|W|^2)_{:j} + sigma W_j) / (1 - |W|^2)`.
pub fn theta_navigation_at(wind: &WindSpec, x: &[f64]) -> Result<DVector<f64>> {
    let n = wind.dim();
    let xs: Vec<Jet2> = x.iter().enumerate().map(|(i, v)| Jet2::variable(*v, i, n)).collect();
    let h = wind.model.metric_generic(&xs)?;
    let w = wind.wind_generic(&xs);
    let w_low = lowered(&h, &w);
    let ww = w.iter().zip(&w_low).fold(Jet2::constant(0.0), |acc, (p, q)| acc + p.clone() * q.clone());
    let lambda = 1.0 - ww.value();
    if lambda <= 0.0 {
        return Err(Error::Convexity(format!("|W|^2 = {} is not below 1 at {x:?}", ww.value())));
    }
    let grad = ww.gradient(n);
    Ok(DVector::from_fn(n, |j, _| (grad[j] + wind.sigma * w_low[j].value()) / lambda))
}
