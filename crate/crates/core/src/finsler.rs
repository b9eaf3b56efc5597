//! Finsler machinery: fundamental tensor, geodesic spray, spray curvature and
//! flag curvature for any metric expressible on generic scalars.
//!
//! Second derivatives of `F^2` come from [`Jet2`] arithmetic and are exact up
//! to rounding. Derivatives of the spray itself are taken by central finite
//! differences.
//!
//! Spray convention: `G^i = (g^il / 4) [ (F^2)_{x^k y^l} y^k - (F^2)_{x^l} ]`,
//! so geodesics solve `x'' + 2 G(x, x') = 0` and a Riemannian metric has
//! `G^i = gamma^i_jk y^j y^k / 2`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::navigation::{alpha_squared_generic, navigation_norm_generic};
use crate::numerics::{fd_hessians, fd_jacobian, jet2_eval, Jet2, Real};
use crate::spaceforms::SpaceFormModel;
use crate::winds::WindSpec;

/// A Finsler metric on an open subset of `R^n`, evaluated as `F^2`.
pub trait FinslerMetric {
    fn dim(&self) -> usize;

    /// `F(x, y)^2` on generic scalars.
    fn norm_squared<T: Real>(&self, x: &[T], y: &[T]) -> Result<T>;

    /// `F(x, y)`.
    fn norm(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.norm_squared(x, y)?.try_sqrt("Finsler norm")
    }
}

/// The background Riemannian metric of a space form.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundMetric {
    pub model: SpaceFormModel,
}

impl FinslerMetric for BackgroundMetric {
    fn dim(&self) -> usize {
        self.model.dim
    }
    fn norm_squared<T: Real>(&self, x: &[T], y: &[T]) -> Result<T> {
        let h = self.model.metric_generic(x)?;
        let n = y.len();
        let mut s = T::cst(0.0);
        for i in 0..n {
            for j in 0..n {
                s = s + h[i * n + j].clone() * y[i].clone() * y[j].clone();
            }
        }
        Ok(s)
    }
}

/// The Randers metric solving Zermelo's problem for a space form and a wind.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationMetric {
    pub wind: WindSpec,
}

impl FinslerMetric for NavigationMetric {
    fn dim(&self) -> usize {
        self.wind.dim()
    }
    fn norm_squared<T: Real>(&self, x: &[T], y: &[T]) -> Result<T> {
        let h = self.wind.model.metric_generic(x)?;
        let w = self.wind.wind_generic(x);
        Ok(navigation_norm_generic(&h, &w, y)?.square())
    }
}

/// The Riemannian part `alpha` of a [`NavigationMetric`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMetric {
    pub wind: WindSpec,
}

impl FinslerMetric for AlphaMetric {
    fn dim(&self) -> usize {
        self.wind.dim()
    }
    fn norm_squared<T: Real>(&self, x: &[T], y: &[T]) -> Result<T> {
        let h = self.wind.model.metric_generic(x)?;
        let w = self.wind.wind_generic(x);
        alpha_squared_generic(&h, &w, y)
    }
}

fn check_vectors(n: usize, x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != n || y.len() != n {
        return Err(Error::Validation(format!("expected {n}-vectors, got {} and {}", x.len(), y.len())));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Err(Error::Validation("the zero vector has no fundamental tensor".into()));
    }
    Ok(())
}

/// `g_ij = (F^2)_{y^i y^j} / 2`.
pub fn fundamental_tensor<F: FinslerMetric>(f: &F, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    let n = f.dim();
    check_vectors(n, x, y)?;
    let xs: Vec<Jet2> = x.iter().map(|v| Jet2::constant(*v)).collect();
    let jet = jet2_eval(|ys: &[Jet2]| f.norm_squared(&xs, ys), y)?;
    Ok(jet.hessian(n) * 0.5)
}

/// Spray coefficients together with the fundamental tensor at `(x, y)`.
pub fn spray_and_tensor<F: FinslerMetric>(f: &F, x: &[f64], y: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = f.dim();
    check_vectors(n, x, y)?;
    let z: Vec<f64> = x.iter().chain(y).copied().collect();
    let jet = jet2_eval(|v: &[Jet2]| f.norm_squared(&v[..n], &v[n..]), &z)?;
    let grad = jet.gradient(2 * n);
    let hess = jet.hessian(2 * n);
    let g = hess.view((n, n), (n, n)) * 0.5;
    let rhs = DVector::from_fn(n, |l, _| {
        (0..n).map(|k| hess[(k, n + l)] * y[k]).sum::<f64>() - grad[l]
    });
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Convexity(format!("fundamental tensor is not positive definite at x = {x:?}")))?;
    Ok((chol.solve(&rhs) * 0.25, g))
}

/// Geodesic spray coefficients `G^i(x, y)`.
pub fn spray_coefficients<F: FinslerMetric>(f: &F, x: &[f64], y: &[f64]) -> Result<DVector<f64>> {
    spray_and_tensor(f, x, y).map(|(g, _)| g)
}

/// Spray curvature
/// `K^i_j = 2 G^i_{x^j} - y^s G^i_{x^s y^j} + 2 G^s G^i_{y^s y^j} - G^i_{y^s} G^s_{y^j}`.
pub fn spray_curvature<F: FinslerMetric>(f: &F, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    let n = f.dim();
    check_vectors(n, x, y)?;
    let z: Vec<f64> = x.iter().chain(y).copied().collect();
    let spray = |p: &[f64]| -> Result<Vec<f64>> {
        Ok(spray_coefficients(f, &p[..n], &p[n..])?.as_slice().to_vec())
    };
    let g0 = spray(&z)?;
    let jac = fd_jacobian(spray, &z, SPRAY_FD_STEP)?;
    let hess = fd_hessians(spray, &z, SPRAY_FD_STEP, |a, b| a >= n || b >= n)?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut k = 2.0 * jac[(i, j)];
        for s in 0..n {
            k -= y[s] * hess[i][(s, n + j)];
            k += 2.0 * g0[s] * hess[i][(n + s, n + j)];
            k -= jac[(i, n + s)] * jac[(s, n + j)];
        }
        k
    }))
}

/// Relative step for differentiating the spray. Second differences lose
/// about `eps / h^2` to rounding, so this is larger than the crate default.
pub const SPRAY_FD_STEP: f64 = 5e-4;

/// Relative Gram threshold below which a flag counts as degenerate.
pub const FLAG_GRAM_TOL: f64 = 1e-10;

/// Flag curvature `K(x, y, V) = g(V, K V) / (g(y, y) g(V, V) - g(y, V)^2)`
/// with `g` taken at `(x, y)`. Positive on round spheres.
pub fn flag_curvature<F: FinslerMetric>(f: &F, x: &[f64], y: &[f64], v: &[f64]) -> Result<f64> {
    let n = f.dim();
    check_vectors(n, x, y)?;
    if v.len() != n {
        return Err(Error::Validation(format!("transverse edge has {} entries, expected {n}", v.len())));
    }
    let g = fundamental_tensor(f, x, y)?;
    let yv = DVector::from_column_slice(y);
    let vv = DVector::from_column_slice(v);
    let gyy = yv.dot(&(&g * &yv));
    let gvv = vv.dot(&(&g * &vv));
    let gyv = yv.dot(&(&g * &vv));
    let gram = gyy * gvv - gyv * gyv;
    if gram <= FLAG_GRAM_TOL * gyy * gvv {
        return Err(Error::DegenerateFlag(format!(
            "Gram determinant {gram:.3e} below {FLAG_GRAM_TOL:.0e} * g(y,y) g(V,V)"
        )));
    }
    let k = spray_curvature(f, x, y)?;
    Ok(vv.dot(&(&g * (k * &vv))) / gram)
}

/// Correction `zeta` relating the sprays of `alpha` and of the background
/// metric: `G_alpha = G_h + zeta`.
pub fn zeta_at(wind: &WindSpec, x: &[f64], y: &[f64]) -> Result<DVector<f64>> {
    let n = wind.dim();
    check_vectors(n, x, y)?;
    let model = &wind.model;
    let h = model.metric_at(x)?;
    let h_inv = model.inverse_metric_at(x)?;
    let w_up = wind.wind_at(x)?;
    let w_low = wind.covariant_wind_at(x)?;
    let curl = wind.curl_at(x)?;
    let yv = DVector::from_column_slice(y);
    let lambda = 1.0 - w_up.dot(&w_low);
    if lambda <= 0.0 {
        return Err(Error::Convexity(format!("|W|^2 = {} is not below 1", 1.0 - lambda)));
    }
    let t_low = curl.transpose() * &w_up;
    let t_up = &h_inv * &t_low;
    let c_up0 = &h_inv * (&curl * &yv);
    let w0 = w_low.dot(&yv);
    let t0 = t_low.dot(&yv);
    let h00 = yv.dot(&(&h * &yv));
    let s = wind.sigma;
    Ok(&yv * ((t0 - s * w0) / (2.0 * lambda))
        - t_up * (h00 / (4.0 * lambda) + w0 * w0 / (2.0 * lambda * lambda))
        + c_up0 * (w0 / (2.0 * lambda)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_half_wind_fundamental_tensor_is_spd() {
        let model = SpaceFormModel::euclidean(2).unwrap();
        let wind = WindSpec::new(model, 0.0, DMatrix::zeros(2, 2), DVector::from_vec(vec![0.5, 0.0])).unwrap();
        let f = NavigationMetric { wind };
        let g = fundamental_tensor(&f, &[0.1, 0.2], &[0.3, -1.0]).unwrap();
        assert!(crate::numerics::spd_check(&g).unwrap() > 0.0);
        assert!((f.norm(&[0.0, 0.0], &[1.0, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn parallel_flag_is_degenerate() {
        let model = SpaceFormModel::sphere(1.0, 2).unwrap();
        let f = BackgroundMetric { model };
        let r = flag_curvature(&f, &[0.1, 0.0], &[1.0, 0.0], &[2.0, 0.0]);
        assert!(matches!(r, Err(Error::DegenerateFlag(_))));
    }
}
