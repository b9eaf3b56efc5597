//! Infinitesimal homotheties of the space forms.
//!
//! A wind is given by a scalar `sigma`, a skew matrix `Q` and a vector `C`:
//!
//! * Euclidean: `W = -sigma x / 2 + Q x + C`
//! * sphere:    `W = Q x + C + (x.C) x`
//! * Klein:     `W = Q x + C - (x.C) x`
//!
//! Curved models only admit `sigma = 0`. On the western sphere chart the
//! eastern data `(Q, C)` is used with `C` replaced by `-C`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::linalg::require_skew;
use crate::numerics::{jet2_eval, Jet2, Real};
use crate::spaceforms::{ModelKind, SpaceFormModel};

/// A homothetic vector field on a space form.
#[derive(Debug, Clone, PartialEq)]
pub struct WindSpec {
    pub model: SpaceFormModel,
    pub sigma: f64,
    pub q: DMatrix<f64>,
    pub c: DVector<f64>,
}

/// `Q x` for a float matrix and a slice of scalars.
pub(crate) fn mat_vec<T: Real>(q: &DMatrix<f64>, x: &[T]) -> Vec<T> {
    (0..q.nrows())
        .map(|i| x.iter().enumerate().fold(T::cst(0.0), |acc, (j, xj)| acc + xj.clone() * q[(i, j)]))
        .collect()
}

impl WindSpec {
    pub fn new(model: SpaceFormModel, sigma: f64, q: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        let n = model.dim;
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::Validation(format!("Q must be {n}x{n}, got {}x{}", q.nrows(), q.ncols())));
        }
        if c.len() != n {
            return Err(Error::Validation(format!("C must have {n} entries, got {}", c.len())));
        }
        if !sigma.is_finite() || q.iter().chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Validation("wind data must be finite".into()));
        }
        require_skew(&q, "Q")?;
        if model.is_curved() && sigma != 0.0 {
            return Err(Error::Validation(format!(
                "sigma = {sigma} is only allowed on the Euclidean model; curved space forms have no proper homotheties"
            )));
        }
        Ok(WindSpec { model, sigma, q, c })
    }

    /// Builds a spec without any validation. Intended for negative controls
    /// that need a field which is deliberately not a homothety.
    pub fn from_parts_unchecked(model: SpaceFormModel, sigma: f64, q: DMatrix<f64>, c: DVector<f64>) -> Self {
        WindSpec { model, sigma, q, c }
    }

    /// The zero wind on `model`.
    pub fn zero(model: SpaceFormModel) -> Self {
        let n = model.dim;
        WindSpec { model, sigma: 0.0, q: DMatrix::zeros(n, n), c: DVector::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.model.dim
    }

    /// `C` as seen in the current chart.
    pub fn chart_c(&self) -> DVector<f64> {
        &self.c * f64::from(self.model.hemisphere_sign)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.sigma.abs() <= tol && self.q.amax() <= tol && self.c.amax() <= tol
    }

    /// Contravariant components of the wind.
    pub fn wind_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let c = self.chart_c();
        let qx = mat_vec(&self.q, x);
        match self.model.kind {
            ModelKind::Euclidean => (0..x.len())
                .map(|i| qx[i].clone() + x[i].clone() * (-0.5 * self.sigma) + c[i])
                .collect(),
            ModelKind::Sphere | ModelKind::Klein => {
                let sign = if self.model.kind == ModelKind::Sphere { 1.0 } else { -1.0 };
                let xc = x.iter().enumerate().fold(T::cst(0.0), |acc, (i, xi)| acc + xi.clone() * c[i]);
                (0..x.len()).map(|i| qx[i].clone() + c[i] + x[i].clone() * xc.clone() * sign).collect()
            }
        }
    }

    /// Covariant components `W_i = h_ij W^j`; for curved models
    /// `W_i = (Q x + C)_i / (rho |K|)`.
    pub fn covariant_generic<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        match self.model.kind {
            ModelKind::Euclidean => Ok(self.wind_generic(x)),
            _ => {
                let c = self.chart_c();
                let scale = self.model.rho(x)?.try_recip("covariant wind")? * (1.0 / self.model.curvature.abs());
                Ok(mat_vec(&self.q, x).into_iter().enumerate().map(|(i, v)| (v + c[i]) * scale.clone()).collect())
            }
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Validation(format!("point has {} coordinates, expected {}", x.len(), self.dim())));
        }
        if !self.model.in_domain(x) {
            return Err(Error::domain("wind", format!("point {x:?} is outside the chart")));
        }
        Ok(())
    }

    pub fn wind_at(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        Ok(DVector::from_vec(self.wind_generic(x)))
    }

    pub fn covariant_wind_at(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        Ok(DVector::from_vec(self.covariant_generic(x)?))
    }

    /// Exact partials `D[(i, j)] = d W_i / d x^j` of the covariant wind.
    pub fn covariant_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let n = self.dim();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            let jet = jet2_eval(|v: &[Jet2]| Ok(self.covariant_generic(v)?.swap_remove(i)), x)?;
            d.set_row(i, &jet.gradient(n).transpose());
        }
        Ok(d)
    }

    /// `curl[(i, j)] = d_j W_i - d_i W_j`.
    pub fn curl_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.covariant_jacobian(x)?;
        Ok(&d - d.transpose())
    }

    /// Largest entry of `W_{i:j} + W_{j:i} + sigma h_ij`.
    pub fn homothety_residual(&self, x: &[f64]) -> Result<f64> {
        let n = self.dim();
        let d = self.covariant_jacobian(x)?;
        let w = self.covariant_wind_at(x)?;
        let gamma = self.model.christoffel_at(x)?;
        let h = self.model.metric_at(x)?;
        let mut cov = d.clone();
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] -= (0..n).map(|k| gamma[k][(i, j)] * w[k]).sum::<f64>();
            }
        }
        let lie = &cov + cov.transpose() + h * self.sigma;
        Ok(lie.amax())
    }

    /// `h(W, W)` at `x`.
    pub fn norm_squared_at(&self, x: &[f64]) -> Result<f64> {
        let w = self.wind_at(x)?;
        let wl = self.covariant_wind_at(x)?;
        Ok(w.dot(&wl))
    }

    /// `1 - |W|^2` from the closed-form expressions of each model.
    pub fn convexity_margin_closed_form(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let c = self.chart_c();
        let xv = DVector::from_column_slice(x);
        let qxc = &self.q * &xv + &c;
        let xc = xv.dot(&c);
        let xx = xv.dot(&xv);
        let w2 = match self.model.kind {
            ModelKind::Euclidean => qxc.dot(&qxc) + self.sigma * xv.dot(&(&xv * (0.25 * self.sigma) - &c)),
            ModelKind::Sphere => (qxc.dot(&qxc) + xc * xc) / (self.model.curvature * (1.0 + xx)),
            ModelKind::Klein => (qxc.dot(&qxc) - xc * xc) / (self.model.curvature.abs() * (1.0 - xx)),
        };
        Ok(1.0 - w2)
    }

    /// `1 - h(W, W)`, cross-checked against the closed form. Positive exactly
    /// where the navigation metric is strongly convex.
    pub fn convexity_margin(&self, x: &[f64]) -> Result<f64> {
        let via_metric = 1.0 - self.norm_squared_at(x)?;
        let closed = self.convexity_margin_closed_form(x)?;
        let scale = 1.0 + (1.0 - via_metric).abs();
        if (via_metric - closed).abs() > 1e-10 * scale {
            return Err(Error::Degeneracy(format!(
                "convexity routes disagree at {x:?}: {via_metric} vs {closed}"
            )));
        }
        Ok(via_metric)
    }

    /// The wind as an element of the isometry (or similarity) algebra acting
    /// on row vectors:
    ///
    /// * sphere: `[[0, C^T], [-C, -Q]]` in `o(n+1)`
    /// * Klein: `[[0, C^T], [C, -Q]]` in `o(1, n)`
    /// * Euclidean: `[[-sigma I / 2 - Q, 0], [C^T, 0]]`
    ///
    /// Always built from the eastern data.
    pub fn algebra_element(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        match self.model.kind {
            ModelKind::Euclidean => {
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = -self.q[(i, j)] - if i == j { 0.5 * self.sigma } else { 0.0 };
                    }
                    m[(n, i)] = self.c[i];
                }
            }
            ModelKind::Sphere | ModelKind::Klein => {
                let lower = if self.model.kind == ModelKind::Sphere { -1.0 } else { 1.0 };
                for i in 0..n {
                    m[(0, i + 1)] = self.c[i];
                    m[(i + 1, 0)] = lower * self.c[i];
                    for j in 0..n {
                        m[(i + 1, j + 1)] = -self.q[(i, j)];
                    }
                }
            }
        }
        m
    }

    /// Inverse of [`Self::algebra_element`].
    pub fn from_algebra_element(model: SpaceFormModel, omega: &DMatrix<f64>) -> Result<Self> {
        let n = model.dim;
        if omega.nrows() != n + 1 || omega.ncols() != n + 1 {
            return Err(Error::Validation(format!("algebra element must be {0}x{0}", n + 1)));
        }
        let (sigma, q, c) = match model.kind {
            ModelKind::Euclidean => {
                let block = omega.view((0, 0), (n, n)).into_owned();
                let sigma = -2.0 * block.trace() / n as f64;
                let q = -(block + DMatrix::identity(n, n) * (0.5 * sigma));
                let c = omega.row(n).columns(0, n).transpose();
                (sigma, q, c)
            }
            _ => {
                let q = -omega.view((1, 1), (n, n)).into_owned();
                let c = omega.row(0).columns(1, n).transpose();
                (0.0, q, c)
            }
        };
        WindSpec::new(model, sigma, q, c)
    }

    /// `|W|^2` at a point `p` of the round unit sphere `S^n`, computed through
    /// the embedding as `|p^T Omega|^2 / K`. Valid on the equator, where no
    /// chart of the eastern or western hemisphere reaches.
    pub fn sphere_norm_squared_embedded(&self, p: &[f64]) -> Result<f64> {
        if self.model.kind != ModelKind::Sphere {
            return Err(Error::Validation("embedded norm is only defined for the sphere model".into()));
        }
        if p.len() != self.dim() + 1 {
            return Err(Error::Validation(format!("expected a point of R^{}", self.dim() + 1)));
        }
        let pv = DVector::from_column_slice(p);
        let norm = pv.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("point has norm {norm}, expected 1")));
        }
        let image = self.algebra_element().transpose() * pv;
        Ok(image.dot(&image) / self.model.curvature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_tank() -> WindSpec {
        let model = SpaceFormModel::euclidean(3).unwrap();
        let mut q = DMatrix::zeros(3, 3);
        q[(0, 1)] = 1.0;
        q[(1, 0)] = -1.0;
        WindSpec::new(model, 0.0, q, DVector::zeros(3)).unwrap()
    }

    #[test]
    fn curved_models_reject_sigma() {
        let m = SpaceFormModel::sphere(1.0, 2).unwrap();
        let r = WindSpec::new(m, 0.1, DMatrix::zeros(2, 2), DVector::zeros(2));
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn non_skew_q_is_rejected() {
        let m = SpaceFormModel::euclidean(2).unwrap();
        let q = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(WindSpec::new(m, 0.0, q, DVector::zeros(2)).is_err());
    }

    #[test]
    fn rotation_tank_wind_and_curl() {
        let w = rotation_tank();
        let v = w.wind_at(&[0.3, 0.2, 0.1]).unwrap();
        assert!((v - DVector::from_vec(vec![0.2, -0.3, 0.0])).norm() < 1e-15);
        let curl = w.curl_at(&[0.3, 0.2, 0.1]).unwrap();
        assert!((curl[(0, 1)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn algebra_element_round_trip() {
        let w = rotation_tank();
        let back = WindSpec::from_algebra_element(w.model, &w.algebra_element()).unwrap();
        assert!((back.q - &w.q).norm() < 1e-15 && (back.c - &w.c).norm() < 1e-15);
    }
}
