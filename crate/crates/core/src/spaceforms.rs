//! Constant-curvature background metrics in projective charts.
//!
//! The sphere of curvature `K > 0` and hyperbolic space of curvature `K < 0`
//! are both written in the chart where geodesics are straight lines; the
//! Euclidean model uses the flat metric. With `psi = K/|K|` and
//! `rho = 1 + psi x.x` the metric is
//! `h_ij = (delta_ij / rho - psi x_i x_j / rho^2) / |K|`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dot, fd_jacobian, Real, DEFAULT_FD_STEP};

/// Safety margin keeping points strictly inside the hyperbolic unit ball.
pub const KLEIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sphere,
    Euclidean,
    Klein,
}

/// A space form together with the chart used to describe it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormModel {
    pub kind: ModelKind,
    /// Sectional curvature of the background metric (zero for Euclidean).
    pub curvature: f64,
    pub dim: usize,
    /// `+1` for the eastern hemisphere chart, `-1` for the western one.
    /// Always `+1` outside the sphere model.
    pub hemisphere_sign: i8,
}

impl SpaceFormModel {
    pub fn sphere(curvature: f64, dim: usize) -> Result<Self> {
        Self::new(ModelKind::Sphere, curvature, dim)
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(ModelKind::Euclidean, 0.0, dim)
    }

    pub fn klein(curvature: f64, dim: usize) -> Result<Self> {
        Self::new(ModelKind::Klein, curvature, dim)
    }

    pub fn new(kind: ModelKind, curvature: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Validation(format!("dimension must be at least 2, got {dim}")));
        }
        if !curvature.is_finite() {
            return Err(Error::Validation("curvature must be finite".into()));
        }
        let ok = match kind {
            ModelKind::Sphere => curvature > 0.0,
            ModelKind::Euclidean => curvature == 0.0,
            ModelKind::Klein => curvature < 0.0,
        };
        if !ok {
            return Err(Error::Validation(format!("curvature {curvature} is incompatible with the {kind:?} model")));
        }
        Ok(SpaceFormModel { kind, curvature, dim, hemisphere_sign: 1 })
    }

    /// Same model in the other hemisphere chart (sphere only).
    pub fn with_hemisphere(mut self, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Validation(format!("hemisphere sign must be +1 or -1, got {sign}")));
        }
        if sign == -1 && self.kind != ModelKind::Sphere {
            return Err(Error::Validation("only the sphere has a western chart".into()));
        }
        self.hemisphere_sign = sign;
        Ok(self)
    }

    /// `K / |K|`, or zero for the Euclidean model.
    pub fn psi(&self) -> f64 {
        match self.kind {
            ModelKind::Sphere => 1.0,
            ModelKind::Euclidean => 0.0,
            ModelKind::Klein => -1.0,
        }
    }

    pub fn is_curved(&self) -> bool {
        self.kind != ModelKind::Euclidean
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Validation(format!("point has {} coordinates, model has dimension {}", x.len(), self.dim)));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("point has non-finite coordinates".into()));
        }
        Ok(())
    }

    /// True when `x` lies in the chart (the open unit ball for Klein).
    pub fn in_domain(&self, x: &[f64]) -> bool {
        match self.kind {
            ModelKind::Klein => 1.0 - x.iter().map(|v| v * v).sum::<f64>() > KLEIN_MARGIN,
            _ => true,
        }
    }

    /// `rho = 1 + psi x.x`, rejected when it leaves the chart.
    pub fn rho<T: Real>(&self, x: &[T]) -> Result<T> {
        let r = dot(x, x) * self.psi() + 1.0;
        if self.kind == ModelKind::Klein && r.value() <= KLEIN_MARGIN {
            return Err(Error::domain("klein chart", format!("point with |x|^2 = {} is outside the unit ball", 1.0 - r.value())));
        }
        Ok(r)
    }

    /// Background metric as a row-major `n x n` array of scalars.
    pub fn metric_generic<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.dim;
        if self.kind == ModelKind::Euclidean {
            return Ok((0..n * n).map(|k| T::cst(if k / n == k % n { 1.0 } else { 0.0 })).collect());
        }
        let inv_k = 1.0 / self.curvature.abs();
        let psi = self.psi();
        let rho = self.rho(x)?;
        let inv_rho = rho.try_recip("metric")?;
        let inv_rho2 = inv_rho.square();
        let mut h = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut v = x[i].clone() * x[j].clone() * inv_rho2.clone() * (-psi);
                if i == j {
                    v = v + inv_rho.clone();
                }
                h.push(v * inv_k);
            }
        }
        Ok(h)
    }

    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let h = self.metric_generic(x)?;
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &h))
    }

    /// `h^ij = rho |K| (delta^ij + psi x^i x^j)`.
    pub fn inverse_metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let n = self.dim;
        if self.kind == ModelKind::Euclidean {
            return Ok(DMatrix::identity(n, n));
        }
        let rho = self.rho(x)?;
        let psi = self.psi();
        let k = self.curvature.abs();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            rho * k * (d + psi * x[i] * x[j])
        }))
    }

    /// Christoffel symbols, `gamma[k][(i, j)] = Gamma^k_ij`.
    pub fn christoffel_at(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(x)?;
        let n = self.dim;
        if self.kind == ModelKind::Euclidean {
            return Ok(vec![DMatrix::zeros(n, n); n]);
        }
        let rho = self.rho(x)?;
        let c = -self.psi() / rho;
        Ok((0..n)
            .map(|k| {
                DMatrix::from_fn(n, n, |i, j| {
                    let a = if k == j { x[i] } else { 0.0 };
                    let b = if k == i { x[j] } else { 0.0 };
                    c * (a + b)
                })
            })
            .collect())
    }

    /// `|y|^2_h` from the closed forms of the two curved charts.
    pub fn closed_form_norm_squared(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let k = self.curvature.abs();
        match self.kind {
            ModelKind::Euclidean => Ok(yy),
            ModelKind::Sphere => Ok((yy * (1.0 + xx) - xy * xy) / (k * (1.0 + xx).powi(2))),
            ModelKind::Klein => {
                self.rho(x)?;
                Ok((yy * (1.0 - xx) + xy * xy) / (k * (1.0 - xx).powi(2)))
            }
        }
    }

    /// Largest deviation of the lowered curvature tensor from
    /// `K (h_ij h_hk - h_ik h_hj)`, with the tensor computed by finite
    /// differences of [`Self::christoffel_at`].
    pub fn riemann_residual(&self, x: &[f64]) -> Result<f64> {
        let n = self.dim;
        let h = self.metric_at(x)?;
        let gamma = self.christoffel_at(x)?;
        let flat = |p: &[f64]| -> Result<Vec<f64>> {
            let g = self.christoffel_at(p)?;
            Ok(g.iter().flat_map(|m| m.transpose().iter().copied().collect::<Vec<_>>()).collect())
        };
        let dgamma = fd_jacobian(flat, x, DEFAULT_FD_STEP)?;
        let dg = |s: usize, i: usize, j: usize, k: usize| dgamma[(s * n * n + i * n + j, k)];
        let r = riemann_lowered(&h, &gamma, dg);
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let model = self.curvature * (h[(i, j)] * h[(a, k)] - h[(i, k)] * h[(a, j)]);
                        worst = worst.max((r[((a * n + i) * n + j) * n + k] - model).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Fully lowered curvature tensor `R_hijk`, flattened as `((h n + i) n + j) n + k`,
/// in the convention where a round sphere of curvature `K` gives
/// `R_hijk = K (g_ij g_hk - g_ik g_hj)`.
///
/// `dgamma(s, i, j, k)` is `d Gamma^s_ij / d x^k`.
pub fn riemann_lowered<D>(g: &DMatrix<f64>, gamma: &[DMatrix<f64>], dgamma: D) -> Vec<f64>
where
    D: Fn(usize, usize, usize, usize) -> f64,
{
    let n = g.nrows();
    let mut upper = vec![0.0; n * n * n * n];
    for s in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgamma(s, i, j, k) - dgamma(s, i, k, j);
                    for t in 0..n {
                        v += gamma[s][(k, t)] * gamma[t][(i, j)] - gamma[s][(j, t)] * gamma[t][(i, k)];
                    }
                    upper[((s * n + i) * n + j) * n + k] = v;
                }
            }
        }
    }
    let mut lowered = vec![0.0; n * n * n * n];
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    lowered[((h * n + i) * n + j) * n + k] =
                        (0..n).map(|s| g[(h, s)] * upper[((s * n + i) * n + j) * n + k]).sum();
                }
            }
        }
    }
    lowered
}

/// Quadratic form `v^T m w`.
pub fn bilinear(m: &DMatrix<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    v.dot(&(m * w))
}
