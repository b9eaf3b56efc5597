//! Central finite differences with one level of Richardson extrapolation.
//!
//! The step along coordinate `i` is `step * (1 + |x_i|)`. Each estimate is
//! formed at `h` and `h/2` and combined as `(4 D(h/2) - D(h)) / 3`, which
//! cancels the leading `h^2` error term.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default relative step for all finite differences in the crate.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FdDerivative {
    Gradient(DVector<f64>),
    Hessian(DMatrix<f64>),
}

impl FdDerivative {
    pub fn gradient(&self) -> Option<&DVector<f64>> {
        match self {
            FdDerivative::Gradient(g) => Some(g),
            FdDerivative::Hessian(_) => None,
        }
    }
    pub fn hessian(&self) -> Option<&DMatrix<f64>> {
        match self {
            FdDerivative::Hessian(h) => Some(h),
            FdDerivative::Gradient(_) => None,
        }
    }
}

/// Gradient or Hessian of a scalar function by central differences.
pub fn central_fd<F>(f: F, point: &[f64], order: FdOrder, step: f64) -> Result<FdDerivative>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let vf = |x: &[f64]| f(x).map(|v| vec![v]);
    match order {
        FdOrder::First => {
            let j = fd_jacobian(vf, point, step)?;
            Ok(FdDerivative::Gradient(j.row(0).transpose()))
        }
        FdOrder::Second => {
            let mut h = fd_hessians(vf, point, step, |_, _| true)?;
            Ok(FdDerivative::Hessian(h.remove(0)))
        }
    }
}

fn eval_at<F>(f: &F, x: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    f(x).map_err(|e| Error::domain("central_fd", format!("stencil point {x:?}: {e}")))
}

fn steps(point: &[f64], step: f64) -> Vec<f64> {
    point.iter().map(|x| step * (1.0 + x.abs())).collect()
}

/// Jacobian `J[(i, j)] = d f_i / d x_j` of a vector function.
pub fn fd_jacobian<F>(f: F, point: &[f64], step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let k = point.len();
    let hs = steps(point, step);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut x = point.to_vec();
    for j in 0..k {
        let diff = |h: f64, x: &mut Vec<f64>| -> Result<Vec<f64>> {
            x[j] = point[j] + h;
            let p = eval_at(&f, x)?;
            x[j] = point[j] - h;
            let m = eval_at(&f, x)?;
            x[j] = point[j];
            Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let coarse = diff(hs[j], &mut x)?;
        let fine = diff(0.5 * hs[j], &mut x)?;
        cols.push(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect());
    }
    let m = cols.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(m, k, |i, j| cols[j][i]))
}

/// Hessians of every component of a vector function, one `k x k` matrix per
/// component. Only entries with `wanted(i, j)` (and their mirrors) are filled.
pub fn fd_hessians<F, W>(f: F, point: &[f64], step: f64, wanted: W) -> Result<Vec<DMatrix<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    W: Fn(usize, usize) -> bool,
{
    let k = point.len();
    let hs = steps(point, step);
    let center = eval_at(&f, point)?;
    let m = center.len();
    let mut out = vec![DMatrix::zeros(k, k); m];
    let mut x = point.to_vec();
    for i in 0..k {
        for j in i..k {
            if !(wanted(i, j) || wanted(j, i)) {
                continue;
            }
            let estimate = |scale: f64, x: &mut Vec<f64>| -> Result<Vec<f64>> {
                let (hi, hj) = (hs[i] * scale, hs[j] * scale);
                if i == j {
                    x[i] = point[i] + hi;
                    let p = eval_at(&f, x)?;
                    x[i] = point[i] - hi;
                    let q = eval_at(&f, x)?;
                    x[i] = point[i];
                    Ok((0..m).map(|c| (p[c] - 2.0 * center[c] + q[c]) / (hi * hi)).collect())
                } else {
                    let mut corner = |si: f64, sj: f64| -> Result<Vec<f64>> {
                        x[i] = point[i] + si * hi;
                        x[j] = point[j] + sj * hj;
                        let v = eval_at(&f, x);
                        x[i] = point[i];
                        x[j] = point[j];
                        v
                    };
                    let pp = corner(1.0, 1.0)?;
                    let pm = corner(1.0, -1.0)?;
                    let mp = corner(-1.0, 1.0)?;
                    let mm = corner(-1.0, -1.0)?;
                    Ok((0..m).map(|c| (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * hi * hj)).collect())
                }
            };
            let coarse = estimate(1.0, &mut x)?;
            let fine = estimate(0.5, &mut x)?;
            for c in 0..m {
                let v = (4.0 * fine[c] - coarse[c]) / 3.0;
                out[c][(i, j)] = v;
                out[c][(j, i)] = v;
            }
        }
    }
    Ok(out)
}
