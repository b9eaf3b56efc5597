//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalue tolerance used by every skew and Lorentz decomposition.
pub fn tol_eig(m: &DMatrix<f64>) -> f64 {
    1e-9 * (1.0 + m.norm())
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and the orthogonal matrix of eigenvectors
/// as columns. Accurate to a few ulps of the matrix norm, including for
/// repeated eigenvalues.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::identity(n, n);
    let scale = a.norm_squared();
    for _ in 0..64 {
        let off: f64 = (0..n).flat_map(|p| (0..n).filter(move |q| *q != p).map(move |q| (p, q))).map(|(p, q)| a[(p, q)] * a[(p, q)]).sum();
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Smallest eigenvalue of a symmetric matrix, or an error when the matrix is
/// not symmetric or not positive definite.
pub fn spd_check(m: &DMatrix<f64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Validation(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let asym = (m - m.transpose()).norm();
    if asym > 1e-10 * (1.0 + m.norm()) {
        return Err(Error::Validation(format!("matrix is not symmetric (asymmetry {asym:.3e})")));
    }
    let sym = (m + m.transpose()) * 0.5;
    let min = sym_eigen(&sym).0.min();
    if min > 0.0 {
        Ok(min)
    } else {
        Err(Error::Convexity(format!("matrix is not positive definite (min eigenvalue {min:.3e})")))
    }
}

/// Checks skew-symmetry to `1e-10 * (1 + |M|)`.
pub fn require_skew(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Validation(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    let defect = (m + m.transpose()).norm();
    if defect > 1e-10 * (1.0 + m.norm()) {
        return Err(Error::Validation(format!("{what} is not skew-symmetric (|M + M^T| = {defect:.3e})")));
    }
    Ok(())
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `vectors` inside `R^dim`, as the columns of the returned matrix.
pub fn orthogonal_complement(vectors: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = vectors.nrows();
    let mut proj = DMatrix::identity(dim, dim);
    let mut rank = 0;
    let scale = vectors.amax().max(1e-300);
    // Two passes of modified Gram-Schmidt keep the projector orthogonal to rounding.
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    for col in vectors.column_iter() {
        let mut w = col.into_owned();
        for _ in 0..2 {
            for q in &ortho {
                let c = q.dot(&w);
                w -= q * c;
            }
        }
        let norm = w.norm();
        if norm > 1e-10 * scale {
            ortho.push(w / norm);
        }
    }
    for q in &ortho {
        proj -= q * q.transpose();
        rank += 1;
    }
    top_eigenvectors(&proj, dim - rank)
}

/// Eigenvectors of a symmetric matrix for its `count` largest eigenvalues,
/// ordered by decreasing eigenvalue.
pub fn top_eigenvectors(sym: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen(sym);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    DMatrix::from_fn(sym.nrows(), count, |r, c| vectors[(r, order[c])])
}

/// Inverse square root of a symmetric positive-definite matrix.
pub fn sym_inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eigen(m);
    if values.iter().any(|v| *v <= 0.0) {
        return Err(Error::Degeneracy("Gram matrix is not positive definite".into()));
    }
    let d = DMatrix::from_diagonal(&values.map(|v| 1.0 / v.sqrt()));
    Ok(&vectors * d * vectors.transpose())
}

/// Orthogonal reflection mapping `t` to `(0, ..., 0, |t|)`.
pub fn reflect_to_last_axis(t: &DVector<f64>) -> DMatrix<f64> {
    let k = t.len();
    let mut target = DVector::zeros(k);
    if k == 0 {
        return DMatrix::identity(0, 0);
    }
    target[k - 1] = t.norm();
    let w = t - &target;
    let ww = w.dot(&w);
    if ww <= 1e-300 {
        return DMatrix::identity(k, k);
    }
    DMatrix::identity(k, k) - (&w * w.transpose()) * (2.0 / ww)
}

/// Orthogonal eigen-pairing of a real skew-symmetric matrix.
///
/// Every nonzero invariant plane carries a unit pair `(u, v)` with
/// `Omega u = -a v` and `Omega v = a u`, so that
/// `Omega = sum_k a_k (u_k v_k^T - v_k u_k^T)`.
#[derive(Debug, Clone)]
pub struct SkewPairing {
    /// Plane parameters `a_k > 0`, non-increasing, repeated per plane.
    pub values: Vec<f64>,
    /// One orthonormal pair per plane.
    pub planes: Vec<(DVector<f64>, DVector<f64>)>,
    /// Orthonormal basis of the kernel, as columns.
    pub kernel: DMatrix<f64>,
}

impl SkewPairing {
    /// Orthogonal matrix whose columns are `u_1, v_1, ..., u_m, v_m` followed
    /// by the kernel basis.
    pub fn basis(&self) -> DMatrix<f64> {
        let dim = self.kernel.nrows();
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(dim);
        for (u, v) in &self.planes {
            cols.push(u.clone());
            cols.push(v.clone());
        }
        for c in 0..self.kernel.ncols() {
            cols.push(self.kernel.column(c).into_owned());
        }
        DMatrix::from_columns(&cols)
    }
}

/// Splits a skew matrix into orthogonal invariant planes by repeated
/// deflation: the dominant plane of the restriction to the remaining
/// invariant subspace is extracted until the residual is below `tol`.
pub fn skew_eigen(omega: &DMatrix<f64>, tol: f64) -> Result<SkewPairing> {
    require_skew(omega, "matrix")?;
    let dim = omega.nrows();
    let omega = (omega - omega.transpose()) * 0.5;
    let mut basis = DMatrix::<f64>::identity(dim, dim);
    let mut values = Vec::new();
    let mut planes = Vec::new();
    while basis.ncols() >= 2 {
        let restricted = basis.transpose() * &omega * &basis;
        let gram = restricted.transpose() * &restricted;
        let top = top_eigenvectors(&gram, 1);
        let u = (&basis * top.column(0)).normalize();
        let image = &omega * &u;
        let a = image.norm();
        if a <= tol {
            break;
        }
        let v = -image / a;
        let pu = basis.transpose() * &u;
        let pv = basis.transpose() * &v;
        let d = basis.ncols();
        let keep = DMatrix::identity(d, d) - &pu * pu.transpose() - &pv * pv.transpose();
        basis = &basis * top_eigenvectors(&keep, d - 2);
        values.push(a);
        planes.push((u, v));
    }
    Ok(SkewPairing { values, planes, kernel: basis })
}

/// Block-diagonal `a_1 J + ... + a_m J (+ 0)` of size `dim`, with
/// `J = [[0, 1], [-1, 0]]`.
pub fn j_blocks(values: &[f64], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for (k, a) in values.iter().enumerate() {
        m[(2 * k, 2 * k + 1)] = *a;
        m[(2 * k + 1, 2 * k)] = -*a;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_handles_repeated_eigenvalues() {
        let omega = j_blocks(&[2.0, 2.0, 0.5], 7);
        let m = omega.transpose() * &omega;
        let (vals, vecs) = sym_eigen(&m);
        let res = (&m * &vecs - &vecs * DMatrix::from_diagonal(&vals)).norm();
        assert!(res < 1e-13, "residual {res}");
        assert!((vecs.transpose() * &vecs - DMatrix::identity(7, 7)).norm() < 1e-13);
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(spd_check(&m).is_err());
        assert!((spd_check(&DMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pairing_of_a_rotation_generator() {
        let omega = j_blocks(&[2.0], 3);
        let p = skew_eigen(&omega, 1e-9).unwrap();
        assert_eq!(p.values.len(), 1);
        assert!((p.values[0] - 2.0).abs() < 1e-12);
        assert_eq!(p.kernel.ncols(), 1);
        let (u, v) = &p.planes[0];
        assert!((&omega * u + v * 2.0).norm() < 1e-12);
        assert!((&omega * v - u * 2.0).norm() < 1e-12);
    }

    #[test]
    fn reflection_sends_vector_to_last_axis() {
        let t = DVector::from_vec(vec![1.0, -2.0, 2.0]);
        let r = reflect_to_last_axis(&t);
        let rt = &r * &t;
        assert!(rt[0].abs() < 1e-14 && rt[1].abs() < 1e-14 && (rt[2] - 3.0).abs() < 1e-14);
    }
}
