use nalgebra::{DMatrix, DVector};

use super::{padded, Branch, BlockNormalForm, Family, Subtype};
use crate::error::{Error, Result};
use crate::numerics::linalg::{reflect_to_last_axis, require_skew};
use crate::numerics::{skew_eigen, tol_eig};

/// Affine group element `[[A, 0], [b, 1]]`.
fn affine(a: &DMatrix<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut g = DMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n, n)).copy_from(a);
    g.view_mut((n, 0), (1, n)).copy_from(&b.transpose());
    g[(n, n)] = 1.0;
    g
}

/// Splits `[[-sigma I / 2 - Q, 0], [C^T, 0]]` into `(sigma, Q, C)`.
fn split(omega: &DMatrix<f64>) -> Result<(f64, DMatrix<f64>, DVector<f64>)> {
    let l = omega.nrows();
    if l < 3 || !omega.is_square() {
        return Err(Error::Validation(format!("Euclidean algebra element must be square of size >= 3, got {}x{}", omega.nrows(), omega.ncols())));
    }
    let n = l - 1;
    let scale = 1e-10 * (1.0 + omega.norm());
    if omega.view((0, n), (l, 1)).norm() > scale {
        return Err(Error::Validation("last column of a Euclidean algebra element must vanish".into()));
    }
    let block = omega.view((0, 0), (n, n)).into_owned();
    let sigma = -2.0 * block.trace() / n as f64;
    let q = -(block + DMatrix::identity(n, n) * (0.5 * sigma));
    require_skew(&q, "rotational part")?;
    let c = DVector::from_fn(n, |i, _| omega[(n, i)]);
    Ok((sigma, (&q - q.transpose()) * 0.5, c))
}

/// Normal form of an element of the similarity algebra of `R^n` under the
/// Euclidean group.
///
/// * `sigma = 0`: `-Q` becomes `rho_1 J + ... + rho_h J + 0` and `C` becomes
///   `(0, ..., 0, xi)` with `xi = 0` exactly when `C` lies in the range of
///   `Q`. For odd `n` the parameters are `(xi, rho_1, ...)`; for even `n`
///   they are `(rho_1, ...)` when `xi = 0` and `(xi, rho_1, ...)` otherwise.
/// * `sigma != 0`: a translation removes `C` entirely and the parameters are
///   those of `-Q`.
pub fn euclidean_normal_form(omega: &DMatrix<f64>) -> Result<BlockNormalForm> {
    let (sigma, q, c) = split(omega)?;
    let n = q.nrows();
    let tol = tol_eig(omega);
    let pairing = skew_eigen(&(-&q), tol)?;
    let rot = pairing.basis().transpose();
    let rho = &pairing.values;
    let h = rho.len();

    if sigma.abs() > tol {
        let shifted = &q - DMatrix::identity(n, n) * (0.5 * sigma);
        let b = -shifted
            .lu()
            .solve(&c)
            .ok_or_else(|| Error::Degeneracy("Q - sigma/2 is singular".into()))?;
        return Ok(BlockNormalForm {
            family: Family::Euclidean,
            subtype: Subtype::FlatHomothety,
            a: padded(rho, n / 2),
            extra: 0.0,
            sigma,
            branch: None,
            conjugator: affine(&rot, &b),
        });
    }

    let rc = &rot * &c;
    let tail = rc.rows(2 * h, n - 2 * h).into_owned();
    let mut rot2 = DMatrix::identity(n, n);
    rot2.view_mut((2 * h, 2 * h), (n - 2 * h, n - 2 * h)).copy_from(&reflect_to_last_axis(&tail));
    let xi = tail.norm();
    let mut shift = DVector::zeros(n);
    for (k, r) in rho.iter().enumerate() {
        let (d0, d1) = (rc[2 * k], rc[2 * k + 1]);
        // -J D / rho with J = [[0, 1], [-1, 0]].
        shift[2 * k] = -d1 / r;
        shift[2 * k + 1] = d0 / r;
    }
    let g = affine(&DMatrix::identity(n, n), &shift) * affine(&(rot2 * rot), &DVector::zeros(n));

    let xi = if xi <= tol { 0.0 } else { xi };
    let (a, branch) = if n % 2 == 1 {
        let mut a = vec![xi];
        a.extend(padded(rho, n / 2));
        (a, None)
    } else if xi == 0.0 {
        (padded(rho, n / 2), Some(Branch::Rotational))
    } else {
        let mut a = vec![xi];
        a.extend(padded(rho, n / 2 - 1));
        (a, Some(Branch::Translational))
    };
    Ok(BlockNormalForm {
        family: Family::Euclidean,
        subtype: Subtype::FlatKilling,
        a,
        extra: xi,
        sigma: 0.0,
        branch,
        conjugator: g,
    })
}
