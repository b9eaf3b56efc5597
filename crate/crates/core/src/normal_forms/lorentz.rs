//! Normal forms in `o(1, n)`, the algebra of the hyperboloid model.
//!
//! Elements are written as `[[0, C^T], [C, -Q]]` with `Q` skew. A spatial
//! rotation first brings `Q` to blocks `q_k J` and the part of `C` outside
//! the range of `Q` to `(0, ..., 0, xi)`; with `D_k` the components of `C` in
//! the `k`-th plane and `s = sum |D_k|^2 / q_k^2` the three types are:
//!
//! * `S` (real eigenvalue) when `xi > 0` or `s > 1`,
//! * `T` (null nilpotent part) when `xi = 0` and `s = 1`,
//! * `J` (timelike fixed vector) when `xi = 0` and `s < 1`.

use nalgebra::{DMatrix, DVector};

use super::{padded, BlockNormalForm, Family, Subtype};
use crate::error::{Error, Result};
use crate::numerics::linalg::{orthogonal_complement, reflect_to_last_axis, require_skew, sym_inv_sqrt};
use crate::numerics::{skew_eigen, tol_eig};

/// `E = diag(-1, 1, ..., 1)` of size `l`.
pub fn minkowski_form(l: usize) -> DMatrix<f64> {
    let mut e = DMatrix::identity(l, l);
    e[(0, 0)] = -1.0;
    e
}

fn lorentz_dot(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    -u[0] * v[0] + u.rows(1, u.len() - 1).dot(&v.rows(1, v.len() - 1))
}

/// Conjugacy type of an element of `o(1, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LorentzType {
    J,
    S,
    T,
}

/// Data of the rotated frame in which the type is decided.
struct Simplified {
    /// Spatial rotation `1 + R` taking `Omega` to the simplified frame.
    frame: DMatrix<f64>,
    /// `Omega` in the simplified frame.
    omega: DMatrix<f64>,
    q: Vec<f64>,
    d: Vec<(f64, f64)>,
    xi: f64,
    s: f64,
    tol: f64,
}

fn simplify(omega: &DMatrix<f64>) -> Result<Simplified> {
    let l = omega.nrows();
    if l < 3 || !omega.is_square() {
        return Err(Error::Validation(format!(
            "Lorentz algebra element must be square of size >= 3, got {}x{}",
            omega.nrows(),
            omega.ncols()
        )));
    }
    let e = minkowski_form(l);
    let defect = (omega.transpose() + &e * omega * &e).norm();
    if defect > 1e-10 * (1.0 + omega.norm()) {
        return Err(Error::Validation(format!("matrix is not in o(1,n): |Omega^T + E Omega E| = {defect:.3e}")));
    }
    let n = l - 1;
    let tol = tol_eig(omega);
    let q_mat = -omega.view((1, 1), (n, n)).into_owned();
    require_skew(&q_mat, "spatial block")?;
    let c = DVector::from_fn(n, |i, _| 0.5 * (omega[(i + 1, 0)] + omega[(0, i + 1)]));
    let pairing = skew_eigen(&q_mat, tol)?;
    let rot = pairing.basis().transpose();
    let h = pairing.values.len();
    let rc = &rot * &c;
    let tail = rc.rows(2 * h, n - 2 * h).into_owned();
    let mut rot2 = DMatrix::identity(n, n);
    rot2.view_mut((2 * h, 2 * h), (n - 2 * h, n - 2 * h)).copy_from(&reflect_to_last_axis(&tail));
    let mut frame = DMatrix::identity(l, l);
    frame.view_mut((1, 1), (n, n)).copy_from(&(rot2 * rot));
    let omega_s = &frame * omega * frame.transpose();
    let d: Vec<(f64, f64)> = (0..h).map(|k| (rc[2 * k], rc[2 * k + 1])).collect();
    let s = pairing
        .values
        .iter()
        .zip(&d)
        .map(|(q, (d0, d1))| (d0 * d0 + d1 * d1) / (q * q))
        .sum();
    Ok(Simplified { frame, omega: omega_s, q: pairing.values, d, xi: tail.norm(), s, tol })
}

/// Margin factor: decisions closer than `tol` to a threshold are taken as
/// exact, decisions further than `GRAY * tol` are taken as strict, and the
/// band in between is reported as degenerate.
const GRAY: f64 = 1e3;

fn decide(sim: &Simplified) -> Result<LorentzType> {
    let tol = sim.tol;
    if sim.xi > GRAY * tol {
        return Ok(LorentzType::S);
    }
    if sim.xi > tol {
        return Err(Error::Degeneracy(format!(
            "translational margin xi = {:.3e} is inside the ambiguity band ({tol:.1e}, {:.1e}]",
            sim.xi,
            GRAY * tol
        )));
    }
    let gap = sim.s - 1.0;
    if gap.abs() <= tol {
        Ok(LorentzType::T)
    } else if gap.abs() > GRAY * tol {
        Ok(if gap > 0.0 { LorentzType::S } else { LorentzType::J })
    } else {
        Err(Error::Degeneracy(format!(
            "null-cone margin |s - 1| = {:.3e} is inside the ambiguity band ({tol:.1e}, {:.1e}]",
            gap.abs(),
            GRAY * tol
        )))
    }
}

/// Decides the conjugacy type of an element of `o(1, n)`.
pub fn lorentz_classify(omega: &DMatrix<f64>) -> Result<LorentzType> {
    decide(&simplify(omega)?)
}

/// `Omega`-invariant complement of a nondegenerate subspace, with a
/// Lorentz-orthonormal (necessarily spacelike) basis, and the skew matrix
/// of `Omega` restricted to it.
fn spacelike_complement(omega: &DMatrix<f64>, vectors: &[DVector<f64>]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let l = omega.nrows();
    let e = minkowski_form(l);
    let span = DMatrix::from_columns(&vectors.iter().map(|v| &e * v).collect::<Vec<_>>());
    let euclid = orthogonal_complement(&span);
    if euclid.ncols() == 0 {
        return Ok((euclid, DMatrix::zeros(0, 0)));
    }
    let gram = euclid.transpose() * &e * &euclid;
    let basis = &euclid * sym_inv_sqrt(&gram)?;
    let m = basis.transpose() * &e * omega * &basis;
    Ok((basis, (&m - m.transpose()) * 0.5))
}

/// Appends the planes of the spacelike complement to `head` and returns the
/// full basis together with the complement's plane parameters.
fn complete_basis(omega: &DMatrix<f64>, head: Vec<DVector<f64>>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let (basis, m) = spacelike_complement(omega, &head)?;
    let mut cols = head;
    let mut values = Vec::new();
    if basis.ncols() > 0 {
        let pairing = skew_eigen(&m, tol_eig(&m))?;
        let rotated = &basis * pairing.basis();
        cols.extend(rotated.column_iter().map(|c| c.into_owned()));
        values = pairing.values;
    }
    Ok((DMatrix::from_columns(&cols), values))
}

/// Smallest `mu > 0` with `sum |D_k|^2 / (mu + q_k^2) + xi^2 / mu = 1`.
fn secular_root(sim: &Simplified) -> Result<f64> {
    let phi = |mu: f64| -> f64 {
        let mut v = sim.xi * sim.xi / mu;
        for (q, (d0, d1)) in sim.q.iter().zip(&sim.d) {
            v += (d0 * d0 + d1 * d1) / (mu + q * q);
        }
        v
    };
    let total: f64 = sim.xi * sim.xi + sim.d.iter().map(|(a, b)| a * a + b * b).sum::<f64>();
    let mut hi = total + 1.0;
    let mut lo = hi;
    let mut guard = 0;
    while phi(lo) <= 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::Degeneracy("no real eigenvalue found for an S-type element".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-17 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Normal form under `O+(1, n)`:
///
/// * `J`: `0 + a_1 J + ... + a_m J (+ 0)`, `m = floor(n / 2)`
/// * `S`: `a_1 S + a_2 J + ... (+ 0)`, `m = floor((n + 1) / 2)`
/// * `T`: `a_1 T + a_2 J + ... (+ 0)`, `m = floor(n / 2)`
///
/// with `S = [[0, 1], [1, 0]]` and `T = [[0, 1, 0], [1, 0, 1], [0, -1, 0]]`.
/// The first parameter of a `T` form is the ratio `|z_1| / |z_2|` of the
/// construction in the simplified frame; it is not a conjugacy invariant,
/// because boosts inside the `T` block rescale it.
pub fn lorentz_normal_form(omega: &DMatrix<f64>) -> Result<BlockNormalForm> {
    let sim = simplify(omega)?;
    let kind = decide(&sim)?;
    let l = omega.nrows();
    let n = l - 1;
    let lift = |v: &DVector<f64>, head: f64| -> DVector<f64> {
        let mut out = DVector::zeros(l);
        out[0] = head;
        out.rows_mut(1, n).copy_from(v);
        out
    };
    // z solves Q z = C within the range of Q; z1, z2 iterate the pseudo-inverse.
    let mut z = DVector::zeros(n);
    let mut z1 = DVector::zeros(n);
    let mut z2 = DVector::zeros(n);
    for (k, (q, (d0, d1))) in sim.q.iter().zip(&sim.d).enumerate() {
        z[2 * k] = -d1 / q;
        z[2 * k + 1] = d0 / q;
        z1[2 * k] = d0 / (q * q);
        z1[2 * k + 1] = d1 / (q * q);
        z2[2 * k] = d1 / (q * q * q);
        z2[2 * k + 1] = -d0 / (q * q * q);
    }

    let (basis, head_a, rest, count) = match kind {
        LorentzType::J => {
            let u = lift(&z, 1.0) / (1.0 - sim.s).sqrt();
            let (b, vals) = complete_basis(&sim.omega, vec![u])?;
            (b, None, vals, n / 2)
        }
        LorentzType::S => {
            let a = secular_root(&sim)?.sqrt();
            let q_s = -sim.omega.view((1, 1), (n, n)).into_owned();
            let c_s = sim.omega.view((1, 0), (n, 1)).into_owned();
            let ident = DMatrix::identity(n, n);
            let x = (&q_s + &ident * a)
                .lu()
                .solve(&c_s)
                .ok_or_else(|| Error::Degeneracy("Q + a I is singular".into()))?
                .column(0)
                .into_owned();
            let y = (&q_s - &ident * a)
                .lu()
                .solve(&c_s)
                .ok_or_else(|| Error::Degeneracy("Q - a I is singular".into()))?
                .column(0)
                .into_owned();
            if (x.norm_squared() - 1.0).abs() > 1e-6 {
                return Err(Error::Degeneracy(format!("eigenvector is not null (|x|^2 = {})", x.norm_squared())));
            }
            let big_x = lift(&x, 1.0);
            let big_y = lift(&y, 1.0);
            let u = &big_x + &big_y;
            let v = &big_x - &big_y;
            let u = &u / (-lorentz_dot(&u, &u)).sqrt();
            let v = &v / lorentz_dot(&v, &v).sqrt();
            let (b, vals) = complete_basis(&sim.omega, vec![u, v])?;
            (b, Some(a), vals, (n + 1) / 2)
        }
        LorentzType::T => {
            let (n1, n2) = (z1.norm(), z2.norm());
            let x1 = lift(&z1, 0.0) / n1;
            let x2 = lift(&z2, 0.0) / n2;
            let x0 = lift(&z, 1.0) * (n2 / z.dot(&z2).abs()) + &x2;
            let (b, vals) = complete_basis(&sim.omega, vec![x0, x1, x2])?;
            (b, Some(n1 / n2), vals, n / 2)
        }
    };

    let a = match head_a {
        None => padded(&rest, count),
        Some(first) => {
            let mut a = vec![first];
            a.extend(padded(&rest, count - 1));
            a
        }
    };
    let full = sim.frame.transpose() * basis;
    let e = minkowski_form(l);
    let conjugator = &e * full.transpose() * &e;
    let subtype = match kind {
        LorentzType::J => Subtype::J,
        LorentzType::S => Subtype::S,
        LorentzType::T => Subtype::T,
    };
    Ok(BlockNormalForm { family: Family::Lorentz, subtype, a, extra: 0.0, sigma: 0.0, branch: None, conjugator })
}
