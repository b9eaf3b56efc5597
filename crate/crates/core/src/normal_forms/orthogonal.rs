use nalgebra::DMatrix;

use super::{padded, BlockNormalForm, Family, Subtype};
use crate::error::Result;
use crate::numerics::{skew_eigen, tol_eig};

/// Normal form `a_1 J + ... + a_m J (+ 0)` of a skew matrix under `O(l)`,
/// with `a_1 >= ... >= a_m >= 0` and `m = floor(l / 2)`.
pub fn orthogonal_normal_form(omega: &DMatrix<f64>) -> Result<BlockNormalForm> {
    let pairing = skew_eigen(omega, tol_eig(omega))?;
    let l = omega.nrows();
    Ok(BlockNormalForm {
        family: Family::Orthogonal,
        subtype: Subtype::Compact,
        a: padded(&pairing.values, l / 2),
        extra: 0.0,
        sigma: 0.0,
        branch: None,
        conjugator: pairing.basis().transpose(),
    })
}
