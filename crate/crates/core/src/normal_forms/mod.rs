//! Conjugacy normal forms for the isometry and similarity algebras of the
//! three space forms.
//!
//! Each routine returns the normal-form parameters together with a group
//! element `g` such that `g Omega g^-1` equals the block matrix rebuilt from
//! those parameters (see [`BlockNormalForm::rebuild`]).

mod euclidean;
mod lorentz;
mod orthogonal;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::j_blocks;

pub use euclidean::euclidean_normal_form;
pub use lorentz::{lorentz_classify, lorentz_normal_form, minkowski_form, LorentzType};
pub use orthogonal::orthogonal_normal_form;

/// Matrix algebra an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `o(l)`: skew-symmetric matrices.
    Orthogonal,
    /// Similarity algebra of `R^n` in `(n+1) x (n+1)` affine form.
    Euclidean,
    /// `o(1, n)`: the Lorentz algebra.
    Lorentz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subtype {
    /// Skew matrix in `o(l)`.
    Compact,
    /// Lorentz element fixing a timelike vector.
    J,
    /// Lorentz element with a real eigenvalue.
    S,
    /// Lorentz element with a nilpotent null part.
    T,
    /// Euclidean Killing field (`sigma = 0`).
    FlatKilling,
    /// Euclidean proper homothety (`sigma != 0`).
    FlatHomothety,
}

/// Which of the two parameter sets of the even-dimensional Euclidean
/// Killing case a normal form lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// No translational part along the kernel of `Q`.
    Rotational,
    /// A translational part `xi > 0`, stored as the first parameter.
    Translational,
}

/// Normal form of a Lie-algebra element.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNormalForm {
    pub family: Family,
    pub subtype: Subtype,
    /// Normal-form parameters, in the order used by the moduli description.
    pub a: Vec<f64>,
    /// Translational part `xi` of a Euclidean Killing field (zero otherwise).
    pub extra: f64,
    /// Dilation rate of a Euclidean element (zero otherwise).
    pub sigma: f64,
    pub branch: Option<Branch>,
    /// Group element `g` with `g Omega g^-1 = rebuild()`.
    pub conjugator: DMatrix<f64>,
}

/// `S = [[0, 1], [1, 0]]` scaled by `a`, placed at the top-left of an `l x l` matrix.
fn s_block(a: f64, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    m[(0, 1)] = a;
    m[(1, 0)] = a;
    m
}

/// `T = [[0, 1, 0], [1, 0, 1], [0, -1, 0]]` scaled by `a`, at the top-left.
fn t_block(a: f64, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    m[(0, 1)] = a;
    m[(1, 0)] = a;
    m[(1, 2)] = a;
    m[(2, 1)] = -a;
    m
}

fn embed(block: &DMatrix<f64>, offset: usize, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    m.view_mut((offset, offset), (block.nrows(), block.ncols())).copy_from(block);
    m
}

impl BlockNormalForm {
    /// Size of the matrices this normal form acts on.
    pub fn size(&self) -> usize {
        self.conjugator.nrows()
    }

    /// Rotation parameters and translational part of a Euclidean Killing form.
    fn euclidean_blocks(&self) -> (Vec<f64>, f64) {
        match (self.subtype, self.branch) {
            (Subtype::FlatHomothety, _) => (self.a.clone(), 0.0),
            (_, Some(Branch::Rotational)) => (self.a.clone(), 0.0),
            _ => (self.a.get(1..).unwrap_or(&[]).to_vec(), self.a.first().copied().unwrap_or(0.0)),
        }
    }

    /// The canonical block matrix determined by the parameters alone.
    pub fn rebuild(&self) -> DMatrix<f64> {
        let l = self.size();
        match self.family {
            Family::Orthogonal => j_blocks(&self.a, l),
            Family::Euclidean => {
                let n = l - 1;
                let (rho, xi) = self.euclidean_blocks();
                let mut m = DMatrix::zeros(l, l);
                let block = j_blocks(&rho, n) - DMatrix::identity(n, n) * (0.5 * self.sigma);
                m.view_mut((0, 0), (n, n)).copy_from(&block);
                m[(n, n - 1)] = xi;
                m
            }
            Family::Lorentz => {
                let n = l - 1;
                match self.subtype {
                    Subtype::J => embed(&j_blocks(&self.a, n), 1, l),
                    Subtype::S => s_block(self.a[0], l) + embed(&j_blocks(&self.a[1..], n - 1), 2, l),
                    Subtype::T => t_block(self.a[0], l) + embed(&j_blocks(&self.a[1..], n - 2), 3, l),
                    _ => unreachable!("Lorentz normal forms carry a Lorentz subtype"),
                }
            }
        }
    }

    /// `|g Omega g^-1 - rebuild()|_F`.
    pub fn conjugation_residual(&self, omega: &DMatrix<f64>) -> Result<f64> {
        let g_inv = self
            .conjugator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degeneracy("conjugator is singular".into()))?;
        Ok((&self.conjugator * omega * g_inv - self.rebuild()).norm())
    }

    /// Distance of the conjugator from its group: orthogonality for `O(l)`,
    /// orthogonal linear part with affine last column for `E(n)`, and
    /// `g^T E g = E` with `g^0_0 >= 1` for `O+(1, n)`.
    pub fn group_residual(&self) -> f64 {
        let g = &self.conjugator;
        let l = g.nrows();
        match self.family {
            Family::Orthogonal => (g * g.transpose() - DMatrix::identity(l, l)).norm(),
            Family::Euclidean => {
                let n = l - 1;
                let a = g.view((0, 0), (n, n));
                let mut r = (a * a.transpose() - DMatrix::identity(n, n)).norm();
                r += g.view((0, n), (n, 1)).norm() + (g[(n, n)] - 1.0).abs();
                r
            }
            Family::Lorentz => {
                let e = minkowski_form(l);
                (g.transpose() * &e * g - e).norm() + (1.0 - g[(0, 0)]).max(0.0)
            }
        }
    }
}

/// Which algebra a raw matrix should be decomposed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebra {
    O,
    E,
    O1n,
}

impl std::str::FromStr for Algebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "o" => Ok(Algebra::O),
            "e" => Ok(Algebra::E),
            "o1n" => Ok(Algebra::O1n),
            other => Err(Error::Validation(format!("unknown algebra {other:?}; expected o, e or o1n"))),
        }
    }
}

/// Dispatches to the normal form of the requested algebra.
pub fn normal_form(omega: &DMatrix<f64>, algebra: Algebra) -> Result<BlockNormalForm> {
    match algebra {
        Algebra::O => orthogonal_normal_form(omega),
        Algebra::E => euclidean_normal_form(omega),
        Algebra::O1n => lorentz_normal_form(omega),
    }
}

/// Non-increasing parameters padded with zeros to `len` entries.
fn padded(values: &[f64], len: usize) -> Vec<f64> {
    let mut a: Vec<f64> = values.iter().copied().take(len).collect();
    a.resize(len, 0.0);
    a
}
