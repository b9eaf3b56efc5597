//! End-to-end classification of navigation data into moduli coordinates,
//! together with the algebraic criteria for global extension, `theta = 0`
//! and projective flatness.

mod cfc;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_forms::{euclidean_normal_form, lorentz_normal_form, orthogonal_normal_form, Branch, Subtype};
use crate::spaceforms::ModelKind;
use crate::winds::WindSpec;

pub use cfc::{
    cfc_residuals, cfc_residuals_at, theta_at, theta_navigation_at, CfcResiduals, NavigationField, PointResiduals,
    RandersField, RandersMetric,
};

/// Tolerance of the Matsumoto identity.
pub const MATSUMOTO_TOL: f64 = 1e-12;

/// Safety gap used for the strict inequalities of the admissibility rules.
pub const ADMISSIBILITY_GAP: f64 = 1e-12;

/// The six families of constant flag curvature navigation data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Killing field on a sphere, `K > 0`.
    SpherePlus,
    /// Killing field on Euclidean space, `K = 0`.
    FlatZero,
    /// Proper homothety of Euclidean space, `K = -sigma^2 / 16`.
    FlatNegative,
    /// Klein model, Killing field with a timelike zero.
    KleinJ,
    /// Klein model, Killing field with a null eigenvector of nonzero eigenvalue.
    KleinS,
    /// Klein model, parabolic Killing field.
    KleinT,
}

/// Moduli coordinates of a navigation datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    pub case: Case,
    #[serde(rename = "K")]
    pub curvature: f64,
    pub sigma: f64,
    pub a: Vec<f64>,
    /// Component of the even-dimensional flat moduli space.
    pub branch: Option<Branch>,
    #[serde(rename = "local")]
    pub locally_admissible: bool,
    #[serde(rename = "global")]
    pub globally_admissible: bool,
}

/// Sign of the flag curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureSign {
    Positive,
    Zero,
    Negative,
}

impl FromStr for CurvatureSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "+" | "positive" => Ok(CurvatureSign::Positive),
            "zero" | "0" => Ok(CurvatureSign::Zero),
            "neg" | "-" | "negative" => Ok(CurvatureSign::Negative),
            other => Err(Error::Validation(format!("unknown curvature sign {other:?}; expected pos, zero or neg"))),
        }
    }
}

/// `|sigma (K + sigma^2 / 16)| <= 1e-12`.
pub fn matsumoto_check(k: f64, sigma: f64) -> bool {
    (sigma * (k + sigma * sigma / 16.0)).abs() <= MATSUMOTO_TOL
}

/// Dimension of the moduli space of `n`-dimensional constant flag curvature
/// Randers metrics with the given curvature sign and dilation status.
pub fn moduli_dimension(n: usize, sign: CurvatureSign, sigma_nonzero: bool) -> Result<usize> {
    if n < 2 {
        return Err(Error::Validation(format!("dimension must be at least 2, got {n}")));
    }
    if sigma_nonzero && sign != CurvatureSign::Negative {
        return Err(Error::Classification(
            "a nonzero sigma forces K = -sigma^2/16 < 0 by the Matsumoto identity".into(),
        ));
    }
    Ok(if n % 2 == 0 {
        n / 2
    } else if sigma_nonzero {
        (n - 1) / 2
    } else {
        (n + 1) / 2
    })
}

/// Checks a curvature value supplied alongside Euclidean data against the
/// Matsumoto identity and the curvature the data actually produces.
pub fn check_claimed_curvature(wind: &WindSpec, claimed: f64) -> Result<()> {
    let sigma = wind.sigma;
    if !matsumoto_check(claimed, sigma) {
        return Err(Error::Classification(format!(
            "(K, sigma) = ({claimed}, {sigma}) violates sigma (K + sigma^2/16) = 0"
        )));
    }
    let produced = -sigma * sigma / 16.0;
    if wind.model.kind == ModelKind::Euclidean && (claimed - produced).abs() > MATSUMOTO_TOL {
        return Err(Error::Classification(format!(
            "Euclidean data with sigma = {sigma} has flag curvature {produced}, not {claimed}"
        )));
    }
    Ok(())
}

fn pad(mut a: Vec<f64>, len: usize) -> Vec<f64> {
    a.resize(len, 0.0);
    a
}

fn below(value: f64, bound: f64) -> bool {
    value < bound - ADMISSIBILITY_GAP * (1.0 + bound)
}

/// Moduli coordinates and admissibility of a navigation datum.
///
/// Fails with a convexity error when the data is strongly convex on no open
/// set, since such data defines no Randers metric.
pub fn classify(wind: &WindSpec) -> Result<ModuliPoint> {
    let n = wind.dim();
    let k = wind.model.curvature;
    let omega = wind.algebra_element();
    match wind.model.kind {
        ModelKind::Sphere => {
            let nf = orthogonal_normal_form(&omega)?;
            let a = pad(nf.a, moduli_dimension(n, CurvatureSign::Positive, false)?);
            let root = k.sqrt();
            let smallest = *a.last().unwrap_or(&0.0);
            // For even n the field vanishes somewhere; for odd n its minimum norm is a_m / sqrt(K).
            if n % 2 == 1 && !below(smallest, root) {
                return Err(Error::Convexity(format!(
                    "smallest rotation parameter {smallest} is not below sqrt(K) = {root}; |W| >= 1 everywhere"
                )));
            }
            Ok(ModuliPoint {
                case: Case::SpherePlus,
                curvature: k,
                sigma: 0.0,
                globally_admissible: below(a[0], root),
                a,
                branch: None,
                locally_admissible: true,
            })
        }
        ModelKind::Euclidean => {
            let nf = euclidean_normal_form(&omega)?;
            if nf.subtype == Subtype::FlatHomothety {
                let sigma = nf.sigma;
                let a = pad(nf.a, moduli_dimension(n, CurvatureSign::Negative, true)?);
                return Ok(ModuliPoint {
                    case: Case::FlatNegative,
                    curvature: -sigma * sigma / 16.0,
                    sigma,
                    a,
                    branch: None,
                    locally_admissible: true,
                    globally_admissible: false,
                });
            }
            let xi = nf.extra;
            if !below(xi, 1.0) {
                return Err(Error::Convexity(format!(
                    "translational part xi = {xi} is not below 1; |W| >= 1 everywhere"
                )));
            }
            let tol = crate::numerics::tol_eig(&omega);
            let global = wind.q.amax() <= tol;
            let a = pad(nf.a, moduli_dimension(n, CurvatureSign::Zero, false)?);
            Ok(ModuliPoint {
                case: Case::FlatZero,
                curvature: 0.0,
                sigma: 0.0,
                a,
                branch: nf.branch,
                locally_admissible: true,
                globally_admissible: global,
            })
        }
        ModelKind::Klein => {
            let nf = lorentz_normal_form(&omega)?;
            let a = pad(nf.a, moduli_dimension(n, CurvatureSign::Negative, false)?);
            let case = match nf.subtype {
                Subtype::J => Case::KleinJ,
                Subtype::S => Case::KleinS,
                _ => Case::KleinT,
            };
            if case == Case::KleinS {
                let root = k.abs().sqrt();
                if !below(a[0], root) {
                    return Err(Error::Convexity(format!(
                        "S-type parameter a1 = {} is not below sqrt(|K|) = {root}; |W| >= 1 everywhere",
                        a[0]
                    )));
                }
            }
            let tol = crate::numerics::tol_eig(&omega);
            let global = case == Case::KleinJ && a.iter().all(|v| v.abs() <= tol);
            Ok(ModuliPoint {
                case,
                curvature: k,
                sigma: 0.0,
                a,
                branch: None,
                locally_admissible: true,
                globally_admissible: global,
            })
        }
    }
}

fn algebraic_tol(wind: &WindSpec) -> f64 {
    1e-10 * (1.0 + wind.q.norm_squared() + wind.c.norm_squared())
}

/// Algebraic criterion for `theta = 0`: `Q = 0` on Euclidean space, and
/// `QC = 0`, `Q^2 = psi (C C^T - |C|^2 I)` on the curved models.
pub fn theta_zero_check(wind: &WindSpec) -> bool {
    let tol = algebraic_tol(wind);
    if wind.model.kind == ModelKind::Euclidean {
        return wind.q.amax() <= tol;
    }
    let n = wind.dim();
    let (q, c) = (&wind.q, &wind.c);
    let qc = (q * c).amax();
    let rhs = (c * c.transpose() - nalgebra::DMatrix::identity(n, n) * c.norm_squared()) * wind.model.psi();
    qc <= tol && (q * q - rhs).amax() <= tol
}

/// Algebraic criterion for projective flatness: `Q = 0` on Euclidean space
/// and `W = 0` on the curved models.
pub fn projectively_flat_check(wind: &WindSpec) -> bool {
    let tol = algebraic_tol(wind);
    match wind.model.kind {
        ModelKind::Euclidean => wind.q.amax() <= tol,
        _ => wind.q.amax() <= tol && wind.c.amax() <= tol,
    }
}

/// Largest entry of `d W_flat` at the given points.
pub fn max_curl(wind: &WindSpec, points: &[nalgebra::DVector<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in points {
        worst = worst.max(wind.curl_at(x.as_slice())?.amax());
    }
    Ok(worst)
}
