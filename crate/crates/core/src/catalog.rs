//! Worked examples of constant flag curvature in dimension three.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaceforms::SpaceFormModel;
use crate::winds::WindSpec;

/// Identifiers accepted by [`fixture`].
pub const FIXTURE_IDS: [&str; 9] = ["3.1.1", "3.1.2", "3.2.1", "3.2.2", "3.2.3", "3.3.1", "3.3.2", "3.3.3", "zero-wind"];

/// Rotation generator `t J` placed on coordinates `(i, i+1)` of an `n x n` matrix.
pub fn rotation_block(n: usize, i: usize, t: f64) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n);
    q[(i, i + 1)] = t;
    q[(i + 1, i)] = -t;
    q
}

/// A named example together with the flag curvature it should have.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: &'static str,
    pub wind: WindSpec,
    pub flag_curvature: f64,
}

/// The example with the given identifier, using the default parameters
/// (`tau = 0.5` on the sphere, Funk metric `tau = -1`, `tau = 0.3` on the
/// hyperbolic translation, `K = 2` for the sphere with translation).
pub fn fixture(id: &str) -> Result<Fixture> {
    let n = 3;
    let fx = |id: &'static str, wind: WindSpec, k: f64| Ok(Fixture { id, wind, flag_curvature: k });
    match id {
        "3.1.1" => fx("3.1.1", sphere_rotation(0.5)?, 1.0),
        "3.1.2" => {
            let k = 2.0;
            fx("3.1.2", sphere_screw(k)?, k)
        }
        "3.2.1" => {
            let m = SpaceFormModel::euclidean(n)?;
            fx("3.2.1", WindSpec::new(m, 0.0, rotation_block(n, 0, 1.0), DVector::zeros(n))?, 0.0)
        }
        "3.2.2" => {
            let tau = -1.0;
            fx("3.2.2", euclidean_dilation(tau)?, -tau * tau / 4.0)
        }
        "3.2.3" => {
            let m = SpaceFormModel::euclidean(n)?;
            let c = DVector::from_vec(vec![0.3, 0.2, 0.1]);
            fx("3.2.3", WindSpec::new(m, 0.0, DMatrix::zeros(n, n), c)?, 0.0)
        }
        "3.3.1" => {
            let m = SpaceFormModel::klein(-1.0, n)?;
            fx("3.3.1", WindSpec::new(m, 0.0, rotation_block(n, 0, 1.0), DVector::zeros(n))?, -1.0)
        }
        "3.3.2" => {
            let tau = 0.3;
            let m = SpaceFormModel::klein(-1.0, n)?;
            let c = DVector::from_vec(vec![tau, 0.0, 0.0]);
            fx("3.3.2", WindSpec::new(m, 0.0, rotation_block(n, 1, tau), c)?, -1.0)
        }
        "3.3.3" => {
            let m = SpaceFormModel::klein(-1.0, n)?;
            let c = DVector::from_vec(vec![1.0, 0.0, 0.0]);
            fx("3.3.3", WindSpec::new(m, 0.0, rotation_block(n, 0, 1.0), c)?, -1.0)
        }
        "zero-wind" => fx("zero-wind", WindSpec::zero(SpaceFormModel::sphere(1.0, n)?), 1.0),
        other => Err(Error::Validation(format!("unknown example id {other:?}; known ids: {}", FIXTURE_IDS.join(", ")))),
    }
}

/// Rigid rotation `tau J + 0` of the unit 3-sphere.
pub fn sphere_rotation(tau: f64) -> Result<WindSpec> {
    let m = SpaceFormModel::sphere(1.0, 3)?;
    WindSpec::new(m, 0.0, rotation_block(3, 0, tau), DVector::zeros(3))
}

/// Screw motion of the 3-sphere of curvature `k > 1` producing a Randers
/// metric of flag curvature `k`.
pub fn sphere_screw(k: f64) -> Result<WindSpec> {
    if k <= 1.0 {
        return Err(Error::Validation(format!("screw example needs K > 1, got {k}")));
    }
    let m = SpaceFormModel::sphere(k, 3)?;
    let r = (k - 1.0).sqrt();
    WindSpec::new(m, 0.0, rotation_block(3, 1, r), DVector::from_vec(vec![-r, 0.0, 0.0]))
}

/// Radial wind `W = tau x` on Euclidean 3-space (`tau = -1` gives the Funk metric).
pub fn euclidean_dilation(tau: f64) -> Result<WindSpec> {
    let m = SpaceFormModel::euclidean(3)?;
    WindSpec::new(m, -2.0 * tau, DMatrix::zeros(3, 3), DVector::zeros(3))
}
