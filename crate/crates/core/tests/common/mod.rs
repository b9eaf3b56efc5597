//! Random group elements and algebra elements shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Haar-like random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

pub fn random_skew<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = gaussian_matrix(rng, n, n);
    (&m - m.transpose()) * 0.5
}

/// Boost of rapidity `phi` along the first spatial axis, size `n + 1`.
pub fn boost(n: usize, phi: f64) -> DMatrix<f64> {
    let mut b = DMatrix::identity(n + 1, n + 1);
    b[(0, 0)] = phi.cosh();
    b[(1, 1)] = phi.cosh();
    b[(0, 1)] = phi.sinh();
    b[(1, 0)] = phi.sinh();
    b
}

/// Random element of O+(1, n): rotation, boost of rapidity at most `max_phi`, rotation.
pub fn random_lorentz<R: Rng>(rng: &mut R, n: usize, max_phi: f64) -> DMatrix<f64> {
    let lift = |r: DMatrix<f64>| {
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(&r);
        m
    };
    let r1 = lift(random_orthogonal(rng, n));
    let r2 = lift(random_orthogonal(rng, n));
    r1 * boost(n, rng.gen_range(-max_phi..max_phi)) * r2
}

/// Random Euclidean motion `[[A, 0], [b, 1]]`.
pub fn random_motion<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n + 1, n + 1);
    g.view_mut((0, 0), (n, n)).copy_from(&random_orthogonal(rng, n));
    let b = gaussian_vector(rng, n);
    for i in 0..n {
        g[(n, i)] = b[i];
    }
    g
}

/// Non-increasing positive parameters drawn from `[lo, hi]`.
pub fn sorted_params<R: Rng>(rng: &mut R, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut a: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "parameter vectors differ in length: {a:?} vs {b:?}");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random symmetric positive definite matrix with eigenvalues bounded below by `floor`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, floor: f64) -> DMatrix<f64> {
    let b = gaussian_matrix(rng, n, n);
    &b * b.transpose() / n as f64 + DMatrix::identity(n, n) * floor
}

/// Uniform point on the unit sphere of `R^n`.
pub fn unit_sphere_point<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    gaussian_vector(rng, n).normalize()
}

/// Random element of O+(1, n) with no boost: a spatial rotation.
pub fn random_spatial_rotation<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m.view_mut((1, 1), (n, n)).copy_from(&random_orthogonal(rng, n));
    m
}

/// Inverse of a Lorentz matrix, `E g^T E`.
pub fn lorentz_inverse(g: &DMatrix<f64>) -> DMatrix<f64> {
    let mut e = DMatrix::identity(g.nrows(), g.nrows());
    e[(0, 0)] = -1.0;
    &e * g.transpose() * &e
}
