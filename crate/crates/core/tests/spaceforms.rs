//! Metrics, Christoffel symbols and curvature of the three model spaces.

mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use zermelo_core::numerics::{central_fd, spd_check, FdOrder, DEFAULT_FD_STEP};
use zermelo_core::sampling::uniform_ball;
use zermelo_core::spaceforms::{bilinear, SpaceFormModel};
use zermelo_core::Error;

fn models(n: usize) -> [SpaceFormModel; 3] {
    [
        SpaceFormModel::sphere(2.0, n).unwrap(),
        SpaceFormModel::euclidean(n).unwrap(),
        SpaceFormModel::klein(-1.0, n).unwrap(),
    ]
}

/// Chart points: anywhere for the sphere and flat space, inside `x.x < 0.9` for Klein.
fn chart_point<R: rand::Rng>(model: &SpaceFormModel, rng: &mut R) -> DVector<f64> {
    let r = if model.curvature < 0.0 { 0.9f64.sqrt() } else { 2.0 };
    uniform_ball(rng, model.dim, r)
}

/// Christoffel symbols from finite differences of the metric.
fn fd_christoffel(model: &SpaceFormModel, x: &[f64]) -> Vec<DMatrix<f64>> {
    let n = model.dim;
    let dh: Vec<DMatrix<f64>> = (0..n * n)
        .map(|e| {
            let g = central_fd(|p| Ok(model.metric_at(p)?[(e / n, e % n)]), x, FdOrder::First, DEFAULT_FD_STEP).unwrap();
            DMatrix::from_column_slice(n, 1, g.gradient().unwrap().as_slice())
        })
        .collect();
    // d[(j, l)][i] = d h_jl / d x^i
    let d = |j: usize, l: usize, i: usize| dh[j * n + l][i];
    let h_inv = model.inverse_metric_at(x).unwrap();
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                (0..n).map(|l| 0.5 * h_inv[(k, l)] * (d(j, l, i) + d(i, l, j) - d(i, j, l))).sum()
            })
        })
        .collect()
}

#[test]
fn flat_metric_is_identity() {
    let m = SpaceFormModel::euclidean(3).unwrap();
    assert_eq!(m.metric_at(&[5.0, -2.0, 1.0]).unwrap(), DMatrix::identity(3, 3));
    assert!(m.christoffel_at(&[5.0, -2.0, 1.0]).unwrap().iter().all(|g| g.iter().all(|v| *v == 0.0)));
    assert_eq!(m.riemann_residual(&[5.0, -2.0, 1.0]).unwrap(), 0.0);
}

#[test]
fn klein_metric_at_origin_is_identity() {
    let m = SpaceFormModel::klein(-1.0, 3).unwrap();
    assert!((m.metric_at(&[0.0, 0.0, 0.0]).unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
}

#[test]
fn sphere_norm_matches_closed_form() {
    let m = SpaceFormModel::sphere(1.0, 3).unwrap();
    let y = DVector::from_vec(vec![0.3, -1.2, 0.5]);
    assert!((bilinear(&m.metric_at(&[0.0; 3]).unwrap(), &y, &y) - y.dot(&y)).abs() < 1e-15);
    let x = DVector::from_vec(vec![0.4, 0.9, -0.6]);
    let xx = x.dot(&x);
    let want = (y.dot(&y) * (1.0 + xx) - x.dot(&y).powi(2)) / (1.0 + xx).powi(2);
    let got = bilinear(&m.metric_at(x.as_slice()).unwrap(), &y, &y);
    assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    assert!((m.closed_form_norm_squared(x.as_slice(), y.as_slice()).unwrap() - want).abs() < 1e-14);
}

#[test]
fn klein_christoffel_example() {
    let m = SpaceFormModel::klein(-1.0, 2).unwrap();
    let gamma = m.christoffel_at(&[0.5, 0.0]).unwrap();
    assert!((gamma[0][(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
}

#[test]
fn klein_rejects_points_outside_the_ball() {
    let m = SpaceFormModel::klein(-1.0, 2).unwrap();
    assert!(m.metric_at(&[0.8, 0.6]).is_err());
    assert!(m.metric_at(&[1.0, 0.5]).is_err());
    assert!(!m.in_domain(&[0.6, 0.8]));
}

#[test]
fn curvature_sign_must_match_the_model() {
    assert!(matches!(SpaceFormModel::sphere(-1.0, 3), Err(Error::Validation(_))));
    assert!(matches!(SpaceFormModel::klein(1.0, 3), Err(Error::Validation(_))));
    assert!(matches!(SpaceFormModel::euclidean(1), Err(Error::Validation(_))));
}

#[test]
fn riemann_residual_examples() {
    let mut rng = rng(21);
    let sphere = SpaceFormModel::sphere(2.0, 3).unwrap();
    let x = chart_point(&sphere, &mut rng);
    assert!(sphere.riemann_residual(x.as_slice()).unwrap() <= 1e-5);
    let klein = SpaceFormModel::klein(-1.0, 3).unwrap();
    let x = unit_sphere_point(&mut rng, 3) * 0.5f64.sqrt();
    assert!(klein.riemann_residual(x.as_slice()).unwrap() <= 1e-5);
}

#[test]
fn invariants_over_many_points() {
    let mut rng = rng(22);
    for n in 2..=4 {
        for model in models(n) {
            for _ in 0..100 {
                let x = chart_point(&model, &mut rng);
                let h = model.metric_at(x.as_slice()).unwrap();
                assert!(spd_check(&h).unwrap() > 0.0);
                let gamma = model.christoffel_at(x.as_slice()).unwrap();
                assert!(gamma.iter().all(|g| g == &g.transpose()), "Christoffel symbols must be symmetric");
                let r = model.riemann_residual(x.as_slice()).unwrap();
                assert!(r <= 1e-5, "{:?} n={n}: residual {r}", model.kind);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn christoffel_matches_finite_differences(seed in any::<u64>(), n in 2usize..=4, which in 0usize..3) {
        let mut rng = rng(seed);
        let model = models(n)[which].clone();
        let x = chart_point(&model, &mut rng);
        let closed = model.christoffel_at(x.as_slice()).unwrap();
        let fd = fd_christoffel(&model, x.as_slice());
        for (a, b) in closed.iter().zip(&fd) {
            prop_assert!((a - b).amax() <= 1e-6, "gap {}", (a - b).amax());
        }
    }

    #[test]
    fn inverse_metric_inverts(seed in any::<u64>(), n in 2usize..=4, which in 0usize..3) {
        let mut rng = rng(seed);
        let model = models(n)[which].clone();
        let x = chart_point(&model, &mut rng);
        let prod = model.metric_at(x.as_slice()).unwrap() * model.inverse_metric_at(x.as_slice()).unwrap();
        prop_assert!((prod - DMatrix::identity(n, n)).amax() <= 1e-12);
    }
}
