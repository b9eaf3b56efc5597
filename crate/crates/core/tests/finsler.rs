//! Fundamental tensor, spray, spray curvature and flag curvature.

mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use zermelo_core::catalog::{fixture, FIXTURE_IDS};
use zermelo_core::finsler::{
    flag_curvature, fundamental_tensor, spray_coefficients, spray_curvature, zeta_at, AlphaMetric, BackgroundMetric,
    FinslerMetric, NavigationMetric,
};
use zermelo_core::sampling::uniform_ball;
use zermelo_core::spaceforms::SpaceFormModel;
use zermelo_core::winds::WindSpec;
use zermelo_core::Error;

fn nav(id: &str) -> NavigationMetric {
    NavigationMetric { wind: fixture(id).unwrap().wind }
}

/// A point of radius at most 0.3 where the wind is strictly admissible.
fn admissible_point<R: rand::Rng>(rng: &mut R, wind: &WindSpec) -> DVector<f64> {
    loop {
        let x = uniform_ball(rng, wind.dim(), 0.3);
        if wind.convexity_margin(x.as_slice()).map_or(false, |m| m > 0.1) {
            return x;
        }
    }
}

/// Generic flag `(y, V)` with a well-conditioned Gram determinant.
fn flag<R: rand::Rng>(rng: &mut R, n: usize) -> (DVector<f64>, DVector<f64>) {
    loop {
        let y = gaussian_vector(rng, n);
        let v = gaussian_vector(rng, n);
        let cos = y.dot(&v) / (y.norm() * v.norm());
        if cos.abs() < 0.9 && y.norm() > 0.3 && v.norm() > 0.3 {
            return (y, v);
        }
    }
}

#[test]
fn riemannian_fundamental_tensor_is_the_metric() {
    let model = SpaceFormModel::sphere(2.0, 3).unwrap();
    let f = BackgroundMetric { model: model.clone() };
    let x = [0.3, -0.5, 0.2];
    let g = fundamental_tensor(&f, &x, &[1.0, 2.0, -0.4]).unwrap();
    assert!((g - model.metric_at(&x).unwrap()).amax() <= 1e-14);
}

#[test]
fn zero_wind_navigation_is_the_background_metric() {
    let f = nav("zero-wind");
    let b = BackgroundMetric { model: f.wind.model.clone() };
    let x = [0.2, 0.1, -0.7];
    let y = [0.5, -1.0, 0.3];
    assert!((f.norm(&x, &y).unwrap() - b.norm(&x, &y).unwrap()).abs() <= 1e-15);
    assert!((spray_coefficients(&f, &x, &y).unwrap() - spray_coefficients(&b, &x, &y).unwrap()).amax() <= 1e-14);
    assert!(zeta_at(&f.wind, &x, &y).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn flat_and_constant_wind_sprays_vanish() {
    let flat = BackgroundMetric { model: SpaceFormModel::euclidean(3).unwrap() };
    let minkowski = nav("3.2.3");
    for f in [&flat as &dyn Probe, &minkowski as &dyn Probe] {
        let g = f.spray(&[1.0, -2.0, 0.5], &[0.3, 0.4, -0.2]);
        assert!(g.amax() <= 1e-15, "{g}");
        let k = f.curvature(&[1.0, -2.0, 0.5], &[0.3, 0.4, -0.2]);
        assert!(k.amax() <= 1e-8, "{k}");
    }
}

/// Object-safe view of the spray routines for the flat examples above.
trait Probe {
    fn spray(&self, x: &[f64], y: &[f64]) -> DVector<f64>;
    fn curvature(&self, x: &[f64], y: &[f64]) -> DMatrix<f64>;
}

impl<F: FinslerMetric> Probe for F {
    fn spray(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        spray_coefficients(self, x, y).unwrap()
    }
    fn curvature(&self, x: &[f64], y: &[f64]) -> DMatrix<f64> {
        spray_curvature(self, x, y).unwrap()
    }
}

#[test]
fn riemannian_spray_is_half_the_christoffel_contraction() {
    let mut rng = rng(51);
    for model in [SpaceFormModel::sphere(2.0, 3).unwrap(), SpaceFormModel::klein(-1.0, 3).unwrap()] {
        let f = BackgroundMetric { model: model.clone() };
        for _ in 0..20 {
            let x = uniform_ball(&mut rng, 3, 0.8);
            let y = gaussian_vector(&mut rng, 3);
            let gamma = model.christoffel_at(x.as_slice()).unwrap();
            let want = DVector::from_fn(3, |i, _| 0.5 * y.dot(&(&gamma[i] * &y)));
            let got = spray_coefficients(&f, x.as_slice(), y.as_slice()).unwrap();
            assert!((&got - &want).amax() <= 1e-12 * (1.0 + want.amax()));
        }
    }
}

#[test]
fn riemannian_spray_curvature_has_constant_curvature_form() {
    let mut rng = rng(52);
    for (model, k) in [(SpaceFormModel::sphere(1.0, 3).unwrap(), 1.0), (SpaceFormModel::klein(-1.0, 3).unwrap(), -1.0)] {
        let f = BackgroundMetric { model: model.clone() };
        for _ in 0..10 {
            let x = uniform_ball(&mut rng, 3, 0.6);
            let y = gaussian_vector(&mut rng, 3);
            let h = model.metric_at(x.as_slice()).unwrap();
            let y_low = &h * &y;
            let want = (DMatrix::identity(3, 3) * y.dot(&y_low) - &y * y_low.transpose()) * k;
            let got = spray_curvature(&f, x.as_slice(), y.as_slice()).unwrap();
            assert!((&got - &want).amax() <= 1e-5 * (1.0 + want.amax()), "{got} vs {want}");
        }
    }
}

#[test]
fn spray_curvature_annihilates_the_flagpole() {
    let mut rng = rng(53);
    for id in ["3.1.1", "3.1.2", "3.2.1", "3.2.2", "3.3.2"] {
        let f = nav(id);
        let x = admissible_point(&mut rng, &f.wind);
        let y = gaussian_vector(&mut rng, 3);
        let k = spray_curvature(&f, x.as_slice(), y.as_slice()).unwrap();
        assert!((&k * &y).amax() <= 1e-5 * (1.0 + k.amax() * y.amax()), "{id}");
    }
}

#[test]
fn flag_curvature_examples() {
    let mut rng = rng(54);
    for (id, want) in [("zero-wind", 1.0), ("3.1.1", 1.0), ("3.1.2", 2.0), ("3.2.1", 0.0), ("3.2.2", -0.25), ("3.3.1", -1.0)] {
        let f = nav(id);
        for _ in 0..5 {
            let x = admissible_point(&mut rng, &f.wind);
            let (y, v) = flag(&mut rng, 3);
            let k = flag_curvature(&f, x.as_slice(), y.as_slice(), v.as_slice()).unwrap();
            assert!((k - want).abs() <= 1e-4, "{id}: {k} vs {want}");
        }
    }
}

#[test]
fn degenerate_flags_are_reported() {
    let f = nav("3.1.1");
    let e = flag_curvature(&f, &[0.1, 0.0, 0.0], &[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0]).unwrap_err();
    assert!(matches!(e, Error::DegenerateFlag(_)), "{e}");
    assert!(matches!(fundamental_tensor(&f, &[0.0; 3], &[0.0; 3]), Err(Error::Validation(_))));
    assert!(matches!(flag_curvature(&f, &[0.0; 3], &[1.0, 0.0, 0.0], &[0.0, 1.0]), Err(Error::Validation(_))));
}

#[test]
fn spray_relation_holds_on_every_fixture() {
    let mut rng = rng(55);
    for id in FIXTURE_IDS {
        let wind = fixture(id).unwrap().wind;
        let alpha = AlphaMetric { wind: wind.clone() };
        let background = BackgroundMetric { model: wind.model.clone() };
        for _ in 0..10 {
            let x = admissible_point(&mut rng, &wind);
            let y = gaussian_vector(&mut rng, 3);
            let lhs = spray_coefficients(&alpha, x.as_slice(), y.as_slice()).unwrap();
            let rhs = spray_coefficients(&background, x.as_slice(), y.as_slice()).unwrap()
                + zeta_at(&wind, x.as_slice(), y.as_slice()).unwrap();
            assert!((&lhs - &rhs).amax() <= 1e-10 * (1.0 + lhs.amax()), "{id}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn euler_identity_and_homogeneity(seed in any::<u64>(), which in 0usize..9, c in 0.1f64..10.0) {
        let mut rng = rng(seed);
        let f = nav(FIXTURE_IDS[which]);
        let x = admissible_point(&mut rng, &f.wind);
        let y = gaussian_vector(&mut rng, 3);
        let g = fundamental_tensor(&f, x.as_slice(), y.as_slice()).unwrap();
        let f2 = f.norm_squared(x.as_slice(), y.as_slice()).unwrap();
        prop_assert!((y.dot(&(&g * &y)) - f2).abs() <= 1e-12 * (1.0 + f2));
        // g is zero-homogeneous, G is two-homogeneous.
        let gc = fundamental_tensor(&f, x.as_slice(), (&y * c).as_slice()).unwrap();
        prop_assert!((&gc - &g).amax() <= 1e-11 * (1.0 + g.amax()));
        let s = spray_coefficients(&f, x.as_slice(), y.as_slice()).unwrap();
        let sc = spray_coefficients(&f, x.as_slice(), (&y * c).as_slice()).unwrap();
        prop_assert!((sc - &s * (c * c)).amax() <= 1e-10 * (1.0 + c * c * s.amax()));
    }

    #[test]
    fn flag_curvature_depends_only_on_the_flag(seed in any::<u64>(), which in 0usize..5, c in 0.2f64..5.0, shift in -3.0f64..3.0) {
        let ids = ["3.1.1", "3.1.2", "3.2.1", "3.2.2", "3.3.3"];
        let mut rng = rng(seed);
        let f = nav(ids[which]);
        let x = admissible_point(&mut rng, &f.wind);
        let (y, v) = flag(&mut rng, 3);
        let k = |y: &DVector<f64>, v: &DVector<f64>| flag_curvature(&f, x.as_slice(), y.as_slice(), v.as_slice()).unwrap();
        let base = k(&y, &v);
        prop_assert!((k(&y, &(&v * c)) - base).abs() <= 1e-5);
        prop_assert!((k(&y, &(&v + &y * shift)) - base).abs() <= 1e-5);
        prop_assert!((k(&(&y * c), &v) - base).abs() <= 1e-5);
    }
}
