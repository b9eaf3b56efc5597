//! Random points inside the strongly convex region of a wind and random
//! flags at those points. Every routine takes its RNG explicitly.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::finsler::{flag_curvature, FinslerMetric};
use crate::spaceforms::ModelKind;
use crate::winds::WindSpec;

/// Points closer than this to the Klein boundary (in `1 - |x|^2`) are not drawn.
pub const KLEIN_SAMPLE_MARGIN: f64 = 0.1;

/// Rejection-sampling budget for one point.
const MAX_ATTEMPTS: usize = 200_000;

/// Largest `|cos|` (in `h`) allowed between a flagpole and its transverse edge.
pub const MAX_FLAG_COSINE: f64 = 0.95;

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point of the ball of radius `r` in `R^n`.
pub fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64) -> DVector<f64> {
    let dir = gaussian_vector(rng, n).normalize();
    let radius = r * rng.gen::<f64>().powf(1.0 / n as f64);
    dir * radius
}

/// Radius of the chart ball that points are drawn from.
fn chart_radius(wind: &WindSpec) -> f64 {
    match wind.model.kind {
        ModelKind::Klein => (1.0 - KLEIN_SAMPLE_MARGIN).sqrt(),
        ModelKind::Sphere => 2.0,
        ModelKind::Euclidean => 1.5,
    }
}

/// A random chart point where `1 - |W|^2 >= min_margin`.
pub fn sample_point<R: Rng + ?Sized>(wind: &WindSpec, rng: &mut R, min_margin: f64) -> Result<DVector<f64>> {
    let n = wind.dim();
    let r = chart_radius(wind);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..MAX_ATTEMPTS {
        let x = uniform_ball(rng, n, r);
        let margin = wind.convexity_margin_closed_form(x.as_slice())?;
        if margin >= min_margin {
            return Ok(x);
        }
        best = best.max(margin);
    }
    Err(Error::Search(format!(
        "no sample point with convexity margin >= {min_margin} after {MAX_ATTEMPTS} draws (best {best:.3e})"
    )))
}

/// Uniform vector on the unit sphere of the inner product `h`.
pub fn unit_vector<R: Rng + ?Sized>(h: &DMatrix<f64>, rng: &mut R) -> Result<DVector<f64>> {
    let chol = h
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Convexity("background metric is not positive definite".into()))?;
    let z = gaussian_vector(rng, h.nrows()).normalize();
    // h = L L^T, so y = L^-T z has h(y, y) = |z|^2 = 1.
    let y = chol
        .l()
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or_else(|| Error::Degeneracy("triangular solve failed".into()))?;
    Ok(y)
}

/// A flag `(y, V)` of `h`-unit vectors with `|h(y, V)| <= MAX_FLAG_COSINE`.
pub fn sample_flag<R: Rng + ?Sized>(h: &DMatrix<f64>, rng: &mut R) -> Result<(DVector<f64>, DVector<f64>)> {
    for _ in 0..10_000 {
        let y = unit_vector(h, rng)?;
        let v = unit_vector(h, rng)?;
        if y.dot(&(h * &v)).abs() <= MAX_FLAG_COSINE {
            return Ok((y, v));
        }
    }
    Err(Error::Search("could not draw a non-degenerate flag".into()))
}

/// Mean, standard deviation and extreme values of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleStats {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count.max(1) as f64;
        let var = if count > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        SampleStats {
            count,
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Largest distance of any sample from `target`.
    pub fn max_deviation(&self, target: f64) -> f64 {
        (self.max - target).abs().max((self.min - target).abs())
    }
}

/// Flag curvature of `metric` at `count` random flags over random points
/// of the convex region of `wind`.
pub fn sample_flag_curvatures<F: FinslerMetric, R: Rng + ?Sized>(
    metric: &F,
    wind: &WindSpec,
    rng: &mut R,
    count: usize,
    min_margin: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = sample_point(wind, rng, min_margin)?;
        let h = wind.model.metric_at(x.as_slice())?;
        let (y, v) = sample_flag(&h, rng)?;
        out.push(flag_curvature(metric, x.as_slice(), y.as_slice(), v.as_slice())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::fixture;
    use rand::SeedableRng;

    #[test]
    fn sampled_points_respect_margin() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let wind = fixture("3.3.3").unwrap().wind;
        for _ in 0..20 {
            let x = sample_point(&wind, &mut rng, 0.15).unwrap();
            assert!(wind.convexity_margin(x.as_slice()).unwrap() >= 0.15);
            assert!(1.0 - x.dot(&x) >= KLEIN_SAMPLE_MARGIN - 1e-12);
        }
    }

    #[test]
    fn unit_vectors_have_unit_length() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let y = unit_vector(&h, &mut rng).unwrap();
        assert!((y.dot(&(&h * &y)) - 1.0).abs() < 1e-14);
    }
}
