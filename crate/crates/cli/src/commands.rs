//! Subcommand implementations. Each returns the text to print on success.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use zermelo_core::catalog::{fixture, FIXTURE_IDS};
use zermelo_core::classifier::{
    cfc_residuals, classify, moduli_dimension, CurvatureSign, ModuliPoint, NavigationField, RandersMetric,
};
use zermelo_core::finsler::{flag_curvature, NavigationMetric};
use zermelo_core::geodesics::{geodesic_ivp, shortest_time, ShootingOptions};
use zermelo_core::normal_forms::{normal_form, Algebra, Branch, Family, Subtype};
use zermelo_core::sampling::{sample_flag, sample_point, SampleStats};
use zermelo_core::winds::WindSpec;
use zermelo_core::{Error, Result};

use crate::json::to_json;
use crate::spec_file::{expected_flag_curvature, matrix_from_rows, SpecFile};

/// Convexity margin kept by sample points of unperturbed data.
pub const SAMPLE_MARGIN: f64 = 0.15;

/// Reads and validates a spec file.
pub fn load_spec(path: &str) -> Result<WindSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {path}: {e}")))?;
    SpecFile::parse(&text)?.to_wind()
}

pub fn classify_cmd(wind: &WindSpec) -> Result<String> {
    let point: ModuliPoint = classify(wind)?;
    Ok(to_json(&point))
}

/// Options of the `verify` command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Factor applied to the 1-form `b`; anything but 1 is a negative control.
    pub perturb_b: f64,
}

/// Verification report. `pass` is true when every entry is within `tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    #[serde(rename = "K")]
    pub curvature: f64,
    pub samples: usize,
    pub tol: f64,
    pub flag_mean: f64,
    pub flag_std: f64,
    pub flag_max_deviation: f64,
    pub basic: f64,
    pub curvature_residual: f64,
    pub homothety: f64,
    pub sigma_defect: f64,
    pub pass: bool,
    /// Name and value of the largest violation, if any.
    pub worst: Option<String>,
}

/// Samples flag curvature and the characterizing equations of the
/// navigation metric of `wind`.
pub fn verify(wind: &WindSpec, opts: VerifyOptions) -> Result<VerifyReport> {
    if opts.samples == 0 {
        return Err(Error::Validation("--samples must be positive".into()));
    }
    if !(opts.perturb_b > 0.0 && opts.perturb_b.is_finite()) {
        return Err(Error::Validation("--perturb-b must be a positive number".into()));
    }
    let k = expected_flag_curvature(wind);
    classify(wind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let field = NavigationField { wind: wind.clone(), b_scale: opts.perturb_b };
    let metric = RandersMetric { field: field.clone() };
    // A scaled 1-form has |b|^2 = s^2 |W|^2, so keep s^2 |W|^2 <= 1 - SAMPLE_MARGIN.
    let margin = 1.0 - (1.0 - SAMPLE_MARGIN) / (opts.perturb_b * opts.perturb_b).max(1.0);
    let mut points = Vec::with_capacity(opts.samples);
    let mut flags = Vec::with_capacity(opts.samples);
    let mut homothety: f64 = 0.0;
    for _ in 0..opts.samples {
        let x = sample_point(wind, &mut rng, margin)?;
        let h = wind.model.metric_at(x.as_slice())?;
        let (y, v) = sample_flag(&h, &mut rng)?;
        flags.push(flag_curvature(&metric, x.as_slice(), y.as_slice(), v.as_slice())?);
        homothety = homothety.max(wind.homothety_residual(x.as_slice())?);
        points.push(x);
    }
    let stats = SampleStats::from_values(&flags);
    let res = cfc_residuals(&field, &points, k, wind.sigma)?;
    let checks = [
        ("flag curvature mean deviation", (stats.mean - k).abs()),
        ("flag curvature std", stats.std),
        ("Basic equation residual", res.basic),
        ("Curvature equation residual", res.curvature),
        ("homothety residual", homothety),
    ];
    let worst = checks
        .iter()
        .filter(|(_, v)| !(*v <= opts.tol))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(name, v)| format!("{name} = {v:.3e} exceeds {:.1e}", opts.tol));
    Ok(VerifyReport {
        curvature: k,
        samples: opts.samples,
        tol: opts.tol,
        flag_mean: stats.mean,
        flag_std: stats.std,
        flag_max_deviation: stats.max_deviation(k),
        basic: res.basic,
        curvature_residual: res.curvature,
        homothety,
        sigma_defect: res.sigma_defect,
        pass: worst.is_none(),
        worst,
    })
}

#[derive(Debug, Serialize)]
struct NormalFormOutput {
    family: Family,
    subtype: Subtype,
    a: Vec<f64>,
    sigma: f64,
    xi: f64,
    branch: Option<Branch>,
    conjugator: Vec<Vec<f64>>,
    normal_form: Vec<Vec<f64>>,
    conjugation_residual: f64,
    group_residual: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Normal form of the square matrix stored as a JSON array of rows.
pub fn normal_form_cmd(matrix_json: &str, algebra: Algebra) -> Result<String> {
    let raw: Vec<Vec<f64>> =
        serde_json::from_str(matrix_json).map_err(|e| Error::Validation(format!("matrix file: {e}")))?;
    let omega = matrix_from_rows(&raw, raw.len(), "matrix")?;
    let nf = normal_form(&omega, algebra)?;
    let out = NormalFormOutput {
        family: nf.family,
        subtype: nf.subtype,
        a: nf.a.clone(),
        sigma: nf.sigma,
        xi: nf.extra,
        branch: nf.branch,
        conjugator: rows(&nf.conjugator),
        normal_form: rows(&nf.rebuild()),
        conjugation_residual: nf.conjugation_residual(&omega)?,
        group_residual: nf.group_residual(),
    };
    Ok(to_json(&out))
}

/// Geodesic as CSV, plus the reason it stopped early, if it did.
pub fn geodesic_cmd(wind: &WindSpec, x0: &[f64], y0: &[f64], t_end: f64, dt: f64) -> Result<(String, Option<String>)> {
    let metric = NavigationMetric { wind: wind.clone() };
    let traj = geodesic_ivp(&metric, x0, y0, t_end, dt)?;
    Ok((traj.to_csv(), traj.exit.clone()))
}

#[derive(Debug, Serialize)]
struct ShootOutput {
    time: f64,
    direction: Vec<f64>,
    residual: f64,
    evaluations: usize,
}

/// Shortest travel time between two points.
pub fn shoot_cmd(wind: &WindSpec, from: &[f64], to: &[f64], tol: f64, dt: f64) -> Result<String> {
    let metric = NavigationMetric { wind: wind.clone() };
    let opts = ShootingOptions { dt, ..ShootingOptions::default() };
    let r = shortest_time(&metric, from, to, tol, opts)?;
    Ok(to_json(&ShootOutput {
        time: r.time,
        direction: r.direction.iter().copied().collect(),
        residual: r.residual,
        evaluations: r.evaluations,
    }))
}

pub fn moduli_cmd(n: usize, sign: CurvatureSign, sigma_nonzero: bool) -> Result<String> {
    Ok(moduli_dimension(n, sign, sigma_nonzero)?.to_string())
}

/// Spec file of a catalog example, or the list of identifiers.
pub fn examples_cmd(id: Option<&str>) -> Result<String> {
    match id {
        None => Ok(FIXTURE_IDS.join("\n")),
        Some(id) => Ok(to_json(&SpecFile::from_wind(&fixture(id)?.wind))),
    }
}

/// Parses a comma-separated list of numbers for the flag `name`.
pub fn parse_vector(text: &str, name: &str) -> Result<DVector<f64>> {
    let values: std::result::Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    values
        .map(DVector::from_vec)
        .map_err(|e| Error::Validation(format!("{name}: cannot parse {text:?} as numbers: {e}")))
}
