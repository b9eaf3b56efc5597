//! JSON description of a space form and a wind.
//!
//! ```json
//! {"model": {"kind": "sphere", "K": 1, "n": 3},
//!  "wind":  {"sigma": 0, "Q": [[0, 0.5, 0], [-0.5, 0, 0], [0, 0, 0]], "C": [0, 0, 0]}}
//! ```
//!
//! `K` is required on the sphere and the Klein model. On Euclidean space it
//! may be given, in which case it must equal the flag curvature
//! `-sigma^2 / 16` that the data produces. `hemisphere` (`1` or `-1`)
//! selects the sphere chart and defaults to `1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use zermelo_core::classifier::check_claimed_curvature;
use zermelo_core::spaceforms::{ModelKind, SpaceFormModel};
use zermelo_core::winds::WindSpec;
use zermelo_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hemisphere: Option<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindSection {
    #[serde(default)]
    pub sigma: f64,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub model: ModelSection,
    pub wind: WindSection,
}

/// Square matrix from nested rows, with field-qualified shape errors.
pub fn matrix_from_rows(rows: &[Vec<f64>], n: usize, field: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n {
        return Err(Error::Validation(format!("{field}: expected {n} rows, got {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Validation(format!("{field}[{i}]: expected {n} entries, got {}", row.len())));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn prefixed(field: &str, e: Error) -> Error {
    match e {
        Error::Validation(msg) => Error::Validation(format!("{field}: {msg}")),
        other => other,
    }
}

impl SpecFile {
    /// Parses JSON text; syntax and schema errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("spec file: {e}")))
    }

    /// Builds the model and wind, checking every field.
    pub fn to_wind(&self) -> Result<WindSpec> {
        let m = &self.model;
        let curvature = match (m.kind, m.curvature) {
            (ModelKind::Euclidean, _) => 0.0,
            (_, Some(k)) => k,
            (kind, None) => {
                return Err(Error::Validation(format!("model.K: required for the {kind:?} model")));
            }
        };
        let mut model = SpaceFormModel::new(m.kind, curvature, m.n).map_err(|e| prefixed("model", e))?;
        if let Some(sign) = m.hemisphere {
            model = model.with_hemisphere(sign).map_err(|e| prefixed("model.hemisphere", e))?;
        }
        let n = m.n;
        let q = matrix_from_rows(&self.wind.q, n, "wind.Q")?;
        if self.wind.c.len() != n {
            return Err(Error::Validation(format!("wind.C: expected {n} entries, got {}", self.wind.c.len())));
        }
        let c = DVector::from_column_slice(&self.wind.c);
        let wind = WindSpec::new(model, self.wind.sigma, q, c).map_err(|e| prefixed("wind", e))?;
        if let (ModelKind::Euclidean, Some(k)) = (m.kind, m.curvature) {
            check_claimed_curvature(&wind, k)?;
        }
        Ok(wind)
    }

    /// The spec file describing `wind`; Euclidean files state the flag
    /// curvature `-sigma^2 / 16` explicitly.
    pub fn from_wind(wind: &WindSpec) -> Self {
        let model = &wind.model;
        let n = model.dim;
        let curvature = match model.kind {
            // Adding zero turns -0 into 0.
            ModelKind::Euclidean => -wind.sigma * wind.sigma / 16.0 + 0.0,
            _ => model.curvature,
        };
        SpecFile {
            model: ModelSection {
                kind: model.kind,
                curvature: Some(curvature),
                n,
                hemisphere: (model.hemisphere_sign != 1).then_some(model.hemisphere_sign),
            },
            wind: WindSection {
                sigma: wind.sigma,
                q: (0..n).map(|i| (0..n).map(|j| wind.q[(i, j)]).collect()).collect(),
                c: wind.c.iter().copied().collect(),
            },
        }
    }
}

/// Flag curvature the navigation metric of `wind` has.
pub fn expected_flag_curvature(wind: &WindSpec) -> f64 {
    match wind.model.kind {
        ModelKind::Euclidean => -wind.sigma * wind.sigma / 16.0 + 0.0,
        _ => wind.model.curvature,
    }
}
