//! Body JSON schema.
//!
//! The wire format for bodies is the record
//! `{ "kind": ..., "dim": ..., "params": ... }` with kind one of
//! `"ball" | "ellipsoid" | "fourier_support" | "sampled"` and params carrying
//! the radius, the row-major matrix, the Fourier coefficient record, or the
//! raw `h`/`f` samples respectively.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bodies::{
    self, ClosedForm, ConvexSupportBody, FourierSupport, Provenance, SmoothBody, StarBody,
};
use crate::error::{GeoError, Result};
use crate::sphere::SphereGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Ball,
    Ellipsoid,
    FourierSupport,
    Sampled,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Row-major n x n matrix of the ellipsoid A B.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Cosine coefficients a_k, k = 1.. (planar support record).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    /// Sine coefficients b_k, k = 1..
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    /// Radial samples (star bodies in witness serialization).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub dim: usize,
    pub params: BodyParams,
}

impl BodySpec {
    pub fn ball(dim: usize, r: f64) -> Self {
        Self { kind: BodyKind::Ball, dim, params: BodyParams { r: Some(r), ..Default::default() } }
    }

    pub fn ellipsoid(dim: usize, matrix: Vec<f64>) -> Self {
        Self {
            kind: BodyKind::Ellipsoid,
            dim,
            params: BodyParams { matrix: Some(matrix), ..Default::default() },
        }
    }

    pub fn fourier(c0: f64, a: Vec<f64>, b: Vec<f64>) -> Self {
        Self {
            kind: BodyKind::FourierSupport,
            dim: 2,
            params: BodyParams { c0: Some(c0), a: Some(a), b: Some(b), ..Default::default() },
        }
    }

    pub fn sampled(dim: usize, h: Vec<f64>, f: Vec<f64>) -> Self {
        Self {
            kind: BodyKind::Sampled,
            dim,
            params: BodyParams { h: Some(h), f: Some(f), ..Default::default() },
        }
    }

    /// Realizes the spec as a smooth body on the given grid.
    pub fn realize(&self, grid: &Arc<SphereGrid<f64>>) -> Result<SmoothBody<f64>> {
        if grid.dim() != self.dim {
            return Err(GeoError::DimensionMismatch { expected: self.dim, got: grid.dim() });
        }
        match self.kind {
            BodyKind::Ball => {
                let r = self.params.r.ok_or_else(|| missing("r"))?;
                bodies::make_ball(grid, r)
            }
            BodyKind::Ellipsoid => {
                let matrix = self.params.matrix.as_ref().ok_or_else(|| missing("matrix"))?;
                bodies::make_ellipsoid(grid, matrix)
            }
            BodyKind::FourierSupport => {
                let fourier = self.fourier_record()?;
                let support = ConvexSupportBody::from_fourier(grid.clone(), fourier)?;
                bodies::curvature_from_support(&support)
            }
            BodyKind::Sampled => {
                let h = self.params.h.as_ref().ok_or_else(|| missing("h"))?.clone();
                match &self.params.f {
                    Some(f) => SmoothBody::from_samples(grid.clone(), h, f.clone()),
                    None => {
                        let support = ConvexSupportBody::new(grid.clone(), h)?;
                        bodies::curvature_from_support(&support)
                    }
                }
            }
        }
    }

    fn fourier_record(&self) -> Result<FourierSupport<f64>> {
        let c0 = self.params.c0.ok_or_else(|| missing("c0"))?;
        let a = self.params.a.clone().unwrap_or_default();
        let b = self.params.b.clone().unwrap_or_default();
        let k_max = a.len().max(b.len());
        let mut a_full = a;
        let mut b_full = b;
        a_full.resize(k_max, 0.0);
        b_full.resize(k_max, 0.0);
        Ok(FourierSupport { c0, a: a_full, b: b_full })
    }

    /// Serializes a smooth body, preferring its exact description.
    pub fn from_body(body: &SmoothBody<f64>) -> Self {
        match body.provenance() {
            Provenance::ClosedForm(ClosedForm::Ball { r }) => Self::ball(body.grid().dim(), *r),
            Provenance::ClosedForm(ClosedForm::Ellipsoid { matrix }) => {
                Self::ellipsoid(body.grid().dim(), matrix.clone())
            }
            _ => match body.support().fourier() {
                Some(fr) => Self::fourier(fr.c0, fr.a.clone(), fr.b.clone()),
                None => Self::sampled(body.grid().dim(), body.h().to_vec(), body.f().to_vec()),
            },
        }
    }

    /// Serializes a support-only body (estimator witnesses).
    pub fn from_support(body: &ConvexSupportBody<f64>) -> Self {
        match body.fourier() {
            Some(fr) => Self::fourier(fr.c0, fr.a.clone(), fr.b.clone()),
            None => Self {
                kind: BodyKind::Sampled,
                dim: body.grid().dim(),
                params: BodyParams { h: Some(body.h().to_vec()), ..Default::default() },
            },
        }
    }

    /// Serializes a star body (radial witnesses).
    pub fn from_star(body: &StarBody<f64>) -> Self {
        Self {
            kind: BodyKind::Sampled,
            dim: body.grid().dim(),
            params: BodyParams { rho: Some(body.rho().to_vec()), ..Default::default() },
        }
    }
}

fn missing(field: &str) -> GeoError {
    GeoError::InvalidParameter(format!("body params missing field '{field}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_json() {
        let grid = SphereGrid::<f64>::for_dim(2, 128, None).unwrap();
        let specs = vec![
            BodySpec::ball(2, 1.5),
            BodySpec::ellipsoid(2, vec![2.0, 0.0, 0.3, 1.0]),
            BodySpec::fourier(1.0, vec![0.0, 0.1], vec![0.0, -0.05]),
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            let parsed: BodySpec = serde_json::from_str(&text).unwrap();
            let a = spec.realize(&grid).unwrap();
            let b = parsed.realize(&grid).unwrap();
            assert_eq!(a.h(), b.h());
            assert_eq!(a.f(), b.f());
            // Serialization is stable byte-for-byte.
            assert_eq!(text, serde_json::to_string(&parsed).unwrap());
        }
    }

    #[test]
    fn from_body_prefers_exact_descriptions() {
        let grid = SphereGrid::<f64>::for_dim(2, 128, None).unwrap();
        let ell = bodies::make_ellipsoid(&grid, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let spec = BodySpec::from_body(&ell);
        assert_eq!(spec.kind, BodyKind::Ellipsoid);

        let rnd = bodies::random_smooth_body(&grid, 3, 4, 0.3).unwrap();
        let spec = BodySpec::from_body(&rnd);
        assert_eq!(spec.kind, BodyKind::FourierSupport);
        let back = spec.realize(&grid).unwrap();
        for j in 0..grid.node_count() {
            assert!((back.h()[j] - rnd.h()[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn schema_rejects_unknown_fields() {
        let text = r#"{"kind":"ball","dim":2,"params":{"r":1.0,"bogus":3}}"#;
        assert!(serde_json::from_str::<BodySpec>(text).is_err());
    }
}
