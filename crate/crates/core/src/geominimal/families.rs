//! Competitor families for the variational estimators.
//!
//! A family maps a parameter vector to support samples on the grid, or to
//! `None` when the parameters leave the feasible class (positivity plus the
//! planar convexity margin). Every competitor the optimizer evaluates is
//! strictly feasible, which is what makes the returned estimates sound
//! one-sided bounds.

use std::sync::Arc;

use crate::bodies::{ConvexSupportBody, FourierSupport, CONVEXITY_MARGIN};
use crate::error::{GeoError, Result};
use crate::linalg;
use crate::scalar::{real, Real};
use crate::sphere::SphereGrid;
use crate::trig::TrigSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompetitorFamily {
    /// Centered ellipsoids, parametrized by the lower-triangular factor with
    /// log-parametrized diagonal; n(n+1)/2 parameters.
    Ellipsoid,
    /// Planar support functions h = c0 + sum_{k<=k_max} (a_k cos + b_k sin),
    /// log-parametrized c0; 1 + 2 k_max parameters.
    FourierSupport { k_max: usize },
    /// Star competitors sampled on the radial grid (coordinate-ascent path
    /// only; not admissible for the convex-competitor estimators).
    RadialGrid,
}

impl CompetitorFamily {
    pub fn label(&self) -> String {
        match self {
            CompetitorFamily::Ellipsoid => "ellipsoid".to_string(),
            CompetitorFamily::FourierSupport { k_max } => format!("fourier-support(k_max={k_max})"),
            CompetitorFamily::RadialGrid => "radial-grid".to_string(),
        }
    }
}

/// Realizes family parameters as support samples on a grid.
pub(crate) struct FamilySynth<T> {
    family: CompetitorFamily,
    grid: Arc<SphereGrid<T>>,
    // Planar node tables for the Fourier family: cos(k theta_j), sin(k theta_j).
    cos_table: Vec<T>,
    sin_table: Vec<T>,
}

impl<T: Real> FamilySynth<T> {
    pub fn new(family: CompetitorFamily, grid: Arc<SphereGrid<T>>) -> Result<Self> {
        match family {
            CompetitorFamily::Ellipsoid => Ok(Self { family, grid, cos_table: vec![], sin_table: vec![] }),
            CompetitorFamily::FourierSupport { k_max } => {
                if grid.dim() != 2 {
                    return Err(GeoError::DimensionMismatch { expected: 2, got: grid.dim() });
                }
                if k_max < 1 {
                    return Err(GeoError::InvalidParameter("k_max must be >= 1".into()));
                }
                let m = grid.node_count();
                let mut cos_table = Vec::with_capacity(k_max * m);
                let mut sin_table = Vec::with_capacity(k_max * m);
                for k in 1..=k_max {
                    for j in 0..m {
                        let kt = grid.theta(j) * real::<T>(k as f64);
                        let (s, c) = kt.sin_cos();
                        cos_table.push(c);
                        sin_table.push(s);
                    }
                }
                Ok(Self { family, grid, cos_table, sin_table })
            }
            CompetitorFamily::RadialGrid => Err(GeoError::InvalidParameter(
                "the radial-grid family is only valid for star-competitor estimation".into(),
            )),
        }
    }

    pub fn param_len(&self) -> usize {
        match self.family {
            CompetitorFamily::Ellipsoid => {
                let n = self.grid.dim();
                n * (n + 1) / 2
            }
            CompetitorFamily::FourierSupport { k_max } => 1 + 2 * k_max,
            CompetitorFamily::RadialGrid => unreachable!(),
        }
    }

    /// Synthesizes support samples at the given node set; `None` when the
    /// parameters are infeasible.
    pub fn synth(&self, params: &[T]) -> Option<Vec<T>> {
        self.synth_on(params, &self.grid)
    }

    /// Synthesis on an arbitrary grid of the same dimension (used for the
    /// halved-resolution error estimate).
    pub fn synth_on(&self, params: &[T], grid: &SphereGrid<T>) -> Option<Vec<T>> {
        match self.family {
            CompetitorFamily::Ellipsoid => {
                let n = grid.dim();
                let matrix = lower_triangular_matrix(params, n);
                let mut h = Vec::with_capacity(grid.node_count());
                for j in 0..grid.node_count() {
                    let atu = linalg::matvec_t(&matrix, n, grid.node(j));
                    let norm = atu.iter().map(|x| *x * *x).sum::<T>().sqrt();
                    if !norm.is_finite() || norm <= T::zero() {
                        return None;
                    }
                    h.push(norm);
                }
                Some(h)
            }
            CompetitorFamily::FourierSupport { k_max } => {
                let fourier = fourier_from_params(params, k_max);
                let m = grid.node_count();
                let same_grid = m * k_max == self.cos_table.len()
                    && crate::functionals::same_grid(grid, &self.grid);
                let mut h = Vec::with_capacity(m);
                let mut min_h = T::infinity();
                let mut min_curv = T::infinity();
                let mut mean_h = T::zero();
                for j in 0..m {
                    let (hv, cv) = if same_grid {
                        let mut hv = fourier.c0;
                        let mut cv = fourier.c0;
                        for k in 1..=k_max {
                            let c = self.cos_table[(k - 1) * m + j];
                            let s = self.sin_table[(k - 1) * m + j];
                            let term = fourier.a[k - 1] * c + fourier.b[k - 1] * s;
                            hv += term;
                            let kf = real::<T>(k as f64);
                            cv += (T::one() - kf * kf) * term;
                        }
                        (hv, cv)
                    } else {
                        let theta = grid.theta(j);
                        (fourier.eval(theta), fourier.eval_curvature(theta))
                    };
                    min_h = min_h.min(hv);
                    min_curv = min_curv.min(cv);
                    mean_h += hv;
                    h.push(hv);
                }
                mean_h /= real::<T>(m as f64);
                let floor = real::<T>(CONVEXITY_MARGIN) * mean_h;
                if min_h <= floor || min_curv < floor {
                    return None;
                }
                Some(h)
            }
            CompetitorFamily::RadialGrid => unreachable!(),
        }
    }

    /// Parameters of the unit ball.
    pub fn ball_params(&self) -> Vec<T> {
        vec![T::zero(); self.param_len()]
    }

    /// Projects target support samples onto the family; falls back towards
    /// the ball until feasible.
    pub fn project(&self, target_h: &[T]) -> Vec<T> {
        let raw = match self.family {
            CompetitorFamily::Ellipsoid => self.fit_ellipsoid(target_h),
            CompetitorFamily::FourierSupport { k_max } => fit_fourier(self.grid.as_ref(), target_h, k_max),
            CompetitorFamily::RadialGrid => unreachable!(),
        };
        let Some(mut params) = raw else {
            return self.ball_params();
        };
        // Shrink towards the ball until the synthesis is feasible.
        let ball = self.ball_params();
        for _ in 0..60 {
            if self.synth(&params).is_some() {
                return params;
            }
            for (p, b) in params.iter_mut().zip(ball.iter()) {
                *p = *b + (*p - *b) * real::<T>(0.8);
            }
        }
        ball
    }

    fn fit_ellipsoid(&self, target_h: &[T]) -> Option<Vec<T>> {
        // Least squares for M = A A^t in h^2 = u^t M u, then a Cholesky
        // factor of the symmetric solution.
        let n = self.grid.dim();
        let cols = n * (n + 1) / 2;
        let rows = self.grid.node_count();
        let mut design = Vec::with_capacity(rows * cols);
        let mut rhs = Vec::with_capacity(rows);
        for j in 0..rows {
            let u = self.grid.node(j);
            for r in 0..n {
                for c in r..n {
                    let factor = if r == c { u[r] * u[c] } else { real::<T>(2.0) * u[r] * u[c] };
                    design.push(factor);
                }
            }
            rhs.push(target_h[j] * target_h[j]);
        }
        let (coeffs, _, _) = linalg::least_squares(&design, rows, cols, &rhs).ok()?;
        let mut m = vec![T::zero(); n * n];
        let mut idx = 0;
        for r in 0..n {
            for c in r..n {
                m[r * n + c] = coeffs[idx];
                m[c * n + r] = coeffs[idx];
                idx += 1;
            }
        }
        let l = cholesky(&m, n)?;
        // A = L works: h = |A^t u| depends only on A A^t = M.
        Some(triangular_params(&l, n))
    }
}

pub(crate) fn lower_triangular_matrix<T: Real>(params: &[T], n: usize) -> Vec<T> {
    let mut matrix = vec![T::zero(); n * n];
    let mut idx = 0;
    for r in 0..n {
        for c in 0..=r {
            matrix[r * n + c] = if r == c { params[idx].exp() } else { params[idx] };
            idx += 1;
        }
    }
    matrix
}

fn triangular_params<T: Real>(l: &[T], n: usize) -> Vec<T> {
    let mut params = Vec::with_capacity(n * (n + 1) / 2);
    for r in 0..n {
        for c in 0..=r {
            if r == c {
                params.push(l[r * n + c].ln());
            } else {
                params.push(l[r * n + c]);
            }
        }
    }
    params
}

fn cholesky<T: Real>(m: &[T], n: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for r in 0..n {
        for c in 0..=r {
            let mut sum = m[r * n + c];
            for k in 0..c {
                sum -= l[r * n + k] * l[c * n + k];
            }
            if r == c {
                if sum <= T::zero() {
                    return None;
                }
                l[r * n + c] = sum.sqrt();
            } else {
                l[r * n + c] = sum / l[c * n + c];
            }
        }
    }
    Some(l)
}

pub(crate) fn fourier_from_params<T: Real>(params: &[T], k_max: usize) -> FourierSupport<T> {
    FourierSupport {
        c0: params[0].exp(),
        a: params[1..1 + k_max].to_vec(),
        b: params[1 + k_max..1 + 2 * k_max].to_vec(),
    }
}

fn fit_fourier<T: Real>(_grid: &SphereGrid<T>, target_h: &[T], k_max: usize) -> Option<Vec<T>> {
    // The family's best L2 fit of a sampled support function is its low-mode
    // truncation.
    let analyzed = TrigSeries::from_samples(target_h).ok()?;
    let (a, b) = analyzed.low_modes(k_max);
    if a[0] <= T::zero() {
        return None;
    }
    let mut params = vec![T::zero(); 1 + 2 * k_max];
    params[0] = a[0].ln();
    for k in 1..=k_max {
        params[k] = a[k];
        params[k_max + k] = b[k];
    }
    Some(params)
}

/// Builds a convex support body from family parameters (used for witnesses).
pub(crate) fn body_from_params<T: Real>(
    synth: &FamilySynth<T>,
    grid: &Arc<SphereGrid<T>>,
    params: &[T],
) -> Result<ConvexSupportBody<T>> {
    let h = synth
        .synth(params)
        .ok_or_else(|| GeoError::Degenerate("witness parameters are infeasible".into()))?;
    match synth.family {
        CompetitorFamily::FourierSupport { k_max } => {
            ConvexSupportBody::from_fourier(grid.clone(), fourier_from_params(params, k_max))
        }
        _ => {
            let _ = h.len();
            ConvexSupportBody::new(grid.clone(), h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::make_ellipsoid;

    #[test]
    fn ellipsoid_family_roundtrip() {
        let grid = SphereGrid::<f64>::for_dim(2, 128, None).unwrap();
        let synth = FamilySynth::new(CompetitorFamily::Ellipsoid, grid.clone()).unwrap();
        assert_eq!(synth.param_len(), 3);
        let ball = synth.synth(&synth.ball_params()).unwrap();
        assert!(ball.iter().all(|h| (h - 1.0).abs() < 1e-14));

        // Project an ellipse and recover its support samples.
        let ell = make_ellipsoid(&grid, &[2.0, 0.0, 0.5, 1.0]).unwrap();
        let params = synth.project(ell.h());
        let h = synth.synth(&params).unwrap();
        for j in 0..grid.node_count() {
            assert!((h[j] - ell.h()[j]).abs() < 1e-8, "node {j}: {} vs {}", h[j], ell.h()[j]);
        }
    }

    #[test]
    fn fourier_family_feasibility() {
        let grid = SphereGrid::<f64>::for_dim(2, 128, None).unwrap();
        let synth = FamilySynth::new(CompetitorFamily::FourierSupport { k_max: 4 }, grid.clone()).unwrap();
        assert_eq!(synth.param_len(), 9);
        let ball = synth.synth(&synth.ball_params()).unwrap();
        assert!(ball.iter().all(|h| (h - 1.0).abs() < 1e-14));

        // A pinched competitor is rejected.
        let mut params = synth.ball_params();
        params[2] = 0.5; // a_2 too large: curvature 1 - 1.5 cos < 0 somewhere
        assert!(synth.synth(&params).is_none());

        // Projection of a valid body is feasible and close.
        let body = crate::bodies::random_smooth_body(&grid, 77, 4, 0.3).unwrap();
        let params = synth.project(body.h());
        let h = synth.synth(&params).unwrap();
        for j in 0..grid.node_count() {
            assert!((h[j] - body.h()[j]).abs() < 1e-10);
        }
    }
}
