//! Quadrature grids on the unit sphere.
//!
//! Every functional in the crate is an integral over S^{n-1}; grids are built
//! once, frozen, and shared. Three schemes cover the supported dimensions:
//! a uniform circle rule (n = 2, spectrally exact for trigonometric
//! polynomials of degree below the node count), a Gauss-Legendre x uniform
//! product rule (n = 3), and seeded Monte Carlo (n >= 4).

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::scalar::{real, sphere_measure, Real};
use crate::trig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    UniformCircle,
    ProductGauss,
    MonteCarlo,
}

impl GridScheme {
    pub fn name(self) -> &'static str {
        match self {
            GridScheme::UniformCircle => "uniform-circle",
            GridScheme::ProductGauss => "product-gauss",
            GridScheme::MonteCarlo => "monte-carlo",
        }
    }

    /// The scheme a given ambient dimension uses.
    pub fn for_dim(dim: usize) -> Result<Self> {
        match dim {
            0 | 1 => Err(GeoError::InvalidParameter(format!("ambient dimension must be >= 2, got {dim}"))),
            2 => Ok(GridScheme::UniformCircle),
            3 => Ok(GridScheme::ProductGauss),
            _ => Ok(GridScheme::MonteCarlo),
        }
    }
}

/// Quadrature nodes and weights on S^{n-1}. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SphereGrid<T> {
    dim: usize,
    resolution: usize,
    scheme: GridScheme,
    seed: Option<u64>,
    /// Node coordinates, row-major: node j occupies nodes[j*dim .. (j+1)*dim].
    nodes: Vec<T>,
    weights: Vec<T>,
    /// Polynomial exactness degree for deterministic schemes.
    exactness: Option<usize>,
}

impl<T: Real> SphereGrid<T> {
    /// Builds a grid. `seed` is required iff the scheme is Monte Carlo.
    pub fn build(dim: usize, resolution: usize, scheme: GridScheme, seed: Option<u64>) -> Result<Arc<Self>> {
        if dim < 2 {
            return Err(GeoError::InvalidParameter(format!("dim must be >= 2, got {dim}")));
        }
        if resolution < 8 {
            return Err(GeoError::InvalidParameter(format!("resolution must be >= 8, got {resolution}")));
        }
        let expected = GridScheme::for_dim(dim)?;
        if scheme != expected {
            return Err(GeoError::UnsupportedScheme { dim, scheme: scheme.name() });
        }
        match scheme {
            GridScheme::UniformCircle => {
                if resolution % 2 != 0 {
                    return Err(GeoError::InvalidParameter(format!(
                        "planar grids need an even node count, got {resolution}"
                    )));
                }
                Ok(Arc::new(Self::uniform_circle(resolution)))
            }
            GridScheme::ProductGauss => Ok(Arc::new(Self::product_gauss(resolution))),
            GridScheme::MonteCarlo => {
                let seed = seed.ok_or_else(|| {
                    GeoError::InvalidParameter("monte-carlo grids require a seed".to_string())
                })?;
                Ok(Arc::new(Self::monte_carlo(dim, resolution, seed)))
            }
        }
    }

    /// The grid a given dimension naturally uses.
    pub fn for_dim(dim: usize, resolution: usize, seed: Option<u64>) -> Result<Arc<Self>> {
        Self::build(dim, resolution, GridScheme::for_dim(dim)?, seed)
    }

    fn uniform_circle(m: usize) -> Self {
        let two_pi = T::PI() * real::<T>(2.0);
        let w = two_pi / real::<T>(m as f64);
        let mut nodes = Vec::with_capacity(2 * m);
        for j in 0..m {
            let theta = two_pi * real::<T>(j as f64) / real::<T>(m as f64);
            nodes.push(theta.cos());
            nodes.push(theta.sin());
        }
        Self {
            dim: 2,
            resolution: m,
            scheme: GridScheme::UniformCircle,
            seed: None,
            nodes,
            weights: vec![w; m],
            exactness: Some(m - 1),
        }
    }

    fn product_gauss(resolution: usize) -> Self {
        // Gauss-Legendre in the polar cosine, uniform in azimuth with twice
        // as many nodes; exact for spherical polynomials of degree
        // <= 2*resolution - 1.
        let n_polar = resolution;
        let n_az = 2 * resolution;
        let (gl_nodes, gl_weights) = gauss_legendre::<T>(n_polar);
        let two_pi = T::PI() * real::<T>(2.0);
        let w_az = two_pi / real::<T>(n_az as f64);
        let mut nodes = Vec::with_capacity(3 * n_polar * n_az);
        let mut weights = Vec::with_capacity(n_polar * n_az);
        for (t, wt) in gl_nodes.iter().zip(gl_weights.iter()) {
            let sin_pol = (T::one() - *t * *t).sqrt();
            for k in 0..n_az {
                let phi = two_pi * real::<T>(k as f64) / real::<T>(n_az as f64);
                nodes.push(sin_pol * phi.cos());
                nodes.push(sin_pol * phi.sin());
                nodes.push(*t);
                weights.push(*wt * w_az);
            }
        }
        Self {
            dim: 3,
            resolution,
            scheme: GridScheme::ProductGauss,
            seed: None,
            nodes,
            weights,
            exactness: Some(2 * resolution - 1),
        }
    }

    fn monte_carlo(dim: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let w = sphere_measure::<T>(dim) / real::<T>(count as f64);
        let mut nodes = Vec::with_capacity(dim * count);
        for _ in 0..count {
            loop {
                let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    nodes.extend(v.iter().map(|x| real::<T>(x / norm)));
                    break;
                }
            }
        }
        Self {
            dim,
            resolution: count,
            scheme: GridScheme::MonteCarlo,
            seed: Some(seed),
            nodes,
            weights: vec![w; count],
            exactness: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn exactness(&self) -> Option<usize> {
        self.exactness
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn node(&self, j: usize) -> &[T] {
        &self.nodes[j * self.dim..(j + 1) * self.dim]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Planar node angle 2*pi*j/m.
    pub fn theta(&self, j: usize) -> T {
        debug_assert_eq!(self.dim, 2);
        T::PI() * real::<T>(2.0) * real::<T>(j as f64) / real::<T>(self.resolution as f64)
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Quadrature sum over validated samples.
    pub fn integrate(&self, samples: &[T]) -> Result<T> {
        if samples.len() != self.node_count() {
            return Err(GeoError::LengthMismatch { expected: self.node_count(), got: samples.len() });
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(GeoError::NonFinite(i));
            }
        }
        Ok(self.integrate_unchecked(samples))
    }

    #[inline]
    pub(crate) fn integrate_unchecked(&self, samples: &[T]) -> T {
        self.weights.iter().zip(samples.iter()).map(|(w, s)| *w * *s).sum()
    }

    /// Integrates a function of the node coordinates.
    pub fn integrate_fn(&self, f: impl Fn(&[T]) -> T) -> T {
        (0..self.node_count()).map(|j| self.weights[j] * f(self.node(j))).sum()
    }

    /// Quadrature value plus an error estimate.
    ///
    /// Deterministic schemes compare against the halved rule (even-index
    /// subsample for the circle, halved azimuth for the product rule);
    /// Monte Carlo reports the standard error of the weighted mean.
    pub fn integrate_with_err(&self, samples: &[T]) -> Result<(T, T)> {
        let full = self.integrate(samples)?;
        let err = match self.scheme {
            GridScheme::UniformCircle => {
                let mut half = T::zero();
                for j in (0..self.node_count()).step_by(2) {
                    half += samples[j];
                }
                half *= self.weights[0] * real::<T>(2.0);
                (full - half).abs()
            }
            GridScheme::ProductGauss => {
                let n_az = 2 * self.resolution;
                let mut half = T::zero();
                for j in (0..self.node_count()).step_by(2) {
                    // Node layout is azimuth-major per polar ring and n_az is
                    // even, so taking every other node halves each ring.
                    half += self.weights[j] * real::<T>(2.0) * samples[j];
                }
                debug_assert_eq!(self.node_count() % n_az, 0);
                (full - half).abs()
            }
            GridScheme::MonteCarlo => {
                let count = real::<T>(self.node_count() as f64);
                let mean = full / self.total_weight();
                let var: T = samples
                    .iter()
                    .map(|s| {
                        let d = *s - mean;
                        d * d
                    })
                    .sum::<T>()
                    / count;
                self.total_weight() * (var / count).sqrt()
            }
        };
        // Floor at the roundoff scale of the accumulated sum.
        let floor = T::epsilon() * real::<T>(self.node_count() as f64).sqrt() * full.abs();
        Ok((full, err.max(floor)))
    }
}

/// Spectral derivative of uniform-circle samples; see [`trig::differentiate_periodic`].
pub fn differentiate_periodic<T: Real>(samples: &[T], order: usize) -> Result<Vec<T>> {
    trig::differentiate_periodic(samples, order)
}

/// Gauss-Legendre nodes and weights on (-1, 1) by Newton iteration.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = real::<T>(n as f64);
    for i in 0..n {
        // Tricomi-style initial guess.
        let guess = (real::<T>(std::f64::consts::PI) * (real::<T>(i as f64) + real::<T>(0.75))
            / (nf + real::<T>(0.5)))
        .cos();
        let mut x = guess;
        for _ in 0..64 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < T::epsilon() * real::<T>(4.0) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[i] = x;
        weights[i] = real::<T>(2.0) / ((T::one() - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = real::<T>(k as f64);
        let p2 = ((real::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = real::<T>(n as f64) * (p0 - x * p1) / (T::one() - x * x);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_circle_nodes_and_weights() {
        let grid = SphereGrid::<f64>::build(2, 256, GridScheme::UniformCircle, None).unwrap();
        assert_eq!(grid.node_count(), 256);
        for w in grid.weights() {
            assert!((w - 2.0 * PI / 256.0).abs() < 1e-15);
        }
        for j in 0..grid.node_count() {
            let u = grid.node(j);
            let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn product_gauss_total_measure() {
        let grid = SphereGrid::<f64>::build(3, 64, GridScheme::ProductGauss, None).unwrap();
        assert!((grid.total_weight() - 4.0 * PI).abs() < 1e-12);
        for j in (0..grid.node_count()).step_by(97) {
            let u = grid.node(j);
            let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn monte_carlo_total_measure_s3() {
        // sigma(S^3) = 2 pi^2; weights are sigma/N by construction and the
        // analytic constant is what this pins down.
        let grid = SphereGrid::<f64>::build(4, 100_000, GridScheme::MonteCarlo, Some(7)).unwrap();
        let exact = 2.0 * PI * PI;
        assert!((grid.total_weight() - exact).abs() / exact < 5e-3);
        for j in (0..grid.node_count()).step_by(9973) {
            let u = grid.node(j);
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn scheme_pairing_is_enforced() {
        assert!(SphereGrid::<f64>::build(2, 64, GridScheme::ProductGauss, None).is_err());
        assert!(SphereGrid::<f64>::build(3, 64, GridScheme::MonteCarlo, Some(1)).is_err());
        assert!(SphereGrid::<f64>::build(4, 64, GridScheme::MonteCarlo, None).is_err());
        assert!(SphereGrid::<f64>::build(2, 63, GridScheme::UniformCircle, None).is_err());
    }

    #[test]
    fn integrate_constants_and_symmetry() {
        let grid = SphereGrid::<f64>::for_dim(2, 128, None).unwrap();
        let ones = vec![1.0; grid.node_count()];
        assert!((grid.integrate(&ones).unwrap() - 2.0 * PI).abs() < 1e-13);

        let grid3 = SphereGrid::<f64>::for_dim(3, 32, None).unwrap();
        let ux2: Vec<f64> = (0..grid3.node_count()).map(|j| grid3.node(j)[0].powi(2)).collect();
        assert!((grid3.integrate(&ux2).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn trig_polynomial_integrates_exactly() {
        // cos^2(3 theta) integrates to pi.
        let grid = SphereGrid::<f64>::for_dim(2, 256, None).unwrap();
        let samples: Vec<f64> = (0..256).map(|j| (3.0 * grid.theta(j)).cos().powi(2)).collect();
        assert!((grid.integrate(&samples).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        let grid = SphereGrid::<f64>::for_dim(2, 64, None).unwrap();
        assert!(grid.integrate(&vec![1.0; 63]).is_err());
        let mut samples = vec![1.0; 64];
        samples[10] = f64::NAN;
        assert!(grid.integrate(&samples).is_err());
    }

    #[test]
    fn integration_is_linear() {
        let grid = SphereGrid::<f64>::for_dim(2, 128, None).unwrap();
        let f: Vec<f64> = (0..128).map(|j| grid.theta(j).cos().exp()).collect();
        let g: Vec<f64> = (0..128).map(|j| (2.0 * grid.theta(j)).sin() + 1.5).collect();
        let combo: Vec<f64> = f.iter().zip(g.iter()).map(|(a, b)| 2.5 * a - 0.75 * b).collect();
        let lhs = grid.integrate(&combo).unwrap();
        let rhs = 2.5 * grid.integrate(&f).unwrap() - 0.75 * grid.integrate(&g).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn refinement_is_stable_for_smooth_integrands() {
        let sample = |m: usize| -> f64 {
            let grid = SphereGrid::<f64>::for_dim(2, m, None).unwrap();
            let samples: Vec<f64> = (0..m).map(|j| grid.theta(j).cos().exp()).collect();
            grid.integrate(&samples).unwrap()
        };
        assert!((sample(128) - sample(256)).abs() < 1e-10);

        let sample3 = |r: usize| -> f64 {
            let grid = SphereGrid::<f64>::for_dim(3, r, None).unwrap();
            let samples: Vec<f64> =
                (0..grid.node_count()).map(|j| (grid.node(j)[2] + 0.3 * grid.node(j)[0]).exp()).collect();
            grid.integrate(&samples).unwrap()
        };
        assert!((sample3(24) - sample3(48)).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_quadrature_is_exact_for_polynomials() {
        let (nodes, weights) = gauss_legendre::<f64>(12);
        // integral of x^8 over (-1,1) = 2/9
        let val: f64 = nodes.iter().zip(weights.iter()).map(|(x, w)| w * x.powi(8)).sum();
        assert!((val - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn grids_reproducible_for_fixed_seed() {
        let a = SphereGrid::<f64>::build(4, 1000, GridScheme::MonteCarlo, Some(42)).unwrap();
        let b = SphereGrid::<f64>::build(4, 1000, GridScheme::MonteCarlo, Some(42)).unwrap();
        assert_eq!(a.nodes, b.nodes);
    }
}
