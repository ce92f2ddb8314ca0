//! Body representations and geometric primitives.
//!
//! Star bodies carry radial samples, convex bodies carry support samples, and
//! smooth bodies pair a support function with a positive curvature function.
//! Polarity swaps the two sample kinds through h(u) * rho_polar(u) = 1.
//!
//! Dimension policy: arbitrary smooth bodies exist in the plane only, where
//! the curvature function is the spectral second derivative h'' + h. In
//! dimension 3 bodies are balls, ellipsoids or user-supplied (h, f) pairs;
//! in dimension >= 4 only balls and ellipsoids.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{GeoError, Result};
use crate::linalg;
use crate::scalar::{real, Real};
use crate::sphere::{GridScheme, SphereGrid};
use crate::trig::TrigSeries;

/// Planar convexity margin, in units of the mean support value.
pub const CONVEXITY_MARGIN: f64 = 1e-6;

/// A star-shaped body given by positive radial samples.
#[derive(Debug, Clone)]
pub struct StarBody<T> {
    grid: Arc<SphereGrid<T>>,
    rho: Vec<T>,
}

impl<T: Real> StarBody<T> {
    pub fn new(grid: Arc<SphereGrid<T>>, rho: Vec<T>) -> Result<Self> {
        if rho.len() != grid.node_count() {
            return Err(GeoError::LengthMismatch { expected: grid.node_count(), got: rho.len() });
        }
        check_positive(&rho)?;
        Ok(Self { grid, rho })
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn dilate(&self, factor: T) -> Result<Self> {
        if factor <= T::zero() {
            return Err(GeoError::InvalidParameter("dilation factor must be positive".into()));
        }
        Ok(Self { grid: self.grid.clone(), rho: self.rho.iter().map(|r| *r * factor).collect() })
    }

    /// Volume by the radial formula |L| = (1/n) integral of rho^n.
    pub fn volume(&self) -> T {
        let n = self.grid.dim();
        let samples: Vec<T> = self.rho.iter().map(|r| r.powi(n as i32)).collect();
        self.grid.integrate_unchecked(&samples) / real::<T>(n as f64)
    }
}

/// Fourier coefficient record of a planar support function:
/// h(theta) = c0 + sum_k a[k-1] cos(k theta) + b[k-1] sin(k theta).
#[derive(Debug, Clone)]
pub struct FourierSupport<T> {
    pub c0: T,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Real> FourierSupport<T> {
    pub fn k_max(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, theta: T) -> T {
        let mut acc = self.c0;
        for k in 1..=self.a.len() {
            let kt = theta * real::<T>(k as f64);
            let (s, c) = kt.sin_cos();
            acc += self.a[k - 1] * c + self.b[k - 1] * s;
        }
        acc
    }

    /// h'' + h, which drops each mode by the factor (1 - k^2).
    pub fn eval_curvature(&self, theta: T) -> T {
        let mut acc = self.c0;
        for k in 1..=self.a.len() {
            let kf = real::<T>(k as f64);
            let factor = T::one() - kf * kf;
            let kt = theta * kf;
            let (s, c) = kt.sin_cos();
            acc += factor * (self.a[k - 1] * c + self.b[k - 1] * s);
        }
        acc
    }

    fn min_on_scan(&self, eval: impl Fn(&Self, T) -> T, scan: usize) -> T {
        let mut min = T::infinity();
        for j in 0..scan {
            let theta = T::PI() * real::<T>(2.0) * real::<T>(j as f64) / real::<T>(scan as f64);
            min = min.min(eval(self, theta));
        }
        min
    }

    pub fn min_support(&self) -> T {
        self.min_on_scan(Self::eval, 4096.max(16 * self.a.len()))
    }

    pub fn min_curvature(&self) -> T {
        self.min_on_scan(Self::eval_curvature, 4096.max(16 * self.a.len()))
    }
}

/// A convex body with the origin interior, given by positive support samples.
#[derive(Debug, Clone)]
pub struct ConvexSupportBody<T> {
    grid: Arc<SphereGrid<T>>,
    h: Vec<T>,
    fourier: Option<FourierSupport<T>>,
}

impl<T: Real> ConvexSupportBody<T> {
    /// Wraps support samples. Positivity is enforced here; the planar
    /// convexity margin is enforced where a curvature function is derived
    /// (see [`curvature_from_support`]) and by the optimizer barriers.
    pub fn new(grid: Arc<SphereGrid<T>>, h: Vec<T>) -> Result<Self> {
        if h.len() != grid.node_count() {
            return Err(GeoError::LengthMismatch { expected: grid.node_count(), got: h.len() });
        }
        check_positive(&h)?;
        Ok(Self { grid, h, fourier: None })
    }

    pub fn from_fourier(grid: Arc<SphereGrid<T>>, fourier: FourierSupport<T>) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(GeoError::DimensionMismatch { expected: 2, got: grid.dim() });
        }
        let h: Vec<T> = (0..grid.node_count()).map(|j| fourier.eval(grid.theta(j))).collect();
        check_positive(&h)?;
        Ok(Self { grid, h, fourier: Some(fourier) })
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    pub fn h(&self) -> &[T] {
        &self.h
    }

    pub fn fourier(&self) -> Option<&FourierSupport<T>> {
        self.fourier.as_ref()
    }

    pub fn dilate(&self, factor: T) -> Result<Self> {
        if factor <= T::zero() {
            return Err(GeoError::InvalidParameter("dilation factor must be positive".into()));
        }
        let fourier = self.fourier.as_ref().map(|f| FourierSupport {
            c0: f.c0 * factor,
            a: f.a.iter().map(|x| *x * factor).collect(),
            b: f.b.iter().map(|x| *x * factor).collect(),
        });
        Ok(Self { grid: self.grid.clone(), h: self.h.iter().map(|x| *x * factor).collect(), fourier })
    }

    /// Polar volume |K°| = (1/n) integral of h^{-n}.
    pub fn polar_volume_value(&self) -> T {
        let n = self.grid.dim();
        let samples: Vec<T> = self.h.iter().map(|h| h.powi(-(n as i32))).collect();
        self.grid.integrate_unchecked(&samples) / real::<T>(n as f64)
    }

    /// Planar curvature samples h'' + h (spectral; exact when the Fourier
    /// record is present).
    pub fn curvature_samples(&self) -> Result<Vec<T>> {
        if self.grid.dim() != 2 {
            return Err(GeoError::DimensionMismatch { expected: 2, got: self.grid.dim() });
        }
        if let Some(fourier) = &self.fourier {
            return Ok((0..self.grid.node_count())
                .map(|j| fourier.eval_curvature(self.grid.theta(j)))
                .collect());
        }
        let d2 = crate::trig::differentiate_periodic(&self.h, 2)?;
        Ok(d2.iter().zip(self.h.iter()).map(|(dd, h)| *dd + *h).collect())
    }
}

/// Closed-form body families with exact support and curvature.
#[derive(Debug, Clone)]
pub enum ClosedForm<T> {
    Ball { r: T },
    /// Image of the unit ball under the matrix (row-major, n x n).
    Ellipsoid { matrix: Vec<T> },
}

#[derive(Debug, Clone)]
pub enum Provenance<T> {
    /// Planar spectral curvature h'' + h.
    FromSupport,
    ClosedForm(ClosedForm<T>),
    Supplied,
}

impl<T> Provenance<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::FromSupport => "from-support",
            Provenance::ClosedForm(_) => "closed-form",
            Provenance::Supplied => "supplied",
        }
    }
}

/// A convex body with continuous positive curvature function: the input class
/// of every curvature-based functional.
#[derive(Debug, Clone)]
pub struct SmoothBody<T> {
    support: ConvexSupportBody<T>,
    f: Vec<T>,
    provenance: Provenance<T>,
}

impl<T: Real> SmoothBody<T> {
    fn assemble(support: ConvexSupportBody<T>, f: Vec<T>, provenance: Provenance<T>) -> Result<Self> {
        if f.len() != support.grid().node_count() {
            return Err(GeoError::LengthMismatch { expected: support.grid().node_count(), got: f.len() });
        }
        check_positive(&f)?;
        Ok(Self { support, f, provenance })
    }

    /// Builds a body from externally supplied (h, f) samples.
    pub fn from_samples(grid: Arc<SphereGrid<T>>, h: Vec<T>, f: Vec<T>) -> Result<Self> {
        let support = ConvexSupportBody::new(grid, h)?;
        Self::assemble(support, f, Provenance::Supplied)
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        self.support.grid()
    }

    pub fn support(&self) -> &ConvexSupportBody<T> {
        &self.support
    }

    pub fn h(&self) -> &[T] {
        self.support.h()
    }

    pub fn f(&self) -> &[T] {
        &self.f
    }

    pub fn provenance(&self) -> &Provenance<T> {
        &self.provenance
    }

    /// Volume via the surface-area measure: |K| = (1/n) integral of h f.
    pub fn volume(&self) -> T {
        let n = self.grid().dim();
        let samples: Vec<T> = self.h().iter().zip(self.f.iter()).map(|(h, f)| *h * *f).collect();
        self.grid().integrate_unchecked(&samples) / real::<T>(n as f64)
    }

    pub fn dilate(&self, factor: T) -> Result<Self> {
        let support = self.support.dilate(factor)?;
        let fpow = factor.powi(self.grid().dim() as i32 - 1);
        let f = self.f.iter().map(|x| *x * fpow).collect();
        let provenance = match &self.provenance {
            Provenance::ClosedForm(ClosedForm::Ball { r }) => {
                Provenance::ClosedForm(ClosedForm::Ball { r: *r * factor })
            }
            Provenance::ClosedForm(ClosedForm::Ellipsoid { matrix }) => {
                Provenance::ClosedForm(ClosedForm::Ellipsoid {
                    matrix: matrix.iter().map(|x| *x * factor).collect(),
                })
            }
            other => other.clone(),
        };
        Self::assemble(support, f, provenance)
    }
}

/// A nonsingular linear transformation of R^n.
#[derive(Debug, Clone)]
pub struct LinearMap<T> {
    matrix: Vec<T>,
    dim: usize,
    det_abs: T,
    inverse: Vec<T>,
}

impl<T: Real> LinearMap<T> {
    pub fn new(matrix: Vec<T>, dim: usize) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(GeoError::LengthMismatch { expected: dim * dim, got: matrix.len() });
        }
        let d = linalg::det(&matrix, dim);
        if !d.is_finite() || d.abs() < real::<T>(1e-12) {
            return Err(GeoError::SingularMatrix);
        }
        let inverse = linalg::inverse(&matrix, dim)?;
        Ok(Self { matrix, dim, det_abs: d.abs(), inverse })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    pub fn det_abs(&self) -> T {
        self.det_abs
    }

    pub fn inverse(&self) -> &[T] {
        &self.inverse
    }

    pub fn compose(&self, other: &LinearMap<T>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(GeoError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Self::new(linalg::matmul(&self.matrix, &other.matrix, self.dim), self.dim)
    }
}

fn check_positive<T: Real>(values: &[T]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(GeoError::NonFinite(i));
        }
        if *v <= T::zero() {
            return Err(GeoError::NonPositive { index: i, value: v.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// Ball of radius r centered at the origin: h = r, f = r^{n-1}.
pub fn make_ball<T: Real>(grid: &Arc<SphereGrid<T>>, r: T) -> Result<SmoothBody<T>> {
    if r <= T::zero() || !r.is_finite() {
        return Err(GeoError::InvalidParameter("ball radius must be positive".into()));
    }
    let count = grid.node_count();
    let support = ConvexSupportBody::new(grid.clone(), vec![r; count])?;
    let f = vec![r.powi(grid.dim() as i32 - 1); count];
    SmoothBody::assemble(support, f, Provenance::ClosedForm(ClosedForm::Ball { r }))
}

/// Ellipsoid A B (image of the unit ball): h(u) = |A^t u|,
/// f(u) = det(A)^2 |A^t u|^{-(n+1)}.
pub fn make_ellipsoid<T: Real>(grid: &Arc<SphereGrid<T>>, matrix: &[T]) -> Result<SmoothBody<T>> {
    let n = grid.dim();
    let map = LinearMap::new(matrix.to_vec(), n)?;
    let det2 = map.det_abs() * map.det_abs();
    let mut h = Vec::with_capacity(grid.node_count());
    let mut f = Vec::with_capacity(grid.node_count());
    for j in 0..grid.node_count() {
        let atu = linalg::matvec_t(matrix, n, grid.node(j));
        let norm = atu.iter().map(|x| *x * *x).sum::<T>().sqrt();
        h.push(norm);
        f.push(det2 * norm.powi(-(n as i32 + 1)));
    }
    let support = ConvexSupportBody::new(grid.clone(), h)?;
    SmoothBody::assemble(support, f, Provenance::ClosedForm(ClosedForm::Ellipsoid { matrix: matrix.to_vec() }))
}

/// Derives the curvature function of a planar body spectrally: f = h'' + h.
/// Rejects bodies whose convexity margin falls below [`CONVEXITY_MARGIN`]
/// (scaled by the mean support value).
pub fn curvature_from_support<T: Real>(body: &ConvexSupportBody<T>) -> Result<SmoothBody<T>> {
    let f = body.curvature_samples()?;
    let mean_h = body.h().iter().copied().sum::<T>() / real::<T>(body.h().len() as f64);
    let required = real::<T>(CONVEXITY_MARGIN) * mean_h;
    let min_f = f.iter().copied().fold(T::infinity(), T::min);
    if min_f < required {
        return Err(GeoError::ConvexityViolation {
            min_value: min_f.to_f64().unwrap_or(f64::NAN),
            required: required.to_f64().unwrap_or(f64::NAN),
        });
    }
    SmoothBody::assemble(body.clone(), f, Provenance::FromSupport)
}

/// Deterministic generator of mild planar bodies with positive curvature.
///
/// h(theta) = 1 + sum_{k=2..k_max} (a_k cos k theta + b_k sin k theta), with
/// the coefficients rescaled so that min(h'' + h) >= margin and
/// min(h) >= margin.
pub fn random_smooth_body<T: Real>(
    grid: &Arc<SphereGrid<T>>,
    seed: u64,
    k_max: usize,
    margin: f64,
) -> Result<SmoothBody<T>> {
    if grid.dim() != 2 {
        return Err(GeoError::DimensionMismatch { expected: 2, got: grid.dim() });
    }
    if k_max < 2 {
        return Err(GeoError::InvalidParameter("k_max must be >= 2".into()));
    }
    if !(0.0..1.0).contains(&margin) || margin <= 0.0 {
        return Err(GeoError::InvalidParameter("margin must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut a = vec![T::zero(); k_max];
    let mut b = vec![T::zero(); k_max];
    for k in 2..=k_max {
        let scale = 1.0 / (k * k) as f64;
        a[k - 1] = real::<T>(rng.gen_range(-1.0..1.0) * scale);
        b[k - 1] = real::<T>(rng.gen_range(-1.0..1.0) * scale);
    }
    let raw = FourierSupport { c0: T::one(), a, b };
    let min_f = raw.min_curvature();
    let min_h = raw.min_support();
    let margin_t = real::<T>(margin);
    let mut scale = T::one();
    for min_v in [min_f, min_h] {
        let dip = T::one() - min_v;
        if dip > T::zero() {
            scale = scale.min((T::one() - margin_t) / dip);
        }
    }
    let fourier = FourierSupport {
        c0: T::one(),
        a: raw.a.iter().map(|x| *x * scale).collect(),
        b: raw.b.iter().map(|x| *x * scale).collect(),
    };
    let support = ConvexSupportBody::from_fourier(grid.clone(), fourier)?;
    curvature_from_support(&support)
}

// ---------------------------------------------------------------------------
// Polarity and support/radial conversions
// ---------------------------------------------------------------------------

/// Radial function of the polar body: rho(u) = 1 / h(u), exact pointwise.
pub fn polar_radial<T: Real>(body: &ConvexSupportBody<T>) -> StarBody<T> {
    let rho = body.h().iter().map(|h| T::one() / *h).collect();
    StarBody { grid: body.grid().clone(), rho }
}

/// Support function of the convex hull of a star body:
/// h(u) = max_v rho(v) <u, v>, refined beyond the grid maximum where the
/// geometry allows (trigonometric interpolation in the plane, a local
/// quadratic model on product grids).
pub fn support_from_radial<T: Real>(star: &StarBody<T>) -> Result<ConvexSupportBody<T>> {
    let grid = star.grid();
    match grid.dim() {
        2 => {
            let series = TrigSeries::from_samples(star.rho())?;
            let d1 = series.derivative(1);
            let m = grid.node_count();
            let mut h = Vec::with_capacity(m);
            for j in 0..m {
                let theta = grid.theta(j);
                h.push(planar_hull_support(star.rho(), &series, &d1, grid, theta));
            }
            ConvexSupportBody::new(grid.clone(), h)
        }
        3 => {
            let mut h = Vec::with_capacity(grid.node_count());
            for i in 0..grid.node_count() {
                let u = grid.node(i);
                let value = product_grid_extremum(grid, false, |j| {
                    let dot = dot_slice(u, grid.node(j));
                    star.rho()[j] * dot
                });
                if value <= T::zero() {
                    return Err(GeoError::Degenerate("support maximum not positive".into()));
                }
                h.push(value);
            }
            ConvexSupportBody::new(grid.clone(), h)
        }
        _ => {
            // Monte Carlo grids: plain maximum over nodes.
            let mut h = Vec::with_capacity(grid.node_count());
            for i in 0..grid.node_count() {
                let u = grid.node(i);
                let mut best = T::neg_infinity();
                for j in 0..grid.node_count() {
                    let dot = dot_slice(u, grid.node(j));
                    if dot > T::zero() {
                        best = best.max(star.rho()[j] * dot);
                    }
                }
                if best <= T::zero() {
                    return Err(GeoError::Degenerate("support maximum not positive".into()));
                }
                h.push(best);
            }
            ConvexSupportBody::new(grid.clone(), h)
        }
    }
}

/// Radial function of a convex body recovered from its support samples:
/// rho(u) = min_v h(v) / <u, v| over the open hemisphere around u.
pub fn radial_from_support<T: Real>(body: &ConvexSupportBody<T>) -> Result<StarBody<T>> {
    let grid = body.grid();
    match grid.dim() {
        2 => {
            let series = TrigSeries::from_samples(body.h())?;
            let d1 = series.derivative(1);
            let d2 = series.derivative(2);
            let m = grid.node_count();
            let mut rho = Vec::with_capacity(m);
            for j in 0..m {
                let theta = grid.theta(j);
                rho.push(planar_radial(body.h(), &series, &d1, &d2, grid, theta));
            }
            StarBody::new(grid.clone(), rho)
        }
        3 => {
            let mut rho = Vec::with_capacity(grid.node_count());
            for i in 0..grid.node_count() {
                let u = grid.node(i);
                let value = product_grid_extremum(grid, true, |j| {
                    let dot = dot_slice(u, grid.node(j));
                    if dot > real::<T>(0.15) {
                        body.h()[j] / dot
                    } else {
                        T::infinity()
                    }
                });
                rho.push(value);
            }
            StarBody::new(grid.clone(), rho)
        }
        _ => {
            let mut rho = Vec::with_capacity(grid.node_count());
            for i in 0..grid.node_count() {
                let u = grid.node(i);
                let mut best = T::infinity();
                for j in 0..grid.node_count() {
                    let dot = dot_slice(u, grid.node(j));
                    if dot > real::<T>(0.15) {
                        best = best.min(body.h()[j] / dot);
                    }
                }
                rho.push(best);
            }
            StarBody::new(grid.clone(), rho)
        }
    }
}

/// Polar body of a smooth planar body (or of a closed-form body in any
/// dimension): support 1 / rho_K, curvature derived spectrally.
pub fn polar_body<T: Real>(body: &SmoothBody<T>) -> Result<SmoothBody<T>> {
    match body.provenance() {
        Provenance::ClosedForm(ClosedForm::Ball { r }) => make_ball(body.grid(), T::one() / *r),
        Provenance::ClosedForm(ClosedForm::Ellipsoid { matrix }) => {
            let n = body.grid().dim();
            let inv = linalg::inverse(matrix, n)?;
            let inv_t = linalg::transpose(&inv, n);
            make_ellipsoid(body.grid(), &inv_t)
        }
        _ => {
            if body.grid().dim() != 2 {
                return Err(GeoError::Interpolation(
                    "polar bodies of sampled inputs are planar-only".into(),
                ));
            }
            let rho = radial_from_support(body.support())?;
            let h: Vec<T> = rho.rho().iter().map(|r| T::one() / *r).collect();
            let support = ConvexSupportBody::new(body.grid().clone(), h)?;
            curvature_from_support(&support)
        }
    }
}

// Planar hull support via grid seeding plus Newton refinement on
// H(phi) = ln rho(phi) + ln cos(theta - phi).
fn planar_hull_support<T: Real>(
    rho: &[T],
    series: &TrigSeries<T>,
    d1: &TrigSeries<T>,
    grid: &SphereGrid<T>,
    theta: T,
) -> T {
    let m = rho.len();
    let two_pi = T::PI() * real::<T>(2.0);
    let mut seeds: Vec<(T, T)> = Vec::new(); // (value, phi)
    for j in 0..m {
        let phi = grid.theta(j);
        let mut delta = theta - phi;
        while delta > T::PI() {
            delta -= two_pi;
        }
        while delta < -T::PI() {
            delta += two_pi;
        }
        let c = delta.cos();
        if c > real::<T>(1e-3) {
            seeds.push((rho[j] * c, phi));
        }
    }
    seeds.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut best = seeds.first().map(|s| s.0).unwrap_or(T::zero());
    for &(_, phi0) in seeds.iter().take(3) {
        let mut phi = phi0;
        for _ in 0..40 {
            let r = series.eval(phi);
            if r <= T::zero() {
                break;
            }
            let dr = d1.eval(phi);
            let delta = wrap_angle(theta - phi);
            let tan = delta.tan();
            let grad = dr / r + tan;
            let sec2 = T::one() + tan * tan;
            let d2r = series.derivative(2).eval(phi);
            let hess = (d2r * r - dr * dr) / (r * r) - sec2;
            if hess >= T::zero() || !grad.is_finite() {
                break;
            }
            let mut step = -grad / hess;
            let cap = two_pi / real::<T>(m as f64);
            step = step.max(-cap).min(cap);
            phi += step;
            if step.abs() < real::<T>(1e-14) {
                break;
            }
        }
        let delta = wrap_angle(theta - phi);
        if delta.cos() > T::zero() {
            let cand = series.eval(phi) * delta.cos();
            best = best.max(cand);
        }
    }
    best
}

// Planar radial function via grid seeding plus Newton refinement on
// G(phi) = ln h(phi) - ln cos(theta - phi).
fn planar_radial<T: Real>(
    h: &[T],
    series: &TrigSeries<T>,
    d1: &TrigSeries<T>,
    d2: &TrigSeries<T>,
    grid: &SphereGrid<T>,
    theta: T,
) -> T {
    let m = h.len();
    let two_pi = T::PI() * real::<T>(2.0);
    let mut best = T::infinity();
    let mut best_phi = theta;
    for j in 0..m {
        let phi = grid.theta(j);
        let delta = wrap_angle(theta - phi);
        let c = delta.cos();
        if c > real::<T>(1e-3) {
            let v = h[j] / c;
            if v < best {
                best = v;
                best_phi = phi;
            }
        }
    }
    let mut phi = best_phi;
    for _ in 0..40 {
        let hv = series.eval(phi);
        if hv <= T::zero() {
            break;
        }
        let dh = d1.eval(phi);
        let delta = wrap_angle(theta - phi);
        let tan = delta.tan();
        let grad = dh / hv - tan;
        let sec2 = T::one() + tan * tan;
        let ddh = d2.eval(phi);
        let hess = (ddh * hv - dh * dh) / (hv * hv) + sec2;
        if hess <= T::zero() || !grad.is_finite() {
            break;
        }
        let mut step = -grad / hess;
        let cap = two_pi / real::<T>(m as f64);
        step = step.max(-cap).min(cap);
        phi += step;
        if step.abs() < real::<T>(1e-14) {
            break;
        }
    }
    let delta = wrap_angle(theta - phi);
    if delta.cos() > real::<T>(1e-3) {
        let cand = series.eval(phi) / delta.cos();
        best = best.min(cand);
    }
    best
}

fn wrap_angle<T: Real>(mut x: T) -> T {
    let two_pi = T::PI() * real::<T>(2.0);
    while x > T::PI() {
        x -= two_pi;
    }
    while x < -T::PI() {
        x += two_pi;
    }
    x
}

#[inline]
fn dot_slice<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b.iter()).map(|(x, y)| *x * *y).sum()
}

/// Extremum of a node-indexed function on a product (polar x azimuth) grid,
/// refined with a 3x3 local quadratic model around the best node.
fn product_grid_extremum<T: Real>(grid: &SphereGrid<T>, minimizing: bool, eval: impl Fn(usize) -> T) -> T {
    debug_assert_eq!(grid.scheme(), GridScheme::ProductGauss);
    let n_az = 2 * grid.resolution();
    let n_polar = grid.resolution();
    let mut values = Vec::with_capacity(grid.node_count());
    for j in 0..grid.node_count() {
        values.push(eval(j));
    }
    let mut best_idx = 0usize;
    for (j, v) in values.iter().enumerate() {
        let better = if minimizing { *v < values[best_idx] } else { *v > values[best_idx] };
        if better {
            best_idx = j;
        }
    }
    let bp = best_idx / n_az;
    let ba = best_idx % n_az;
    // 3x3 stencil; polar index clamps at the boundary rings, azimuth wraps.
    let mut design = Vec::with_capacity(9 * 6);
    let mut rhs = Vec::with_capacity(9);
    let p0 = bp.clamp(1, n_polar.saturating_sub(2).max(1));
    for dp in -1i64..=1 {
        for da in -1i64..=1 {
            let p = (p0 as i64 + dp) as usize;
            let a = ((ba as i64 + da).rem_euclid(n_az as i64)) as usize;
            let idx = p * n_az + a;
            let v = values[idx];
            if !v.is_finite() {
                return values[best_idx];
            }
            let x = real::<T>(dp as f64 + (bp as f64 - p0 as f64));
            let y = real::<T>(da as f64);
            design.extend_from_slice(&[T::one(), x, y, x * x, x * y, y * y]);
            rhs.push(v);
        }
    }
    let Ok((c, _, _)) = linalg::least_squares(&design, 9, 6, &rhs) else {
        return values[best_idx];
    };
    // Vertex of the quadratic model.
    let hxx = c[3] * real::<T>(2.0);
    let hxy = c[4];
    let hyy = c[5] * real::<T>(2.0);
    let det = hxx * hyy - hxy * hxy;
    if det.abs() < real::<T>(1e-12) {
        return values[best_idx];
    }
    let vx = (-c[1] * hyy + c[2] * hxy) / det;
    let vy = (-c[2] * hxx + c[1] * hxy) / det;
    let clip = real::<T>(1.5);
    let vx = vx.max(-clip).min(clip);
    let vy = vy.max(-clip).min(clip);
    let refined = c[0] + c[1] * vx + c[2] * vy + c[3] * vx * vx + c[4] * vx * vy + c[5] * vy * vy;
    if minimizing {
        refined.min(values[best_idx])
    } else {
        refined.max(values[best_idx])
    }
}

// ---------------------------------------------------------------------------
// Linear images
// ---------------------------------------------------------------------------

/// Image of a smooth body under a linear map.
///
/// Closed-form bodies transform exactly (matrix composition); planar sampled
/// bodies transform through trigonometric interpolation of h and f with
/// h(v) = |phi^t v| h(u), f(v) = det(phi)^2 |phi^t v|^{-(n+1)} f(u),
/// u = phi^t v / |phi^t v|.
pub fn apply_linear<T: Real>(body: &SmoothBody<T>, map: &LinearMap<T>) -> Result<SmoothBody<T>> {
    let grid = body.grid();
    let n = grid.dim();
    if map.dim() != n {
        return Err(GeoError::DimensionMismatch { expected: n, got: map.dim() });
    }
    match body.provenance() {
        Provenance::ClosedForm(ClosedForm::Ball { r }) => {
            let scaled: Vec<T> = map.matrix().iter().map(|x| *x * *r).collect();
            make_ellipsoid(grid, &scaled)
        }
        Provenance::ClosedForm(ClosedForm::Ellipsoid { matrix }) => {
            make_ellipsoid(grid, &linalg::matmul(map.matrix(), matrix, n))
        }
        _ => {
            if n != 2 {
                return Err(GeoError::Interpolation(
                    "linear images of sampled bodies are planar-only".into(),
                ));
            }
            let h_series = TrigSeries::from_samples(body.h())?;
            let f_series = TrigSeries::from_samples(body.f())?;
            let det2 = map.det_abs() * map.det_abs();
            let mut h = Vec::with_capacity(grid.node_count());
            let mut f = Vec::with_capacity(grid.node_count());
            for j in 0..grid.node_count() {
                let v = grid.node(j);
                let pt = linalg::matvec_t(map.matrix(), n, v);
                let norm = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
                let angle = pt[1].atan2(pt[0]);
                h.push(norm * h_series.eval(angle));
                f.push(det2 * norm.powi(-(n as i32 + 1)) * f_series.eval(angle));
            }
            let support = ConvexSupportBody::new(grid.clone(), h)?;
            SmoothBody::assemble(support, f, Provenance::Supplied)
        }
    }
}

/// Image of a star body under a linear map (planar sampled bodies):
/// rho(v) = rho(u) / |phi^{-1} v|, u = phi^{-1} v / |phi^{-1} v|.
pub fn apply_linear_star<T: Real>(star: &StarBody<T>, map: &LinearMap<T>) -> Result<StarBody<T>> {
    let grid = star.grid();
    let n = grid.dim();
    if map.dim() != n {
        return Err(GeoError::DimensionMismatch { expected: n, got: map.dim() });
    }
    if n != 2 {
        return Err(GeoError::Interpolation("linear images of star bodies are planar-only".into()));
    }
    let series = TrigSeries::from_samples(star.rho())?;
    let mut rho = Vec::with_capacity(grid.node_count());
    for j in 0..grid.node_count() {
        let v = grid.node(j);
        let iv = linalg::matvec(map.inverse(), n, v);
        let norm = (iv[0] * iv[0] + iv[1] * iv[1]).sqrt();
        let angle = iv[1].atan2(iv[0]);
        rho.push(series.eval(angle) / norm);
    }
    StarBody::new(grid.clone(), rho)
}

// ---------------------------------------------------------------------------
// Centroid machinery
// ---------------------------------------------------------------------------

/// Centroid of a smooth body, computed through the radial chain:
/// c = (1 / ((n+1) |K|)) integral of rho^{n+1} u dsigma(u).
pub fn centroid<T: Real>(body: &SmoothBody<T>) -> Result<Vec<T>> {
    let grid = body.grid();
    let n = grid.dim();
    let rho = match body.provenance() {
        Provenance::ClosedForm(ClosedForm::Ball { .. }) | Provenance::ClosedForm(ClosedForm::Ellipsoid { .. }) => {
            closed_form_radial(body)?
        }
        _ => radial_from_support(body.support())?,
    };
    let mut volume = T::zero();
    let mut moment = vec![T::zero(); n];
    for j in 0..grid.node_count() {
        let w = grid.weights()[j];
        let r = rho.rho()[j];
        let rn = r.powi(n as i32);
        volume += w * rn;
        let rn1 = rn * r;
        for (mi, ui) in moment.iter_mut().zip(grid.node(j)) {
            *mi += w * rn1 * *ui;
        }
    }
    volume /= real::<T>(n as f64);
    let scale = T::one() / (real::<T>(n as f64 + 1.0) * volume);
    Ok(moment.into_iter().map(|m| m * scale).collect())
}

fn closed_form_radial<T: Real>(body: &SmoothBody<T>) -> Result<StarBody<T>> {
    let grid = body.grid();
    match body.provenance() {
        Provenance::ClosedForm(ClosedForm::Ball { r }) => {
            StarBody::new(grid.clone(), vec![*r; grid.node_count()])
        }
        Provenance::ClosedForm(ClosedForm::Ellipsoid { matrix }) => {
            let n = grid.dim();
            let inv = linalg::inverse(matrix, n)?;
            let mut rho = Vec::with_capacity(grid.node_count());
            for j in 0..grid.node_count() {
                let iu = linalg::matvec(&inv, n, grid.node(j));
                let norm = iu.iter().map(|x| *x * *x).sum::<T>().sqrt();
                rho.push(T::one() / norm);
            }
            StarBody::new(grid.clone(), rho)
        }
        _ => unreachable!("closed_form_radial called on sampled body"),
    }
}

/// Translates a body until its centroid sits at the origin (within 1e-8).
/// The curvature function is translation invariant; only h moves.
pub fn recenter<T: Real>(body: &SmoothBody<T>) -> Result<SmoothBody<T>> {
    let mut current = body.clone();
    for _ in 0..50 {
        let c = centroid(&current)?;
        let norm = c.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if norm < real::<T>(1e-8) {
            return Ok(current);
        }
        current = translate(&current, &c.iter().map(|x| -*x).collect::<Vec<_>>())?;
    }
    Err(GeoError::Degenerate("recenter did not converge within 50 iterations".into()))
}

/// Translates a smooth body by t: h(u) <- h(u) + <t, u>. Errors if the origin
/// leaves the interior.
pub fn translate<T: Real>(body: &SmoothBody<T>, t: &[T]) -> Result<SmoothBody<T>> {
    let grid = body.grid();
    let n = grid.dim();
    if t.len() != n {
        return Err(GeoError::DimensionMismatch { expected: n, got: t.len() });
    }
    let mut h = body.h().to_vec();
    for j in 0..grid.node_count() {
        h[j] += dot_slice(t, grid.node(j));
        if h[j] <= T::zero() {
            return Err(GeoError::Degenerate("translation moved the origin outside the body".into()));
        }
    }
    let fourier = body.support().fourier().map(|fr| {
        let mut fr = fr.clone();
        // A translation only touches the first harmonic of h.
        if fr.a.is_empty() {
            fr.a.push(T::zero());
            fr.b.push(T::zero());
        }
        fr.a[0] += t[0];
        fr.b[0] += t[1];
        fr
    });
    let support = ConvexSupportBody { grid: grid.clone(), h, fourier };
    let provenance = match body.provenance() {
        Provenance::ClosedForm(_) => Provenance::Supplied,
        other => other.clone(),
    };
    SmoothBody::assemble(support, body.f().to_vec(), provenance)
}
