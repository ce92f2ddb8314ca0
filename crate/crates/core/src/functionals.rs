//! Quadrature evaluation of the Lp-theory functionals.
//!
//! All functionals integrate strictly positive sample products over a shared
//! sphere grid; positivity is a construction invariant of the body types, so
//! fractional powers never see a nonpositive base. Quadrature values carry an
//! error estimate from comparison with the halved rule; closed forms carry
//! zero error.

use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexSupportBody, SmoothBody, StarBody};
use crate::error::{GeoError, Result};
use crate::scalar::{real, unit_ball_volume, Real};
use crate::sphere::SphereGrid;

/// Exclusion band around p = -n; exponents n/(n+p) blow up inside it.
pub const P_EXCLUSION_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PRegime {
    /// p > 0: geominimal targets are infima.
    Positive,
    /// p = 0: closed forms, no optimization.
    Zero,
    /// -n < p < 0: suprema.
    NegHigh,
    /// p < -n: suprema with inverted exponent signs.
    NegLow,
}

/// A real exponent p != -n paired with the ambient dimension.
#[derive(Debug, Clone, Copy)]
pub struct PExponent<T> {
    p: T,
    dim: usize,
    regime: PRegime,
}

impl<T: Real> PExponent<T> {
    pub fn new(p: T, dim: usize) -> Result<Self> {
        if !p.is_finite() {
            return Err(GeoError::InvalidParameter("p must be finite".into()));
        }
        let n = real::<T>(dim as f64);
        if (p + n).abs() < real::<T>(P_EXCLUSION_BAND) {
            return Err(GeoError::InvalidParameter(format!(
                "p = {p} is inside the excluded band around -n = -{dim}"
            )));
        }
        let regime = if p > T::zero() {
            PRegime::Positive
        } else if p == T::zero() {
            PRegime::Zero
        } else if p > -n {
            PRegime::NegHigh
        } else {
            PRegime::NegLow
        };
        Ok(Self { p, dim, regime })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn regime(&self) -> PRegime {
        self.regime
    }

    /// n / (n + p).
    pub fn volume_exponent(&self) -> T {
        let n = real::<T>(self.dim as f64);
        n / (n + self.p)
    }

    /// p / (n + p).
    pub fn polar_exponent(&self) -> T {
        let n = real::<T>(self.dim as f64);
        self.p / (n + self.p)
    }

    /// Whether the geominimal target is an infimum (p >= 0) rather than a
    /// supremum (p < 0).
    pub fn is_infimum_target(&self) -> bool {
        matches!(self.regime, PRegime::Positive | PRegime::Zero)
    }
}

/// How a [`FunctionalValue`] was produced, fixing its error semantics:
/// quadrature and closed-form values are two-sided, optimizer bounds are
/// one-sided (an estimated infimum upper-bounds the true value, an estimated
/// supremum lower-bounds it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    ClosedForm,
    Quadrature,
    OptimizerUpperBound,
    OptimizerLowerBound,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Meta {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<f64>,
    pub resolution: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
}

/// A computed scalar with estimation kind and error estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalValue<T> {
    pub value: T,
    pub kind: ValueKind,
    pub err: T,
    pub meta: Meta,
}

impl<T: Real> FunctionalValue<T> {
    pub fn closed_form(value: T, meta: Meta) -> Self {
        Self { value, kind: ValueKind::ClosedForm, err: T::zero(), meta }
    }

    pub fn quadrature(value: T, err: T, meta: Meta) -> Self {
        Self { value, kind: ValueKind::Quadrature, err, meta }
    }

    /// Largest value consistent with the error semantics (+inf for a pure
    /// lower bound).
    pub fn upper(&self) -> T {
        match self.kind {
            ValueKind::OptimizerLowerBound => T::infinity(),
            _ => self.value + self.err,
        }
    }

    /// Smallest value consistent with the error semantics (-inf for a pure
    /// upper bound).
    pub fn lower(&self) -> T {
        match self.kind {
            ValueKind::OptimizerUpperBound => T::neg_infinity(),
            _ => self.value - self.err,
        }
    }
}

fn meta<T: Real>(id: &str, grid: &SphereGrid<T>, p: Option<T>, i: Option<T>) -> Meta {
    Meta {
        id: id.to_string(),
        p: p.and_then(|v| v.to_f64()),
        i: i.and_then(|v| v.to_f64()),
        resolution: grid.resolution(),
        condition: None,
    }
}

pub(crate) fn same_grid<T: Real>(a: &SphereGrid<T>, b: &SphereGrid<T>) -> bool {
    std::ptr::eq(a, b)
        || (a.dim() == b.dim()
            && a.resolution() == b.resolution()
            && a.scheme() == b.scheme()
            && a.seed() == b.seed())
}

pub(crate) fn require_same_grid<T: Real>(a: &SphereGrid<T>, b: &SphereGrid<T>) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(GeoError::GridMismatch)
    }
}

fn quadrature_scaled<T: Real>(
    grid: &SphereGrid<T>,
    samples: &[T],
    scale: T,
    meta: Meta,
) -> Result<FunctionalValue<T>> {
    let (raw, err) = grid.integrate_with_err(samples)?;
    Ok(FunctionalValue::quadrature(raw * scale, err * scale.abs(), meta))
}

/// Pointwise Lp curvature function f_p = h^{1-p} f.
pub fn lp_curvature<T: Real>(body: &SmoothBody<T>, p: &PExponent<T>) -> Vec<T> {
    let one_minus_p = T::one() - p.p();
    body.h().iter().zip(body.f().iter()).map(|(h, f)| h.powf(one_minus_p) * *f).collect()
}

/// Volume of a star body: (1/n) integral of rho^n.
pub fn volume_radial<T: Real>(star: &StarBody<T>) -> Result<FunctionalValue<T>> {
    let grid = star.grid();
    let n = grid.dim();
    let samples: Vec<T> = star.rho().iter().map(|r| r.powi(n as i32)).collect();
    quadrature_scaled(grid, &samples, T::one() / real::<T>(n as f64), meta("volume_radial", grid, None, None))
}

/// Volume of the polar body: (1/n) integral of h^{-n}.
pub fn polar_volume<T: Real>(body: &ConvexSupportBody<T>) -> Result<FunctionalValue<T>> {
    let grid = body.grid();
    let n = grid.dim();
    let samples: Vec<T> = body.h().iter().map(|h| h.powi(-(n as i32))).collect();
    quadrature_scaled(grid, &samples, T::one() / real::<T>(n as f64), meta("polar_volume", grid, None, None))
}

/// Dual mixed volume of n star bodies: (1/n) integral of prod rho_i.
pub fn dual_mixed_volume<T: Real>(stars: &[&StarBody<T>]) -> Result<FunctionalValue<T>> {
    let first = stars.first().ok_or_else(|| GeoError::InvalidParameter("empty body list".into()))?;
    let grid = first.grid();
    let n = grid.dim();
    if stars.len() != n {
        return Err(GeoError::ArityViolation(format!("need {n} star bodies, got {}", stars.len())));
    }
    for s in stars {
        require_same_grid(grid, s.grid())?;
    }
    let mut samples = vec![T::one(); grid.node_count()];
    for s in stars {
        for (acc, r) in samples.iter_mut().zip(s.rho()) {
            *acc *= *r;
        }
    }
    quadrature_scaled(grid, &samples, T::one() / real::<T>(n as f64), meta("dual_mixed_volume", grid, None, None))
}

/// i-th dual mixed volume: (1/n) integral of rho_1^{n-i} rho_2^i.
pub fn dual_mixed_volume_i<T: Real>(q1: &StarBody<T>, q2: &StarBody<T>, i: T) -> Result<FunctionalValue<T>> {
    let grid = q1.grid();
    require_same_grid(grid, q2.grid())?;
    let n = real::<T>(grid.dim() as f64);
    let samples: Vec<T> =
        q1.rho().iter().zip(q2.rho().iter()).map(|(r1, r2)| r1.powf(n - i) * r2.powf(i)).collect();
    quadrature_scaled(grid, &samples, T::one() / n, meta("dual_mixed_volume_i", grid, None, Some(i)))
}

/// p-mixed volume V_p(K, Q) = (1/n) integral of h_Q^p h_K^{1-p} f_K.
pub fn p_mixed_volume<T: Real>(
    k: &SmoothBody<T>,
    q: &ConvexSupportBody<T>,
    p: &PExponent<T>,
) -> Result<FunctionalValue<T>> {
    let grid = k.grid();
    require_same_grid(grid, q.grid())?;
    let fp = lp_curvature(k, p);
    let samples: Vec<T> = q.h().iter().zip(fp.iter()).map(|(hq, f)| hq.powf(p.p()) * *f).collect();
    let n = real::<T>(grid.dim() as f64);
    quadrature_scaled(grid, &samples, T::one() / n, meta("p_mixed_volume", grid, Some(p.p()), None))
}

/// Multi-body p-mixed volume:
/// (1/n) integral of prod [h_{Q_i}^p f_p(K_i)]^{1/n}.
pub fn p_mixed_volume_multi<T: Real>(
    ks: &[&SmoothBody<T>],
    qs: &[&ConvexSupportBody<T>],
    p: &PExponent<T>,
) -> Result<FunctionalValue<T>> {
    let first = ks.first().ok_or_else(|| GeoError::InvalidParameter("empty body list".into()))?;
    let grid = first.grid();
    let n = grid.dim();
    if ks.len() != n || qs.len() != n {
        return Err(GeoError::ArityViolation(format!(
            "need {n} bodies and {n} competitors, got {} and {}",
            ks.len(),
            qs.len()
        )));
    }
    for k in ks {
        require_same_grid(grid, k.grid())?;
    }
    for q in qs {
        require_same_grid(grid, q.grid())?;
    }
    let nf = real::<T>(n as f64);
    let inv_n = T::one() / nf;
    let mut samples = vec![T::one(); grid.node_count()];
    for (k, q) in ks.iter().zip(qs.iter()) {
        let fp = lp_curvature(k, p);
        for ((acc, hq), f) in samples.iter_mut().zip(q.h()).zip(fp.iter()) {
            *acc *= (hq.powf(p.p()) * *f).powf(inv_n);
        }
    }
    quadrature_scaled(grid, &samples, inv_n, meta("p_mixed_volume_multi", grid, Some(p.p()), None))
}

/// Multi-body p-mixed volume against polars of star competitors:
/// (1/n) integral of prod [rho_{L_i}^{-p} f_p(K_i)]^{1/n}.
pub fn p_mixed_volume_multi_polar<T: Real>(
    ks: &[&SmoothBody<T>],
    ls: &[&StarBody<T>],
    p: &PExponent<T>,
) -> Result<FunctionalValue<T>> {
    let first = ks.first().ok_or_else(|| GeoError::InvalidParameter("empty body list".into()))?;
    let grid = first.grid();
    let n = grid.dim();
    if ks.len() != n || ls.len() != n {
        return Err(GeoError::ArityViolation(format!(
            "need {n} bodies and {n} star competitors, got {} and {}",
            ks.len(),
            ls.len()
        )));
    }
    for k in ks {
        require_same_grid(grid, k.grid())?;
    }
    for l in ls {
        require_same_grid(grid, l.grid())?;
    }
    let nf = real::<T>(n as f64);
    let inv_n = T::one() / nf;
    let mut samples = vec![T::one(); grid.node_count()];
    for (k, l) in ks.iter().zip(ls.iter()) {
        let fp = lp_curvature(k, p);
        for ((acc, rho), f) in samples.iter_mut().zip(l.rho()).zip(fp.iter()) {
            *acc *= (rho.powf(-p.p()) * *f).powf(inv_n);
        }
    }
    quadrature_scaled(grid, &samples, inv_n, meta("p_mixed_volume_multi_polar", grid, Some(p.p()), None))
}

/// i-weighted two-body p-mixed volume:
/// (1/n) integral of [h_{Q_1}^p f_p(K)]^{(n-i)/n} [h_{Q_2}^p f_p(L)]^{i/n}.
pub fn vpi_mixed<T: Real>(
    k: &SmoothBody<T>,
    l: &SmoothBody<T>,
    q1: &ConvexSupportBody<T>,
    q2: &ConvexSupportBody<T>,
    p: &PExponent<T>,
    i: T,
) -> Result<FunctionalValue<T>> {
    let grid = k.grid();
    require_same_grid(grid, l.grid())?;
    require_same_grid(grid, q1.grid())?;
    require_same_grid(grid, q2.grid())?;
    let n = real::<T>(grid.dim() as f64);
    let fp_k = lp_curvature(k, p);
    let fp_l = lp_curvature(l, p);
    let e1 = (n - i) / n;
    let e2 = i / n;
    let samples: Vec<T> = (0..grid.node_count())
        .map(|j| {
            let t1 = q1.h()[j].powf(p.p()) * fp_k[j];
            let t2 = q2.h()[j].powf(p.p()) * fp_l[j];
            t1.powf(e1) * t2.powf(e2)
        })
        .collect();
    quadrature_scaled(grid, &samples, T::one() / n, meta("vpi_mixed", grid, Some(p.p()), Some(i)))
}

/// i-weighted two-body p-mixed volume against polars of star competitors:
/// (1/n) integral of [rho_{Q_1}^{-p} f_p(K)]^{(n-i)/n} [rho_{Q_2}^{-p} f_p(L)]^{i/n}.
pub fn vpi_mixed_polar<T: Real>(
    k: &SmoothBody<T>,
    l: &SmoothBody<T>,
    q1: &StarBody<T>,
    q2: &StarBody<T>,
    p: &PExponent<T>,
    i: T,
) -> Result<FunctionalValue<T>> {
    let grid = k.grid();
    require_same_grid(grid, l.grid())?;
    require_same_grid(grid, q1.grid())?;
    require_same_grid(grid, q2.grid())?;
    let n = real::<T>(grid.dim() as f64);
    let fp_k = lp_curvature(k, p);
    let fp_l = lp_curvature(l, p);
    let e1 = (n - i) / n;
    let e2 = i / n;
    let samples: Vec<T> = (0..grid.node_count())
        .map(|j| {
            let t1 = q1.rho()[j].powf(-p.p()) * fp_k[j];
            let t2 = q2.rho()[j].powf(-p.p()) * fp_l[j];
            t1.powf(e1) * t2.powf(e2)
        })
        .collect();
    quadrature_scaled(grid, &samples, T::one() / n, meta("vpi_mixed_polar", grid, Some(p.p()), Some(i)))
}

/// Mixed p-affine surface area: integral of prod f_p(K_i)^{1/(n+p)}.
/// At p = 0 this is the integral of prod [h f]^{1/n}.
pub fn mixed_p_affine<T: Real>(ks: &[&SmoothBody<T>], p: &PExponent<T>) -> Result<FunctionalValue<T>> {
    let first = ks.first().ok_or_else(|| GeoError::InvalidParameter("empty body list".into()))?;
    let grid = first.grid();
    let n = grid.dim();
    if ks.len() != n {
        return Err(GeoError::ArityViolation(format!("need {n} bodies, got {}", ks.len())));
    }
    for k in ks {
        require_same_grid(grid, k.grid())?;
    }
    let exponent = T::one() / (real::<T>(n as f64) + p.p());
    let mut samples = vec![T::one(); grid.node_count()];
    for k in ks {
        let fp = lp_curvature(k, p);
        for (acc, f) in samples.iter_mut().zip(fp.iter()) {
            *acc *= f.powf(exponent);
        }
    }
    quadrature_scaled(grid, &samples, T::one(), meta("mixed_p_affine", grid, Some(p.p()), None))
}

/// i-th mixed p-affine surface area:
/// integral of f_p(K)^{(n-i)/(n+p)} f_p(L)^{i/(n+p)}.
pub fn asp_i<T: Real>(k: &SmoothBody<T>, l: &SmoothBody<T>, p: &PExponent<T>, i: T) -> Result<FunctionalValue<T>> {
    let grid = k.grid();
    require_same_grid(grid, l.grid())?;
    let n = real::<T>(grid.dim() as f64);
    let np = n + p.p();
    let fp_k = lp_curvature(k, p);
    let fp_l = lp_curvature(l, p);
    let samples: Vec<T> = fp_k
        .iter()
        .zip(fp_l.iter())
        .map(|(fk, fl)| fk.powf((n - i) / np) * fl.powf(i / np))
        .collect();
    quadrature_scaled(grid, &samples, T::one(), meta("asp_i", grid, Some(p.p()), Some(i)))
}

/// p-curvature image: the star body with rho^{n+p} = (V / omega_n) f_p,
/// where the scalar V (its own volume) solves the defining relation through
/// V^{p/(n+p)} = (1/n) omega_n^{-n/(n+p)} integral of f_p^{n/(n+p)}.
pub fn p_curvature_image<T: Real>(k: &SmoothBody<T>, p: &PExponent<T>) -> Result<StarBody<T>> {
    if p.regime() == PRegime::Zero {
        return Err(GeoError::InvalidParameter("p-curvature image is undefined at p = 0".into()));
    }
    let grid = k.grid();
    let n = real::<T>(grid.dim() as f64);
    let np = n + p.p();
    let omega = unit_ball_volume::<T>(grid.dim());
    let fp = lp_curvature(k, p);
    let g: Vec<T> = fp.iter().map(|f| f.powf(n / np)).collect();
    let integral = grid.integrate(&g)?;
    let rhs = integral / (n * omega.powf(n / np));
    let volume = rhs.powf(np / p.p());
    let rho: Vec<T> = fp.iter().map(|f| (volume * *f / omega).powf(T::one() / np)).collect();
    StarBody::new(grid.clone(), rho)
}

/// Planar classical mixed volume: (1/2) integral of h_{K_1} f_{K_2}.
pub fn classical_mixed_volume_2d<T: Real>(k1: &SmoothBody<T>, k2: &SmoothBody<T>) -> Result<FunctionalValue<T>> {
    let grid = k1.grid();
    if grid.dim() != 2 {
        return Err(GeoError::DimensionMismatch { expected: 2, got: grid.dim() });
    }
    require_same_grid(grid, k2.grid())?;
    let samples: Vec<T> = k1.h().iter().zip(k2.f().iter()).map(|(h, f)| *h * *f).collect();
    quadrature_scaled(grid, &samples, real::<T>(0.5), meta("classical_mixed_volume_2d", grid, None, None))
}

/// Classical mixed volume by polynomial interpolation of Minkowski
/// combination volumes (support functions add; volumes go through the
/// radial chain). Supported for n = 2 and n = 3.
pub fn classical_mixed_volume_nd<T: Real>(ks: &[&SmoothBody<T>]) -> Result<FunctionalValue<T>> {
    let first = ks.first().ok_or_else(|| GeoError::InvalidParameter("empty body list".into()))?;
    let grid = first.grid();
    let n = grid.dim();
    if !(2..=3).contains(&n) {
        return Err(GeoError::InvalidParameter(format!(
            "polynomial-interpolation mixed volumes support n in {{2, 3}}, got {n}"
        )));
    }
    if ks.len() != n {
        return Err(GeoError::ArityViolation(format!("need {n} bodies, got {}", ks.len())));
    }
    for k in ks {
        require_same_grid(grid, k.grid())?;
    }

    let monomials = homogeneous_exponents(n);
    let levels: Vec<f64> = (1..=n + 1).map(|v| v as f64 / (n + 1) as f64).collect();
    let mut lambda_tuples: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &lambda_tuples {
            for &v in &levels {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        lambda_tuples = next;
    }

    let rows = lambda_tuples.len();
    let cols = monomials.len();
    let mut design = Vec::with_capacity(rows * cols);
    let mut rhs = Vec::with_capacity(rows);
    for lambdas in &lambda_tuples {
        let mut h = vec![T::zero(); grid.node_count()];
        for (k, &lam) in ks.iter().zip(lambdas.iter()) {
            let lam_t = real::<T>(lam);
            for (acc, hk) in h.iter_mut().zip(k.h()) {
                *acc += lam_t * *hk;
            }
        }
        let combo = ConvexSupportBody::new(grid.clone(), h)?;
        let star = crate::bodies::radial_from_support(&combo)?;
        rhs.push(star.volume());
        for mono in &monomials {
            let mut term = T::one();
            for (idx, &e) in mono.iter().enumerate() {
                term *= real::<T>(lambdas[idx]).powi(e as i32);
            }
            design.push(term);
        }
    }
    let (coeffs, residual, cond) = crate::linalg::least_squares(&design, rows, cols, &rhs)?;
    let cond_f = cond.to_f64().unwrap_or(f64::INFINITY);
    if cond_f > 1e10 {
        return Err(GeoError::IllConditioned(cond_f));
    }
    // The all-ones monomial carries n! * V(K_1, ..., K_n).
    let mixed_idx = monomials
        .iter()
        .position(|m| m.iter().all(|&e| e == 1))
        .expect("mixed monomial present for n >= 2");
    let factorial = real::<T>((1..=n).product::<usize>() as f64);
    let mut m = meta("classical_mixed_volume_nd", grid, None, None);
    m.condition = Some(cond_f);
    let err = residual / real::<T>((rows as f64).sqrt()) / factorial;
    Ok(FunctionalValue { value: coeffs[mixed_idx] / factorial, kind: ValueKind::Quadrature, err, meta: m })
}

fn homogeneous_exponents(n: usize) -> Vec<Vec<usize>> {
    // All exponent vectors of length n summing to n.
    fn rec(prefix: &mut Vec<usize>, remaining: usize, slots: usize, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            let mut full = prefix.clone();
            full.push(remaining);
            out.push(full);
            return;
        }
        for e in 0..=remaining {
            prefix.push(e);
            rec(prefix, remaining - e, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, n, &mut out);
    out
}

/// p-surface area S_p(K) = n V_p(K, B) = integral of f_p(K).
pub fn p_surface_area<T: Real>(k: &SmoothBody<T>, p: &PExponent<T>) -> Result<FunctionalValue<T>> {
    let grid = k.grid();
    let samples = lp_curvature(k, p);
    quadrature_scaled(grid, &samples, T::one(), meta("p_surface_area", grid, Some(p.p()), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{self, make_ball, make_ellipsoid, random_smooth_body};
    use crate::sphere::SphereGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid2(m: usize) -> Arc<SphereGrid<f64>> {
        SphereGrid::for_dim(2, m, None).unwrap()
    }

    fn pexp(p: f64, n: usize) -> PExponent<f64> {
        PExponent::new(p, n).unwrap()
    }

    fn random_star(grid: &Arc<SphereGrid<f64>>, seed: u64) -> bodies::StarBody<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let a: f64 = rng.gen_range(-0.3..0.3);
        let b: f64 = rng.gen_range(-0.3..0.3);
        let c: f64 = rng.gen_range(-0.2..0.2);
        let rho: Vec<f64> = (0..grid.node_count())
            .map(|j| {
                let t = grid.theta(j);
                1.0 + a * t.cos() + b * (2.0 * t).sin() + c * (3.0 * t).cos()
            })
            .collect();
        bodies::StarBody::new(grid.clone(), rho).unwrap()
    }

    #[test]
    fn p_exponent_regimes_and_rejection() {
        assert_eq!(pexp(2.0, 2).regime(), PRegime::Positive);
        assert_eq!(pexp(0.0, 2).regime(), PRegime::Zero);
        assert_eq!(pexp(-1.0, 2).regime(), PRegime::NegHigh);
        assert_eq!(pexp(-3.0, 2).regime(), PRegime::NegLow);
        assert!(PExponent::new(-2.0, 2).is_err());
        assert!(PExponent::new(-2.0 + 1e-9, 2).is_err());
        assert!(PExponent::new(-3.0, 3).is_err());
    }

    #[test]
    fn volume_radial_closed_forms() {
        let grid = grid2(256);
        let disk = make_ball(&grid, 1.0).unwrap();
        let star = bodies::polar_radial(disk.support());
        let v = volume_radial(&star).unwrap();
        assert!((v.value - PI).abs() < 1e-12);

        let grid3 = SphereGrid::<f64>::for_dim(3, 32, None).unwrap();
        let half_ball = make_ball(&grid3, 0.5).unwrap();
        let star3 = bodies::polar_radial(half_ball.support());
        assert!((star3.rho()[0] - 2.0).abs() < 1e-15);
        let v3 = volume_radial(&star3).unwrap();
        assert!((v3.value - 32.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn volume_radial_matches_monte_carlo_membership_oracle() {
        // Body rho(theta) = 1 + 0.2 cos(theta).
        let grid = grid2(256);
        let rho: Vec<f64> = (0..256).map(|j| 1.0 + 0.2 * grid.theta(j).cos()).collect();
        let star = bodies::StarBody::new(grid.clone(), rho).unwrap();
        let v = volume_radial(&star).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(424242);
        let total = 10_000_000u64;
        let box_half = 1.25;
        let mut hits = 0u64;
        for _ in 0..total {
            let x: f64 = rng.gen_range(-box_half..box_half);
            let y: f64 = rng.gen_range(-box_half..box_half);
            let r = (x * x + y * y).sqrt();
            let theta = y.atan2(x);
            if r <= 1.0 + 0.2 * theta.cos() {
                hits += 1;
            }
        }
        let box_area = (2.0 * box_half) * (2.0 * box_half);
        let p_hat = hits as f64 / total as f64;
        let mc = p_hat * box_area;
        let se = box_area * (p_hat * (1.0 - p_hat) / total as f64).sqrt();
        assert!((v.value - mc).abs() < 3.0 * se, "quadrature {} vs MC {mc} +/- {se}", v.value);
    }

    #[test]
    fn polar_volume_closed_forms() {
        let grid = grid2(256);
        let ball = make_ball(&grid, 2.0).unwrap();
        let v = polar_volume(ball.support()).unwrap();
        assert!((v.value - PI * 0.25).abs() < 1e-12);

        let ell = make_ellipsoid(&grid, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let v = polar_volume(ell.support()).unwrap();
        assert!((v.value - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn blaschke_santalo_on_random_bodies() {
        let grid = grid2(256);
        for seed in 0..30 {
            let body = random_smooth_body(&grid, seed, 5, 0.25).unwrap();
            let centered = bodies::recenter(&body).unwrap();
            let volume = centered.volume();
            let pv = polar_volume(centered.support()).unwrap().value;
            assert!(volume * pv <= PI * PI + 1e-9, "seed {seed}: {}", volume * pv);
        }
    }

    #[test]
    fn dual_mixed_volume_cases() {
        let grid = grid2(256);
        let unit = bodies::polar_radial(make_ball(&grid, 1.0).unwrap().support());
        let all_equal = dual_mixed_volume(&[&unit, &unit]).unwrap();
        assert!((all_equal.value - PI).abs() < 1e-12);

        let a = unit.dilate(2.0).unwrap();
        let b = unit.dilate(0.5).unwrap();
        let v = dual_mixed_volume(&[&a, &b]).unwrap();
        assert!((v.value - PI).abs() < 1e-12);

        assert!(dual_mixed_volume(&[&unit]).is_err());

        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for seed in 0..20 {
            let l1 = random_star(&grid, seed);
            let l2 = random_star(&grid, seed + 1000);
            let lhs = dual_mixed_volume(&[&l1, &l2]).unwrap().value.powi(2);
            let rhs = volume_radial(&l1).unwrap().value * volume_radial(&l2).unwrap().value;
            assert!(lhs <= rhs + 1e-10, "seed {seed}");
            let lam = rng.gen_range(0.5..2.0);
            let dil = l1.dilate(lam).unwrap();
            let lhs = dual_mixed_volume(&[&l1, &dil]).unwrap().value.powi(2);
            let rhs = volume_radial(&l1).unwrap().value * volume_radial(&dil).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-9 * rhs, "dilate equality seed {seed}");
        }
    }

    #[test]
    fn dual_mixed_volume_i_cases() {
        let grid = grid2(256);
        let l = random_star(&grid, 77);
        let unit = bodies::polar_radial(make_ball(&grid, 1.0).unwrap().support());

        // i = 0 ignores the second body.
        let v0 = dual_mixed_volume_i(&l, &unit, 0.0).unwrap();
        assert!((v0.value - volume_radial(&l).unwrap().value).abs() < 1e-12);

        // Equal bodies give |L| for any i.
        for &i in &[-1.0, 0.5, 1.0, 3.0] {
            let v = dual_mixed_volume_i(&l, &l, i).unwrap();
            assert!((v.value - volume_radial(&l).unwrap().value).abs() < 1e-12);
        }

        // Hoelder bounds in both i-regimes.
        for seed in 0..10 {
            let q1 = random_star(&grid, seed);
            let q2 = random_star(&grid, seed + 500);
            let v1 = volume_radial(&q1).unwrap().value;
            let v2 = volume_radial(&q2).unwrap().value;
            for &i in &[0.5, 1.0, 1.5] {
                let vi = dual_mixed_volume_i(&q1, &q2, i).unwrap().value;
                assert!(vi.powi(2) <= v1.powf(2.0 - i) * v2.powf(i) + 1e-10, "seed {seed} i {i}");
            }
            for &i in &[-1.0, 3.0] {
                let vi = dual_mixed_volume_i(&q1, &q2, i).unwrap().value;
                assert!(vi.powi(2) >= v1.powf(2.0 - i) * v2.powf(i) - 1e-10, "seed {seed} i {i}");
            }
        }
    }

    #[test]
    fn lp_curvature_cases() {
        let grid = grid2(128);
        let ball = make_ball(&grid, 2.0).unwrap();
        let p = pexp(0.5, 2);
        let f = lp_curvature(&ball, &p);
        assert!(f.iter().all(|v| (*v - 2.0f64.powf(1.5)).abs() < 1e-12));

        let body = random_smooth_body(&grid, 3, 4, 0.3).unwrap();
        let f1 = lp_curvature(&body, &pexp(1.0, 2));
        assert!(f1.iter().zip(body.f()).all(|(a, b)| (a - b).abs() < 1e-14));

        let ell = make_ellipsoid(&grid, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let p = pexp(1.5, 2);
        let fp = lp_curvature(&ell, &p);
        for j in 0..grid.node_count() {
            let expected = 4.0 * ell.h()[j].powf(-(2.0 + 1.5));
            assert!((fp[j] - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn p_mixed_volume_cases() {
        let grid = grid2(256);
        let body = random_smooth_body(&grid, 9, 4, 0.3).unwrap();
        let p = pexp(1.7, 2);
        let self_mixed = p_mixed_volume(&body, body.support(), &p).unwrap();
        assert!((self_mixed.value - body.volume()).abs() < 1e-12);

        let rball = make_ball(&grid, 1.6).unwrap();
        let unit = make_ball(&grid, 1.0).unwrap();
        let p07 = pexp(0.7, 2);
        let v = p_mixed_volume(&rball, unit.support(), &p07).unwrap();
        assert!((v.value - PI * 1.6f64.powf(2.0 - 0.7)).abs() < 1e-10);

        // p = 1 equals the classical planar mixed volume.
        let k = random_smooth_body(&grid, 31, 4, 0.3).unwrap();
        let q = random_smooth_body(&grid, 32, 4, 0.3).unwrap();
        let p1 = pexp(1.0, 2);
        let via_p = p_mixed_volume(&k, q.support(), &p1).unwrap().value;
        let via_classical = classical_mixed_volume_2d(&q, &k).unwrap().value;
        assert!((via_p - via_classical).abs() < 1e-10);
    }

    #[test]
    fn multi_body_p_mixed_volume() {
        let grid = grid2(256);
        let p = pexp(2.0, 2);
        let k = random_smooth_body(&grid, 51, 4, 0.3).unwrap();
        let q = random_smooth_body(&grid, 52, 4, 0.3).unwrap();
        let multi = p_mixed_volume_multi(&[&k, &k], &[q.support(), q.support()], &p).unwrap();
        let single = p_mixed_volume(&k, q.support(), &p).unwrap();
        assert!((multi.value - single.value).abs() < 1e-12);

        let b1 = make_ball(&grid, 1.5).unwrap();
        let b2 = make_ball(&grid, 0.8).unwrap();
        let q1 = make_ball(&grid, 1.2).unwrap();
        let q2 = make_ball(&grid, 2.0).unwrap();
        let v = p_mixed_volume_multi(&[&b1, &b2], &[q1.support(), q2.support()], &p).unwrap();
        // Constant integrand: prod over i of [q_i^p r_i^{n-p}]^{1/n}.
        let expected = PI * (1.2f64.powi(2) * 1.5f64.powi(0) * 2.0f64.powi(2) * 0.8f64.powi(0)).sqrt();
        assert!((v.value - expected).abs() < 1e-9, "{} vs {expected}", v.value);

        // Hoelder: V_p(K; Q)^n <= prod V_p(K_i, Q_i).
        for seed in 0..10 {
            let k1 = random_smooth_body(&grid, seed, 4, 0.3).unwrap();
            let k2 = random_smooth_body(&grid, seed + 100, 4, 0.3).unwrap();
            let q1 = random_smooth_body(&grid, seed + 200, 4, 0.3).unwrap();
            let q2 = random_smooth_body(&grid, seed + 300, 4, 0.3).unwrap();
            let lhs = p_mixed_volume_multi(&[&k1, &k2], &[q1.support(), q2.support()], &p)
                .unwrap()
                .value
                .powi(2);
            let rhs = p_mixed_volume(&k1, q1.support(), &p).unwrap().value
                * p_mixed_volume(&k2, q2.support(), &p).unwrap().value;
            assert!(lhs <= rhs + 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn multi_polar_consistency() {
        let grid = grid2(256);
        let p = pexp(1.3, 2);
        let k1 = random_smooth_body(&grid, 61, 4, 0.3).unwrap();
        let k2 = random_smooth_body(&grid, 62, 4, 0.3).unwrap();
        let unit_star = bodies::polar_radial(make_ball(&grid, 1.0).unwrap().support());
        let via_polar = p_mixed_volume_multi_polar(&[&k1, &k2], &[&unit_star, &unit_star], &p).unwrap();
        let unit = make_ball(&grid, 1.0).unwrap();
        let via_support = p_mixed_volume_multi(&[&k1, &k2], &[unit.support(), unit.support()], &p).unwrap();
        assert!((via_polar.value - via_support.value).abs() < 1e-12);

        // Convex competitors: polar stars against the direct support form.
        let l1 = random_smooth_body(&grid, 63, 4, 0.3).unwrap();
        let l2 = random_smooth_body(&grid, 64, 4, 0.3).unwrap();
        let ps1 = bodies::polar_radial(l1.support());
        let ps2 = bodies::polar_radial(l2.support());
        // rho_{L_i°} = 1/h_{L_i}, so the polar form over (L1°, L2°) equals
        // the direct form over (L1, L2).
        let via_polar =
            p_mixed_volume_multi_polar(&[&k1, &k2], &[&ps1, &ps2], &p).unwrap().value;
        let via_direct =
            p_mixed_volume_multi(&[&k1, &k2], &[l1.support(), l2.support()], &p).unwrap().value;
        assert!((via_polar - via_direct).abs() < 1e-12 * via_direct.abs());
    }

    #[test]
    fn vpi_mixed_cases() {
        let grid = grid2(256);
        let p = pexp(1.1, 2);
        let k = random_smooth_body(&grid, 71, 4, 0.3).unwrap();
        let l = random_smooth_body(&grid, 72, 4, 0.3).unwrap();
        let q1 = random_smooth_body(&grid, 73, 4, 0.3).unwrap();
        let q2 = random_smooth_body(&grid, 74, 4, 0.3).unwrap();

        let at0 = vpi_mixed(&k, &l, q1.support(), q2.support(), &p, 0.0).unwrap();
        let direct = p_mixed_volume(&k, q1.support(), &p).unwrap();
        assert!((at0.value - direct.value).abs() < 1e-12);

        let atn = vpi_mixed(&k, &l, q1.support(), q2.support(), &p, 2.0).unwrap();
        let direct = p_mixed_volume(&l, q2.support(), &p).unwrap();
        assert!((atn.value - direct.value).abs() < 1e-12);

        // Log-convexity in i: V_{p,j}^{k-i} <= V_{p,i}^{k-j} V_{p,k}^{j-i}.
        let (i, j, kk) = (-0.5, 0.7, 2.3);
        let vi = vpi_mixed(&k, &l, q1.support(), q2.support(), &p, i).unwrap().value;
        let vj = vpi_mixed(&k, &l, q1.support(), q2.support(), &p, j).unwrap().value;
        let vk = vpi_mixed(&k, &l, q1.support(), q2.support(), &p, kk).unwrap().value;
        assert!(vj.powf(kk - i) <= vi.powf(kk - j) * vk.powf(j - i) + 1e-10);
    }

    #[test]
    fn mixed_p_affine_cases() {
        let grid = grid2(256);
        for &p in &[1.0, 2.0, 0.5, 0.0, -0.5, -1.0, -3.0] {
            let pe = pexp(p, 2);
            let unit = make_ball(&grid, 1.0).unwrap();
            let v = mixed_p_affine(&[&unit, &unit], &pe).unwrap();
            assert!((v.value - 2.0 * PI).abs() < 1e-10 * 2.0 * PI, "p = {p}: {}", v.value);
        }

        // n copies of an ellipse: 2 pi det(A)^{(n-p)/(n+p)}, confirmed at
        // 10x resolution.
        let a = [2.0, 0.3, 0.0, 1.0];
        let det: f64 = 2.0;
        let ell = make_ellipsoid(&grid, &a).unwrap();
        let fine = grid2(2560);
        let ell_fine = make_ellipsoid(&fine, &a).unwrap();
        for &p in &[1.0, 2.0, -0.5, -1.0, -3.0] {
            let pe = pexp(p, 2);
            let v = mixed_p_affine(&[&ell, &ell], &pe).unwrap();
            let expected = 2.0 * PI * det.powf((2.0 - p) / (2.0 + p));
            assert!(
                (v.value - expected).abs() < 1e-8 * expected.abs(),
                "p = {p}: {} vs {expected}",
                v.value
            );
            let v_fine = mixed_p_affine(&[&ell_fine, &ell_fine], &pe).unwrap();
            assert!((v.value - v_fine.value).abs() < 1e-8 * expected.abs(), "p = {p} refinement");
        }

        // Geometric-mean bound against the single-body values.
        let pe = pexp(2.0, 2);
        let b = make_ball(&grid, 1.0).unwrap();
        let mixed = mixed_p_affine(&[&b, &ell], &pe).unwrap().value;
        let s1 = mixed_p_affine(&[&b, &b], &pe).unwrap().value;
        let s2 = mixed_p_affine(&[&ell, &ell], &pe).unwrap().value;
        assert!(mixed <= (s1 * s2).sqrt() + 1e-10);
    }

    #[test]
    fn asp_i_cases() {
        let grid = grid2(256);
        let p = pexp(1.4, 2);
        let k = random_smooth_body(&grid, 81, 4, 0.3).unwrap();
        let l = random_smooth_body(&grid, 82, 4, 0.3).unwrap();

        let at0 = asp_i(&k, &l, &p, 0.0).unwrap();
        let single = mixed_p_affine(&[&k, &k], &p).unwrap();
        assert!((at0.value - single.value).abs() < 1e-12);

        let b = make_ball(&grid, 1.0).unwrap();
        let at_ball = asp_i(&b, &b, &p, 0.8).unwrap();
        assert!((at_ball.value - 2.0 * PI).abs() < 1e-10);

        // i = -p with L = B gives the p-surface area.
        let v = asp_i(&k, &b, &p, -p.p()).unwrap();
        let sp = p_surface_area(&k, &p).unwrap();
        assert!((v.value - sp.value).abs() < 1e-10);
    }

    #[test]
    fn p_curvature_image_cases() {
        let grid = grid2(256);
        // Balls: Lambda_p(rB) = r^{(n-p)/p} B.
        for &(r, p) in &[(1.0, 2.0), (2.0, 2.0), (1.5, -1.0), (0.7, -3.0), (2.0, 1.0)] {
            let pe = pexp(p, 2);
            let ball = make_ball(&grid, r).unwrap();
            let image = p_curvature_image(&ball, &pe).unwrap();
            let expected = r.powf((2.0 - p) / p);
            for rho in image.rho() {
                assert!((rho - expected).abs() < 1e-12 * expected.max(1.0), "r={r}, p={p}");
            }
        }
        assert!(p_curvature_image(&make_ball(&grid, 1.0).unwrap(), &pexp(0.0, 2)).is_err());

        // Defining relation residual and a fixed-point-iteration oracle.
        let body = random_smooth_body(&grid, 91, 4, 0.3).unwrap();
        for &p in &[1.0, 2.0, -1.0, -3.0] {
            let pe = pexp(p, 2);
            let image = p_curvature_image(&body, &pe).unwrap();
            let volume = volume_radial(&image).unwrap().value;
            let fp = lp_curvature(&body, &pe);
            let omega = PI;
            for j in (0..grid.node_count()).step_by(13) {
                let reconstructed = omega / volume * image.rho()[j].powf(2.0 + p);
                let rel = (reconstructed - fp[j]).abs() / fp[j];
                assert!(rel < 1e-10, "p={p} node {j}: rel {rel}");
            }

            // Oracle: damped fixed-point iteration on log V of
            // V = (1/n) integral rho(V)^n, rho(V) = (V f_p / omega)^{1/(n+p)}.
            let n = 2.0;
            let g: Vec<f64> = fp.iter().map(|f| (f / omega).powf(n / (n + p))).collect();
            let c = grid.integrate(&g).unwrap() / n;
            let q = n / (n + p);
            let mut log_v = 0.0f64;
            let s = 0.5 / (1.0 - q);
            for _ in 0..20_000 {
                let next = (1.0 - s) * log_v + s * (c.ln() + q * log_v);
                if (next - log_v).abs() < 1e-15 {
                    log_v = next;
                    break;
                }
                log_v = next;
            }
            assert!(
                (log_v.exp() - volume).abs() < 1e-9 * volume,
                "p={p}: fixed point {} vs direct {volume}",
                log_v.exp()
            );
        }

        // Planar ellipse: the image is a dilate of the polar-axis ellipse.
        let a = [2.0, 0.0, 0.0, 1.0];
        let ell = make_ellipsoid(&grid, &a).unwrap();
        let pe = pexp(2.0, 2);
        let image = p_curvature_image(&ell, &pe).unwrap();
        // f_p = det^2 |A^t u|^{-(n+p)}, so rho is proportional to 1/|A^t u|,
        // the radial function of (A^t)^{-1} B.
        let ratio0 = image.rho()[0] * ell.h()[0];
        for j in 0..grid.node_count() {
            let ratio = image.rho()[j] * ell.h()[j];
            assert!((ratio - ratio0).abs() < 1e-10 * ratio0);
        }
    }

    #[test]
    fn classical_mixed_volume_2d_cases() {
        let grid = grid2(256);
        let k = random_smooth_body(&grid, 101, 4, 0.3).unwrap();
        let v_self = classical_mixed_volume_2d(&k, &k).unwrap();
        assert!((v_self.value - k.volume()).abs() < 1e-12);

        let b = make_ball(&grid, 1.0).unwrap();
        let rb = make_ball(&grid, 1.8).unwrap();
        let v = classical_mixed_volume_2d(&b, &rb).unwrap();
        assert!((v.value - PI * 1.8).abs() < 1e-10);

        for seed in 0..20 {
            let k1 = random_smooth_body(&grid, seed, 4, 0.3).unwrap();
            let k2 = random_smooth_body(&grid, seed + 7000, 4, 0.3).unwrap();
            let v12 = classical_mixed_volume_2d(&k1, &k2).unwrap().value;
            let v21 = classical_mixed_volume_2d(&k2, &k1).unwrap().value;
            assert!((v12 - v21).abs() < 1e-12, "symmetry seed {seed}");
            assert!(v12 * v12 >= k1.volume() * k2.volume() - 1e-10, "Minkowski seed {seed}");
        }
    }

    #[test]
    fn classical_mixed_volume_nd_cases() {
        let grid = grid2(256);
        let k = random_smooth_body(&grid, 111, 4, 0.3).unwrap();
        let v = classical_mixed_volume_nd(&[&k, &k]).unwrap();
        assert!((v.value - k.volume()).abs() < 1e-6 * k.volume());

        // Planar path vs the curvature formula.
        for seed in 0..5 {
            let k1 = random_smooth_body(&grid, seed + 300, 4, 0.3).unwrap();
            let k2 = random_smooth_body(&grid, seed + 400, 4, 0.3).unwrap();
            let nd = classical_mixed_volume_nd(&[&k1, &k2]).unwrap().value;
            let direct = classical_mixed_volume_2d(&k1, &k2).unwrap().value;
            assert!((nd - direct).abs() < 1e-8, "seed {seed}: {nd} vs {direct}");
        }

        // n = 3 balls: V = omega_3 r1 r2 r3.
        let grid3 = SphereGrid::<f64>::for_dim(3, 24, None).unwrap();
        let b1 = make_ball(&grid3, 1.0).unwrap();
        let b2 = make_ball(&grid3, 1.5).unwrap();
        let b3 = make_ball(&grid3, 0.75).unwrap();
        let v = classical_mixed_volume_nd(&[&b1, &b2, &b3]).unwrap();
        let expected = 4.0 * PI / 3.0 * 1.5 * 0.75;
        assert!((v.value - expected).abs() < 1e-4 * expected, "{} vs {expected}", v.value);
    }

    #[test]
    fn p_surface_area_cases() {
        let grid = grid2(256);
        let b = make_ball(&grid, 1.0).unwrap();
        for &p in &[1.0, 2.0, -0.5, -3.0] {
            let pe = pexp(p, 2);
            let s = p_surface_area(&b, &pe).unwrap();
            assert!((s.value - 2.0 * PI).abs() < 1e-10);

            let rb = make_ball(&grid, 1.4).unwrap();
            let s = p_surface_area(&rb, &pe).unwrap();
            assert!((s.value - 2.0 * PI * 1.4f64.powf(2.0 - p)).abs() < 1e-9);
        }

        // S_1 is the perimeter; ellipse arc length as the oracle.
        let a_mat = [2.0, 0.0, 0.0, 1.0];
        let ell = make_ellipsoid(&grid, &a_mat).unwrap();
        let s1 = p_surface_area(&ell, &pexp(1.0, 2)).unwrap().value;
        let (nodes, weights) = crate::sphere::gauss_legendre::<f64>(200);
        let mut arc = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let t = PI * (x + 1.0);
            arc += w * PI * ((2.0 * t.sin()).powi(2) + t.cos().powi(2)).sqrt();
        }
        assert!((s1 - arc).abs() < 1e-9 * arc, "{s1} vs {arc}");
    }

    #[test]
    fn homogeneity_of_p_mixed_volume() {
        let grid = grid2(256);
        let k = random_smooth_body(&grid, 121, 4, 0.3).unwrap();
        let q = random_smooth_body(&grid, 122, 4, 0.3).unwrap();
        for &p in &[1.0, 2.0, 0.5, -0.5, -1.0, -3.0] {
            let pe = pexp(p, 2);
            let base = p_mixed_volume(&k, q.support(), &pe).unwrap().value;
            for &(r, s) in &[(0.5, 2.0), (2.0, 0.5), (2.0, 2.0), (0.5, 0.5)] {
                let rk = k.dilate(r).unwrap();
                let sq = q.support().dilate(s).unwrap();
                let v = p_mixed_volume(&rk, &sq, &pe).unwrap().value;
                let expected = r.powf(2.0 - p) * s.powf(p) * base;
                assert!(
                    (v - expected).abs() < 1e-10 * expected.abs().max(1.0),
                    "p={p} r={r} s={s}: {v} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn gl_covariance_and_polar_transform_rule() {
        let grid = grid2(256);
        let p = pexp(1.5, 2);
        let k1 = random_smooth_body(&grid, 131, 4, 0.3).unwrap();
        let k2 = random_smooth_body(&grid, 132, 4, 0.3).unwrap();
        let l1 = random_smooth_body(&grid, 133, 4, 0.3).unwrap();
        let l2 = random_smooth_body(&grid, 134, 4, 0.3).unwrap();
        let map = bodies::LinearMap::new(vec![1.2, 0.3, -0.2, 0.9], 2).unwrap();

        let base = p_mixed_volume_multi(&[&k1, &k2], &[l1.support(), l2.support()], &p).unwrap().value;
        let tk1 = bodies::apply_linear(&k1, &map).unwrap();
        let tk2 = bodies::apply_linear(&k2, &map).unwrap();
        let tl1 = bodies::apply_linear(&l1, &map).unwrap();
        let tl2 = bodies::apply_linear(&l2, &map).unwrap();
        let moved = p_mixed_volume_multi(&[&tk1, &tk2], &[tl1.support(), tl2.support()], &p).unwrap().value;
        assert!(
            (moved - map.det_abs() * base).abs() < 1e-6 * base.abs().max(1.0),
            "{moved} vs {}",
            map.det_abs() * base
        );

        // Dual mixed volume of polars scales by 1/|det|.
        let s1 = bodies::polar_radial(l1.support());
        let s2 = bodies::polar_radial(l2.support());
        let base_dual = dual_mixed_volume(&[&s1, &s2]).unwrap().value;
        let ts1 = bodies::polar_radial(tl1.support());
        let ts2 = bodies::polar_radial(tl2.support());
        let moved_dual = dual_mixed_volume(&[&ts1, &ts2]).unwrap().value;
        assert!(
            (moved_dual - base_dual / map.det_abs()).abs() < 1e-6 * base_dual,
            "{moved_dual} vs {}",
            base_dual / map.det_abs()
        );
    }

    #[test]
    fn curvature_image_identity_and_variational_optimum() {
        let grid = grid2(256);
        let omega = PI;
        let k1 = random_smooth_body(&grid, 141, 4, 0.3).unwrap();
        let k2 = random_smooth_body(&grid, 142, 4, 0.3).unwrap();
        for &p in &[1.0, 2.0, -1.0, -3.0] {
            let pe = pexp(p, 2);
            let asp = mixed_p_affine(&[&k1, &k2], &pe).unwrap().value;

            // Identity through the curvature images:
            // as_p^{n+p} = n^{n+p} omega^n dual(Lambda K_1, Lambda K_2)^{n+p}
            //              / (|Lambda K_1| |Lambda K_2|).
            let im1 = p_curvature_image(&k1, &pe).unwrap();
            let im2 = p_curvature_image(&k2, &pe).unwrap();
            let v1 = volume_radial(&im1).unwrap().value;
            let v2 = volume_radial(&im2).unwrap().value;
            let dual = dual_mixed_volume(&[&im1, &im2]).unwrap().value;
            let np = 2.0 + p;
            let lhs = asp.powf(np);
            let rhs = 2.0f64.powf(np) * omega.powi(2) / (v1 * v2) * dual.powf(np);
            assert!(
                ((lhs - rhs) / lhs.abs().max(rhs.abs())).abs() < 1e-7,
                "p={p}: {lhs} vs {rhs}"
            );

            // Variational optimum at rho^n = (prod f_p)^{1/(n+p)}.
            let fp1 = lp_curvature(&k1, &pe);
            let fp2 = lp_curvature(&k2, &pe);
            let rho: Vec<f64> =
                fp1.iter().zip(fp2.iter()).map(|(a, b)| (a * b).powf(1.0 / np).sqrt()).collect();
            let l0 = bodies::StarBody::new(grid.clone(), rho).unwrap();
            let v = p_mixed_volume_multi_polar(&[&k1, &k2], &[&l0, &l0], &pe).unwrap().value;
            let vol = volume_radial(&l0).unwrap().value;
            let attained = 2.0 * v.powf(2.0 / np) * vol.powf(p / np);
            assert!((attained - asp).abs() < 1e-9 * asp, "p={p}: {attained} vs {asp}");

            // Random star competitors never beat the optimum.
            let mut rng = ChaCha12Rng::seed_from_u64(999);
            for trial in 0..100 {
                let pert: Vec<f64> = (0..grid.node_count())
                    .map(|j| {
                        let t = grid.theta(j);
                        let a: f64 = rng.gen_range(-0.4..0.4);
                        let b: f64 = rng.gen_range(-0.4..0.4);
                        l0.rho()[j] * (1.0 + a * (2.0 * t).cos() + b * (3.0 * t).sin()).max(0.2)
                    })
                    .collect();
                let lc = bodies::StarBody::new(grid.clone(), pert).unwrap();
                let v = p_mixed_volume_multi_polar(&[&k1, &k2], &[&lc, &lc], &pe).unwrap().value;
                let vol = volume_radial(&lc).unwrap().value;
                let candidate = 2.0 * v.powf(2.0 / np) * vol.powf(p / np);
                if p > 0.0 {
                    assert!(candidate >= asp - 1e-9 * asp, "p={p} trial {trial}: {candidate} < {asp}");
                } else {
                    assert!(candidate <= asp + 1e-9 * asp, "p={p} trial {trial}: {candidate} > {asp}");
                }
            }
        }
    }
}
