//! Trigonometric series on the circle.
//!
//! Planar bodies are sampled at uniform angles; this module converts between
//! samples and Fourier coefficients, differentiates spectrally, and evaluates
//! the interpolant (with derivatives) at arbitrary angles. Everything assumes
//! an even sample count so the Nyquist mode is unambiguous; odd derivatives
//! zero the Nyquist coefficient.

use crate::error::{GeoError, Result};
use crate::scalar::{real, Real};

/// f(theta) = sum_k a[k] cos(k theta) + b[k] sin(k theta), k = 0..=half.
#[derive(Debug, Clone)]
pub struct TrigSeries<T> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Real> TrigSeries<T> {
    /// Analyses samples taken at the uniform angles 2*pi*j/m, m even.
    ///
    /// Uses exact trig tables through cos(k theta_j) = table[(k j) mod m],
    /// which keeps constants and band-limited inputs clean to roundoff.
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        let m = samples.len();
        if m < 4 || m % 2 != 0 {
            return Err(GeoError::InvalidParameter(format!(
                "trigonometric analysis needs an even sample count >= 4, got {m}"
            )));
        }
        let half = m / 2;
        let (cos_table, sin_table) = node_tables::<T>(m);
        let mut a = vec![T::zero(); half + 1];
        let mut b = vec![T::zero(); half + 1];
        for (j, &s) in samples.iter().enumerate() {
            let mut idx = 0usize;
            for k in 0..=half {
                a[k] += s * cos_table[idx];
                b[k] += s * sin_table[idx];
                // idx = (k+1) j mod m; one subtraction suffices since j < m.
                idx += j;
                if idx >= m {
                    idx -= m;
                }
            }
        }
        let inv_m = T::one() / real::<T>(m as f64);
        let two_inv_m = inv_m * real::<T>(2.0);
        a[0] *= inv_m;
        b[0] = T::zero();
        for k in 1..half {
            a[k] *= two_inv_m;
            b[k] *= two_inv_m;
        }
        a[half] *= inv_m;
        b[half] = T::zero();
        // Zero the roundoff noise floor so that high-order derivatives do not
        // amplify it by k^2 (constants must differentiate to exact zero).
        let scale = samples.iter().fold(T::zero(), |acc, s| acc.max(s.abs()));
        let threshold = T::epsilon() * scale * real::<T>(8.0);
        for coef in a.iter_mut().chain(b.iter_mut()) {
            if coef.abs() < threshold {
                *coef = T::zero();
            }
        }
        Ok(Self { a, b })
    }

    /// Builds a series directly from coefficients (`a[k]`, `b[k]` for k >= 0).
    pub fn from_coefficients(a: Vec<T>, b: Vec<T>) -> Self {
        debug_assert_eq!(a.len(), b.len());
        Self { a, b }
    }

    pub fn max_mode(&self) -> usize {
        self.a.len() - 1
    }

    /// Coefficients of the modes k = 0..=k_max (zero-padded past the band).
    pub fn low_modes(&self, k_max: usize) -> (Vec<T>, Vec<T>) {
        let mut a = vec![T::zero(); k_max + 1];
        let mut b = vec![T::zero(); k_max + 1];
        for k in 0..=k_max.min(self.a.len() - 1) {
            a[k] = self.a[k];
            b[k] = self.b[k];
        }
        (a, b)
    }

    /// Spectral derivative of the given order as a new series.
    pub fn derivative(&self, order: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..order {
            let nyquist = out.a.len() - 1;
            let mut a = vec![T::zero(); out.a.len()];
            let mut b = vec![T::zero(); out.b.len()];
            for k in 1..out.a.len() {
                let kf = real::<T>(k as f64);
                a[k] = kf * out.b[k];
                b[k] = -kf * out.a[k];
            }
            // The sampled Nyquist cosine has zero derivative at the nodes.
            b[nyquist] = T::zero();
            out = Self { a, b };
        }
        out
    }

    /// Evaluates the series at an arbitrary angle.
    pub fn eval(&self, theta: T) -> T {
        let (sin_t, cos_t) = theta.sin_cos();
        let mut ck = T::one();
        let mut sk = T::zero();
        let mut acc = T::zero();
        for k in 0..self.a.len() {
            if k % 32 == 0 {
                let kt = theta * real::<T>(k as f64);
                let (s_exact, c_exact) = kt.sin_cos();
                ck = c_exact;
                sk = s_exact;
            }
            acc += self.a[k] * ck + self.b[k] * sk;
            let c_next = ck * cos_t - sk * sin_t;
            sk = sk * cos_t + ck * sin_t;
            ck = c_next;
        }
        acc
    }

    /// Synthesises samples at `m` uniform angles (exact trig tables).
    pub fn samples(&self, m: usize) -> Vec<T> {
        let (cos_table, sin_table) = node_tables::<T>(m);
        let mut out = vec![T::zero(); m];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            let mut idx = 0usize;
            for k in 0..self.a.len() {
                acc += self.a[k] * cos_table[idx] + self.b[k] * sin_table[idx];
                idx += j;
                if idx >= m {
                    idx %= m;
                }
            }
            *o = acc;
        }
        out
    }
}

/// Exact cos/sin values at the m uniform angles 2*pi*i/m.
fn node_tables<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    let two_pi = T::PI() * real::<T>(2.0);
    let mut cos_table = Vec::with_capacity(m);
    let mut sin_table = Vec::with_capacity(m);
    for i in 0..m {
        let theta = two_pi * real::<T>(i as f64) / real::<T>(m as f64);
        let (s, c) = theta.sin_cos();
        cos_table.push(c);
        sin_table.push(s);
    }
    (cos_table, sin_table)
}

/// Spectral derivative sampled at the same uniform nodes as the input.
pub fn differentiate_periodic<T: Real>(samples: &[T], order: usize) -> Result<Vec<T>> {
    if !(1..=2).contains(&order) {
        return Err(GeoError::InvalidParameter(format!("derivative order must be 1 or 2, got {order}")));
    }
    for (i, s) in samples.iter().enumerate() {
        if !s.is_finite() {
            return Err(GeoError::NonFinite(i));
        }
    }
    let series = TrigSeries::from_samples(samples)?;
    Ok(series.derivative(order).samples(samples.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn uniform_samples(m: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..m).map(|j| f(2.0 * PI * j as f64 / m as f64)).collect()
    }

    #[test]
    fn second_derivative_of_sine() {
        let m = 64;
        let samples = uniform_samples(m, |t| t.sin());
        let d2 = differentiate_periodic(&samples, 2).unwrap();
        for (j, v) in d2.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / m as f64;
            assert!((v + t.sin()).abs() < 1e-10, "node {j}: {v}");
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let samples = vec![5.0f64; 128];
        let d1 = differentiate_periodic(&samples, 1).unwrap();
        assert!(d1.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn smooth_function_matches_finite_differences() {
        // Oracle: 5-point central stencil on a fine grid, h = 2*pi/4096.
        let m = 256;
        let f = |t: f64| t.cos().exp();
        let samples = uniform_samples(m, f);
        let d2 = differentiate_periodic(&samples, 2).unwrap();
        let h = 2.0 * PI / 4096.0;
        for j in (0..m).step_by(17) {
            let t = 2.0 * PI * j as f64 / m as f64;
            let fd = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h))
                / (12.0 * h * h);
            assert!((d2[j] - fd).abs() < 1e-6, "node {j}: {} vs {}", d2[j], fd);
        }
    }

    #[test]
    fn twice_first_order_matches_second_order() {
        let m = 128;
        let samples = uniform_samples(m, |t| (2.0 * t).sin() + 0.3 * (3.0 * t).cos());
        let d1 = differentiate_periodic(&samples, 1).unwrap();
        let d11 = differentiate_periodic(&d1, 1).unwrap();
        let d2 = differentiate_periodic(&samples, 2).unwrap();
        for (x, y) in d11.iter().zip(d2.iter()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn odd_length_rejected() {
        let samples = vec![1.0f64; 65];
        assert!(differentiate_periodic(&samples, 1).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_band_limited_input() {
        let m = 64;
        let f = |t: f64| 1.0 + 0.4 * (3.0 * t).cos() - 0.2 * (5.0 * t).sin();
        let series = TrigSeries::from_samples(&uniform_samples(m, f)).unwrap();
        for &t in &[0.1, 1.7, 3.9, 5.5] {
            assert!((series.eval(t) - f(t)).abs() < 1e-12);
        }
    }
}
