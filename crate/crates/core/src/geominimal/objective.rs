//! The geominimal objective
//!   n V^{n/(n+p)} * (polar-volume factor)
//! over competitor support samples, in the three factor variants:
//! alpha = 1 shares one competitor with factor |L°|^{p/(n+p)}, alpha = 2
//! takes a product of per-competitor polar volumes, alpha = 3 uses the dual
//! mixed volume of the polars.

use std::sync::Arc;

use crate::bodies::SmoothBody;
use crate::functionals::{lp_curvature, PExponent};
use crate::scalar::{real, Real};
use crate::sphere::SphereGrid;

#[derive(Debug, Clone)]
pub(crate) struct GeoObjective<T> {
    pub grid: Arc<SphereGrid<T>>,
    /// Logged curvature part of the V integrand.
    base_log: Vec<T>,
    /// Per-competitor multiplier on ln h inside the V integrand.
    v_log_weights: Vec<T>,
    /// alpha 1, 2: per-competitor exponent on the polar volume.
    polar_exponents: Vec<T>,
    /// alpha 3: per-competitor multiplier on ln h in the dual integrand.
    dual_log_weights: Vec<T>,
    /// alpha 3: outer exponent on the dual mixed volume.
    factor_exponent: T,
    vol_exponent: T,
    n: T,
}

impl<T: Real> GeoObjective<T> {
    /// Objective over n bodies with n competitors (or one shared for
    /// alpha = 1).
    pub fn multi(alpha: u8, ks: &[&SmoothBody<T>], p: &PExponent<T>) -> Self {
        let grid = ks[0].grid().clone();
        let n = real::<T>(grid.dim() as f64);
        let inv_n = T::one() / n;
        let mut base_log = vec![T::zero(); grid.node_count()];
        for k in ks {
            let fp = lp_curvature(k, p);
            for (acc, f) in base_log.iter_mut().zip(fp.iter()) {
                *acc += f.ln() * inv_n;
            }
        }
        let (v_log_weights, polar_exponents, dual_log_weights) = match alpha {
            1 => (vec![p.p()], vec![p.polar_exponent()], vec![]),
            2 => (
                vec![p.p() * inv_n; grid.dim()],
                vec![p.polar_exponent() * inv_n; grid.dim()],
                vec![],
            ),
            3 => (vec![p.p() * inv_n; grid.dim()], vec![], vec![T::one(); grid.dim()]),
            _ => unreachable!("alpha must be 1, 2 or 3"),
        };
        Self {
            grid,
            base_log,
            v_log_weights,
            polar_exponents,
            dual_log_weights,
            factor_exponent: p.polar_exponent(),
            vol_exponent: p.volume_exponent(),
            n,
        }
    }

    /// i-weighted objective over two bodies with two competitors (one shared
    /// for alpha = 1).
    pub fn weighted(alpha: u8, k: &SmoothBody<T>, l: &SmoothBody<T>, p: &PExponent<T>, i: T) -> Self {
        let grid = k.grid().clone();
        let n = real::<T>(grid.dim() as f64);
        let w1 = (n - i) / n;
        let w2 = i / n;
        let fp_k = lp_curvature(k, p);
        let fp_l = lp_curvature(l, p);
        let base_log: Vec<T> =
            fp_k.iter().zip(fp_l.iter()).map(|(fk, fl)| w1 * fk.ln() + w2 * fl.ln()).collect();
        let np = n + p.p();
        let (v_log_weights, polar_exponents, dual_log_weights) = match alpha {
            1 => (vec![p.p()], vec![p.p() / np], vec![]),
            2 => (
                vec![p.p() * w1, p.p() * w2],
                vec![p.p() * w1 / np, p.p() * w2 / np],
                vec![],
            ),
            3 => (vec![p.p() * w1, p.p() * w2], vec![], vec![n - i, i]),
            _ => unreachable!("alpha must be 1, 2 or 3"),
        };
        Self {
            grid,
            base_log,
            v_log_weights,
            polar_exponents,
            dual_log_weights,
            factor_exponent: p.p() / np,
            vol_exponent: n / np,
            n,
        }
    }

    pub fn competitor_count(&self) -> usize {
        self.v_log_weights.len()
    }

    /// Objective value for the given competitor support samples.
    pub fn eval(&self, hs: &[&[T]]) -> T {
        debug_assert_eq!(hs.len(), self.competitor_count());
        let count = self.grid.node_count();
        let weights = self.grid.weights();
        let log_hs: Vec<Vec<T>> = hs.iter().map(|h| h.iter().map(|v| v.ln()).collect()).collect();

        let mut v = T::zero();
        for j in 0..count {
            let mut exponent = self.base_log[j];
            for (vw, lh) in self.v_log_weights.iter().zip(log_hs.iter()) {
                exponent += *vw * lh[j];
            }
            v += weights[j] * exponent.exp();
        }
        v /= self.n;

        let mut obj = self.n * v.powf(self.vol_exponent);
        if !self.polar_exponents.is_empty() {
            for (pe, h) in self.polar_exponents.iter().zip(hs.iter()) {
                if *pe == T::zero() {
                    continue;
                }
                let mut pv = T::zero();
                let n_int = self.grid.dim() as i32;
                for j in 0..count {
                    pv += weights[j] * h[j].powi(-n_int);
                }
                pv /= self.n;
                obj *= pv.powf(*pe);
            }
        }
        if !self.dual_log_weights.is_empty() {
            let mut dv = T::zero();
            for j in 0..count {
                let mut exponent = T::zero();
                for (dw, lh) in self.dual_log_weights.iter().zip(log_hs.iter()) {
                    exponent -= *dw * lh[j];
                }
                dv += weights[j] * exponent.exp();
            }
            dv /= self.n;
            obj *= dv.powf(self.factor_exponent);
        }
        obj
    }

    /// Objective value plus a first-order error estimate from the component
    /// quadrature errors.
    pub fn eval_with_err(&self, hs: &[&[T]]) -> (T, T) {
        let count = self.grid.node_count();
        let log_hs: Vec<Vec<T>> = hs.iter().map(|h| h.iter().map(|v| v.ln()).collect()).collect();
        let v_samples: Vec<T> = (0..count)
            .map(|j| {
                let mut exponent = self.base_log[j];
                for (vw, lh) in self.v_log_weights.iter().zip(log_hs.iter()) {
                    exponent += *vw * lh[j];
                }
                exponent.exp()
            })
            .collect();
        let (v_raw, v_err) = self.grid.integrate_with_err(&v_samples).expect("finite samples");
        let v = v_raw / self.n;
        let mut rel_err = self.vol_exponent.abs() * (v_err / v_raw);

        let mut obj = self.n * v.powf(self.vol_exponent);
        for (pe, h) in self.polar_exponents.iter().zip(hs.iter()) {
            if *pe == T::zero() {
                continue;
            }
            let n_int = self.grid.dim() as i32;
            let samples: Vec<T> = h.iter().map(|x| x.powi(-n_int)).collect();
            let (p_raw, p_err) = self.grid.integrate_with_err(&samples).expect("finite samples");
            obj *= (p_raw / self.n).powf(*pe);
            rel_err += pe.abs() * (p_err / p_raw);
        }
        if !self.dual_log_weights.is_empty() {
            let samples: Vec<T> = (0..count)
                .map(|j| {
                    let mut exponent = T::zero();
                    for (dw, lh) in self.dual_log_weights.iter().zip(log_hs.iter()) {
                        exponent -= *dw * lh[j];
                    }
                    exponent.exp()
                })
                .collect();
            let (d_raw, d_err) = self.grid.integrate_with_err(&samples).expect("finite samples");
            obj *= (d_raw / self.n).powf(self.factor_exponent);
            rel_err += self.factor_exponent.abs() * (d_err / d_raw);
        }
        (obj, rel_err * obj.abs())
    }
}
