//! Derivative-free simplex minimization.
//!
//! Standard Nelder-Mead with reflection, expansion, contraction and shrink.
//! Infeasible points report +inf and get reflected away; the caller supplies
//! a feasible start.

use crate::scalar::{real, Real};

pub struct SimplexResult<T> {
    pub best_x: Vec<T>,
    pub best_f: T,
    pub iterations: usize,
    pub converged: bool,
}

pub fn minimize<T: Real>(
    f: &mut dyn FnMut(&[T]) -> T,
    x0: &[T],
    initial_step: T,
    max_iters: usize,
    tol: T,
) -> SimplexResult<T> {
    let dim = x0.len();
    let mut points: Vec<Vec<T>> = Vec::with_capacity(dim + 1);
    points.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += initial_step;
        points.push(p);
    }
    let mut values: Vec<T> = points.iter().map(|p| f(p)).collect();

    let alpha = T::one();
    let gamma = real::<T>(2.0);
    let rho = real::<T>(0.5);
    let sigma = real::<T>(0.5);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = values[worst] - values[best];
        if values[worst].is_finite() && spread <= tol * (values[best].abs() + real::<T>(1e-12)) {
            converged = true;
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = vec![T::zero(); dim];
        for &idx in order.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(points[idx].iter()) {
                *c += *x;
            }
        }
        let inv = T::one() / real::<T>(dim as f64);
        for c in centroid.iter_mut() {
            *c *= inv;
        }

        let reflect: Vec<T> = centroid
            .iter()
            .zip(points[worst].iter())
            .map(|(c, w)| *c + alpha * (*c - *w))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[order[0]] {
            let expand: Vec<T> = centroid
                .iter()
                .zip(points[worst].iter())
                .map(|(c, w)| *c + gamma * (*c - *w))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                points[worst] = expand;
                values[worst] = f_expand;
            } else {
                points[worst] = reflect;
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            points[worst] = reflect;
            values[worst] = f_reflect;
            continue;
        }
        // Contraction (outside when the reflection helped, inside otherwise).
        let towards: &[T] = if f_reflect < values[worst] { &reflect } else { &points[worst] };
        let contract: Vec<T> =
            centroid.iter().zip(towards.iter()).map(|(c, t)| *c + rho * (*t - *c)).collect();
        let f_contract = f(&contract);
        if f_contract < values[worst].min(f_reflect) {
            points[worst] = contract;
            values[worst] = f_contract;
            continue;
        }
        // Shrink towards the best vertex.
        let best_point = points[best].clone();
        for idx in 0..points.len() {
            if idx == best {
                continue;
            }
            let shrunk: Vec<T> = best_point
                .iter()
                .zip(points[idx].iter())
                .map(|(b, x)| *b + sigma * (*x - *b))
                .collect();
            values[idx] = f(&shrunk);
            points[idx] = shrunk;
        }
    }

    let mut best_idx = 0;
    for i in 1..points.len() {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    SimplexResult {
        best_x: points.swap_remove(best_idx),
        best_f: values[best_idx],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_bowl() {
        let mut f = |x: &[f64]| (x[0] - 1.5).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 3.0;
        let res = minimize(&mut f, &[0.0, 0.0], 0.5, 500, 1e-12);
        assert!(res.converged);
        assert!((res.best_x[0] - 1.5).abs() < 1e-5);
        assert!((res.best_x[1] + 0.5).abs() < 1e-5);
        assert!((res.best_f - 3.0).abs() < 1e-9);
    }

    #[test]
    fn handles_infeasible_regions() {
        // Feasible only for x0 > 0; minimum at the barrier-free optimum 1.0.
        let mut f = |x: &[f64]| {
            if x[0] <= 0.0 {
                f64::INFINITY
            } else {
                (x[0].ln()).powi(2) + 1.0
            }
        };
        let res = minimize(&mut f, &[0.5, 0.0], 0.4, 500, 1e-12);
        assert!((res.best_x[0] - 1.0).abs() < 1e-4);
        assert!((res.best_f - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock_descends() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let res = minimize(&mut f, &[-1.2, 1.0], 0.5, 2000, 1e-14);
        assert!(res.best_f < 1e-6, "best {}", res.best_f);
    }
}
