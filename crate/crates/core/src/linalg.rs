//! Small dense linear algebra helpers.
//!
//! Bodies live in dimension 2 to 4, fits have at most a dozen unknowns, so a
//! pivoted Gauss elimination covers every need of the crate.

use crate::error::{GeoError, Result};
use crate::scalar::Real;

/// Row-major square matrix view helpers.
#[inline]
pub fn mat_get<T: Copy>(m: &[T], n: usize, r: usize, c: usize) -> T {
    m[r * n + c]
}

/// y = M x for a row-major n x n matrix.
pub fn matvec<T: Real>(m: &[T], n: usize, x: &[T]) -> Vec<T> {
    let mut y = vec![T::zero(); n];
    for r in 0..n {
        let mut acc = T::zero();
        for c in 0..n {
            acc += m[r * n + c] * x[c];
        }
        y[r] = acc;
    }
    y
}

/// y = M^t x for a row-major n x n matrix.
pub fn matvec_t<T: Real>(m: &[T], n: usize, x: &[T]) -> Vec<T> {
    let mut y = vec![T::zero(); n];
    for r in 0..n {
        let mut acc = T::zero();
        for c in 0..n {
            acc += m[c * n + r] * x[c];
        }
        y[r] = acc;
    }
    y
}

/// C = A B, all row-major n x n.
pub fn matmul<T: Real>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for r in 0..n {
        for k in 0..n {
            let ark = a[r * n + k];
            for j in 0..n {
                c[r * n + j] += ark * b[k * n + j];
            }
        }
    }
    c
}

pub fn transpose<T: Copy>(m: &[T], n: usize) -> Vec<T> {
    let mut t = m.to_vec();
    for r in 0..n {
        for c in 0..n {
            t[c * n + r] = m[r * n + c];
        }
    }
    t
}

/// Determinant by pivoted elimination.
pub fn det<T: Real>(m: &[T], n: usize) -> T {
    let mut a = m.to_vec();
    let mut d = T::one();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == T::zero() {
            return T::zero();
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            d = -d;
        }
        let p = a[col * n + col];
        d *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            for c in col..n {
                let sub = factor * a[col * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    d
}

/// Solves M x = b by pivoted Gauss elimination.
pub fn solve<T: Real>(m: &[T], n: usize, b: &[T]) -> Result<Vec<T>> {
    let mut a = m.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < T::epsilon() * crate::scalar::real(1e3) {
            return Err(GeoError::SingularMatrix);
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            x.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            for c in col..n {
                let sub = factor * a[col * n + c];
                a[r * n + c] -= sub;
            }
            let sub = factor * x[col];
            x[r] -= sub;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for c in col + 1..n {
            acc -= a[col * n + c] * x[c];
        }
        x[col] = acc / a[col * n + col];
    }
    Ok(x)
}

/// Inverse by solving against the identity columns.
pub fn inverse<T: Real>(m: &[T], n: usize) -> Result<Vec<T>> {
    let mut inv = vec![T::zero(); n * n];
    for c in 0..n {
        let mut e = vec![T::zero(); n];
        e[c] = T::one();
        let col = solve(m, n, &e)?;
        for r in 0..n {
            inv[r * n + c] = col[r];
        }
    }
    Ok(inv)
}

/// Least squares solution of the overdetermined system `design * x = rhs`
/// via normal equations. Returns the solution, the residual 2-norm and an
/// estimate of the condition number of the normal matrix.
pub fn least_squares<T: Real>(design: &[T], rows: usize, cols: usize, rhs: &[T]) -> Result<(Vec<T>, T, T)> {
    debug_assert_eq!(design.len(), rows * cols);
    debug_assert_eq!(rhs.len(), rows);
    let mut ata = vec![T::zero(); cols * cols];
    let mut atb = vec![T::zero(); cols];
    for r in 0..rows {
        for i in 0..cols {
            let di = design[r * cols + i];
            atb[i] += di * rhs[r];
            for j in 0..cols {
                ata[i * cols + j] += di * design[r * cols + j];
            }
        }
    }
    let x = solve(&ata, cols, &atb)?;
    let mut res = T::zero();
    for r in 0..rows {
        let mut pred = T::zero();
        for i in 0..cols {
            pred += design[r * cols + i] * x[i];
        }
        let d = pred - rhs[r];
        res += d * d;
    }
    // Crude condition estimate: ratio of extreme diagonal magnitudes of the
    // eliminated normal matrix. Good enough to flag a degenerate design.
    let cond = condition_estimate(&ata, cols);
    Ok((x, res.sqrt(), cond))
}

fn condition_estimate<T: Real>(m: &[T], n: usize) -> T {
    let mut a = m.to_vec();
    let mut max_p = T::zero();
    let mut min_p = T::infinity();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
        }
        let p = a[col * n + col].abs();
        if p == T::zero() {
            return T::infinity();
        }
        max_p = max_p.max(p);
        min_p = min_p.min(p);
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            for c in col..n {
                let sub = factor * a[col * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    max_p / min_p
}
