//! Eigenvalues and right eigenvectors of general complex matrices via the
//! complex Schur form (Householder-Hessenberg reduction followed by
//! Wilkinson-shifted QR sweeps).

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, Matrix};
use crate::matrix_calculus::svd::condition_number;
use crate::scalar::{cr, Real, C};

const MAX_QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Unitary `Q` and upper-triangular `T` with `A = Q T Q^+`.
#[derive(Clone, Debug)]
pub struct Schur<T: Real> {
    pub q: Matrix<T>,
    pub t: Matrix<T>,
}

/// Right eigen-decomposition `A X = X diag(values)` with unit-norm columns.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<C<T>>,
    pub vectors: Matrix<T>,
    /// 2-norm condition number of `vectors`.
    pub condition: T,
}

fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), C::zero());
    }
    if ax == T::zero() {
        return (T::zero(), C::one());
    }
    let norm = ax.hypot(ay);
    let alpha = x / ax;
    (ax / norm, alpha * y.conj() / norm)
}

/// Applies `G = [[c, s], [-conj(s), c]]` to rows `k, k+1` from the left.
fn rotate_rows<T: Real>(h: &mut Matrix<T>, k: usize, cs: T, sn: C<T>, from_col: usize) {
    for j in from_col..h.cols() {
        let x = h[(k, j)];
        let y = h[(k + 1, j)];
        h[(k, j)] = x * cs + sn * y;
        h[(k + 1, j)] = -sn.conj() * x + y * cs;
    }
}

/// Applies `G^+` to columns `k, k+1` from the right.
fn rotate_cols<T: Real>(h: &mut Matrix<T>, k: usize, cs: T, sn: C<T>, to_row: usize) {
    for i in 0..to_row {
        let x = h[(i, k)];
        let y = h[(i, k + 1)];
        h[(i, k)] = x * cs + y * sn.conj();
        h[(i, k + 1)] = -x * sn + y * cs;
    }
}

fn hessenberg<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == T::zero() {
            continue;
        }
        let phase = if x[0].norm() == T::zero() {
            C::one()
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm = vec_norm(&v);
        if vnorm == T::zero() {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        let two = T::lit(2.0);
        // H <- (I - 2 v v^+) H on rows k+1..
        for j in 0..n {
            let s: C<T> = v.iter().enumerate().map(|(r, vi)| vi.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vi) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= *vi * s * two;
            }
        }
        // H <- H (I - 2 v v^+), Q <- Q (I - 2 v v^+) on columns k+1..
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: C<T> = v.iter().enumerate().map(|(r, vi)| m[(i, k + 1 + r)] * *vi).sum();
                for (r, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= s * vi.conj() * two;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C::zero();
        }
    }
    (h, q)
}

/// Complex Schur decomposition.
pub fn schur<T: Real>(a: &Matrix<T>) -> Result<Schur<T>> {
    a.ensure_square("Schur input")?;
    let n = a.rows();
    let (mut h, mut q) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { q, t: h });
    }
    let eps = T::epsilon();
    let scale = T::one().max(h.max_abs());
    let mut hi = n - 1;
    let mut iterations = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let reference = if diag == T::zero() { scale } else { diag };
            if sub <= eps * reference {
                h[(lo, lo - 1)] = C::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        if iterations > MAX_QR_ITERATIONS_PER_EIGENVALUE {
            return Err(Error::ConvergenceFailure(format!(
                "shifted QR stalled at row {hi} after {MAX_QR_ITERATIONS_PER_EIGENVALUE} iterations"
            )));
        }
        let shift = if iterations.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            rotate_rows(&mut h, k, cs, sn, lo);
            h[(k + 1, k)] = C::zero();
            rotations.push((k, cs, sn));
        }
        for &(k, cs, sn) in &rotations {
            rotate_cols(&mut h, k, cs, sn, (k + 2).min(hi + 1));
            rotate_cols(&mut q, k, cs, sn, n);
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C::zero();
        }
    }
    Ok(Schur { q, t: h })
}

fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let m = (a - d) * half;
    let disc = (m * m + b * c).sqrt();
    let mu1 = d - b * c / (m + disc);
    let mu2 = d - b * c / (m - disc);
    let pick = |mu: C<T>| {
        if mu.re.is_finite() && mu.im.is_finite() {
            Some(mu)
        } else {
            None
        }
    };
    match (pick(mu1), pick(mu2)) {
        (Some(x), Some(y)) => {
            if (x - d).norm() <= (y - d).norm() {
                x
            } else {
                y
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => d,
    }
}

/// Eigenvalues and unit-norm right eigenvectors.
pub fn eigen<T: Real>(a: &Matrix<T>) -> Result<Eigen<T>> {
    let Schur { q, t } = schur(a)?;
    let n = t.rows();
    let values: Vec<C<T>> = (0..n).map(|i| t[(i, i)]).collect();
    let small = T::epsilon() * T::one().max(t.max_abs());
    let mut vectors = Matrix::zeros(n, n);
    for k in 0..n {
        let mut y = vec![C::zero(); n];
        y[k] = C::one();
        for j in (0..k).rev() {
            let s: C<T> = ((j + 1)..=k).map(|m| t[(j, m)] * y[m]).sum();
            let mut denom = t[(j, j)] - values[k];
            if denom.norm() < small {
                denom = cr(small);
            }
            y[j] = -s / denom;
        }
        let x = q.mul_vec(&y);
        let norm = vec_norm(&x);
        let x: Vec<C<T>> = x.into_iter().map(|z| z / norm).collect();
        vectors.set_column(k, &x);
    }
    let condition = condition_number(&vectors)?;
    Ok(Eigen {
        values,
        vectors,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_matrix;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schur_of_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in [1, 2, 3, 5, 8, 16] {
            let a: Matrix<f64> = random_matrix(&mut rng, n, n);
            let s = schur(&a).unwrap();
            let back = &(&s.q * &s.t) * &s.q.adjoint();
            assert!((&back - &a).max_abs() < 1e-12 * a.max_abs().max(1.0), "n={n}");
            assert!((&(&s.q.adjoint() * &s.q) - &Matrix::identity(n)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 3, 6] {
            let a: Matrix<f64> = random_matrix(&mut rng, n, n);
            let e = eigen(&a).unwrap();
            for k in 0..n {
                let x = e.vectors.column_vec(k);
                let ax = a.mul_vec(&x);
                let resid: f64 = ax
                    .iter()
                    .zip(&x)
                    .map(|(p, q)| (*p - *q * e.values[k]).norm())
                    .fold(0.0, f64::max);
                assert!(resid < 1e-12, "n={n} k={k}: {resid}");
            }
        }
    }

    #[test]
    fn diagonal_and_triangular() {
        let d = Matrix::diag(&[c(-0.5, -2.0)]);
        let e = eigen(&d).unwrap();
        assert_eq!(e.values[0], c(-0.5, -2.0));
        let t = Matrix::<f64>::from_real_rows(&[&[1.0, 5.0], &[0.0, 2.0]]).unwrap();
        let e = eigen(&t).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jordan_block_is_ill_conditioned() {
        let j = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let e = eigen(&j).unwrap();
        assert!(e.condition > 1e12, "{}", e.condition);
    }
}
