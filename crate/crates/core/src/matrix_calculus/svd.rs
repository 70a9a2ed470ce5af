//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Orthogonalizes columns directly instead of diagonalizing `A^+ A`, so small
//! singular values keep full relative accuracy. Condition numbers up to
//! ~1e15 are resolvable, which the invertibility checks rely on.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matrix_calculus::hermitian::{jacobi_rotation, rotate_columns, JACOBI_MAX_SWEEPS};
use crate::scalar::Real;

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    // one-sided Jacobi wants rows >= cols
    let mut w = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let n = w.cols();
    let m = w.rows();
    let mut converged = n <= 1;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = crate::scalar::cr(T::zero());
                for i in 0..m {
                    let x = w[(i, p)];
                    let y = w[(i, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= T::epsilon() * (alpha * beta).sqrt() || gamma.norm() == T::zero() {
                    continue;
                }
                rotated = true;
                let j = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &j);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(format!(
            "one-sided Jacobi SVD exceeded {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }
    let mut sv: Vec<T> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(sv)
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(a: &Matrix<T>) -> Result<T> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(T::zero());
    }
    Ok(singular_values(a)?[0])
}

/// `sigma_max / sigma_min`; infinite for singular input.
pub fn condition_number<T: Real>(a: &Matrix<T>) -> Result<T> {
    a.ensure_square("condition number input")?;
    let sv = singular_values(a)?;
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => Ok(hi / lo),
        (Some(_), Some(_)) => Ok(T::infinity()),
        _ => Ok(T::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary};
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prescribed_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary::<f64, _>(&mut rng, 4);
        let v = random_unitary::<f64, _>(&mut rng, 4);
        let s = [3.0, 1.0, 1e-3, 1e-11];
        let a = &(&u * &Matrix::diag_real(&s)) * &v.adjoint();
        let sv = singular_values(&a).unwrap();
        for (got, want) in sv.iter().zip(s) {
            assert!((got - want).abs() <= 1e-14 * 3.0 + 1e-6 * want, "{got} vs {want}");
        }
        let cond = condition_number(&a).unwrap();
        assert!((cond / 3e11 - 1.0).abs() < 1e-3, "{cond}");
    }

    #[test]
    fn norm_of_unitary_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary::<f64, _>(&mut rng, 5);
        assert!((spectral_norm(&u).unwrap() - 1.0).abs() < 1e-13);
        let a = random_matrix::<f64, _>(&mut rng, 3, 5);
        let sv = singular_values(&a).unwrap();
        assert_eq!(sv.len(), 3);
        let fro2: f64 = sv.iter().map(|s| s * s).sum();
        assert!((fro2 - a.norm_fro().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn singular_input() {
        let a = Matrix::from_rows(&[vec![c(1.0f64, 0.0), c(0.0, 2.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(condition_number(&a).unwrap().is_infinite());
    }
}
