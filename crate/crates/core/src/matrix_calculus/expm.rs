//! Matrix exponential of general complex matrices by scaling and squaring
//! with the degree-13 Pade approximant.
//!
//! The generators met here are non-normal, so diagonalization is avoided.

use crate::matrix::{Lu, Matrix};
use crate::scalar::{cr, Real};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound under which the [13/13] approximant meets unit roundoff.
const THETA13: f64 = 5.371920351148152;

/// `exp(A t)`.
pub fn matrix_exp<T: Real>(a: &Matrix<T>, t: T) -> Matrix<T> {
    expm(&a.scale_real(t))
}

/// `exp(A)`.
pub fn expm<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square(), "matrix exponential needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return a.clone();
    }
    if n == 1 {
        return Matrix::from_fn(1, 1, |_, _| a[(0, 0)].exp());
    }
    let norm = a.norm_1();
    if norm == T::zero() {
        return Matrix::identity(n);
    }
    let theta = T::lit(THETA13);
    let squarings = if norm > theta {
        (norm / theta).log2().ceil().to_f64_lossy().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale_real(T::lit(2.0).powi(-squarings));
    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn pade13<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    let b = |k: usize| cr(T::lit(PADE13[k]));
    let id = Matrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let inner_u = &(&a6.scale(b(13)) + &a4.scale(b(11))) + &a2.scale(b(9));
    let u_poly = &(&(&(&(&a6 * &inner_u) + &a6.scale(b(7))) + &a4.scale(b(5))) + &a2.scale(b(3))) + &id.scale(b(1));
    let u = a * &u_poly;

    let inner_v = &(&a6.scale(b(12)) + &a4.scale(b(10))) + &a2.scale(b(8));
    let v = &(&(&(&(&a6 * &inner_v) + &a6.scale(b(6))) + &a4.scale(b(4))) + &a2.scale(b(2))) + &id.scale(b(0));

    let numerator = &v + &u;
    let denominator = &v - &u;
    Lu::new(&denominator)
        .expect("Pade denominator is nonsingular for scaled input")
        .solve(&numerator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_matrix;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_and_diagonal() {
        let z = Matrix::<f64>::zeros(3, 3);
        assert_eq!(matrix_exp(&z, 2.5), Matrix::identity(3));
        let d = Matrix::diag(&[c(-1.0, 0.0), c(0.0, -2.0)]);
        let e = matrix_exp(&d, 1.0);
        let want = Matrix::diag(&[c((-1.0f64).exp(), 0.0), c((2.0f64).cos(), -(2.0f64).sin())]);
        assert!((&e - &want).max_abs() < 1e-15);
    }

    #[test]
    fn nilpotent_exact() {
        let a = Matrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let e = matrix_exp(&a, 3.0);
        let want = Matrix::from_real_rows(&[&[1.0, 3.0], &[0.0, 1.0]]).unwrap();
        assert!((&e - &want).max_abs() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -w], [w, 0]] t) is a rotation by w t
        let w = 7.3;
        let a = Matrix::<f64>::from_real_rows(&[&[0.0, -w], &[w, 0.0]]).unwrap();
        let e = matrix_exp(&a, 1.1);
        let th = w * 1.1;
        let want = Matrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]).unwrap();
        assert!((&e - &want).max_abs() < 1e-13);
    }

    #[test]
    fn semigroup_self_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let a: Matrix<f64> = random_matrix(&mut rng, 3, 3);
            let full = matrix_exp(&a, 1.0);
            let half = matrix_exp(&a, 0.5);
            let sq = &half * &half;
            assert!((&full - &sq).max_abs() < 1e-10 * full.max_abs().max(1.0));
        }
    }
}
