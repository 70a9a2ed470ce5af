//! Seeded random instances for property tests and `--seed` scenarios.

use rand::Rng;

use crate::matrix::{dot, vec_norm, Matrix};
use crate::matrix_calculus::HermitianMatrix;
use crate::scalar::{c, Real, C};

/// Standard normal sample by Box-Muller.
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    c(T::lit(s * normal(rng)), T::lit(s * normal(rng)))
}

/// Ginibre matrix: i.i.d. standard complex normal entries.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C<T>> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix<T> {
    let g: Matrix<T> = random_matrix(rng, n, n);
    HermitianMatrix::new(g.hermitian_part()).expect("Hermitian by construction")
}

/// Haar-ish unitary by Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let g: Matrix<T> = random_matrix(rng, n, n);
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.column_vec(j);
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column_vec(k);
                let proj = dot(&qk, &v);
                for (vi, qi) in v.iter_mut().zip(&qk) {
                    *vi -= *qi * proj;
                }
            }
        }
        let norm = vec_norm(&v);
        let v: Vec<C<T>> = v.into_iter().map(|z| z / norm).collect();
        q.set_column(j, &v);
    }
    q
}

/// Hermitian matrix with prescribed (possibly repeated) real spectrum in a
/// random eigenbasis.
pub fn hermitian_with_spectrum<T: Real, R: Rng + ?Sized>(rng: &mut R, spectrum: &[T]) -> HermitianMatrix<T> {
    let u = random_unitary(rng, spectrum.len());
    let m = &(&u * &Matrix::diag_real(spectrum)) * &u.adjoint();
    HermitianMatrix::new(m.hermitian_part()).expect("Hermitian by construction")
}

/// Random full-rank density matrix `G G^+ / Tr(G G^+)` of dimension `n`.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let g: Matrix<T> = random_matrix(rng, n, n);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(T::one() / tr).hermitian_part()
}

/// Random normalized pure state `|psi><psi|` of dimension `n`.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let v: Vec<C<T>> = random_vector(rng, n);
    let norm = vec_norm(&v);
    let v: Vec<C<T>> = v.into_iter().map(|z| z / norm).collect();
    Matrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}
