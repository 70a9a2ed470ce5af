//! Functional calculus of Hermitian matrices: scalar functions, the
//! divided-difference sandwich and the three-operand ordered calculus.

use num_traits::Zero;

use crate::bath_kernel::BathKernel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matrix_calculus::hermitian::SpectralDecomposition;
use crate::scalar::{minus_i, Real, C};

/// `f(H) = sum_a f(E_a) Pi_a`.
pub fn matrix_function<T, F>(mut f: F, d: &SpectralDecomposition<T>) -> Result<Matrix<T>>
where
    T: Real,
    F: FnMut(T) -> Result<C<T>>,
{
    let n = d.dim();
    let mut out = Matrix::zeros(n, n);
    for (&e, p) in d.eigenvalues().iter().zip(d.projectors()) {
        out += &p.scale(f(e)?);
    }
    Ok(out)
}

/// `sum_{a,b} dG~(-i E_a, -i E_b) Pi_a M Pi_b`, with `dG~` the divided
/// difference of the kernel's Laplace transform.
///
/// Evaluated in the eigenbasis of `d`: `M` is rotated, scaled entrywise by the
/// divided difference of the two clusters it couples, and rotated back.
pub fn sandwich_divided_difference<T: Real>(
    kernel: &BathKernel<T>,
    d: &SpectralDecomposition<T>,
    m: &Matrix<T>,
) -> Result<Matrix<T>> {
    if m.rows() != d.dim() || m.cols() != d.dim() {
        return Err(Error::DimensionMismatch(format!(
            "sandwich operand is {}x{}, decomposition has dimension {}",
            m.rows(),
            m.cols(),
            d.dim()
        )));
    }
    let clusters = d.eigenvalues().len();
    let mut table = vec![C::zero(); clusters * clusters];
    for (a, &ea) in d.eigenvalues().iter().enumerate() {
        for (b, &eb) in d.eigenvalues().iter().enumerate() {
            table[a * clusters + b] = if a == b {
                kernel.laplace(minus_i::<T>() * ea, 1)?
            } else {
                kernel.divided_difference(minus_i::<T>() * ea, minus_i::<T>() * eb)?
            };
        }
    }
    let u = d.unitary();
    let mut rotated = &(&u.adjoint() * m) * u;
    let owner = d.cluster_of();
    let n = d.dim();
    for i in 0..n {
        for j in 0..n {
            rotated[(i, j)] *= table[owner[i] * clusters + owner[j]];
        }
    }
    Ok(&(u * &rotated) * &u.adjoint())
}

/// `f(A1, A2, A3)` with each operand carrying an ordering index:
/// `sum f(a1, a2, a3) * ord(Pi_a1 Pi_a2 Pi_a3)`, where the product places the
/// projector with the smallest index leftmost.
///
/// `indices[k]` is the index attached to operand `k`; the three indices must be
/// distinct.
pub fn feynman_ordered_apply<T, F>(
    mut f: F,
    operands: [&SpectralDecomposition<T>; 3],
    indices: [u32; 3],
) -> Result<Matrix<T>>
where
    T: Real,
    F: FnMut(T, T, T) -> Result<C<T>>,
{
    let n = operands[0].dim();
    if operands.iter().any(|d| d.dim() != n) {
        return Err(Error::DimensionMismatch("ordered operands differ in dimension".into()));
    }
    if indices[0] == indices[1] || indices[1] == indices[2] || indices[0] == indices[2] {
        return Err(Error::InvalidInput(format!(
            "ordering indices must be distinct, got {indices:?}"
        )));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&k| indices[k]);

    let mut out = Matrix::zeros(n, n);
    let [d1, d2, d3] = operands;
    for (a1, &e1) in d1.eigenvalues().iter().enumerate() {
        for (a2, &e2) in d2.eigenvalues().iter().enumerate() {
            for (a3, &e3) in d3.eigenvalues().iter().enumerate() {
                let weight = f(e1, e2, e3)?;
                if weight.is_zero() {
                    continue;
                }
                let factors = [&d1.projectors()[a1], &d2.projectors()[a2], &d3.projectors()[a3]];
                let product = &(factors[order[0]] * factors[order[1]]) * factors[order[2]];
                out += &product.scale(weight);
            }
        }
    }
    Ok(out)
}
