//! GKSL read-out of the corrected generator: eigenvalues
//! `mu_l = -i eps_l - Gamma_l / 2` and right eigenvectors `|l>`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_dynamics::{DensityBlocks, SINGULAR_CONDITION};
use crate::matrix::{dot, Matrix};
use crate::matrix_calculus::eigen;
use crate::scalar::{c, cr, Real, C};

/// Gram-matrix deviation above which the eigenvectors are flagged as
/// non-orthogonal.
pub const GRAM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct GkslMode<T: Real> {
    /// Frequency `eps_l = -Im mu_l`.
    pub epsilon: T,
    /// Rate `Gamma_l = -2 Re mu_l`.
    pub gamma: T,
    /// Unit-norm right eigenvector, largest-magnitude entry real positive.
    pub eigvec: Vec<C<T>>,
}

impl<T: Real> GkslMode<T> {
    /// `mu_l = -i eps_l - Gamma_l / 2`.
    pub fn eigenvalue(&self) -> C<T> {
        c(-self.gamma * T::lit(0.5), -self.epsilon)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GkslData<T: Real> {
    pub modes: Vec<GkslMode<T>>,
    /// `max |X^+ X - I|` over the eigenvector matrix `X`.
    pub gram_deviation: T,
    /// Condition number of the eigenvector matrix.
    pub condition: T,
}

impl<T: Real> GkslData<T> {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// True when the eigenvectors deviate from an orthonormal set by more
    /// than [`GRAM_TOLERANCE`]; the GKSL form is then reported but not
    /// claimed to be completely positive.
    pub fn non_orthogonal(&self) -> bool {
        self.gram_deviation > T::lit(GRAM_TOLERANCE)
    }

    pub fn min_gamma(&self) -> T {
        self.modes.iter().map(|m| m.gamma).fold(T::infinity(), T::min)
    }

    /// `sum_l mu_l |l><l|`, which reproduces `L` when the modes are orthonormal.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for m in &self.modes {
            let mu = m.eigenvalue();
            out += &Matrix::from_fn(n, n, |i, j| mu * m.eigvec[i] * m.eigvec[j].conj());
        }
        out
    }

    /// Applies the GKSL generator on the full `(N+1)`-level state:
    /// `-i [sum eps_l |l><l|, rho] + sum Gamma_l (|0><l| rho |l><0| - {|l><l|, rho} / 2)`.
    pub fn apply(&self, rho: &DensityBlocks<T>) -> Result<DensityBlocks<T>> {
        let n = self.dim();
        if rho.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "state has {} excited levels, generator {n}",
                rho.dim()
            )));
        }
        let full = rho.to_full();
        let size = n + 1;
        let minus_i = c(T::zero(), -T::one());
        let half = T::lit(0.5);
        let mut out = Matrix::zeros(size, size);
        for m in &self.modes {
            // |l> embedded in the excited sector
            let ket: Vec<C<T>> = std::iter::once(C::zero()).chain(m.eigvec.iter().copied()).collect();
            let proj = Matrix::from_fn(size, size, |i, j| ket[i] * ket[j].conj());
            let commutator = &(&proj * &full) - &(&full * &proj);
            out += &commutator.scale(minus_i * m.epsilon);
            let jump = full.sesquilinear(&ket, &ket);
            out[(0, 0)] += jump * m.gamma;
            let anti = &(&proj * &full) + &(&full * &proj);
            out -= &anti.scale_real(m.gamma * half);
        }
        DensityBlocks::from_full(&out)
    }
}

/// Eigen-decomposition of `L` in GKSL parameters.
pub fn gksl_decompose<T: Real>(l: &Matrix<T>) -> Result<GkslData<T>> {
    l.ensure_square("generator")?;
    let e = eigen(l)?;
    if !(e.condition <= T::lit(SINGULAR_CONDITION)) {
        return Err(Error::DefectiveGenerator {
            cond: e.condition.to_f64_lossy(),
        });
    }
    let n = l.rows();
    let mut vectors = Matrix::zeros(n, n);
    let mut modes = Vec::with_capacity(n);
    for (k, &mu) in e.values.iter().enumerate() {
        let mut v = e.vectors.column_vec(k);
        fix_phase(&mut v);
        vectors.set_column(k, &v);
        modes.push(GkslMode {
            epsilon: -mu.im,
            gamma: -T::lit(2.0) * mu.re,
            eigvec: v,
        });
    }
    let mut gram_deviation = T::zero();
    for i in 0..n {
        for j in 0..n {
            let g = dot(&vectors.column_vec(i), &vectors.column_vec(j));
            let target = if i == j { cr(T::one()) } else { C::zero() };
            gram_deviation = gram_deviation.max((g - target).norm());
        }
    }
    Ok(GkslData {
        modes,
        gram_deviation,
        condition: e.condition,
    })
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
/// Ties go to the lowest index.
fn fix_phase<T: Real>(v: &mut [C<T>]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (T::one() + T::lit(1e-12)) {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() == T::zero() {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}
