//! Hermitian matrices, the cyclic Jacobi eigensolver and clustered spectral
//! decompositions.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cr, Real, C};

/// Relative tolerance for the Hermiticity check at construction.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Relative gap below which neighbouring eigenvalues share one projector.
pub const EIGEN_CLUSTER_TOLERANCE: f64 = 1e-8;

/// Sweep budget of the cyclic Jacobi method.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix equal to its own adjoint. Construction symmetrizes
/// the input, so `m[(j, k)] == m[(k, j)].conj()` holds bitwise afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real>(Matrix<T>);

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        m.ensure_square("Hermitian matrix")?;
        if !m.is_finite() {
            return Err(Error::InvalidInput("Hermitian matrix has non-finite entries".into()));
        }
        let scale = T::one().max(m.max_abs());
        let residual = m.hermiticity_residual();
        if residual > T::tol(HERMITIAN_TOLERANCE) * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (residual {residual:e})"
            )));
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn from_real_diagonal(d: &[T]) -> Self {
        Self(Matrix::diag_real(d))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    /// `self + s * other`, Hermitian for real `s`.
    pub fn add_scaled(&self, s: T, other: &Self) -> Self {
        Self(&self.0 + &other.0.scale_real(s))
    }

    pub fn eigh(&self) -> Result<(Vec<T>, Matrix<T>)> {
        jacobi_eigh(&self.0)
    }
}

/// 2x2 unitary `J` such that `J^+ [[app, apq], [conj(apq), aqq]] J` is diagonal.
/// `app` and `aqq` are real.
pub(crate) fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> [[C<T>; 2]; 2] {
    let b = apq.norm();
    if b == T::zero() {
        return [[C::one(), C::zero()], [C::zero(), C::one()]];
    }
    let phase = apq / b;
    let theta = (aqq - app) / (b + b);
    let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
    let cs = T::one() / (T::one() + t * t).sqrt();
    let sn = t * cs;
    let ph = phase.conj();
    [[cr(cs), cr(sn)], [ph * (-sn), ph * cs]]
}

/// Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian
/// matrix by cyclic Jacobi rotations.
pub fn jacobi_eigh<T: Real>(h: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    h.ensure_square("eigensolver input")?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = a.norm_fro();
    let target = T::epsilon() * scale;
    let mut converged = n <= 1 || scale == T::zero();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= T::epsilon() * T::lit(1e-3) * scale {
                    continue;
                }
                let j = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, &j);
                rotate_rows_adjoint(&mut a, p, q, &j);
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                rotate_columns(&mut v, p, q, &j);
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(format!(
            "Jacobi eigensolver exceeded {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// `A <- A J` restricted to columns `p, q`.
pub(crate) fn rotate_columns<T: Real>(a: &mut Matrix<T>, p: usize, q: usize, j: &[[C<T>; 2]; 2]) {
    for i in 0..a.rows() {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = x * j[0][0] + y * j[1][0];
        a[(i, q)] = x * j[0][1] + y * j[1][1];
    }
}

/// `A <- J^+ A` restricted to rows `p, q`.
fn rotate_rows_adjoint<T: Real>(a: &mut Matrix<T>, p: usize, q: usize, j: &[[C<T>; 2]; 2]) {
    for k in 0..a.cols() {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = j[0][0].conj() * x + j[1][0].conj() * y;
        a[(q, k)] = j[0][1].conj() * x + j[1][1].conj() * y;
    }
}

/// `H = sum_a E_a Pi_a` with numerically degenerate eigenvalues merged.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    eigenvalues: Vec<T>,
    projectors: Vec<Matrix<T>>,
    multiplicities: Vec<usize>,
    /// Cluster index of every column of `unitary`.
    cluster_of: Vec<usize>,
    unitary: Matrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }

    /// Distinct (clustered) eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Matrix<T>] {
        &self.projectors
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Eigenvector matrix; column `k` belongs to cluster `cluster_of()[k]`.
    pub fn unitary(&self) -> &Matrix<T> {
        &self.unitary
    }

    pub fn cluster_of(&self) -> &[usize] {
        &self.cluster_of
    }

    /// `sum_a E_a Pi_a`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(Matrix::zeros(n, n), |acc, (&e, p)| &acc + &p.scale_real(e))
    }

    /// `max(|| sum Pi - I ||, max_ab || Pi_a Pi_b - delta_ab Pi_a ||)` in max-abs norm.
    pub fn projector_defect(&self) -> T {
        let n = self.dim();
        let total = self.projectors.iter().fold(Matrix::zeros(n, n), |acc, p| &acc + p);
        let mut worst = (&total - &Matrix::identity(n)).max_abs();
        for (a, pa) in self.projectors.iter().enumerate() {
            for (b, pb) in self.projectors.iter().enumerate() {
                let prod = pa * pb;
                let defect = if a == b { (&prod - pa).max_abs() } else { prod.max_abs() };
                worst = worst.max(defect);
            }
        }
        worst
    }
}

/// Spectral decomposition with eigenvalue clustering at relative gap
/// [`EIGEN_CLUSTER_TOLERANCE`].
pub fn spectral_decompose<T: Real>(h: &HermitianMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let (values, vectors) = h.eigh()?;
    let n = values.len();
    let norm = values.iter().fold(T::zero(), |m, e| m.max(e.abs()));
    let gap = T::tol(EIGEN_CLUSTER_TOLERANCE) * T::one().max(norm);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(cl) if values[k] - values[*cl.last().expect("nonempty")] < gap => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    let mut cluster_of = vec![0; n];
    for (a, cl) in clusters.iter().enumerate() {
        let mean = cl.iter().map(|&k| values[k]).sum::<T>() / T::lit(cl.len() as f64);
        let mut p = Matrix::zeros(n, n);
        for &k in cl {
            cluster_of[k] = a;
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] += vectors[(i, k)] * vectors[(j, k)].conj();
                }
            }
        }
        eigenvalues.push(mean);
        projectors.push(p);
        multiplicities.push(cl.len());
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        multiplicities,
        cluster_of,
        unitary: vectors,
    })
}

/// Largest eigenvalue of `(A + A^+) / 2`; `A` is dissipative iff this is `<= 0`.
pub fn dissipativity_margin<T: Real>(a: &Matrix<T>) -> Result<T> {
    a.ensure_square("generator")?;
    let (values, _) = jacobi_eigh(&a.hermitian_part())?;
    Ok(values.last().copied().unwrap_or_else(T::zero))
}

/// Real-valued helper for tests and examples: `[[0, 1], [1, 0]]`.
pub fn pauli_x<T: Real>() -> HermitianMatrix<T> {
    HermitianMatrix(Matrix::from_fn(2, 2, |i, j| if i == j { C::zero() } else { C::one() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_hermitian;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_input() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0, 1.0]);
        let d = spectral_decompose(&h).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0]);
        assert!((&d.projectors()[0] - &Matrix::diag_real(&[0.0, 1.0])).max_abs() < 1e-15);
        assert!((&d.projectors()[1] - &Matrix::diag_real(&[1.0, 0.0])).max_abs() < 1e-15);
    }

    #[test]
    fn pauli_x_decomposition() {
        let d = spectral_decompose(&pauli_x::<f64>()).unwrap();
        let ev = d.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let minus = Matrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap();
        let plus = Matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!((&d.projectors()[0] - &minus).max_abs() < 1e-14);
        assert!((&d.projectors()[1] - &plus).max_abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction_and_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 4, 7, 12] {
            let h = random_hermitian::<f64, _>(&mut rng, n);
            let d = spectral_decompose(&h).unwrap();
            let err = (&d.reconstruct() - h.as_matrix()).max_abs();
            assert!(err < 1e-10, "n={n}: {err}");
            assert!(d.projector_defect() < 1e-10);
            let u = d.unitary();
            assert!((&(&u.adjoint() * u) - &Matrix::identity(n)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_eigenvalues_share_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = crate::random::random_unitary::<f64, _>(&mut rng, 4);
        let d = Matrix::diag_real(&[1.0, 1.0 + 1e-12, -2.0, 1.0]);
        let h = HermitianMatrix::new(&(&q * &d) * &q.adjoint()).unwrap();
        let dec = spectral_decompose(&h).unwrap();
        assert_eq!(dec.eigenvalues().len(), 2);
        assert_eq!(dec.multiplicities(), &[1, 3]);
        assert!((dec.projectors()[1].trace().re - 3.0).abs() < 1e-12);
        assert!(dec.projector_defect() < 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Matrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn dissipativity_examples() {
        let minus_id = -Matrix::<f64>::identity(3);
        assert!((dissipativity_margin(&minus_id).unwrap() + 1.0).abs() < 1e-15);
        let skew = Matrix::diag(&[c(0.0f64, 1.0), c(0.0, -1.0)]);
        assert!(dissipativity_margin(&skew).unwrap().abs() < 1e-15);
    }
}
