//! Reduced density matrices in ground/excited block form.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::matrix_calculus::jacobi_eigh;
use crate::scalar::{cr, Real, C};

/// Trace tolerance accepted for physical initial states.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// `(N+1) x (N+1)` density matrix split as
/// `[[gg, ge], [eg, ee]]` with `ge = eg^+`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityBlocks<T: Real> {
    pub gg: T,
    /// Excited-ground coherences (`N x 1` column); the `ge` row is its adjoint.
    pub eg: Vec<C<T>>,
    pub ee: Matrix<T>,
}

impl<T: Real> DensityBlocks<T> {
    /// Unchecked block constructor; `ee` is taken as given.
    pub fn from_blocks(gg: T, eg: Vec<C<T>>, ee: Matrix<T>) -> Result<Self> {
        if !ee.is_square() || ee.rows() != eg.len() {
            return Err(Error::DimensionMismatch(format!(
                "ee is {}x{}, eg has length {}",
                ee.rows(),
                ee.cols(),
                eg.len()
            )));
        }
        Ok(Self { gg, eg, ee })
    }

    /// Validated physical state: unit trace, Hermitian, positive semidefinite.
    pub fn physical(gg: T, eg: Vec<C<T>>, ee: Matrix<T>) -> Result<Self> {
        let rho = Self::from_blocks(gg, eg, ee)?;
        let trace_err = (rho.trace() - T::one()).abs();
        if trace_err > T::tol(TRACE_TOLERANCE) {
            return Err(Error::validation(
                "initial_state",
                format!("gg + Tr(ee) must equal 1 (off by {trace_err:e})"),
            ));
        }
        if rho.ee.hermiticity_residual() > T::tol(1e-12) * T::one().max(rho.ee.max_abs()) {
            return Err(Error::validation("initial_state.ee", "excited block must be Hermitian"));
        }
        let min = rho.min_eigenvalue()?;
        if min < -T::tol(1e-10) {
            return Err(Error::validation(
                "initial_state",
                format!("density matrix must be positive semidefinite (smallest eigenvalue {min:e})"),
            ));
        }
        Ok(Self {
            ee: rho.ee.hermitian_part(),
            ..rho
        })
    }

    /// Splits a full `(N+1) x (N+1)` matrix (ground level first).
    pub fn from_full(rho: &Matrix<T>) -> Result<Self> {
        rho.ensure_square("density matrix")?;
        let n = rho
            .rows()
            .checked_sub(1)
            .ok_or_else(|| Error::DimensionMismatch("empty density matrix".into()))?;
        Self::from_blocks(
            rho[(0, 0)].re,
            (1..=n).map(|i| rho[(i, 0)]).collect(),
            rho.block(1, 1, n, n),
        )
    }

    /// `|0><0|`.
    pub fn ground(n: usize) -> Self {
        Self {
            gg: T::one(),
            eg: vec![C::zero(); n],
            ee: Matrix::zeros(n, n),
        }
    }

    /// Pure state `psi0 |0> + |psi>`, normalized internally.
    pub fn pure(psi0: C<T>, psi: &[C<T>]) -> Result<Self> {
        let norm2 = psi0.norm_sqr() + dot(psi, psi).re;
        if norm2 == T::zero() {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let s = T::one() / norm2.sqrt();
        let psi0 = psi0 * s;
        let psi: Vec<C<T>> = psi.iter().map(|z| *z * s).collect();
        let n = psi.len();
        Ok(Self {
            gg: psi0.norm_sqr(),
            eg: psi.iter().map(|z| *z * psi0.conj()).collect(),
            ee: Matrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()),
        })
    }

    pub fn dim(&self) -> usize {
        self.eg.len()
    }

    /// `1 x N` ground-excited row.
    pub fn ge(&self) -> Vec<C<T>> {
        self.eg.iter().map(|z| z.conj()).collect()
    }

    pub fn trace(&self) -> T {
        self.gg + self.ee.trace().re
    }

    pub fn to_full(&self) -> Matrix<T> {
        let n = self.dim();
        let mut m = Matrix::zeros(n + 1, n + 1);
        m[(0, 0)] = cr(self.gg);
        for (i, z) in self.eg.iter().enumerate() {
            m[(i + 1, 0)] = *z;
            m[(0, i + 1)] = z.conj();
        }
        m.set_block(1, 1, &self.ee);
        m
    }

    pub fn hermiticity_residual(&self) -> T {
        self.ee.hermiticity_residual()
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let (values, _) = jacobi_eigh(&self.to_full())?;
        Ok(values[0])
    }

    /// Population of the excited sector, `Tr(ee)`.
    pub fn excited_population(&self) -> T {
        self.ee.trace().re
    }

    /// Block map shared by every linear evolution in this model:
    /// `gg + Tr(ee - M ee M^+)`, `ge M^+`, `M eg`, `M ee M^+`.
    pub fn transform(&self, m: &Matrix<T>) -> Result<Self> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "block map needs an {0}x{0} matrix, got {1}x{2}",
                self.dim(),
                m.rows(),
                m.cols()
            )));
        }
        let ee = &(m * &self.ee) * &m.adjoint();
        let gg = self.gg + (self.ee.trace() - ee.trace()).re;
        Ok(Self {
            gg,
            eg: m.mul_vec(&self.eg),
            ee,
        })
    }

    /// Max-abs distance between the assembled matrices.
    pub fn distance(&self, other: &Self) -> T {
        (&self.to_full() - &other.to_full()).max_abs()
    }
}
