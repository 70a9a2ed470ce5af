use crate::bath_kernel::BathKernel;
use crate::error::{Error, Result};

use crate::matrix_calculus::{spectral_norm, HermitianMatrix};
use crate::scalar::Real;

/// Excited-sector Hamiltonian `H_S(lambda) = H0 + lambda^2 H2` together with the
/// coupling strength `lambda`. The ground level carries energy zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel<T: Real> {
    h0: HermitianMatrix<T>,
    h2: HermitianMatrix<T>,
    lambda: T,
}

impl<T: Real> SystemModel<T> {
    pub fn new(h0: HermitianMatrix<T>, h2: HermitianMatrix<T>, lambda: T) -> Result<Self> {
        if h0.dim() != h2.dim() {
            return Err(Error::DimensionMismatch(format!(
                "H0 is {0}x{0} but H2 is {1}x{1}",
                h0.dim(),
                h2.dim()
            )));
        }
        if h0.dim() == 0 {
            return Err(Error::validation("model.n", "excited sector must be nonempty"));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::validation(
                "lambda",
                format!("coupling must be finite and >= 0, got {lambda}"),
            ));
        }
        Ok(Self { h0, h2, lambda })
    }

    /// Model with `H2 = 0`.
    pub fn without_correction(h0: HermitianMatrix<T>, lambda: T) -> Result<Self> {
        let n = h0.dim();
        Self::new(h0, HermitianMatrix::zeros(n), lambda)
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn h0(&self) -> &HermitianMatrix<T> {
        &self.h0
    }

    pub fn h2(&self) -> &HermitianMatrix<T> {
        &self.h2
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.h0.clone(), self.h2.clone(), lambda)
    }

    /// `H0 + lambda^2 H2`.
    pub fn hamiltonian(&self) -> HermitianMatrix<T> {
        self.h0.add_scaled(self.lambda * self.lambda, &self.h2)
    }

    /// `lambda^2 G(t)`, the kernel that actually enters the Volterra equation.
    pub fn coupled_kernel(&self, kernel: &BathKernel<T>) -> BathKernel<T> {
        kernel.scaled(self.lambda * self.lambda)
    }

    pub fn hamiltonian_norm(&self) -> Result<T> {
        spectral_norm(self.hamiltonian().as_matrix())
    }
}
