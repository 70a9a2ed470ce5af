//! Exact finite-dimensional embedding of the memory equation for
//! multi-exponential kernels.
//!
//! With `u_j(t) = int_0^t A_j exp(-(kappa_j + i Omega_j)(t - s)) exp(i H_S (t - s)) V(s) ds`
//! the pair `(V, u_1..u_m)` obeys the linear system
//! `V' = -lambda^2 sum_j u_j`, `u_j' = A_j V + (i H_S - kappa_j - i Omega_j) u_j`,
//! so `V(t)` is the leading block of `exp(B t)` applied to `(I, 0, .., 0)`.

use num_traits::{One, Zero};

use crate::bath_kernel::BathKernel;
use crate::error::{Error, Result};
use crate::exact_dynamics::model::SystemModel;
use crate::exact_dynamics::propagator::{Propagator, PropagatorSource};
use crate::matrix::Matrix;
use crate::matrix_calculus::matrix_exp;
use crate::scalar::{c, Real, C};

/// Block generator of the enlarged `(m + 1) N` dimensional system.
#[derive(Clone, Debug)]
pub struct AuxiliarySystem<T: Real> {
    n: usize,
    generator: Matrix<T>,
}

impl<T: Real> AuxiliarySystem<T> {
    pub fn new(model: &SystemModel<T>, kernel: &BathKernel<T>) -> Self {
        let n = model.dim();
        let m = kernel.terms().len();
        let dim = (m + 1) * n;
        let lambda_sq = model.lambda() * model.lambda();
        let hs = model.hamiltonian();
        let i_hs = hs.as_matrix().scale(c(T::zero(), T::one()));
        let mut b = Matrix::zeros(dim, dim);
        for (j, term) in kernel.terms().iter().enumerate() {
            let row = (j + 1) * n;
            for d in 0..n {
                b[(d, row + d)] = c(-lambda_sq, T::zero());
                b[(row + d, d)] = term.amplitude;
            }
            let mut diag = i_hs.clone();
            for d in 0..n {
                diag[(d, d)] -= term.exponent();
            }
            b.set_block(row, row, &diag);
        }
        Self { n, generator: b }
    }

    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }

    /// `V(t)` by a single exponential of the block generator.
    pub fn propagator_at(&self, t: T) -> Matrix<T> {
        matrix_exp(&self.generator, t).block(0, 0, self.n, self.n)
    }

    /// `V` on the grid `k h`, stepping the first block column with `exp(B h)`.
    pub fn propagate(&self, horizon: T, step: T) -> Result<Propagator<T>> {
        if !(step > T::zero()) || !(horizon >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "need step > 0 and horizon >= 0, got {step}, {horizon}"
            )));
        }
        let steps = (horizon / step).round().to_f64_lossy() as usize;
        let one_step = matrix_exp(&self.generator, step);
        let dim = self.generator.rows();
        let mut state = Matrix::from_fn(dim, self.n, |i, j| if i == j { C::one() } else { C::zero() });
        let mut values = Vec::with_capacity(steps + 1);
        values.push(Matrix::identity(self.n));
        for k in 1..=steps {
            state = &one_step * &state;
            let v = state.block(0, 0, self.n, self.n);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("auxiliary propagation at step {k}")));
            }
            values.push(v);
        }
        Ok(Propagator::from_values(step, values))
    }
}

/// Exact propagator for multi-exponential kernels, on the grid `k h` up to
/// `horizon`.
pub fn solve_via_auxiliary_odes<T: Real>(
    model: &SystemModel<T>,
    kernel: &BathKernel<T>,
    horizon: T,
    step: T,
) -> Result<Propagator<T>> {
    AuxiliarySystem::new(model, kernel).propagate(horizon, step)
}

/// Grid-free exact propagator: every lookup is one matrix exponential.
#[derive(Clone, Debug)]
pub struct ExactPropagator<T: Real> {
    system: AuxiliarySystem<T>,
}

impl<T: Real> ExactPropagator<T> {
    pub fn new(model: &SystemModel<T>, kernel: &BathKernel<T>) -> Self {
        Self {
            system: AuxiliarySystem::new(model, kernel),
        }
    }

    pub fn system(&self) -> &AuxiliarySystem<T> {
        &self.system
    }
}

impl<T: Real> PropagatorSource<T> for ExactPropagator<T> {
    fn dim(&self) -> usize {
        self.system.n
    }

    fn at(&self, t: T) -> Result<Matrix<T>> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidInput(format!("negative time {t}")));
        }
        let v = self.system.propagator_at(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("exact propagator at t = {t}")))
        }
    }
}
