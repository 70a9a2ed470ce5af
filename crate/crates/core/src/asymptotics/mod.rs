//! Second-order asymptotics of the rescaled propagator:
//! `W_lambda(t) = exp(L t) r + O(lambda^4)`.
//!
//! `r = I - lambda^2 G~'(-i H0)` renormalizes the initial condition and
//! `L = -G~(-i H0) + lambda^2 (G~'(-i H0) G~(-i H0) + i H2 dG~(-i H0, -i H0))`
//! is the corrected generator, with the last term in the ordered
//! (divided-difference sandwich) sense.

mod gksl;

pub use gksl::{gksl_decompose, GkslData, GkslMode, GRAM_TOLERANCE};

use crate::bath_kernel::BathKernel;
use crate::error::Result;
use crate::exact_dynamics::{DensityBlocks, Semigroup, SystemModel};
use crate::matrix::Matrix;
use crate::matrix_calculus::{matrix_exp, matrix_function, sandwich_divided_difference, spectral_decompose};
use crate::scalar::{c, minus_i, Real};

/// Perturbative order kept in `r` and `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Order {
    /// `r = I`, `L = -G~(-i H0)`: the plain weak-coupling semigroup.
    Zeroth,
    /// Full `lambda^2` correction.
    #[default]
    Second,
}

/// Renormalization `r` and corrected generator `L` at a given coupling.
/// `L` acts on the rescaled time axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticData<T: Real> {
    r: Matrix<T>,
    generator: Matrix<T>,
    lambda: T,
}

impl<T: Real> AsymptoticData<T> {
    pub fn compute(model: &SystemModel<T>, kernel: &BathKernel<T>) -> Result<Self> {
        Self::with_order(model, kernel, Order::Second)
    }

    pub fn with_order(model: &SystemModel<T>, kernel: &BathKernel<T>, order: Order) -> Result<Self> {
        let (r, generator) = match order {
            Order::Second => (compute_r(model, kernel)?, compute_l(model, kernel)?),
            Order::Zeroth => {
                let bare = model.with_lambda(T::zero())?;
                (Matrix::identity(model.dim()), compute_l(&bare, kernel)?)
            }
        };
        Ok(Self {
            r,
            generator,
            lambda: model.lambda(),
        })
    }

    pub fn r(&self) -> &Matrix<T> {
        &self.r
    }

    /// The corrected generator `L`.
    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `exp(L t) r`.
    pub fn propagator(&self, t: T) -> Matrix<T> {
        &matrix_exp(&self.generator, t) * &self.r
    }

    /// `r exp(L t)`.
    pub fn propagator_reversed(&self, t: T) -> Matrix<T> {
        &self.r * &matrix_exp(&self.generator, t)
    }

    /// The asymptotic propagator as a [`Semigroup`] source.
    pub fn semigroup(&self) -> Result<Semigroup<T>> {
        Semigroup::new(self.generator.clone(), self.r.clone())
    }

    pub fn gksl(&self) -> Result<GkslData<T>> {
        gksl_decompose(&self.generator)
    }
}

/// `r = I - lambda^2 G~'(-i H0)`.
pub fn compute_r<T: Real>(model: &SystemModel<T>, kernel: &BathKernel<T>) -> Result<Matrix<T>> {
    let d = spectral_decompose(model.h0())?;
    let derivative = matrix_function(|e| kernel.laplace(minus_i::<T>() * e, 1), &d)?;
    let l2 = model.lambda() * model.lambda();
    Ok(&Matrix::identity(model.dim()) - &derivative.scale_real(l2))
}

/// Operator-function form: `-F + lambda^2 (F' F + i sandwich(H2))`, with
/// `F = G~(-i H0)` and `F' = G~'(-i H0)`.
pub fn compute_l<T: Real>(model: &SystemModel<T>, kernel: &BathKernel<T>) -> Result<Matrix<T>> {
    let d = spectral_decompose(model.h0())?;
    let f = matrix_function(|e| kernel.laplace(minus_i::<T>() * e, 0), &d)?;
    let l2 = model.lambda() * model.lambda();
    if l2 == T::zero() {
        return Ok(-f);
    }
    let fp = matrix_function(|e| kernel.laplace(minus_i::<T>() * e, 1), &d)?;
    let sandwich = sandwich_divided_difference(kernel, &d, model.h2().as_matrix())?;
    let correction = &(&fp * &f) + &sandwich.scale(c(T::zero(), T::one()));
    Ok(&correction.scale_real(l2) - &f)
}

/// Explicit spectral expansion of `L` over the eigenprojectors `Pi_E` of `H0`:
///
/// `-sum_E G~(-iE) Pi_E + lambda^2 sum_E (G~(-iE) + i Pi_E H2 Pi_E) G~'(-iE) Pi_E`
/// `- lambda^2 sum_{E != E'} (G~(-iE) - G~(-iE')) / (E - E') Pi_E H2 Pi_E'`.
///
/// Eigenvalues within one cluster count as equal, so the off-diagonal sum runs
/// over distinct clusters only.
pub fn compute_l_explicit<T: Real>(model: &SystemModel<T>, kernel: &BathKernel<T>) -> Result<Matrix<T>> {
    let d = spectral_decompose(model.h0())?;
    let n = model.dim();
    let l2 = model.lambda() * model.lambda();
    let h2 = model.h2().as_matrix();
    let i = c(T::zero(), T::one());
    let energies = d.eigenvalues();
    let projectors = d.projectors();
    let values = energies
        .iter()
        .map(|&e| kernel.laplace(minus_i::<T>() * e, 0))
        .collect::<Result<Vec<_>>>()?;
    let derivatives = energies
        .iter()
        .map(|&e| kernel.laplace(minus_i::<T>() * e, 1))
        .collect::<Result<Vec<_>>>()?;

    let mut zeroth = Matrix::zeros(n, n);
    let mut second = Matrix::zeros(n, n);
    for (a, pa) in projectors.iter().enumerate() {
        zeroth -= &pa.scale(values[a]);
        let diagonal = &pa.scale(values[a]) + &(&(pa * h2) * pa).scale(i);
        second += &(&diagonal * pa).scale(derivatives[a]);
        for (b, pb) in projectors.iter().enumerate() {
            if a == b {
                continue;
            }
            let quotient = (values[a] - values[b]) / (energies[a] - energies[b]);
            second -= &(&(pa * h2) * pb).scale(quotient);
        }
    }
    Ok(&zeroth + &second.scale_real(l2))
}

/// Renormalization superoperator `R`: the block map with `r`,
/// `(gg + Tr(ee - r ee r^+), ge r^+; r eg, r ee r^+)`.
///
/// Trace-preserving by construction but not positivity-preserving in general.
pub fn renormalize<T: Real>(rho: &DensityBlocks<T>, r: &Matrix<T>) -> Result<DensityBlocks<T>> {
    rho.transform(r)
}

/// `exp(Lt) R(rho0)`: blocks built from `exp(L t) r`.
pub fn asymptotic_density<T: Real>(
    rho0: &DensityBlocks<T>,
    data: &AsymptoticData<T>,
    t: T,
) -> Result<DensityBlocks<T>> {
    rho0.transform(&data.propagator(t))
}

/// Reverse order: Markovian evolution first, renormalization after,
/// `R(exp(Lt) rho0)`.
pub fn markov_then_renormalize<T: Real>(
    rho0: &DensityBlocks<T>,
    data: &AsymptoticData<T>,
    t: T,
) -> Result<DensityBlocks<T>> {
    renormalize(&rho0.transform(&matrix_exp(data.generator(), t))?, data.r())
}
