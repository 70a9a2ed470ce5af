//! Propagator representations and the time-lookup abstraction shared by the
//! density evolution and the correlation functions.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matrix_calculus::{matrix_exp, spectral_norm};
use crate::scalar::Real;

/// Relative slack when matching a requested time to a grid point.
pub const GRID_MATCH_TOLERANCE: f64 = 1e-9;

/// Anything that yields the excited-sector propagator at a time `t >= 0`.
pub trait PropagatorSource<T: Real> {
    fn dim(&self) -> usize;

    fn at(&self, t: T) -> Result<Matrix<T>>;
}

impl<T: Real, P: PropagatorSource<T> + ?Sized> PropagatorSource<T> for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn at(&self, t: T) -> Result<Matrix<T>> {
        (**self).at(t)
    }
}

/// `V(t_k)` sampled on the uniform grid `t_k = k h`, `k = 0..=steps`.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    step: T,
    values: Vec<Matrix<T>>,
}

impl<T: Real> Propagator<T> {
    pub(crate) fn from_values(step: T, values: Vec<Matrix<T>>) -> Self {
        debug_assert!(!values.is_empty());
        Self { step, values }
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> T {
        self.step * T::lit((self.values.len() - 1) as f64)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.values.len()).map(move |k| self.step * T::lit(k as f64))
    }

    pub fn values(&self) -> &[Matrix<T>] {
        &self.values
    }

    /// Grid index of `t`, or `GridMiss`.
    pub fn index_of(&self, t: T) -> Result<usize> {
        let miss = || Error::GridMiss {
            t: t.to_f64_lossy(),
            step: self.step.to_f64_lossy(),
            horizon: self.horizon().to_f64_lossy(),
        };
        if !(t >= T::zero()) {
            return Err(miss());
        }
        let k = (t / self.step).round();
        let slack = T::lit(GRID_MATCH_TOLERANCE) * self.step.max(t);
        if (t - k * self.step).abs() > slack {
            return Err(miss());
        }
        let k = k.to_f64_lossy() as usize;
        if k >= self.values.len() {
            return Err(miss());
        }
        Ok(k)
    }

    /// Largest singular value over all grid points.
    pub fn max_singular_value(&self) -> Result<T> {
        self.values
            .iter()
            .try_fold(T::zero(), |acc, v| Ok(acc.max(spectral_norm(v)?)))
    }
}

impl<T: Real> PropagatorSource<T> for Propagator<T> {
    fn dim(&self) -> usize {
        self.values[0].rows()
    }

    fn at(&self, t: T) -> Result<Matrix<T>> {
        Ok(self.values[self.index_of(t)?].clone())
    }
}

/// `t -> exp(L t) r`, the asymptotic (semigroup-after-renormalization) form.
/// With `r = I` this is an exact semigroup.
#[derive(Clone, Debug)]
pub struct Semigroup<T: Real> {
    generator: Matrix<T>,
    renormalization: Matrix<T>,
}

impl<T: Real> Semigroup<T> {
    pub fn new(generator: Matrix<T>, renormalization: Matrix<T>) -> Result<Self> {
        generator.ensure_square("generator")?;
        generator.ensure_same_shape(&renormalization, "renormalization")?;
        Ok(Self {
            generator,
            renormalization,
        })
    }

    /// Pure semigroup `exp(L t)`.
    pub fn pure(generator: Matrix<T>) -> Result<Self> {
        let n = generator.rows();
        Self::new(generator, Matrix::identity(n))
    }

    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }
}

impl<T: Real> PropagatorSource<T> for Semigroup<T> {
    fn dim(&self) -> usize {
        self.generator.rows()
    }

    fn at(&self, t: T) -> Result<Matrix<T>> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidInput(format!("negative time {t}")));
        }
        Ok(&matrix_exp(&self.generator, t) * &self.renormalization)
    }
}

/// Bogolubov-van Hove time axis: `W(t) = V(t / lambda^2)`.
#[derive(Clone, Debug)]
pub struct Rescaled<T: Real, P> {
    inner: P,
    lambda: T,
}

impl<T: Real, P: PropagatorSource<T>> Rescaled<T, P> {
    pub fn new(inner: P, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidInput("rescaling needs lambda > 0".into()));
        }
        Ok(Self { inner, lambda })
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Physical time corresponding to rescaled time `t`.
    pub fn physical_time(&self, t: T) -> T {
        t / (self.lambda * self.lambda)
    }
}

impl<T: Real, P: PropagatorSource<T>> PropagatorSource<T> for Rescaled<T, P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn at(&self, t: T) -> Result<Matrix<T>> {
        self.inner.at(self.physical_time(t))
    }
}
