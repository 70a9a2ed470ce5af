//! Exact and asymptotic reduced dynamics of an `(N+1)`-level system coupled
//! to bosonic reservoirs in the rotating wave approximation.
//!
//! The excited-sector propagator `V(t)` solves
//! `V'(t) = -lambda^2 int_0^t G(t-s) exp(i H_S (t-s)) V(s) ds` and fixes the
//! whole reduced density matrix. On the rescaled time axis
//! `W(t) = V(t / lambda^2)` the long-time behaviour is `exp(L t) r + O(lambda^4)`
//! with an initial-condition renormalization `r` and a corrected generator `L`.
//!
//! All numerics are generic over [`Real`] (`f32` / `f64`); the `*64` aliases at
//! the crate root fix the precision used by the CLI and the harness.

// `!(x <= y)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bath_kernel;
pub mod correlations;
pub mod error;
pub mod exact_dynamics;
pub mod harness;
pub mod matrix;
pub mod matrix_calculus;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type Matrix64 = Matrix<f64>;
pub type HermitianMatrix64 = matrix_calculus::HermitianMatrix<f64>;
pub type SpectralDecomposition64 = matrix_calculus::SpectralDecomposition<f64>;
pub type BathKernel64 = bath_kernel::BathKernel<f64>;
pub type KernelTerm64 = bath_kernel::KernelTerm<f64>;
pub type SystemModel64 = exact_dynamics::SystemModel<f64>;
pub type Propagator64 = exact_dynamics::Propagator<f64>;
pub type DensityBlocks64 = exact_dynamics::DensityBlocks<f64>;
pub type AsymptoticData64 = asymptotics::AsymptoticData<f64>;
pub type GkslData64 = asymptotics::GkslData<f64>;
pub type DipoleVector64 = correlations::DipoleVector<f64>;
