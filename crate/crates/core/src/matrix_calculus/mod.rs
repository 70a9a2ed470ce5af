//! Spectral calculus for Hermitian matrices and the dense eigen/exponential
//! kernels the dynamics needs.

mod eigen;
mod expm;
mod functions;
mod hermitian;
mod svd;

pub use eigen::{eigen, schur, Eigen, Schur};
pub use expm::{expm, matrix_exp};
pub use functions::{feynman_ordered_apply, matrix_function, sandwich_divided_difference};
pub use hermitian::{
    dissipativity_margin, jacobi_eigh, pauli_x, spectral_decompose, HermitianMatrix, SpectralDecomposition,
    EIGEN_CLUSTER_TOLERANCE, HERMITIAN_TOLERANCE, JACOBI_MAX_SWEEPS,
};
pub use svd::{condition_number, singular_values, spectral_norm};
