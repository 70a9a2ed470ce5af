//! Exact reduced dynamics in the one-excitation sector.
//!
//! The propagator `V(t)` is obtained by two independent routes: a direct
//! quadrature of the memory equation ([`solve_propagator`]) and an exact
//! linear embedding valid for multi-exponential kernels
//! ([`solve_via_auxiliary_odes`], [`ExactPropagator`]). The embedding is the
//! default engine; the quadrature solver is kept as a cross-check.

mod auxiliary;
mod density;
mod model;
mod propagator;
mod volterra;

pub use auxiliary::{solve_via_auxiliary_odes, AuxiliarySystem, ExactPropagator};
pub use density::{DensityBlocks, TRACE_TOLERANCE};
pub use model::SystemModel;
pub use propagator::{Propagator, PropagatorSource, Rescaled, Semigroup, GRID_MATCH_TOLERANCE};
pub use volterra::{check_step, solve_propagator, RESOLUTION_BOUND};

use crate::bath_kernel::BathKernel;
use crate::error::{Error, Result};
use crate::matrix::{Lu, Matrix};
use crate::matrix_calculus::condition_number;
use crate::scalar::Real;

/// Condition number above which `V(t)` is treated as non-invertible.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Default cap on the physical horizon `t / lambda^2` of a rescaled solve.
pub const DEFAULT_HORIZON_CAP: f64 = 1e5;

/// How the exact propagator is computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Engine<T: Real> {
    /// Exact exponential of the auxiliary block generator.
    Auxiliary,
    /// Trapezoidal quadrature with the given physical step.
    Quadrature { step: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaleOptions<T: Real> {
    pub engine: Engine<T>,
    pub horizon_cap: T,
}

impl<T: Real> Default for RescaleOptions<T> {
    fn default() -> Self {
        Self {
            engine: Engine::Auxiliary,
            horizon_cap: T::lit(DEFAULT_HORIZON_CAP),
        }
    }
}

/// `W_lambda(t) = V_lambda(t / lambda^2)`, solving the unscaled equation up to
/// the physical horizon.
pub fn rescaled_propagator<T: Real>(
    model: &SystemModel<T>,
    kernel: &BathKernel<T>,
    t: T,
    options: &RescaleOptions<T>,
) -> Result<Matrix<T>> {
    let lambda = model.lambda();
    if !(lambda > T::zero()) {
        return Err(Error::InvalidInput("rescaled propagator needs lambda > 0".into()));
    }
    if !(t >= T::zero()) {
        return Err(Error::InvalidInput(format!("negative rescaled time {t}")));
    }
    let horizon = t / (lambda * lambda);
    if horizon > options.horizon_cap {
        return Err(Error::HorizonTooLarge {
            horizon: horizon.to_f64_lossy(),
            cap: options.horizon_cap.to_f64_lossy(),
        });
    }
    if t == T::zero() {
        return Ok(Matrix::identity(model.dim()));
    }
    match options.engine {
        Engine::Auxiliary => ExactPropagator::new(model, kernel).at(horizon),
        Engine::Quadrature { step } => {
            let prop = solve_propagator(model, kernel, horizon, step)?;
            prop.at(horizon)
        }
    }
}

/// Reduced density matrix at time `t`: blocks
/// `gg + Tr(ee - V ee V^+)`, `ge V^+`, `V eg`, `V ee V^+`.
pub fn evolve_density<T: Real, P: PropagatorSource<T>>(
    rho0: &DensityBlocks<T>,
    prop: &P,
    t: T,
) -> Result<DensityBlocks<T>> {
    rho0.transform(&prop.at(t)?)
}

/// Inverts `V(t)` after checking its conditioning.
pub(crate) fn checked_inverse<T: Real>(v: &Matrix<T>, t: T) -> Result<Matrix<T>> {
    let cond = condition_number(v)?;
    if !(cond <= T::lit(SINGULAR_CONDITION)) {
        return Err(Error::SingularPropagator {
            t: t.to_f64_lossy(),
            cond: cond.to_f64_lossy(),
        });
    }
    Ok(Lu::new(v)
        .map_err(|_| Error::SingularPropagator {
            t: t.to_f64_lossy(),
            cond: cond.to_f64_lossy(),
        })?
        .inverse())
}

/// `V(t2) V(t1)^{-1}`.
pub fn propagator_ratio<T: Real, P: PropagatorSource<T>>(prop: &P, t1: T, t2: T) -> Result<Matrix<T>> {
    if !(t2 >= t1) {
        return Err(Error::InvalidInput(format!("need t2 >= t1, got t1 = {t1}, t2 = {t2}")));
    }
    let v1 = prop.at(t1)?;
    let v2 = prop.at(t2)?;
    Ok(&v2 * &checked_inverse(&v1, t1)?)
}

/// Divisible evolution map `Phi_{t1}^{t2}`: the block map with the propagator
/// ratio `V(t2) V(t1)^{-1}`.
pub fn divisible_map<T: Real, P: PropagatorSource<T>>(
    prop: &P,
    t1: T,
    t2: T,
    rho: &DensityBlocks<T>,
) -> Result<DensityBlocks<T>> {
    rho.transform(&propagator_ratio(prop, t1, t2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath_kernel::unit_kernel;
    use crate::matrix_calculus::{pauli_x, HermitianMatrix};
    use crate::random::random_density_matrix;
    use crate::scalar::{c, cr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Scalar reference: `v'' + v' + v = 0`, `v(0) = 1`, `v'(0) = 0`.
    fn closed_form(t: f64) -> f64 {
        let w = 3f64.sqrt() / 2.0;
        (-t / 2.0).exp() * ((w * t).cos() + (w * t).sin() / 3f64.sqrt())
    }

    fn scalar_model(lambda: f64) -> SystemModel<f64> {
        SystemModel::without_correction(HermitianMatrix::zeros(1), lambda).unwrap()
    }

    fn reference_model(lambda: f64) -> SystemModel<f64> {
        SystemModel::new(HermitianMatrix::from_real_diagonal(&[1.0, 2.0]), pauli_x(), lambda).unwrap()
    }

    #[test]
    fn closed_form_value() {
        assert!((closed_form(1.0) - 0.6597).abs() < 1e-4);
    }

    #[test]
    fn zero_kernel_gives_identity() {
        let k = BathKernel::single(cr(0.0), 1.0, 0.0).unwrap();
        let model = reference_model(0.5);
        let q = solve_propagator(&model, &k, 2.0, 0.01).unwrap();
        let a = solve_via_auxiliary_odes(&model, &k, 2.0, 0.01).unwrap();
        for v in q.values().iter().chain(a.values()) {
            assert!((v - &Matrix::identity(2)).max_abs() < 1e-15);
        }
        let lambda0 = reference_model(0.0);
        let a0 = solve_via_auxiliary_odes(&lambda0, &unit_kernel(), 1.0, 0.1).unwrap();
        assert!((&a0.at(1.0).unwrap() - &Matrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn scalar_reference_both_engines() {
        let model = scalar_model(1.0);
        let k = unit_kernel();
        let quad = solve_propagator(&model, &k, 1.0, 1e-3).unwrap();
        let v1 = quad.at(1.0).unwrap()[(0, 0)];
        assert!((v1.re - closed_form(1.0)).abs() < 1e-6);
        let aux = ExactPropagator::new(&model, &k).at(1.0).unwrap()[(0, 0)];
        assert!((aux - cr(closed_form(1.0))).norm() < 1e-12);
    }

    #[test]
    fn engines_agree_on_reference_model() {
        let model = reference_model(0.6);
        let k = unit_kernel();
        let quad = solve_propagator(&model, &k, 3.0, 0.005).unwrap();
        let aux = solve_via_auxiliary_odes(&model, &k, 3.0, 0.005).unwrap();
        let worst = quad
            .values()
            .iter()
            .zip(aux.values())
            .map(|(a, b)| (a - b).max_abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn coarse_step_rejected() {
        let model = reference_model(0.2);
        let err = solve_propagator(&model, &unit_kernel(), 1.0, 0.2).unwrap_err();
        assert!(matches!(err, Error::StepTooCoarse(_)));
        let fast = BathKernel::single(cr(1.0), 5.0, 0.0).unwrap();
        assert!(matches!(
            solve_propagator(&model, &fast, 1.0, 0.04),
            Err(Error::StepTooCoarse(_))
        ));
    }

    #[test]
    fn rescaling_identities() {
        let k = unit_kernel();
        let opts = RescaleOptions::default();
        let model = reference_model(0.3);
        assert_eq!(
            rescaled_propagator(&model, &k, 0.0, &opts).unwrap(),
            Matrix::identity(2)
        );

        let unit = reference_model(1.0);
        let w = rescaled_propagator(&unit, &k, 0.7, &opts).unwrap();
        let v = ExactPropagator::new(&unit, &k).at(0.7).unwrap();
        assert!((&w - &v).max_abs() < 1e-14);

        // lambda = 0.5, t = 0.25 is physical time 1 with kernel lambda^2 G
        let scalar = scalar_model(0.5);
        let w = rescaled_propagator(&scalar, &k, 0.25, &opts).unwrap();
        let prescaled = scalar_model(1.0);
        let v = ExactPropagator::new(&prescaled, &k.scaled(0.25)).at(1.0).unwrap();
        assert!((&w - &v).max_abs() < 1e-13);

        let capped = RescaleOptions {
            horizon_cap: 10.0,
            ..opts
        };
        assert!(matches!(
            rescaled_propagator(&model, &k, 1.0, &capped),
            Err(Error::HorizonTooLarge { .. })
        ));
    }

    #[test]
    fn quadrature_engine_for_rescaled() {
        let k = unit_kernel();
        let model = reference_model(0.5);
        let opts = RescaleOptions {
            engine: Engine::Quadrature { step: 0.005 },
            ..RescaleOptions::default()
        };
        let wq = rescaled_propagator(&model, &k, 0.5, &opts).unwrap();
        let wa = rescaled_propagator(&model, &k, 0.5, &RescaleOptions::default()).unwrap();
        assert!((&wq - &wa).max_abs() < 1e-5);
    }

    #[test]
    fn evolve_examples() {
        let model = scalar_model(1.0);
        let prop = solve_via_auxiliary_odes(&model, &unit_kernel(), 2.0, 0.25).unwrap();
        let excited = DensityBlocks::pure(cr(0.0), &[cr(1.0)]).unwrap();
        let rho1 = evolve_density(&excited, &prop, 1.0).unwrap();
        let v = closed_form(1.0);
        assert!((rho1.ee[(0, 0)].re - v * v).abs() < 1e-12);
        assert!((rho1.ee[(0, 0)].re - 0.4352).abs() < 1e-4);
        assert!((rho1.gg - (1.0 - v * v)).abs() < 1e-12);

        let ground = DensityBlocks::<f64>::ground(1);
        assert_eq!(evolve_density(&ground, &prop, 2.0).unwrap(), ground);
        assert_eq!(evolve_density(&excited, &prop, 0.0).unwrap(), excited);
        assert!(matches!(
            evolve_density(&excited, &prop, 0.3),
            Err(Error::GridMiss { .. })
        ));
    }

    #[test]
    fn divisible_map_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let model = reference_model(0.7);
        let prop = solve_via_auxiliary_odes(&model, &unit_kernel(), 3.0, 0.05).unwrap();
        for _ in 0..5 {
            let rho = DensityBlocks::from_full(&random_density_matrix(&mut rng, 3)).unwrap();
            let same = divisible_map(&prop, 1.0, 1.0, &rho).unwrap();
            assert!(same.distance(&rho) < 1e-12);
            let from_zero = divisible_map(&prop, 0.0, 2.0, &rho).unwrap();
            assert!(from_zero.distance(&evolve_density(&rho, &prop, 2.0).unwrap()) < 1e-14);
            let two_legs = divisible_map(&prop, 1.5, 3.0, &divisible_map(&prop, 0.5, 1.5, &rho).unwrap()).unwrap();
            let one_leg = divisible_map(&prop, 0.5, 3.0, &rho).unwrap();
            assert!(two_legs.distance(&one_leg) < 1e-8);
            assert!((two_legs.trace() - 1.0).abs() < 1e-10);
        }
        assert!(divisible_map(&prop, 2.0, 1.0, &DensityBlocks::ground(2)).is_err());
    }

    #[test]
    fn singular_propagator_detected() {
        let v = Matrix::diag(&[c(1.0, 0.0), c(1e-14, 0.0)]);
        assert!(matches!(
            checked_inverse(&v, 1.0),
            Err(Error::SingularPropagator { .. })
        ));
    }
}
