//! Dipole correlation functions from the excited-sector propagator.
//!
//! With `sigma_h = (0 0; h 0)` and the system starting in the ground state, the
//! two-time functions are
//!
//! * Markovian (regression formula): `h2^+ V(t2) V(t1)^{-1} h1`,
//! * exact: `h2^+ V(t2 - t1) h1`,
//!
//! and they coincide for all times iff `V` is a semigroup. The renormalized
//! variant feeds `r^{-1} h1` into the exact formula.

use crate::error::{Error, Result};
use crate::exact_dynamics::{checked_inverse, PropagatorSource, SINGULAR_CONDITION};
use crate::matrix::{dot, Lu, Matrix};
use crate::matrix_calculus::condition_number;
use crate::scalar::{Real, C};

/// Dipole weights `h` of `sigma_h`; finite, not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleVector<T: Real>(Vec<C<T>>);

impl<T: Real> DipoleVector<T> {
    pub fn new(h: Vec<C<T>>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::validation("dipoles", "dipole vector must be nonempty"));
        }
        if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::validation("dipoles", "dipole entries must be finite"));
        }
        Ok(Self(h))
    }

    /// Unit vector along excited level `k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut h = vec![C::new(T::zero(), T::zero()); n];
        h[k] = C::new(T::one(), T::zero());
        Self(h)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C<T>> {
        self.0
    }
}

fn check_dims<T: Real>(n: usize, dipoles: &[&DipoleVector<T>]) -> Result<()> {
    match dipoles.iter().find(|h| h.dim() != n) {
        Some(h) => Err(Error::DimensionMismatch(format!(
            "dipole vector has {} entries, propagator dimension is {n}",
            h.dim()
        ))),
        None => Ok(()),
    }
}

fn check_order<T: Real>(t1: T, t2: T) -> Result<()> {
    if !(t1 >= T::zero() && t2 >= t1) {
        return Err(Error::InvalidInput(format!(
            "need 0 <= t1 <= t2, got t1 = {t1}, t2 = {t2}"
        )));
    }
    Ok(())
}

fn check_nonnegative<T: Real>(times: &[(&str, T)]) -> Result<()> {
    for &(name, t) in times {
        if !(t >= T::zero()) {
            return Err(Error::InvalidInput(format!("{name} must be >= 0, got {t}")));
        }
    }
    Ok(())
}

/// `<sigma^+_{h2}(t2) sigma_{h1}(t1)>_M = h2^+ V(t2) V(t1)^{-1} h1`.
pub fn markov_two_time<T: Real, P: PropagatorSource<T>>(
    prop: &P,
    h1: &DipoleVector<T>,
    h2: &DipoleVector<T>,
    t1: T,
    t2: T,
) -> Result<C<T>> {
    check_dims(prop.dim(), &[h1, h2])?;
    check_order(t1, t2)?;
    let inv = checked_inverse(&prop.at(t1)?, t1)?;
    let v2 = prop.at(t2)?;
    Ok(v2.sesquilinear(h2.as_slice(), &inv.mul_vec(h1.as_slice())))
}

/// `<sigma^+_{h2}(t2) sigma_{h1}(t1)> = h2^+ V(t2 - t1) h1`.
pub fn exact_two_time<T: Real, P: PropagatorSource<T>>(
    prop: &P,
    h1: &DipoleVector<T>,
    h2: &DipoleVector<T>,
    t1: T,
    t2: T,
) -> Result<C<T>> {
    check_dims(prop.dim(), &[h1, h2])?;
    check_order(t1, t2)?;
    Ok(prop.at(t2 - t1)?.sesquilinear(h2.as_slice(), h1.as_slice()))
}

/// Solves `r x = h` after checking the conditioning of `r`.
pub fn renormalize_dipole<T: Real>(r: &Matrix<T>, h: &DipoleVector<T>) -> Result<DipoleVector<T>> {
    r.ensure_square("renormalization")?;
    check_dims(r.rows(), &[h])?;
    let cond = condition_number(r)?;
    if !(cond <= T::lit(SINGULAR_CONDITION)) {
        return Err(Error::SingularRenormalization {
            cond: cond.to_f64_lossy(),
        });
    }
    let lu = Lu::new(r).map_err(|_| Error::SingularRenormalization {
        cond: cond.to_f64_lossy(),
    })?;
    Ok(DipoleVector(lu.solve_vec(h.as_slice())))
}

/// `<sigma^+_{h2}(t2) sigma_{h1}(t1)>_r = <sigma^+_{h2}(t2) sigma_{r^{-1} h1}(t1)>`.
pub fn renormalized_two_time<T: Real, P: PropagatorSource<T>>(
    prop: &P,
    r: &Matrix<T>,
    h1: &DipoleVector<T>,
    h2: &DipoleVector<T>,
    t1: T,
    t2: T,
) -> Result<C<T>> {
    exact_two_time(prop, &renormalize_dipole(r, h1)?, h2, t1, t2)
}

/// Dipoles of the three-time correlation, in the order of the formulas:
/// `h1`, `h3` enter the `V(tau + T)` factor, `h2`, `h4` the adjoint factor.
#[derive(Clone, Copy, Debug)]
pub struct DipoleQuad<'a, T: Real> {
    pub h1: &'a DipoleVector<T>,
    pub h2: &'a DipoleVector<T>,
    pub h3: &'a DipoleVector<T>,
    pub h4: &'a DipoleVector<T>,
}

impl<T: Real> DipoleQuad<'_, T> {
    fn check(&self, n: usize) -> Result<()> {
        check_dims(n, &[self.h1, self.h2, self.h3, self.h4])
    }
}

/// Markovian three-time correlation
/// `h3^+ V(tau+T) h1 * h2^+ (V^+(tau))^{-1} V^+(t+T+tau) h4`.
pub fn markov_three_time<T: Real, P: PropagatorSource<T>>(
    prop: &P,
    h: DipoleQuad<'_, T>,
    tau: T,
    big_t: T,
    t: T,
) -> Result<C<T>> {
    h.check(prop.dim())?;
    check_nonnegative(&[("tau", tau), ("T", big_t), ("t", t)])?;
    let first = prop.at(tau + big_t)?.sesquilinear(h.h3.as_slice(), h.h1.as_slice());
    let inv_adj = checked_inverse(&prop.at(tau)?, tau)?.adjoint();
    let tail = prop.at(t + big_t + tau)?.adjoint().mul_vec(h.h4.as_slice());
    let second = dot(h.h2.as_slice(), &inv_adj.mul_vec(&tail));
    Ok(first * second)
}

/// Exact three-time correlation `h3^+ V(tau+T) h1 * h2^+ V^+(t+T) h4`.
pub fn exact_three_time<T: Real, P: PropagatorSource<T>>(
    prop: &P,
    h: DipoleQuad<'_, T>,
    tau: T,
    big_t: T,
    t: T,
) -> Result<C<T>> {
    h.check(prop.dim())?;
    check_nonnegative(&[("tau", tau), ("T", big_t), ("t", t)])?;
    let first = prop.at(tau + big_t)?.sesquilinear(h.h3.as_slice(), h.h1.as_slice());
    let second = prop
        .at(t + big_t)?
        .adjoint()
        .sesquilinear(h.h2.as_slice(), h.h4.as_slice());
    Ok(first * second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath_kernel::unit_kernel;
    use crate::exact_dynamics::{solve_via_auxiliary_odes, ExactPropagator, Semigroup, SystemModel};
    use crate::matrix_calculus::{pauli_x, HermitianMatrix};
    use crate::scalar::{c, cr};

    fn closed_form(t: f64) -> f64 {
        let w = 3f64.sqrt() / 2.0;
        (-t / 2.0).exp() * ((w * t).cos() + (w * t).sin() / 3f64.sqrt())
    }

    fn scalar_prop() -> ExactPropagator<f64> {
        let m = SystemModel::without_correction(HermitianMatrix::zeros(1), 1.0).unwrap();
        ExactPropagator::new(&m, &unit_kernel())
    }

    fn reference_prop(lambda: f64) -> ExactPropagator<f64> {
        let m = SystemModel::new(HermitianMatrix::from_real_diagonal(&[1.0, 2.0]), pauli_x(), lambda).unwrap();
        ExactPropagator::new(&m, &unit_kernel())
    }

    fn dip(v: &[(f64, f64)]) -> DipoleVector<f64> {
        DipoleVector::new(v.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn scalar_two_time_closed_form() {
        let p = scalar_prop();
        let h1 = dip(&[(0.7, 0.2)]);
        let h2 = dip(&[(-0.3, 1.1)]);
        let weight = h2.as_slice()[0].conj() * h1.as_slice()[0];
        let m = markov_two_time(&p, &h1, &h2, 0.5, 1.0).unwrap();
        assert!((m - weight * (closed_form(1.0) / closed_form(0.5))).norm() < 1e-12);
        let e = exact_two_time(&p, &h1, &h2, 0.5, 1.0).unwrap();
        assert!((e - weight * closed_form(0.5)).norm() < 1e-12);
    }

    #[test]
    fn coincident_and_initial_times() {
        let p = reference_prop(0.5);
        let h1 = dip(&[(1.0, 0.0), (0.3, -0.4)]);
        let h2 = dip(&[(0.2, 0.5), (-1.0, 0.1)]);
        let overlap = dot(h2.as_slice(), h1.as_slice());
        for t in [0.0, 0.7, 3.0] {
            assert!((markov_two_time(&p, &h1, &h2, t, t).unwrap() - overlap).norm() < 1e-12);
            assert!((exact_two_time(&p, &h1, &h2, t, t).unwrap() - overlap).norm() < 1e-15);
            let swapped = exact_two_time(&p, &h2, &h1, t, t).unwrap();
            assert!((exact_two_time(&p, &h1, &h2, t, t).unwrap() - swapped.conj()).norm() < 1e-15);
        }
        let m = markov_two_time(&p, &h1, &h2, 0.0, 2.5).unwrap();
        let e = exact_two_time(&p, &h1, &h2, 0.0, 2.5).unwrap();
        assert!((m - e).norm() < 1e-13);
    }

    #[test]
    fn exact_is_time_translation_invariant() {
        let p = reference_prop(0.5);
        let h1 = dip(&[(1.0, 0.0), (0.3, -0.4)]);
        let h2 = dip(&[(0.2, 0.5), (-1.0, 0.1)]);
        let base = exact_two_time(&p, &h1, &h2, 0.0, 1.5).unwrap();
        for s in [0.5, 2.0, 7.25] {
            assert!((exact_two_time(&p, &h1, &h2, s, s + 1.5).unwrap() - base).norm() < 1e-13);
        }
    }

    #[test]
    fn grid_propagator_and_grid_miss() {
        let m = SystemModel::new(HermitianMatrix::from_real_diagonal(&[1.0, 2.0]), pauli_x(), 0.5).unwrap();
        let grid = solve_via_auxiliary_odes(&m, &unit_kernel(), 4.0, 0.01).unwrap();
        let h1 = dip(&[(1.0, 0.0), (0.0, 0.0)]);
        let h2 = dip(&[(0.0, 0.0), (1.0, 0.0)]);
        let e = exact_two_time(&grid, &h1, &h2, 1.0, 3.0).unwrap();
        let f = exact_two_time(&reference_prop(0.5), &h1, &h2, 1.0, 3.0).unwrap();
        assert!((e - f).norm() < 1e-12);
        assert!(matches!(
            exact_two_time(&grid, &h1, &h2, 0.0, 1.0005),
            Err(Error::GridMiss { .. })
        ));
    }

    #[test]
    fn renormalized_with_identity_is_exact() {
        let p = reference_prop(0.5);
        let h1 = dip(&[(1.0, 0.0), (0.3, -0.4)]);
        let h2 = dip(&[(0.2, 0.5), (-1.0, 0.1)]);
        let a = renormalized_two_time(&p, &Matrix::identity(2), &h1, &h2, 0.4, 1.9).unwrap();
        let b = exact_two_time(&p, &h1, &h2, 0.4, 1.9).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn singular_renormalization_rejected() {
        let r = Matrix::from_rows(&[vec![cr(1.0), cr(2.0)], vec![cr(0.5), cr(1.0)]]).unwrap();
        let h = dip(&[(1.0, 0.0), (0.0, 1.0)]);
        assert!(matches!(
            renormalize_dipole(&r, &h),
            Err(Error::SingularRenormalization { .. })
        ));
    }

    #[test]
    fn singular_propagator_rejected() {
        let v = Semigroup::new(Matrix::zeros(2, 2), Matrix::diag_real(&[1.0, 0.0])).unwrap();
        let h = dip(&[(1.0, 0.0), (0.0, 1.0)]);
        assert!(matches!(
            markov_two_time(&v, &h, &h, 0.5, 1.0),
            Err(Error::SingularPropagator { .. })
        ));
    }

    #[test]
    fn three_time_limits() {
        let p = reference_prop(0.5);
        let hs = [
            dip(&[(1.0, 0.0), (0.3, -0.4)]),
            dip(&[(0.2, 0.5), (-1.0, 0.1)]),
            dip(&[(0.0, 1.0), (0.5, 0.5)]),
            dip(&[(-0.6, 0.2), (0.1, 0.0)]),
        ];
        let q = DipoleQuad {
            h1: &hs[0],
            h2: &hs[1],
            h3: &hs[2],
            h4: &hs[3],
        };
        let m = markov_three_time(&p, q, 0.0, 0.8, 1.1).unwrap();
        let e = exact_three_time(&p, q, 0.0, 0.8, 1.1).unwrap();
        assert!((m - e).norm() < 1e-13);
        let zero = exact_three_time(&p, q, 0.0, 0.0, 0.0).unwrap();
        let expected = dot(hs[2].as_slice(), hs[0].as_slice()) * dot(hs[1].as_slice(), hs[3].as_slice());
        assert!((zero - expected).norm() < 1e-15);
        assert!((markov_three_time(&p, q, 0.0, 0.0, 0.0).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn scalar_three_time_closed_form() {
        let p = scalar_prop();
        let one = dip(&[(1.0, 0.0)]);
        let q = DipoleQuad {
            h1: &one,
            h2: &one,
            h3: &one,
            h4: &one,
        };
        let (tau, big_t, t) = (0.25, 0.25, 0.5);
        let v = closed_form;
        let m = markov_three_time(&p, q, tau, big_t, t).unwrap();
        assert!((m - cr(v(tau + big_t) * v(t + big_t + tau) / v(tau))).norm() < 1e-12);
        let e = exact_three_time(&p, q, tau, big_t, t).unwrap();
        assert!((e - cr(v(tau + big_t) * v(t + big_t))).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_first_factor_vanishes() {
        let v = Semigroup::pure(Matrix::diag(&[c(-1.0, 0.5), c(-0.3, -2.0)])).unwrap();
        let h1 = dip(&[(1.0, 0.0), (0.0, 0.0)]);
        let h3 = dip(&[(0.0, 0.0), (1.0, 0.0)]);
        let other = dip(&[(0.4, -0.3), (1.2, 0.8)]);
        let q = DipoleQuad {
            h1: &h1,
            h2: &other,
            h3: &h3,
            h4: &other,
        };
        assert_eq!(exact_three_time(&v, q, 0.3, 0.6, 1.0).unwrap(), C::new(0.0, 0.0));
    }

    #[test]
    fn semigroup_makes_both_prescriptions_agree() {
        let l = Matrix::from_rows(&[vec![c(-1.0, 0.3), c(0.2, 0.1)], vec![c(0.05, 0.0), c(-0.4, -1.2)]]).unwrap();
        let v = Semigroup::pure(l).unwrap();
        let h1 = dip(&[(1.0, 0.0), (0.3, -0.4)]);
        let h2 = dip(&[(0.2, 0.5), (-1.0, 0.1)]);
        for (t1, t2) in [(0.3, 0.9), (1.0, 2.5), (2.0, 2.1)] {
            let m = markov_two_time(&v, &h1, &h2, t1, t2).unwrap();
            let e = exact_two_time(&v, &h1, &h2, t1, t2).unwrap();
            assert!((m - e).norm() < 1e-12);
        }
    }
}
