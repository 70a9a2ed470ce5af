//! Direct quadrature solver for the Volterra integro-differential equation
//! `V'(t) = -int_0^t K(t - s) V(s) ds`, `K(tau) = lambda^2 G(tau) exp(i H_S tau)`.
//!
//! Composite trapezoidal rule on the memory integral, trapezoidal update of
//! `V` with one Euler predictor / trapezoidal corrector pass per step. Second
//! order in `h`; `O(n^2)` work in the number of steps.

use num_traits::{One, Zero};

use crate::bath_kernel::BathKernel;
use crate::error::{Error, Result};
use crate::exact_dynamics::model::SystemModel;
use crate::exact_dynamics::propagator::Propagator;
use crate::matrix::Matrix;
use crate::matrix_calculus::spectral_decompose;
use crate::scalar::{c, Real, C};

/// Resolution bound: `h * rate <= 0.1` for every rate in the problem.
pub const RESOLUTION_BOUND: f64 = 0.1;

/// Checks the step-size preconditions of the quadrature solver.
pub fn check_step<T: Real>(model: &SystemModel<T>, kernel: &BathKernel<T>, step: T) -> Result<()> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::StepTooCoarse(format!("step must be positive, got {step}")));
    }
    let bound = T::lit(RESOLUTION_BOUND) * (T::one() + T::lit(1e-12));
    let checks = [
        ("h * max kappa", step * kernel.max_decay_rate()),
        ("h * ||H_S||", step * model.hamiltonian_norm()?),
        ("h * max |Omega|", step * kernel.max_abs_frequency()),
    ];
    for (what, value) in checks {
        if value > bound {
            return Err(Error::StepTooCoarse(format!(
                "{what} = {value} exceeds {RESOLUTION_BOUND} (step {step})"
            )));
        }
    }
    Ok(())
}

/// `acc += alpha * a * b` for `n x n` row-major blocks.
#[inline]
fn gemm_acc<T: Real>(acc: &mut [C<T>], alpha: T, a: &[C<T>], b: &[C<T>], n: usize) {
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k] * alpha;
            if aik.is_zero() {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            let arow = &mut acc[i * n..(i + 1) * n];
            for (o, &bkj) in arow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
}

/// Solves for `V` on `t_k = k h`, `k = 0..=round(horizon / h)`.
pub fn solve_propagator<T: Real>(
    model: &SystemModel<T>,
    kernel: &BathKernel<T>,
    horizon: T,
    step: T,
) -> Result<Propagator<T>> {
    if !(horizon > T::zero()) || !horizon.is_finite() {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
    }
    check_step(model, kernel, step)?;
    let steps = (horizon / step).round().to_f64_lossy() as usize;
    let n = model.dim();
    let nn = n * n;
    let h = step;
    let half = T::lit(0.5);

    // K_k = lambda^2 G(k h) exp(i H_S k h), built from the spectral form of H_S
    let coupled = model.coupled_kernel(kernel);
    let spectrum = spectral_decompose(&model.hamiltonian())?;
    let mut memory_kernel = vec![C::zero(); (steps + 1) * nn];
    for k in 0..=steps {
        let tau = h * T::lit(k as f64);
        let g = coupled.eval(tau);
        let block = &mut memory_kernel[k * nn..(k + 1) * nn];
        for (&e, p) in spectrum.eigenvalues().iter().zip(spectrum.projectors()) {
            let w = g * c((e * tau).cos(), (e * tau).sin());
            for (slot, &pij) in block.iter_mut().zip(p.as_slice()) {
                *slot += w * pij;
            }
        }
    }

    let mut v = vec![C::zero(); (steps + 1) * nn];
    let mut dv = vec![C::zero(); (steps + 1) * nn];
    for i in 0..n {
        v[i * n + i] = C::<T>::one();
    }
    let k0 = memory_kernel[..nn].to_vec();
    let mut memory = vec![C::zero(); nn];
    let mut scratch = vec![C::zero(); nn];
    for m in 1..=steps {
        // trapezoidal memory sum without the implicit j = m endpoint
        memory.iter_mut().for_each(|z| *z = C::zero());
        gemm_acc(&mut memory, half, &memory_kernel[m * nn..(m + 1) * nn], &v[..nn], n);
        for j in 1..m {
            gemm_acc(
                &mut memory,
                T::one(),
                &memory_kernel[(m - j) * nn..(m - j + 1) * nn],
                &v[j * nn..(j + 1) * nn],
                n,
            );
        }

        let (done, rest) = v.split_at_mut(m * nn);
        let prev = &done[(m - 1) * nn..];
        let prev_dv = dv[(m - 1) * nn..m * nn].to_vec();
        let current = &mut rest[..nn];

        // predictor: explicit Euler
        for ((slot, &p), &d) in current.iter_mut().zip(prev).zip(&prev_dv) {
            *slot = p + d * h;
        }
        // derivative at the predicted value
        scratch.copy_from_slice(&memory);
        gemm_acc(&mut scratch, half, &k0, current, n);
        // corrector: trapezoidal rule
        for (((slot, &p), &d0), &s) in current.iter_mut().zip(prev).zip(&prev_dv).zip(&scratch) {
            *slot = p + (d0 - s * h) * (h * half);
        }
        // derivative at the corrected value
        scratch.copy_from_slice(&memory);
        gemm_acc(&mut scratch, half, &k0, current, n);
        let out = &mut dv[m * nn..(m + 1) * nn];
        for (o, &s) in out.iter_mut().zip(&scratch) {
            *o = -s * h;
        }
        if current.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("Volterra iterate at step {m}")));
        }
    }

    let values = v
        .chunks_exact(nn)
        .map(|chunk| Matrix::from_fn(n, n, |i, j| chunk[i * n + j]))
        .collect();
    Ok(Propagator::from_values(step, values))
}
