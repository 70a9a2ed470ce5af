//! Multi-exponential bath correlation functions.
//!
//! A kernel is `G(t) = sum_j A_j exp(-(kappa_j + i Omega_j) t)` for `t >= 0`.
//! Its Laplace transform `G~(p) = sum_j A_j / (p + kappa_j + i Omega_j)` and
//! all derivatives are closed-form, which is what the asymptotic generator
//! needs. The closed form is the analytic continuation of the transform, so
//! it is evaluated everywhere except in a small neighbourhood of the poles
//! `p = -(kappa_j + i Omega_j)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

/// Relative distance to a pole below which Laplace evaluations are refused.
pub const POLE_TOLERANCE: f64 = 1e-9;

/// Relative argument separation below which the divided difference switches
/// to its derivative branch.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;

/// One exponential term `A exp(-(kappa + i Omega) t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelTerm<T: Real> {
    pub amplitude: C<T>,
    pub decay_rate: T,
    pub frequency: T,
}

impl<T: Real> KernelTerm<T> {
    pub fn new(amplitude: C<T>, decay_rate: T, frequency: T) -> Result<Self> {
        if !(decay_rate > T::zero()) || !decay_rate.is_finite() {
            return Err(Error::validation(
                "kappa",
                format!("decay rate must be positive and finite, got {decay_rate}"),
            ));
        }
        if !frequency.is_finite() {
            return Err(Error::validation("omega", "frequency must be finite"));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::validation("a_re/a_im", "amplitude must be finite"));
        }
        Ok(Self {
            amplitude,
            decay_rate,
            frequency,
        })
    }

    /// `kappa + i Omega`.
    #[inline]
    pub fn exponent(&self) -> C<T> {
        c(self.decay_rate, self.frequency)
    }
}

/// Scenario-file representation of a kernel term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTermRecord {
    pub a_re: f64,
    #[serde(default)]
    pub a_im: f64,
    pub kappa: f64,
    #[serde(default)]
    pub omega: f64,
}

/// Bath correlation function as a nonempty sum of [`KernelTerm`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct BathKernel<T: Real> {
    terms: Vec<KernelTerm<T>>,
}

impl<T: Real> BathKernel<T> {
    pub fn new(terms: Vec<KernelTerm<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::validation("kernel", "at least one term is required"));
        }
        Ok(Self { terms })
    }

    /// Single-term kernel `A exp(-(kappa + i Omega) t)`.
    pub fn single(amplitude: C<T>, decay_rate: T, frequency: T) -> Result<Self> {
        Self::new(vec![KernelTerm::new(amplitude, decay_rate, frequency)?])
    }

    pub fn from_records(records: &[KernelTermRecord]) -> Result<Self> {
        let terms = records
            .iter()
            .enumerate()
            .map(|(j, r)| {
                KernelTerm::new(c(T::lit(r.a_re), T::lit(r.a_im)), T::lit(r.kappa), T::lit(r.omega)).map_err(
                    |e| match e {
                        Error::Validation { field, message } => {
                            Error::validation(format!("kernel[{j}].{field}"), message)
                        }
                        other => other,
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn to_records(&self) -> Vec<KernelTermRecord> {
        self.terms
            .iter()
            .map(|t| KernelTermRecord {
                a_re: t.amplitude.re.to_f64_lossy(),
                a_im: t.amplitude.im.to_f64_lossy(),
                kappa: t.decay_rate.to_f64_lossy(),
                omega: t.frequency.to_f64_lossy(),
            })
            .collect()
    }

    pub fn terms(&self) -> &[KernelTerm<T>] {
        &self.terms
    }

    /// Kernel with every amplitude multiplied by `factor` (the `G -> lambda^2 G`
    /// coupling substitution).
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| KernelTerm {
                    amplitude: t.amplitude * factor,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn max_decay_rate(&self) -> T {
        self.terms.iter().map(|t| t.decay_rate).fold(T::zero(), T::max)
    }

    pub fn min_decay_rate(&self) -> T {
        self.terms.iter().map(|t| t.decay_rate).fold(T::infinity(), T::min)
    }

    pub fn max_abs_frequency(&self) -> T {
        self.terms.iter().map(|t| t.frequency.abs()).fold(T::zero(), T::max)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude.is_zero())
    }

    /// `G(t)` for `t >= 0`.
    pub fn eval(&self, t: T) -> C<T> {
        debug_assert!(t >= T::zero(), "kernel is only defined for t >= 0");
        self.terms
            .iter()
            .map(|term| term.amplitude * (-term.exponent() * t).exp())
            .sum()
    }

    /// `n`-th derivative of the Laplace transform at `p`:
    /// `sum_j (-1)^n n! A_j / (p + kappa_j + i Omega_j)^(n+1)`.
    pub fn laplace(&self, p: C<T>, order: u32) -> Result<C<T>> {
        let tol = T::lit(POLE_TOLERANCE) * T::one().max(p.norm());
        let mut factorial = T::one();
        for k in 2..=order {
            factorial *= T::lit(f64::from(k));
        }
        let sign = if order.is_multiple_of(2) { T::one() } else { -T::one() };
        let mut acc = C::zero();
        for term in &self.terms {
            let shifted = p + term.exponent();
            let distance = shifted.norm();
            if distance < tol {
                return Err(Error::PoleTooClose {
                    re: p.re.to_f64_lossy(),
                    im: p.im.to_f64_lossy(),
                    distance: distance.to_f64_lossy(),
                });
            }
            acc += term.amplitude / shifted.powu(order + 1);
        }
        Ok(acc * (sign * factorial))
    }

    /// `G~(p)`.
    pub fn laplace_value(&self, p: C<T>) -> Result<C<T>> {
        self.laplace(p, 0)
    }

    /// `G~'(p)`.
    pub fn laplace_derivative(&self, p: C<T>) -> Result<C<T>> {
        self.laplace(p, 1)
    }

    /// Divided difference `(G~(p1) - G~(p2)) / (p1 - p2)`, or `G~'(p1)` when the
    /// arguments are closer than [`CLUSTER_TOLERANCE`] (relative).
    pub fn divided_difference(&self, p1: C<T>, p2: C<T>) -> Result<C<T>> {
        let scale = T::one().max(p1.norm()).max(p2.norm());
        if (p1 - p2).norm() < T::tol(CLUSTER_TOLERANCE) * scale {
            return self.laplace(p1, 1);
        }
        let g1 = self.laplace(p1, 0)?;
        let g2 = self.laplace(p2, 0)?;
        Ok((g1 - g2) / (p1 - p2))
    }
}

impl<T: Real> BathKernel<T> {
    /// Time `T` beyond which the tail `|sum_j A_j exp(-kappa_j T) / kappa_j|`
    /// is bounded by `tail` (using the triangle inequality per term).
    pub fn truncation_time(&self, tail: T) -> T {
        self.terms
            .iter()
            .map(|t| {
                let weight = t.amplitude.norm() * T::lit(self.terms.len() as f64) / t.decay_rate;
                if weight <= tail {
                    T::zero()
                } else {
                    (weight / tail).ln() / t.decay_rate
                }
            })
            .fold(T::zero(), T::max)
    }
}

/// Unit kernel `exp(-t)` used throughout the reference scenarios.
pub fn unit_kernel<T: Real>() -> BathKernel<T> {
    BathKernel::single(C::one(), T::one(), T::zero()).expect("valid constant kernel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn k1() -> BathKernel<f64> {
        unit_kernel()
    }

    fn two_terms() -> BathKernel<f64> {
        BathKernel::new(vec![
            KernelTerm::new(c(1.0, 0.0), 1.0, 0.0).unwrap(),
            KernelTerm::new(c(0.5, 0.0), 2.0, 1.0).unwrap(),
        ])
        .unwrap()
    }

    /// Composite Simpson on [0, t_max] of `exp(-p t) G(t)`, independent of the
    /// closed-form transform.
    fn simpson_laplace(kernel: &BathKernel<f64>, p: C<f64>, t_max: f64, n: usize) -> C<f64> {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let h = t_max / n as f64;
        let f = |t: f64| (-p * t).exp() * kernel.eval(t);
        let mut acc = f(0.0) + f(t_max);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(k as f64 * h) * w;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn eval_single_term() {
        assert_eq!(k1().eval(0.0), c(1.0, 0.0));
        assert!((k1().eval(1.0) - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert!((k1().eval(1.0).re - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn eval_two_terms_matches_per_term_sum() {
        let t: f64 = 0.5;
        // exp(-t) + 0.5 exp(-2t) (cos t - i sin t)
        let second = 0.5 * (-2.0 * t).exp();
        let re = (-t).exp() + second * t.cos();
        let im = -second * t.sin();
        let got = two_terms().eval(t);
        assert!((got.re - re).abs() < 1e-15, "{got} vs {re}");
        assert!((got.im - im).abs() < 1e-15);
    }

    #[test]
    fn laplace_examples() {
        let k = k1();
        assert!((k.laplace(c(0.0, 0.0), 0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((k.laplace(c(0.0, 0.0), 1).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((k.laplace(c(0.0, 1.0), 0).unwrap() - c(0.5, -0.5)).norm() < 1e-15);
        assert!((k.laplace(c(0.0, 0.0), 2).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn laplace_matches_quadrature() {
        for kernel in [k1(), two_terms()] {
            let t_max = kernel.truncation_time(1e-10);
            for p in [c(0.0, 0.0), c(0.0, 1.0), c(0.5, -2.0), c(0.0, -3.0)] {
                let quad = simpson_laplace(&kernel, p, t_max, 200_000);
                let exact = kernel.laplace(p, 0).unwrap();
                assert!((quad - exact).norm() < 1e-6, "p={p}: {quad} vs {exact}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let kernel = two_terms();
        let h = 1e-5;
        for p in [c(0.0, 0.0), c(0.0, -1.0), c(0.3, 2.0)] {
            let d1 = kernel.laplace(p, 1).unwrap();
            let fd1 = (kernel.laplace(p + h, 0).unwrap() - kernel.laplace(p - h, 0).unwrap()) / (2.0 * h);
            assert!((d1 - fd1).norm() / d1.norm() < 1e-6);
            let d2 = kernel.laplace(p, 2).unwrap();
            let fd2 = (kernel.laplace(p + h, 1).unwrap() - kernel.laplace(p - h, 1).unwrap()) / (2.0 * h);
            assert!((d2 - fd2).norm() / d2.norm() < 1e-6);
        }
    }

    #[test]
    fn pole_is_rejected() {
        let err = k1().laplace(c(-1.0, 0.0), 0).unwrap_err();
        assert!(matches!(err, Error::PoleTooClose { .. }));
        assert!(k1().divided_difference(c(-1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn divided_difference_examples() {
        let k = k1();
        // (1 - 1/(1 - i)) / (0 - (-i))
        let p2 = c(0.0, -1.0);
        let direct = (c(1.0, 0.0) - c(1.0, 0.0) / (c(1.0, 0.0) + p2)) / (c(0.0, 0.0) - p2);
        let dd = k.divided_difference(c(0.0, 0.0), p2).unwrap();
        assert!((dd - direct).norm() < 1e-15);
        assert!((dd - c(-0.5, -0.5)).norm() < 1e-15);

        let p = c(0.2, -0.7);
        assert_eq!(k.divided_difference(p, p).unwrap(), k.laplace(p, 1).unwrap());

        let near = k.divided_difference(c(0.0, 0.0), c(1e-14, 0.0)).unwrap();
        assert!((near - c(-1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn divided_difference_symmetric_and_continuous() {
        let k = two_terms();
        let p1 = c(0.1, -1.3);
        let p2 = c(-0.2, 0.4);
        assert_eq!(
            k.divided_difference(p1, p2).unwrap(),
            k.divided_difference(p2, p1).unwrap()
        );

        let scale = 1.0f64.max(p1.norm());
        let p2 = p1 + c(CLUSTER_TOLERANCE * scale * 1.000001, 0.0);
        let quotient = k.divided_difference(p1, p2).unwrap();
        let derivative = k.laplace(p1, 1).unwrap();
        let second = k.laplace(p1, 2).unwrap();
        assert!((quotient - derivative).norm() < 1e-6 * second.norm());
    }

    #[test]
    fn invalid_kappa_names_field() {
        let err = BathKernel::<f64>::from_records(&[KernelTermRecord {
            a_re: 1.0,
            a_im: 0.0,
            kappa: 0.0,
            omega: 0.0,
        }])
        .unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
        assert!(BathKernel::<f64>::new(vec![]).is_err());
    }
}
