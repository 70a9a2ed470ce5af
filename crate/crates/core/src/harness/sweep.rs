//! Lambda sweeps and log-log slope extraction.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::markov_then_renormalize;
use crate::correlations::{exact_two_time, markov_two_time, renormalized_two_time};
use crate::error::{Error, Result};
use crate::exact_dynamics::evolve_density;
use crate::harness::point::LambdaPoint;
use crate::harness::scenario::Scenario;
use crate::matrix_calculus::spectral_norm;

/// Errors below this are treated as having hit the floating-point floor.
pub const FIT_FLOOR: f64 = 1e-13;
/// Minimum number of couplings for a slope fit.
pub const MIN_SWEEP_POINTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `sup_t ||W(t) - exp(L t) r||`.
    PropagatorError,
    /// `sup_t ||W(t) - exp(L0 t)||` with `r`, `L` truncated at zeroth order.
    ZerothOrderError,
    /// `sup_t ||exp(L t) r - r exp(L t)||`.
    CommutationError,
    /// `sup |<..>_r - <..>_M|` over time pairs and dipole pairs.
    CorrelationRenormError,
    /// `sup_t ||rho(t) - R(exp(Lt) rho0)||`.
    ReverseOrderError,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::PropagatorError,
        Quantity::ZerothOrderError,
        Quantity::CommutationError,
        Quantity::CorrelationRenormError,
        Quantity::ReverseOrderError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::PropagatorError => "propagator_error",
            Quantity::ZerothOrderError => "zeroth_order_error",
            Quantity::CommutationError => "commutation_error",
            Quantity::CorrelationRenormError => "correlation_renorm_error",
            Quantity::ReverseOrderError => "reverse_order_error",
        }
    }

    /// Accepted slope window `(min, max)`.
    pub fn expected_slope(self) -> (f64, f64) {
        match self {
            Quantity::PropagatorError => (3.5, 4.5),
            Quantity::ZerothOrderError => (1.7, 2.3),
            _ => (3.5, f64::INFINITY),
        }
    }

    /// Largest rescaled time the quantity touches.
    fn reach(self, eval_times: &[f64]) -> f64 {
        let t = eval_times.iter().copied().fold(0.0, f64::max);
        match self {
            Quantity::CorrelationRenormError => 2.0 * t,
            _ => t,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown quantity {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub quantity: Quantity,
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
    /// Root-mean-square residual of the log-log fit.
    pub fit_residual: f64,
    pub eval_times: Vec<f64>,
}

impl ScalingReport {
    pub fn within_expected(&self) -> bool {
        let (lo, hi) = self.quantity.expected_slope();
        self.fitted_slope >= lo && self.fitted_slope <= hi
    }
}

/// Least-squares slope and RMS residual of `log y` against `log x`.
pub fn fit_log_log(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (slope, (ss / n).sqrt())
}

fn sup(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0, |acc, v| Ok(f64::max(acc, v?)))
}

/// The named error at a single coupling.
pub fn point_error(scenario: &Scenario, quantity: Quantity, lambda: f64) -> Result<f64> {
    let times = &scenario.eval_times;
    let point = LambdaPoint::new(scenario, lambda, quantity.reach(times))?;
    match quantity {
        Quantity::PropagatorError => sup(times
            .iter()
            .map(|&t| spectral_norm(&(&point.exact(t)? - &point.asymptotic(t))))),
        Quantity::ZerothOrderError => sup(times
            .iter()
            .map(|&t| spectral_norm(&(&point.exact(t)? - &point.zeroth_order(t))))),
        Quantity::CommutationError => sup(times
            .iter()
            .map(|&t| spectral_norm(&(&point.data.propagator(t) - &point.data.propagator_reversed(t))))),
        Quantity::CorrelationRenormError => {
            let r = point.data.r();
            let mut worst: f64 = 0.0;
            for &t1 in times {
                for &tau in times {
                    for h1 in &scenario.dipoles {
                        for h2 in &scenario.dipoles {
                            let m = markov_two_time(&point, h1, h2, t1, t1 + tau)?;
                            let rn = renormalized_two_time(&point, r, h1, h2, t1, t1 + tau)?;
                            worst = worst.max((rn - m).norm());
                        }
                    }
                }
            }
            Ok(worst)
        }
        Quantity::ReverseOrderError => sup(times.iter().map(|&t| {
            let exact = evolve_density(&scenario.initial_state, &point, t)?;
            let reverse = markov_then_renormalize(&scenario.initial_state, &point.data, t)?;
            spectral_norm(&(&exact.to_full() - &reverse.to_full()))
        })),
    }
}

/// `sup |<..> - <..>_M|` of the unrenormalized correlations at one coupling,
/// over the same time and dipole pairs as the renormalization sweep.
pub fn markov_gap(scenario: &Scenario, lambda: f64) -> Result<f64> {
    let times = &scenario.eval_times;
    let point = LambdaPoint::new(scenario, lambda, Quantity::CorrelationRenormError.reach(times))?;
    let mut worst: f64 = 0.0;
    for &t1 in times {
        for &tau in times {
            for h1 in &scenario.dipoles {
                for h2 in &scenario.dipoles {
                    let m = markov_two_time(&point, h1, h2, t1, t1 + tau)?;
                    let e = exact_two_time(&point, h1, h2, t1, t1 + tau)?;
                    worst = worst.max((e - m).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Evaluates `quantity` at every coupling (in parallel, reported in input
/// order) and fits the log-log slope.
pub fn run_sweep(scenario: &Scenario, quantity: Quantity) -> Result<ScalingReport> {
    let lambdas = &scenario.lambdas;
    if lambdas.len() < MIN_SWEEP_POINTS {
        return Err(Error::InvalidInput(format!(
            "a sweep needs at least {MIN_SWEEP_POINTS} couplings, got {}",
            lambdas.len()
        )));
    }
    if let Some(&l) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "sweep couplings must be positive, got {l}"
        )));
    }
    let errors: Vec<f64> = lambdas
        .par_iter()
        .map(|&l| point_error(scenario, quantity, l))
        .collect::<Result<_>>()?;
    for (&lambda, &error) in lambdas.iter().zip(&errors) {
        if !(error >= FIT_FLOOR) {
            return Err(Error::DegenerateFit {
                lambda,
                error,
                floor: FIT_FLOOR,
            });
        }
    }
    let (fitted_slope, fit_residual) = fit_log_log(lambdas, &errors);
    Ok(ScalingReport {
        quantity,
        lambdas: lambdas.clone(),
        errors,
        fitted_slope,
        fit_residual,
        eval_times: scenario.eval_times.clone(),
    })
}
