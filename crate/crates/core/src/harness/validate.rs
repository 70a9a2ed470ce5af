//! Runs every module's invariants on a scenario and reports measured margins.

use std::fmt;

use serde::Serialize;

use crate::asymptotics::{
    asymptotic_density, compute_l, compute_l_explicit, compute_r, renormalize, AsymptoticData, Order,
};
use crate::correlations::{exact_three_time, exact_two_time, markov_three_time, markov_two_time, DipoleQuad};
use crate::error::Result;
use crate::exact_dynamics::{
    check_step, evolve_density, solve_propagator, ExactPropagator, PropagatorSource, Semigroup, RESOLUTION_BOUND,
};
use crate::harness::point::LambdaPoint;
use crate::harness::scenario::Scenario;
use crate::harness::sweep::{markov_gap, run_sweep, Quantity, MIN_SWEEP_POINTS};
use crate::matrix::Matrix;
use crate::matrix_calculus::{dissipativity_margin, matrix_function, spectral_decompose, spectral_norm};
use crate::scalar::minus_i;

/// Accuracy the quadrature solver is held to at `h = 1e-3`; scales as `h^2`.
pub const SOLVER_TOLERANCE: f64 = 1e-6;
/// Physical horizon of the quadrature cross-check.
pub const CROSS_CHECK_HORIZON: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured value compared against `threshold`.
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub scenario: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Process exit status: nonzero iff some check failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.passed())
    }

    pub fn find(&self, prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(prefix))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.scenario)?;
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(
                f,
                "{status} {:<44} measured {:>12.4e}  threshold {:>10.3e}",
                c.name, c.measured, c.threshold
            )?;
            if !c.detail.is_empty() {
                write!(f, "  {}", c.detail)?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

struct Collector {
    checks: Vec<Check>,
}

impl Collector {
    /// Passes when `measured <= threshold`.
    fn at_most(&mut self, name: String, measured: f64, threshold: f64) {
        self.checks.push(Check {
            name,
            passed: measured <= threshold,
            measured,
            threshold,
            detail: String::new(),
        });
    }

    fn at_least(&mut self, name: String, measured: f64, threshold: f64) {
        self.checks.push(Check {
            name,
            passed: measured >= threshold,
            measured,
            threshold,
            detail: String::new(),
        });
    }

    fn failed(&mut self, name: String, detail: String) {
        self.checks.push(Check {
            name,
            passed: false,
            measured: f64::NAN,
            threshold: f64::NAN,
            detail,
        });
    }

    /// Records `Err` results as failures.
    fn run(&mut self, name: String, body: impl FnOnce(&mut Self, &str) -> Result<()>) {
        if let Err(e) = body(self, &name) {
            self.failed(name, e.to_string());
        }
    }
}

fn tag(base: &str, lambda: f64) -> String {
    format!("{base}[lambda={lambda}]")
}

/// Quadrature tolerance at step `h`.
pub fn quadrature_tolerance(step: f64) -> f64 {
    SOLVER_TOLERANCE * (step / 1e-3).powi(2).max(1.0)
}

/// Runs the invariant suite; never fails, failures are report content.
pub fn validate(scenario: &Scenario) -> ValidationReport {
    let mut out = Collector { checks: Vec::new() };
    let step = scenario.time_grid.step;
    let samples = scenario.time_grid.sample_times();

    for &lambda in &scenario.lambdas {
        let Ok(model) = scenario.model(lambda) else {
            out.failed(tag("model", lambda), "invalid coupling".into());
            continue;
        };

        // solver preconditions and the quadrature/embedding cross-check
        let rate = scenario
            .kernel
            .max_decay_rate()
            .max(scenario.kernel.max_abs_frequency())
            .max(model.hamiltonian_norm().unwrap_or(f64::INFINITY));
        let step_ok = check_step(&model, &scenario.kernel, step);
        out.checks.push(Check {
            name: tag("step_preconditions", lambda),
            passed: step_ok.is_ok(),
            measured: step * rate,
            threshold: RESOLUTION_BOUND,
            detail: step_ok.as_ref().err().map(ToString::to_string).unwrap_or_default(),
        });
        let step_ok = step_ok.is_ok();
        if step_ok {
            out.run(tag("quadrature_cross_check", lambda), |out, name| {
                let horizon = (scenario.time_grid.t_max / (lambda * lambda).max(f64::MIN_POSITIVE))
                    .min(CROSS_CHECK_HORIZON)
                    .max(step);
                let grid = solve_propagator(&model, &scenario.kernel, horizon, step)?;
                let exact = ExactPropagator::new(&model, &scenario.kernel);
                let stride = (grid.len() / 200).max(1);
                let mut worst: f64 = 0.0;
                for (k, v) in grid.values().iter().enumerate().step_by(stride) {
                    let t = step * k as f64;
                    worst = worst.max((v - &exact.at(t)?).max_abs());
                }
                out.at_most(name.into(), worst, quadrature_tolerance(step));
                Ok(())
            });
        }

        let Ok(point) = LambdaPoint::new(scenario, lambda, scenario.time_grid.t_max) else {
            out.run(tag("exact_dynamics", lambda), |_, _| {
                LambdaPoint::new(scenario, lambda, scenario.time_grid.t_max).map(|_| ())
            });
            continue;
        };

        // physicality of the exact dynamics at every sample time
        out.run(tag("physicality", lambda), |out, _| {
            let (mut trace, mut herm, mut neg, mut sigma) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for &t in &samples {
                let v = point.exact(t)?;
                sigma = sigma.max(spectral_norm(&v)?);
                let rho = evolve_density(&scenario.initial_state, &point, t)?;
                trace = trace.max((rho.trace() - 1.0).abs());
                herm = herm.max(rho.hermiticity_residual());
                neg = neg.max(-rho.min_eigenvalue()?);
            }
            out.at_most(tag("trace_preservation", lambda), trace, 1e-10);
            out.at_most(tag("hermiticity", lambda), herm, 1e-10);
            out.at_most(tag("positivity", lambda), neg, 1e-8);
            out.at_most(tag("contraction", lambda), sigma, 1.0 + 1e-8);
            Ok(())
        });

        out.run(tag("dual_formula_generator", lambda), |out, name| {
            let a = compute_l(&model, &scenario.kernel)?;
            let b = compute_l_explicit(&model, &scenario.kernel)?;
            out.at_most(name.into(), (&a - &b).max_abs(), 1e-10);
            Ok(())
        });

        out.run(tag("renormalization_trace", lambda), |out, name| {
            let r = compute_r(&model, &scenario.kernel)?;
            let rho = renormalize(&scenario.initial_state, &r)?;
            out.at_most(name.into(), (rho.trace() - scenario.initial_state.trace()).abs(), 1e-12);
            Ok(())
        });

        if lambda <= scenario.lambda_star {
            out.run(tag("dissipativity", lambda), |out, name| {
                out.at_most(name.into(), dissipativity_margin(point.data.generator())?, 1e-12);
                let gksl = point.data.gksl()?;
                out.at_least(tag("gksl_rates", lambda), gksl.min_gamma(), -1e-10);
                Ok(())
            });
        }

        if lambda == 0.0 {
            out.run(tag("zero_coupling_agreement", lambda), |out, name| {
                let mut worst: f64 = 0.0;
                for &t in &samples {
                    let exact = evolve_density(&scenario.initial_state, &point, t)?;
                    let asym = asymptotic_density(&scenario.initial_state, &point.data, 0.0)?;
                    worst = worst.max(exact.distance(&asym));
                }
                out.at_most(name.into(), worst, quadrature_tolerance(step));
                Ok(())
            });
        }
    }

    // zeroth-order limits and the semigroup equivalence criterion
    out.run("zero_coupling_limit".into(), |out, name| {
        let bare = scenario.model(0.0)?;
        let r = compute_r(&bare, &scenario.kernel)?;
        let l = compute_l(&bare, &scenario.kernel)?;
        let d = spectral_decompose(bare.h0())?;
        let f = matrix_function(|e| scenario.kernel.laplace(minus_i::<f64>() * e, 0), &d)?;
        let dev = (&r - &Matrix::identity(bare.dim())).max_abs().max((&l + &f).max_abs());
        out.at_most(name.into(), dev, 1e-14);
        Ok(())
    });
    out.run("semigroup_equivalence".into(), |out, name| {
        let l0 = AsymptoticData::with_order(&scenario.model(0.0)?, &scenario.kernel, Order::Zeroth)?;
        let surrogate = Semigroup::pure(l0.generator().clone())?;
        let worst = semigroup_equivalence_gap(scenario, &surrogate)?;
        out.at_most(name.into(), worst, 1e-10);
        Ok(())
    });

    // slope checks for the requested sweeps
    let positive = scenario.lambdas.iter().filter(|&&l| l > 0.0).count();
    if positive >= MIN_SWEEP_POINTS && positive == scenario.lambdas.len() {
        for q in scenario.quantities() {
            out.run(format!("slope[{q}]"), |out, name| {
                let report = run_sweep(scenario, q)?;
                let (lo, hi) = q.expected_slope();
                out.checks.push(Check {
                    name: name.into(),
                    passed: report.within_expected(),
                    measured: report.fitted_slope,
                    threshold: lo,
                    detail: if hi.is_finite() {
                        format!("window [{lo}, {hi}]")
                    } else {
                        format!("at least {lo}")
                    },
                });
                Ok(())
            });
        }
        if scenario.quantities().contains(&Quantity::CorrelationRenormError) {
            let lambda = scenario.lambdas.iter().copied().fold(0.0, f64::max);
            out.run(tag("unrenormalized_markov_gap", lambda), |out, name| {
                out.at_least(name.into(), markov_gap(scenario, lambda)?, 10.0 * SOLVER_TOLERANCE);
                Ok(())
            });
        }
    }

    ValidationReport {
        scenario: scenario.name.clone(),
        checks: out.checks,
    }
}

/// `sup |markov - exact|` of two- and three-time correlations over sampled
/// time pairs/triples and dipole combinations, for an arbitrary propagator.
pub fn semigroup_equivalence_gap<P: PropagatorSource<f64>>(scenario: &Scenario, prop: &P) -> Result<f64> {
    let times: Vec<f64> = std::iter::once(0.0)
        .chain(scenario.eval_times.iter().copied())
        .collect();
    let d = &scenario.dipoles;
    let mut worst: f64 = 0.0;
    for h1 in d {
        for h2 in d {
            for &t1 in &times {
                for &s in &times {
                    let m = markov_two_time(prop, h1, h2, t1, t1 + s)?;
                    let e = exact_two_time(prop, h1, h2, t1, t1 + s)?;
                    worst = worst.max((m - e).norm());
                }
            }
        }
    }
    let quad = DipoleQuad {
        h1: &d[0],
        h2: &d[1 % d.len()],
        h3: &d[2 % d.len()],
        h4: &d[3 % d.len()],
    };
    for &tau in &times {
        for &big_t in &times {
            for &t in &times {
                let m = markov_three_time(prop, quad, tau, big_t, t)?;
                let e = exact_three_time(prop, quad, tau, big_t, t)?;
                worst = worst.max((m - e).norm());
            }
        }
    }
    Ok(worst)
}
