//! Everything the harness needs at one coupling: the model, the asymptotic
//! data and an exact propagator on the rescaled axis.

use crate::asymptotics::{AsymptoticData, Order};
use crate::error::{Error, Result};
use crate::exact_dynamics::{solve_propagator, ExactPropagator, Propagator, PropagatorSource, SystemModel};
use crate::harness::scenario::{EngineChoice, Scenario};
use crate::matrix::Matrix;
use crate::matrix_calculus::matrix_exp;

#[derive(Clone, Debug)]
enum ExactSource {
    Auxiliary(ExactPropagator<f64>),
    Grid(Propagator<f64>),
}

/// One coupling of a scenario.
///
/// Times passed in are rescaled, `t = lambda^2 t_phys`. At `lambda = 0` the
/// rescaling degenerates and times are read as physical; the asymptotic
/// propagator `exp(L lambda^2 t_phys) r` is then the identity, as is `V`.
#[derive(Clone, Debug)]
pub struct LambdaPoint {
    pub lambda: f64,
    pub model: SystemModel<f64>,
    pub data: AsymptoticData<f64>,
    pub zeroth: AsymptoticData<f64>,
    source: ExactSource,
    horizon: f64,
}

impl LambdaPoint {
    /// Prepares the coupling for rescaled times up to `t_max`.
    pub fn new(scenario: &Scenario, lambda: f64, t_max: f64) -> Result<Self> {
        let model = scenario.model(lambda)?;
        let horizon = physical_time(lambda, t_max);
        if horizon > scenario.horizon_cap {
            return Err(Error::HorizonTooLarge {
                horizon,
                cap: scenario.horizon_cap,
            });
        }
        let source = match scenario.engine {
            EngineChoice::Auxiliary => ExactSource::Auxiliary(ExactPropagator::new(&model, &scenario.kernel)),
            EngineChoice::Quadrature => ExactSource::Grid(solve_propagator(
                &model,
                &scenario.kernel,
                horizon.max(scenario.time_grid.step),
                scenario.time_grid.step,
            )?),
        };
        Ok(Self {
            lambda,
            data: AsymptoticData::compute(&model, &scenario.kernel)?,
            zeroth: AsymptoticData::with_order(&model, &scenario.kernel, Order::Zeroth)?,
            model,
            source,
            horizon,
        })
    }

    pub fn physical_time(&self, t: f64) -> f64 {
        physical_time(self.lambda, t)
    }

    /// Largest rescaled time this point was prepared for, in physical units.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Time at which the asymptotic semigroup is evaluated.
    fn semigroup_time(&self, t: f64) -> f64 {
        if self.lambda > 0.0 {
            t
        } else {
            0.0
        }
    }

    /// Exact `W_lambda(t) = V(t / lambda^2)`.
    pub fn exact(&self, t: f64) -> Result<Matrix<f64>> {
        let tp = self.physical_time(t);
        match &self.source {
            ExactSource::Auxiliary(p) => p.at(tp),
            ExactSource::Grid(p) => p.at(tp),
        }
    }

    /// `exp(L t) r`.
    pub fn asymptotic(&self, t: f64) -> Matrix<f64> {
        self.data.propagator(self.semigroup_time(t))
    }

    /// `exp(L0 t)` with the zeroth-order generator.
    pub fn zeroth_order(&self, t: f64) -> Matrix<f64> {
        matrix_exp(self.zeroth.generator(), self.semigroup_time(t))
    }
}

fn physical_time(lambda: f64, t: f64) -> f64 {
    if lambda > 0.0 {
        t / (lambda * lambda)
    } else {
        t
    }
}

impl PropagatorSource<f64> for LambdaPoint {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn at(&self, t: f64) -> Result<Matrix<f64>> {
        self.exact(t)
    }
}
