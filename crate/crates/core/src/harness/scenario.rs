//! Scenario files: a single TOML document describing the model, the bath,
//! the couplings to sweep and what to compute.
//!
//! ```toml
//! name = "reference-n2"
//! lambdas = [0.2, 0.1, 0.05]
//!
//! [model]
//! h0 = { re = [[1.0, 0.0], [0.0, 2.0]] }
//! h2 = { re = [[0.0, 1.0], [1.0, 0.0]] }
//!
//! [[kernel]]
//! a_re = 1.0
//! kappa = 1.0
//!
//! [time_grid]
//! t_min = 0.5
//! t_max = 2.0
//! step = 0.001
//! ```
//!
//! Complex data is written as `{ re = ..., im = ... }` with `im` optional.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bath_kernel::{BathKernel, KernelTermRecord};
use crate::correlations::DipoleVector;
use crate::error::{Error, Result};
use crate::exact_dynamics::{check_step, DensityBlocks, SystemModel, DEFAULT_HORIZON_CAP};
use crate::harness::sweep::Quantity;
use crate::matrix::Matrix;
use crate::matrix_calculus::HermitianMatrix;
use crate::random::{random_density_matrix, random_hermitian, random_vector};
use crate::scalar::c;
use crate::{Complex64, Matrix64};

/// Default evaluation times (rescaled units) for sweeps.
pub const DEFAULT_EVAL_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
/// Default number of output samples on `[0, t_max]`.
pub const DEFAULT_SAMPLES: usize = 41;
/// Default coupling below which the generator must be dissipative.
pub const DEFAULT_LAMBDA_STAR: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexScalarSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVectorSpec {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub h0: ComplexMatrixSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<ComplexMatrixSpec>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Either explicit blocks or a pure state `psi0 |0> + |psi>`.
#[derive(Clone, Debug, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eg: Option<ComplexVectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ee: Option<ComplexMatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi0: Option<ComplexScalarSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<ComplexVectorSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    /// Exact exponential of the auxiliary-mode generator.
    #[default]
    Auxiliary,
    /// Trapezoidal quadrature of the memory equation with `time_grid.step`.
    Quadrature,
}

/// Products a scenario asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Product {
    Density,
    TwoTime,
    ThreeTime,
    Gksl,
    PropagatorError,
    ZerothOrderError,
    CommutationError,
    CorrelationRenormError,
    ReverseOrderError,
}

impl Product {
    pub const ALL: [Product; 9] = [
        Product::Density,
        Product::TwoTime,
        Product::ThreeTime,
        Product::Gksl,
        Product::PropagatorError,
        Product::ZerothOrderError,
        Product::CommutationError,
        Product::CorrelationRenormError,
        Product::ReverseOrderError,
    ];

    pub fn quantity(self) -> Option<Quantity> {
        match self {
            Product::PropagatorError => Some(Quantity::PropagatorError),
            Product::ZerothOrderError => Some(Quantity::ZerothOrderError),
            Product::CommutationError => Some(Quantity::CommutationError),
            Product::CorrelationRenormError => Some(Quantity::CorrelationRenormError),
            Product::ReverseOrderError => Some(Quantity::ReverseOrderError),
            _ => None,
        }
    }
}

/// On-disk form of a scenario.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub model: ModelSpec,
    pub kernel: Vec<KernelTermRecord>,
    pub lambdas: Vec<f64>,
    pub time_grid: TimeGridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dipoles: Vec<ComplexVectorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<Product>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    /// Initial-layer cutoff, rescaled units.
    pub t_min: f64,
    /// Final output time, rescaled units.
    pub t_max: f64,
    /// Physical step of the quadrature solver.
    pub step: f64,
    /// Output samples on `[0, t_max]`.
    pub samples: usize,
}

impl TimeGrid {
    /// Evenly spaced rescaled output times `0, ..., t_max`.
    pub fn sample_times(&self) -> Vec<f64> {
        if self.samples <= 1 {
            return vec![self.t_max];
        }
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(|k| self.t_max * k as f64 / last).collect()
    }
}

/// Validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// `H0`, `H2`; the coupling stored here is zero, see [`Scenario::model`].
    pub model: SystemModel<f64>,
    pub kernel: BathKernel<f64>,
    pub lambdas: Vec<f64>,
    pub time_grid: TimeGrid,
    pub eval_times: Vec<f64>,
    pub initial_state: DensityBlocks<f64>,
    pub dipoles: Vec<DipoleVector<f64>>,
    pub outputs: Vec<Product>,
    pub engine: EngineChoice,
    pub horizon_cap: f64,
    pub lambda_star: f64,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// The model at coupling `lambda`.
    pub fn model(&self, lambda: f64) -> Result<SystemModel<f64>> {
        self.model.with_lambda(lambda)
    }

    pub fn wants(&self, product: Product) -> bool {
        self.outputs.contains(&product)
    }

    /// Sweep quantities requested through `outputs`.
    pub fn quantities(&self) -> Vec<Quantity> {
        self.outputs.iter().filter_map(|p| p.quantity()).collect()
    }

    /// Overrides the initial-layer cutoff; evaluation times below it are dropped.
    pub fn set_t_min(&mut self, t_min: f64) -> Result<()> {
        if !(t_min >= 0.0) || !t_min.is_finite() {
            return Err(Error::validation(
                "time_grid.t_min",
                format!("must be finite and >= 0, got {t_min}"),
            ));
        }
        self.time_grid.t_min = t_min;
        self.eval_times.retain(|&t| t >= t_min);
        if self.eval_times.is_empty() {
            self.eval_times.push(t_min.max(f64::MIN_POSITIVE));
        }
        Ok(())
    }

    pub fn set_step(&mut self, step: f64) -> Result<()> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::validation(
                "time_grid.step",
                format!("must be finite and > 0, got {step}"),
            ));
        }
        self.time_grid.step = step;
        Ok(())
    }

    pub fn set_horizon_cap(&mut self, cap: f64) -> Result<()> {
        if !(cap > 0.0) {
            return Err(Error::validation("horizon_cap", format!("must be > 0, got {cap}")));
        }
        self.horizon_cap = cap;
        Ok(())
    }

    /// Step-size preconditions of the quadrature solver at every coupling.
    pub fn check_steps(&self) -> Result<()> {
        for &lambda in &self.lambdas {
            check_step(&self.model(lambda)?, &self.kernel, self.time_grid.step)?;
        }
        Ok(())
    }
}

fn complex_vector(spec: &ComplexVectorSpec, field: &str) -> Result<Vec<Complex64>> {
    let im = match &spec.im {
        Some(im) if im.len() != spec.re.len() => {
            return Err(Error::validation(
                field,
                format!("re has {} entries but im has {}", spec.re.len(), im.len()),
            ))
        }
        Some(im) => im.clone(),
        None => vec![0.0; spec.re.len()],
    };
    let out: Vec<Complex64> = spec.re.iter().zip(&im).map(|(&a, &b)| c(a, b)).collect();
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::validation(field, "entries must be finite"));
    }
    Ok(out)
}

fn complex_matrix(spec: &ComplexMatrixSpec, field: &str) -> Result<Matrix64> {
    let rows = spec.re.len();
    let im = match &spec.im {
        Some(im) => {
            if im.len() != rows || im.iter().zip(&spec.re).any(|(a, b)| a.len() != b.len()) {
                return Err(Error::validation(field, "re and im must have the same shape"));
            }
            im.clone()
        }
        None => spec.re.iter().map(|r| vec![0.0; r.len()]).collect(),
    };
    let data: Vec<Vec<Complex64>> = spec
        .re
        .iter()
        .zip(&im)
        .map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| c(a, b)).collect())
        .collect();
    let m = Matrix::from_rows(&data).map_err(|e| Error::validation(field, e.to_string()))?;
    if !m.is_finite() {
        return Err(Error::validation(field, "entries must be finite"));
    }
    Ok(m)
}

fn hermitian(spec: &ComplexMatrixSpec, field: &str) -> Result<HermitianMatrix<f64>> {
    let m = complex_matrix(spec, field)?;
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::validation(
            field,
            format!("must be a nonempty square matrix, got {}x{}", m.rows(), m.cols()),
        ));
    }
    HermitianMatrix::new(m).map_err(|e| Error::validation(field, e.to_string()))
}

fn initial_state(spec: Option<&InitialStateSpec>, n: usize) -> Result<DensityBlocks<f64>> {
    const FIELD: &str = "initial_state";
    let Some(spec) = spec else {
        // default: first excited level fully populated
        let mut psi = vec![c(0.0, 0.0); n];
        psi[0] = c(1.0, 0.0);
        return DensityBlocks::pure(c(0.0, 0.0), &psi);
    };
    let blocks = spec.gg.is_some() || spec.eg.is_some() || spec.ee.is_some();
    let pure = spec.psi0.is_some() || spec.psi.is_some();
    match (blocks, pure) {
        (true, true) => Err(Error::validation(FIELD, "give either gg/eg/ee or psi0/psi, not both")),
        (false, false) => Err(Error::validation(FIELD, "empty table; give gg/eg/ee or psi0/psi")),
        (false, true) => {
            let psi = spec
                .psi
                .as_ref()
                .ok_or_else(|| Error::validation("initial_state.psi", "missing excited amplitudes"))?;
            let psi = complex_vector(psi, "initial_state.psi")?;
            if psi.len() != n {
                return Err(Error::validation(
                    "initial_state.psi",
                    format!("expected {n} entries, got {}", psi.len()),
                ));
            }
            let psi0 = spec.psi0.as_ref().map_or(c(0.0, 0.0), |z| c(z.re, z.im));
            DensityBlocks::pure(psi0, &psi).map_err(|e| Error::validation(FIELD, e.to_string()))
        }
        (true, false) => {
            let gg = spec
                .gg
                .ok_or_else(|| Error::validation("initial_state.gg", "missing"))?;
            let eg = match &spec.eg {
                Some(v) => complex_vector(v, "initial_state.eg")?,
                None => vec![c(0.0, 0.0); n],
            };
            let ee = match &spec.ee {
                Some(m) => complex_matrix(m, "initial_state.ee")?,
                None => Matrix::zeros(n, n),
            };
            if eg.len() != n || ee.rows() != n || ee.cols() != n {
                return Err(Error::validation(
                    FIELD,
                    format!("blocks must match the excited dimension {n}"),
                ));
            }
            DensityBlocks::physical(gg, eg, ee)
        }
    }
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<Scenario> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "must be nonempty"));
        }
        let h0 = hermitian(&self.model.h0, "model.h0")?;
        let n = h0.dim();
        let h2 = match &self.model.h2 {
            Some(spec) => hermitian(spec, "model.h2")?,
            None => HermitianMatrix::zeros(n),
        };
        if h2.dim() != n {
            return Err(Error::validation(
                "model.h2",
                format!("must be {n}x{n} like model.h0, got {0}x{0}", h2.dim()),
            ));
        }
        let model = SystemModel::new(h0, h2, 0.0)?;
        let kernel = BathKernel::from_records(&self.kernel)?;

        if self.lambdas.is_empty() {
            return Err(Error::validation("lambdas", "must list at least one coupling"));
        }
        for &l in &self.lambdas {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::validation(
                    "lambdas",
                    format!("every coupling must lie in [0, 1], got {l}"),
                ));
            }
        }

        let g = &self.time_grid;
        if !(g.t_min >= 0.0) || !g.t_min.is_finite() {
            return Err(Error::validation(
                "time_grid.t_min",
                format!("must be finite and >= 0, got {}", g.t_min),
            ));
        }
        if !(g.t_max > 0.0) || !g.t_max.is_finite() {
            return Err(Error::validation(
                "time_grid.t_max",
                format!("must be finite and > 0, got {}", g.t_max),
            ));
        }
        if !(g.step > 0.0) || !g.step.is_finite() {
            return Err(Error::validation(
                "time_grid.step",
                format!("must be finite and > 0, got {}", g.step),
            ));
        }
        let samples = g.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(Error::validation("time_grid.samples", "must be >= 1"));
        }
        let time_grid = TimeGrid {
            t_min: g.t_min,
            t_max: g.t_max,
            step: g.step,
            samples,
        };

        let eval_times = self.eval_times.clone().unwrap_or_else(|| DEFAULT_EVAL_TIMES.to_vec());
        if eval_times.is_empty() {
            return Err(Error::validation("eval_times", "must be nonempty"));
        }
        if let Some(&t) = eval_times
            .iter()
            .find(|&&t| !(t >= g.t_min) || !t.is_finite() || t <= 0.0)
        {
            return Err(Error::validation(
                "eval_times",
                format!(
                    "every time must be positive, finite and >= t_min = {}, got {t}",
                    g.t_min
                ),
            ));
        }

        let initial_state = initial_state(self.initial_state.as_ref(), n)?;

        let dipoles = if self.dipoles.is_empty() {
            (0..n).map(|k| DipoleVector::basis(n, k)).collect()
        } else {
            self.dipoles
                .iter()
                .enumerate()
                .map(|(k, spec)| {
                    let field = format!("dipoles[{k}]");
                    let h = complex_vector(spec, &field)?;
                    if h.len() != n {
                        return Err(Error::validation(
                            field,
                            format!("expected {n} entries, got {}", h.len()),
                        ));
                    }
                    DipoleVector::new(h).map_err(|e| Error::validation(field, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?
        };

        let outputs = if self.outputs.is_empty() {
            Product::ALL.to_vec()
        } else {
            let mut seen = Vec::new();
            for &p in &self.outputs {
                if !seen.contains(&p) {
                    seen.push(p);
                }
            }
            seen
        };

        let horizon_cap = self.horizon_cap.unwrap_or(DEFAULT_HORIZON_CAP);
        if !(horizon_cap > 0.0) {
            return Err(Error::validation(
                "horizon_cap",
                format!("must be > 0, got {horizon_cap}"),
            ));
        }
        let lambda_star = self.lambda_star.unwrap_or(DEFAULT_LAMBDA_STAR);
        if !(lambda_star >= 0.0) || !lambda_star.is_finite() {
            return Err(Error::validation(
                "lambda_star",
                format!("must be finite and >= 0, got {lambda_star}"),
            ));
        }

        Ok(Scenario {
            name: self.name.clone(),
            model,
            kernel,
            lambdas: self.lambdas.clone(),
            time_grid,
            eval_times,
            initial_state,
            dipoles,
            outputs,
            engine: self.engine.unwrap_or_default(),
            horizon_cap,
            lambda_star,
        })
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.validate()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn matrix_spec(m: &Matrix64) -> ComplexMatrixSpec {
    let rows = |f: fn(&Complex64) -> f64| (0..m.rows()).map(|i| m.row(i).iter().map(f).collect()).collect();
    ComplexMatrixSpec {
        re: rows(|z| z.re),
        im: Some(rows(|z| z.im)),
    }
}

fn vector_spec(v: &[Complex64]) -> ComplexVectorSpec {
    ComplexVectorSpec {
        re: v.iter().map(|z| z.re).collect(),
        im: Some(v.iter().map(|z| z.im).collect()),
    }
}

/// Random `n`-level scenario for property testing. `H0` gets a repeated
/// eigenvalue whenever `n >= 3`; all kernel decay rates lie in `[0.5, 2]`.
pub fn random_scenario_file(seed: u64, n: usize) -> ScenarioFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if n >= 3 {
        spectrum[1] = spectrum[0];
    }
    let q = crate::random::random_unitary::<f64, _>(&mut rng, n);
    let h0 = &(&q * &Matrix::diag_real(&spectrum)) * &q.adjoint();
    let h2 = random_hermitian::<f64, _>(&mut rng, n).into_matrix().scale_real(0.5);
    let terms = rng.gen_range(1..=2);
    let kernel = (0..terms)
        .map(|_| KernelTermRecord {
            a_re: rng.gen_range(0.2..1.0),
            a_im: rng.gen_range(-0.2..0.2),
            kappa: rng.gen_range(0.5..2.0),
            omega: rng.gen_range(-1.0..1.0),
        })
        .collect();
    let rho = random_density_matrix::<f64, _>(&mut rng, n + 1);
    let blocks = DensityBlocks::from_full(&rho).expect("square");
    let dipoles = (0..2)
        .map(|_| vector_spec(&random_vector::<f64, _>(&mut rng, n)))
        .collect();
    ScenarioFile {
        name: format!("random-n{n}-seed{seed}"),
        model: ModelSpec {
            h0: matrix_spec(&h0.hermitian_part()),
            h2: Some(matrix_spec(&h2.hermitian_part())),
        },
        kernel,
        lambdas: vec![0.2, 0.1, 0.05],
        time_grid: TimeGridSpec {
            t_min: 0.5,
            t_max: 2.0,
            step: 1e-3,
            samples: None,
        },
        initial_state: Some(InitialStateSpec {
            gg: Some(blocks.gg),
            eg: Some(vector_spec(&blocks.eg)),
            ee: Some(matrix_spec(&blocks.ee)),
            ..Default::default()
        }),
        dipoles,
        outputs: Vec::new(),
        eval_times: None,
        engine: None,
        horizon_cap: None,
        lambda_star: None,
    }
}

pub fn random_scenario(seed: u64, n: usize) -> Result<Scenario> {
    random_scenario_file(seed, n).validate()
}

/// Serializes a scenario file back to TOML.
pub fn to_toml(file: &ScenarioFile) -> Result<String> {
    toml::to_string(file).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"
name = "scalar"
lambdas = [1.0]

[model]
h0 = { re = [[0.0]] }

[[kernel]]
a_re = 1.0
kappa = 1.0

[time_grid]
t_min = 0.0
t_max = 10.0
step = 0.001
"#;

    #[test]
    fn minimal_scalar_file() {
        let s = parse_scenario(SCALAR).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.kernel.terms().len(), 1);
        assert_eq!(s.lambdas, vec![1.0]);
        assert_eq!(s.eval_times, DEFAULT_EVAL_TIMES.to_vec());
        assert_eq!(s.outputs.len(), Product::ALL.len());
        assert!((s.initial_state.excited_population() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_kappa_names_field() {
        let text = SCALAR.replace("kappa = 1.0", "kappa = 0.0");
        match parse_scenario(&text) {
            Err(Error::Validation { field, .. }) => assert!(field.ends_with("kappa"), "{field}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_file_is_parse_error() {
        assert!(matches!(parse_scenario("name = [unclosed"), Err(Error::Parse(_))));
        let unknown = SCALAR.replace("lambdas", "lambda_values");
        assert!(matches!(parse_scenario(&unknown), Err(Error::Parse(_))));
    }

    #[test]
    fn field_violations() {
        let cases = [
            (SCALAR.replace("lambdas = [1.0]", "lambdas = [1.5]"), "lambdas"),
            (SCALAR.replace("t_max = 10.0", "t_max = -1.0"), "time_grid.t_max"),
            (
                SCALAR.replace("h0 = { re = [[0.0]] }", "h0 = { re = [[0.0, 1.0]] }"),
                "model.h0",
            ),
            (
                SCALAR.replace("h0 = { re = [[0.0]] }", "h0 = { re = [[0.0, 1.0], [0.0, 0.0]] }"),
                "model.h0",
            ),
            (
                format!("{SCALAR}\n[initial_state]\ngg = 0.7\nee = {{ re = [[0.7]] }}\n"),
                "initial_state",
            ),
            (format!("{SCALAR}\n[[dipoles]]\nre = [1.0, 2.0]\n"), "dipoles[0]"),
            (
                format!("eval_times = [0.1]\n{SCALAR}").replace("t_min = 0.0", "t_min = 0.5"),
                "eval_times",
            ),
        ];
        for (text, expected) in cases {
            match parse_scenario(&text) {
                Err(Error::Validation { field, .. }) => assert_eq!(field, expected),
                other => panic!("{expected}: got {other:?}"),
            }
        }
    }

    #[test]
    fn pure_state_and_dipoles() {
        let text = format!(
            "outputs = [\"density\", \"propagator_error\"]\n{SCALAR}\n[initial_state]\npsi0 = {{ re = 1.0 }}\npsi = {{ re = [1.0] }}\n\n[[dipoles]]\nre = [2.0]\nim = [1.0]\n"
        );
        let s = parse_scenario(&text).unwrap();
        assert!((s.initial_state.gg - 0.5).abs() < 1e-15);
        assert_eq!(s.dipoles[0].as_slice(), &[c(2.0, 1.0)]);
        assert_eq!(s.outputs, vec![Product::Density, Product::PropagatorError]);
        assert_eq!(s.quantities(), vec![Quantity::PropagatorError]);
    }

    #[test]
    fn random_scenarios_round_trip() {
        for seed in 0..5 {
            let file = random_scenario_file(seed, 3);
            let text = to_toml(&file).unwrap();
            let back: ScenarioFile = toml::from_str(&text).unwrap();
            assert_eq!(back, file);
            let s = file.validate().unwrap();
            let spectrum = crate::matrix_calculus::spectral_decompose(s.model.h0()).unwrap();
            assert_eq!(spectrum.multiplicities().iter().max(), Some(&2));
        }
    }

    #[test]
    fn overrides() {
        let mut s = parse_scenario(SCALAR).unwrap();
        s.set_t_min(0.8).unwrap();
        assert_eq!(s.eval_times, vec![1.0, 2.0]);
        assert!(s.set_step(0.0).is_err());
        s.set_step(0.2).unwrap();
        assert!(matches!(s.check_steps(), Err(Error::StepTooCoarse(_))));
    }
}
