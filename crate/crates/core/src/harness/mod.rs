//! Scenario files, lambda sweeps, invariant checks and CSV emission behind
//! the `rwa-markov` command line tool. Fixed to `f64`.

mod output;
mod point;
mod scenario;
mod sweep;
mod validate;

pub use output::{emit_report, format_f64, meta_path, simulate_table, three_time_table, two_time_table, Table};
pub use point::LambdaPoint;
pub use scenario::{
    load_scenario, parse_scenario, random_scenario, random_scenario_file, to_toml, ComplexMatrixSpec,
    ComplexScalarSpec, ComplexVectorSpec, EngineChoice, InitialStateSpec, ModelSpec, Product, Scenario, ScenarioFile,
    TimeGrid, TimeGridSpec, DEFAULT_EVAL_TIMES, DEFAULT_LAMBDA_STAR, DEFAULT_SAMPLES,
};
pub use sweep::{
    fit_log_log, markov_gap, point_error, run_sweep, Quantity, ScalingReport, FIT_FLOOR, MIN_SWEEP_POINTS,
};
pub use validate::{
    quadrature_tolerance, semigroup_equivalence_gap, validate, Check, ValidationReport, CROSS_CHECK_HORIZON,
    SOLVER_TOLERANCE,
};
