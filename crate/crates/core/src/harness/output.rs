//! Plot-ready CSV tables. Every float is written with 17 significant digits
//! so that re-parsing reproduces it bitwise; complex values are split into
//! `_re` / `_im` columns.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::asymptotics::{asymptotic_density, markov_then_renormalize};
use crate::correlations::{
    exact_three_time, exact_two_time, markov_three_time, markov_two_time, renormalized_two_time, DipoleQuad,
};
use crate::error::Result;
use crate::exact_dynamics::{evolve_density, DensityBlocks, Semigroup};
use crate::harness::point::LambdaPoint;
use crate::harness::scenario::Scenario;
use crate::harness::sweep::ScalingReport;
use crate::Complex64;

/// Round-trip formatting: 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Numeric table with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_f64(x)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| crate::error::Error::Parse(format!("bad number {f:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }
}

fn complex_columns(header: &mut Vec<String>, name: &str) {
    header.push(format!("{name}_re"));
    header.push(format!("{name}_im"));
}

fn push_complex(row: &mut Vec<f64>, z: Complex64) {
    row.push(z.re);
    row.push(z.im);
}

fn density_columns(header: &mut Vec<String>, prefix: &str, n: usize) {
    header.push(format!("{prefix}_gg"));
    for i in 0..n {
        complex_columns(header, &format!("{prefix}_eg{i}"));
    }
    for i in 0..n {
        for j in 0..n {
            complex_columns(header, &format!("{prefix}_ee{i}{j}"));
        }
    }
    header.push(format!("{prefix}_excited_population"));
}

fn push_density(row: &mut Vec<f64>, rho: &DensityBlocks<f64>) {
    row.push(rho.gg);
    for &z in &rho.eg {
        push_complex(row, z);
    }
    for &z in rho.ee.as_slice() {
        push_complex(row, z);
    }
    row.push(rho.excited_population());
}

/// Sidecar path `<stem>.meta.json` next to a CSV file.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Writes `lambda,error` and a JSON sidecar with the fit.
pub fn emit_report(report: &ScalingReport, scenario_name: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut table = Table::new(vec!["lambda".into(), "error".into()]);
    for (&l, &e) in report.lambdas.iter().zip(&report.errors) {
        table.rows.push(vec![l, e]);
    }
    table.write_csv(path)?;
    let (lo, hi) = report.quantity.expected_slope();
    let meta = json!({
        "scenario": scenario_name,
        "quantity": report.quantity.name(),
        "fitted_slope": report.fitted_slope,
        "fit_residual": report.fit_residual,
        "expected_slope_min": lo,
        "expected_slope_max": if hi.is_finite() { json!(hi) } else { json!(null) },
        "within_expected": report.within_expected(),
        "eval_times": report.eval_times,
        "norm": "spectral",
    });
    fs::write(
        meta_path(path),
        serde_json::to_string_pretty(&meta).map_err(std::io::Error::other)? + "\n",
    )?;
    Ok(())
}

/// Exact, asymptotic and reverse-order densities at the sample times of
/// every coupling.
pub fn simulate_table(scenario: &Scenario) -> Result<Table> {
    let n = scenario.dim();
    let mut header = vec!["lambda".to_string(), "t".into(), "t_physical".into()];
    density_columns(&mut header, "exact", n);
    density_columns(&mut header, "asymptotic", n);
    density_columns(&mut header, "reverse", n);
    let mut table = Table::new(header);
    let times = scenario.time_grid.sample_times();
    for &lambda in &scenario.lambdas {
        let point = LambdaPoint::new(scenario, lambda, scenario.time_grid.t_max)?;
        let rho0 = &scenario.initial_state;
        for &t in &times {
            let mut row = vec![lambda, t, point.physical_time(t)];
            push_density(&mut row, &evolve_density(rho0, &point, t)?);
            let st = if lambda > 0.0 { t } else { 0.0 };
            push_density(&mut row, &asymptotic_density(rho0, &point.data, st)?);
            push_density(&mut row, &markov_then_renormalize(rho0, &point.data, st)?);
            table.rows.push(row);
        }
    }
    Ok(table)
}

/// Two-time correlations for every ordered dipole pair, `t1` over the
/// evaluation times and `t2 - t1` over the sample grid.
pub fn two_time_table(scenario: &Scenario) -> Result<Table> {
    let mut header = vec!["lambda".to_string(), "h1".into(), "h2".into(), "t1".into(), "t2".into()];
    for name in [
        "markov",
        "exact",
        "renormalized",
        "asymptotic_markov",
        "asymptotic_exact",
    ] {
        complex_columns(&mut header, name);
    }
    let mut table = Table::new(header);
    let t1_max = scenario.eval_times.iter().copied().fold(0.0, f64::max);
    let offsets = scenario.time_grid.sample_times();
    for &lambda in &scenario.lambdas {
        let point = LambdaPoint::new(scenario, lambda, t1_max + scenario.time_grid.t_max)?;
        let r = point.data.r();
        let markov_limit = Semigroup::pure(point.data.generator().clone())?;
        let exact_limit = point.data.semigroup()?;
        for (i, h1) in scenario.dipoles.iter().enumerate() {
            for (j, h2) in scenario.dipoles.iter().enumerate() {
                for &t1 in &scenario.eval_times {
                    for &s in &offsets {
                        let t2 = t1 + s;
                        let mut row = vec![lambda, i as f64, j as f64, t1, t2];
                        push_complex(&mut row, markov_two_time(&point, h1, h2, t1, t2)?);
                        push_complex(&mut row, exact_two_time(&point, h1, h2, t1, t2)?);
                        push_complex(&mut row, renormalized_two_time(&point, r, h1, h2, t1, t2)?);
                        push_complex(&mut row, exact_two_time(&markov_limit, h1, h2, 0.0, s)?);
                        push_complex(&mut row, exact_two_time(&exact_limit, h1, h2, 0.0, s)?);
                        table.rows.push(row);
                    }
                }
            }
        }
    }
    Ok(table)
}

/// Three-time correlations with `h_k = dipoles[k mod len]`, `tau` over
/// `{0} + eval_times`, `T = t_min` and `t` over the sample grid.
pub fn three_time_table(scenario: &Scenario) -> Result<Table> {
    let mut header = vec!["lambda".to_string(), "tau".into(), "T".into(), "t".into()];
    complex_columns(&mut header, "markov");
    complex_columns(&mut header, "exact");
    let mut table = Table::new(header);
    let d = &scenario.dipoles;
    let quad = DipoleQuad {
        h1: &d[0],
        h2: &d[1 % d.len()],
        h3: &d[2 % d.len()],
        h4: &d[3 % d.len()],
    };
    let big_t = scenario.time_grid.t_min;
    let taus: Vec<f64> = std::iter::once(0.0)
        .chain(scenario.eval_times.iter().copied())
        .collect();
    let tau_max = taus.iter().copied().fold(0.0, f64::max);
    let ts = scenario.time_grid.sample_times();
    for &lambda in &scenario.lambdas {
        let point = LambdaPoint::new(scenario, lambda, tau_max + big_t + scenario.time_grid.t_max)?;
        for &tau in &taus {
            for &t in &ts {
                let mut row = vec![lambda, tau, big_t, t];
                push_complex(&mut row, markov_three_time(&point, quad, tau, big_t, t)?);
                push_complex(&mut row, exact_three_time(&point, quad, tau, big_t, t)?);
                table.rows.push(row);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        Table::new(vec!["t".into(), "x_re".into(), "x_im".into()])
            .write_csv(&path)
            .unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "t,x_re,x_im\n");
        let back = Table::read_csv(&path).unwrap();
        assert!(back.rows.is_empty());
    }
}
