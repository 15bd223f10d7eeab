//! Parameter sweeps over an `(a, λ)` grid with CSV output.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{check_bounds, theorem1_bounds, X_MAX_CAP};
use crate::certificates::{certify_cycle, verify_vg_trapping};
use crate::cycle::{find_cycle_with, tau_measures, CycleOptions};
use crate::error::{Error, Result};
use crate::integrator::StepControl;
use crate::model::Params;

pub const CSV_HEADER: &str = "a,lambda,status,x_max,s_max,ln_x_min,ln_s_min,tau_s,tau_x,period,iterations,\
ln_xmin_lo,ln_xmin_hi,ln_smin_lo,ln_smin_hi,xmax_hi_vg,cert_passed,cert_total";

/// Axis values of the default grid.
pub const DEFAULT_AXIS: [f64; 10] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.099];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Cycle extrema, period and τ measures.
    Cycle,
    /// Cycle columns plus the bracket endpoints.
    Bounds,
    /// Bounds plus the certificate pass count.
    #[default]
    Certify,
    /// Same columns as `cycle`.
    Tau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub a_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub mode: SweepMode,
    pub control: StepControl,
    pub cycle: CycleOptions,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            a_values: DEFAULT_AXIS.to_vec(),
            lambda_values: DEFAULT_AXIS.to_vec(),
            mode: SweepMode::default(),
            control: StepControl::default(),
            cycle: CycleOptions::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, vals) in [("a", &self.a_values), ("lambda", &self.lambda_values)] {
            if vals.is_empty() {
                return Err(Error::Config(format!("{name} grid is empty")));
            }
            if vals.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Config(format!("{name} grid must be strictly increasing")));
            }
        }
        for &a in &self.a_values {
            for &l in &self.lambda_values {
                Params::new(a, l)?;
            }
        }
        self.control.validate()
    }

    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.a_values
            .iter()
            .flat_map(|&a| self.lambda_values.iter().map(move |&l| (a, l)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    NotConverged,
    Error,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NotConverged => "not_converged",
            CellStatus::Error => "error",
        }
    }
}

/// One grid cell. Fields not produced by the sweep mode, or by a failed cell, are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub a: f64,
    pub lambda: f64,
    pub status: CellStatus,
    pub x_max: Option<f64>,
    pub s_max: Option<f64>,
    pub ln_x_min: Option<f64>,
    pub ln_s_min: Option<f64>,
    pub tau_s: Option<f64>,
    pub tau_x: Option<f64>,
    pub period: Option<f64>,
    pub iterations: Option<usize>,
    pub ln_xmin_lo: Option<f64>,
    pub ln_xmin_hi: Option<f64>,
    pub ln_smin_lo: Option<f64>,
    pub ln_smin_hi: Option<f64>,
    pub xmax_hi_vg: Option<f64>,
    pub cert_passed: Option<usize>,
    pub cert_total: Option<usize>,
    /// Error message of a failed cell; not written to CSV.
    pub message: Option<String>,
}

impl SweepRecord {
    fn empty(a: f64, lambda: f64, status: CellStatus) -> Self {
        SweepRecord {
            a,
            lambda,
            status,
            x_max: None,
            s_max: None,
            ln_x_min: None,
            ln_s_min: None,
            tau_s: None,
            tau_x: None,
            period: None,
            iterations: None,
            ln_xmin_lo: None,
            ln_xmin_hi: None,
            ln_smin_lo: None,
            ln_smin_hi: None,
            xmax_hi_vg: None,
            cert_passed: None,
            cert_total: None,
            message: None,
        }
    }

    /// True when every certificate column that was computed is fully passed.
    pub fn certified(&self) -> bool {
        match (self.cert_passed, self.cert_total) {
            (Some(p), Some(t)) => p == t,
            _ => true,
        }
    }
}

/// Compute a single cell.
pub fn run_cell(a: f64, lambda: f64, spec: &SweepSpec) -> SweepRecord {
    match compute_cell(a, lambda, spec) {
        Ok(r) => r,
        Err(e) => {
            let status = match e {
                Error::NotConverged { .. } => CellStatus::NotConverged,
                _ => CellStatus::Error,
            };
            SweepRecord {
                message: Some(e.to_string()),
                ..SweepRecord::empty(a, lambda, status)
            }
        }
    }
}

fn compute_cell(a: f64, lambda: f64, spec: &SweepSpec) -> Result<SweepRecord> {
    let p = Params::new(a, lambda)?;
    let c = find_cycle_with(&p, &spec.control, &spec.cycle)?;
    let tm = tau_measures(&c, &p);
    let mut r = SweepRecord {
        x_max: Some(c.x_max),
        s_max: Some(c.s_max),
        ln_x_min: Some(c.ln_x_min),
        ln_s_min: Some(c.ln_s_min),
        tau_s: Some(tm.tau_s),
        tau_x: Some(tm.tau_x),
        period: Some(c.period),
        iterations: Some(c.iterations),
        ..SweepRecord::empty(a, lambda, CellStatus::Ok)
    };
    if matches!(spec.mode, SweepMode::Bounds | SweepMode::Certify) {
        let b = theorem1_bounds(&p, c.x_max.min(X_MAX_CAP))?;
        r.ln_xmin_lo = Some(b.ln_x_min.lo);
        r.ln_xmin_hi = Some(b.ln_x_min.hi);
        r.ln_smin_lo = Some(b.ln_s_min.lo);
        r.ln_smin_hi = Some(b.ln_s_min.hi);
        r.xmax_hi_vg = Some(b.x_max_hi_vg);
        if spec.mode == SweepMode::Certify {
            let mut report = certify_cycle(&c, &c.crossings, &p).merge(check_bounds(&c, &b));
            report.entries.push(verify_vg_trapping(&p, 1000));
            r.cert_passed = Some(report.passed());
            r.cert_total = Some(report.total());
        }
    }
    Ok(r)
}

/// Run every cell of `spec`. Records come back row-major (a outer, λ inner).
///
/// `threads = Some(1)` forces sequential execution; `None` lets the pool pick.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let cells = spec.cells();
    if threads == Some(1) {
        return Ok(run_serial(&cells, spec));
    }
    run_parallel(&cells, spec, threads)
}

fn run_serial(cells: &[(f64, f64)], spec: &SweepSpec) -> Vec<SweepRecord> {
    cells.iter().map(|&(a, l)| run_cell(a, l, spec)).collect()
}

#[cfg(feature = "parallel")]
fn run_parallel(cells: &[(f64, f64)], spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRecord>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(|&(a, l)| run_cell(a, l, spec)).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(cells: &[(f64, f64)], spec: &SweepSpec, _threads: Option<usize>) -> Result<Vec<SweepRecord>> {
    Ok(run_serial(cells, spec))
}

fn push_f(line: &mut String, v: Option<f64>) {
    line.push(',');
    if let Some(v) = v {
        let _ = write!(line, "{v:.16e}");
    }
}

fn push_u(line: &mut String, v: Option<usize>) {
    line.push(',');
    if let Some(v) = v {
        let _ = write!(line, "{v}");
    }
}

pub fn csv_line(r: &SweepRecord) -> String {
    let mut line = format!("{:.16e},{:.16e},{}", r.a, r.lambda, r.status.as_str());
    for v in [r.x_max, r.s_max, r.ln_x_min, r.ln_s_min, r.tau_s, r.tau_x, r.period] {
        push_f(&mut line, v);
    }
    push_u(&mut line, r.iterations);
    for v in [r.ln_xmin_lo, r.ln_xmin_hi, r.ln_smin_lo, r.ln_smin_hi, r.xmax_hi_vg] {
        push_f(&mut line, v);
    }
    push_u(&mut line, r.cert_passed);
    push_u(&mut line, r.cert_total);
    line
}

pub fn write_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", csv_line(r))?;
    }
    w.flush()
}

pub fn to_csv_string(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}
