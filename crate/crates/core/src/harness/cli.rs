//! `rmac` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{check_bounds, corollary1_bounds, theorem1_bounds, X_MAX_CAP};
use crate::certificates::{certify_cycle, verify_f_transversality, verify_vg_trapping, CertificateReport};
use crate::cycle::{find_cycle_with, tau_measures, CycleOptions, LimitCycleSummary};
use crate::error::{Error, Result};
use crate::integrator::trace;
use crate::model::{LogState, Params};

use super::config::{Format, Settings};
use super::sweep::{run_sweep, write_csv, CellStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rmac", version, about = "Scaled Rosenzweig-MacArthur limit cycle: simulation, bounds and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write `tau,x,s,ln_x,ln_s` as CSV.
    Simulate(CommonArgs),
    /// Locate the limit cycle and print its summary.
    Cycle(CommonArgs),
    /// Print the extremum brackets.
    Bounds(CommonArgs),
    /// Run every certificate against the computed cycle.
    Certify(CommonArgs),
    /// Sweep an (a, lambda) grid and write CSV.
    Sweep(CommonArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Flat JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

impl CommonArgs {
    fn resolve(&self) -> Result<Settings> {
        match &self.config {
            Some(path) => Ok(self.settings.clone().over(Settings::from_file(path)?)),
            None => Ok(self.settings.clone()),
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } | Error::StepSizeUnderflow { .. } | Error::NoEventBeforeTmax { .. } => {
            EXIT_NOT_CONVERGED
        }
        Error::AssumptionViolated { .. } => EXIT_VIOLATION,
        Error::Io(_) => EXIT_IO,
        Error::OutOfRange(_)
        | Error::ScalingViolation { .. }
        | Error::InvalidControl(_)
        | Error::OutOfDomain(_)
        | Error::Config(_) => EXIT_INVALID,
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Simulate(c) => simulate(&c.resolve()?),
        Command::Cycle(c) => cycle(&c.resolve()?),
        Command::Bounds(c) => bounds(&c.resolve()?),
        Command::Certify(c) => certify(&c.resolve()?),
        Command::Sweep(c) => sweep(&c.resolve()?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn solve(s: &Settings, p: &Params) -> Result<LimitCycleSummary> {
    let opts = CycleOptions {
        x0: s.x0.unwrap_or(CycleOptions::default().x0),
        ..CycleOptions::default()
    };
    find_cycle_with(p, &s.control()?, &opts)
}

fn simulate(s: &Settings) -> Result<i32> {
    let p = s.params()?;
    let ctl = s.control()?;
    let x0 = s.x0.unwrap_or(CycleOptions::default().x0);
    let s0 = s.s0.unwrap_or(p.lambda());
    if !(x0 > 0.0 && s0 > 0.0 && s0 < 1.0) {
        return Err(Error::OutOfDomain(format!("start (x0, s0) = ({x0}, {s0}) outside the quadrant strip")));
    }
    let samples = trace(
        LogState::new(x0.ln(), s0.ln()),
        &p,
        s.duration.unwrap_or(200.0),
        s.max_points.unwrap_or(20_000),
        &ctl,
    )?;
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&samples),
        Format::Csv | Format::Text => {
            let mut out = String::from("tau,x,s,ln_x,ln_s\n");
            for (t, ls) in &samples {
                let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", ls.x(), ls.s(), ls.u, ls.v);
            }
            out
        }
    };
    emit(s.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CycleOut<'a> {
    a: f64,
    lambda: f64,
    tau_s: f64,
    tau_x: f64,
    #[serde(flatten)]
    summary: &'a LimitCycleSummary,
}

fn cycle(s: &Settings) -> Result<i32> {
    let p = s.params()?;
    let c = solve(s, &p)?;
    let tm = tau_measures(&c, &p);
    let text = match s.format.unwrap_or_default() {
        Format::Json => to_json(&CycleOut {
            a: p.a(),
            lambda: p.lambda(),
            tau_s: tm.tau_s,
            tau_x: tm.tau_x,
            summary: &c,
        }),
        _ => {
            let mut out = String::new();
            let rows = [
                ("a", p.a()),
                ("lambda", p.lambda()),
                ("x_max", c.x_max),
                ("s_max", c.s_max),
                ("ln_x_min", c.ln_x_min),
                ("ln_s_min", c.ln_s_min),
                ("x_min", c.x_min),
                ("s_min", c.s_min),
                ("period", c.period),
                ("tau_s", tm.tau_s),
                ("tau_x", tm.tau_x),
                ("x_star", c.x_star),
                ("residual", c.residual),
            ];
            for (k, v) in rows {
                let _ = writeln!(out, "{k:<10} {v:.12e}");
            }
            let _ = writeln!(out, "{:<10} {}", "iterations", c.iterations);
            out
        }
    };
    emit(s.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn report_text(r: &CertificateReport) -> String {
    let mut out = String::new();
    for e in &r.entries {
        let tag = if e.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag} {:<28} margin {:>12.4e}  {}", e.name, e.margin, e.anchor);
    }
    let _ = writeln!(out, "{}/{} passed", r.passed(), r.total());
    out
}

fn bounds(s: &Settings) -> Result<i32> {
    let p = s.params()?;
    let (x_used, summary) = match s.x_max {
        Some(x) => (x, None),
        None => {
            let c = solve(s, &p)?;
            (c.x_max.min(X_MAX_CAP), Some(c))
        }
    };
    let b = theorem1_bounds(&p, x_used)?;
    let check = summary.as_ref().map(|c| check_bounds(c, &b));
    let text = match s.standard_params()? {
        Some(sp) => {
            let sb = corollary1_bounds(&sp, x_used)?;
            match s.format.unwrap_or_default() {
                Format::Json => to_json(&(&sb, &check)),
                _ => format!("{sb:#?}\n"),
            }
        }
        None => match s.format.unwrap_or_default() {
            Format::Json => to_json(&(&b, &check)),
            _ => {
                let mut out = String::new();
                let _ = writeln!(out, "x_max_used   {x_used:.12e}");
                let _ = writeln!(out, "x_max        ({:.12e}, {:.12e})", b.x_max.lo, b.x_max.hi);
                let _ = writeln!(out, "s_max        ({:.12e}, {:.12e})", b.s_max.lo, b.s_max.hi);
                let _ = writeln!(out, "ln_x_min     ({:.12e}, {:.12e})", b.ln_x_min.lo, b.ln_x_min.hi);
                let _ = writeln!(out, "ln_s_min     ({:.12e}, {:.12e})", b.ln_s_min.lo, b.ln_s_min.hi);
                let _ = writeln!(out, "kappa        {:.6} {:.6} {:.6}", b.kappa1, b.kappa2, b.kappa3);
                if let Some(r) = &check {
                    out.push_str(&report_text(r));
                }
                out
            }
        },
    };
    emit(s.out.as_deref(), &text)?;
    Ok(match check {
        Some(r) if !r.all_passed() => EXIT_VIOLATION,
        _ => EXIT_OK,
    })
}

/// Full report for one parameter pair: invariance verifiers, the crossing chain and the brackets.
pub fn full_report(p: &Params, c: &LimitCycleSummary) -> Result<CertificateReport> {
    let b = theorem1_bounds(p, c.x_max.min(X_MAX_CAP))?;
    let mut r = CertificateReport {
        entries: vec![verify_vg_trapping(p, 1000)],
    };
    r = r
        .merge(verify_f_transversality(1000))
        .merge(certify_cycle(c, &c.crossings, p))
        .merge(check_bounds(c, &b));
    Ok(r)
}

fn certify(s: &Settings) -> Result<i32> {
    let p = s.params()?;
    let c = solve(s, &p)?;
    let r = full_report(&p, &c)?;
    let text = match s.format.unwrap_or_default() {
        Format::Json => to_json(&r),
        _ => report_text(&r),
    };
    emit(s.out.as_deref(), &text)?;
    Ok(if r.all_passed() { EXIT_OK } else { EXIT_VIOLATION })
}

fn sweep(s: &Settings) -> Result<i32> {
    let spec = s.sweep_spec()?;
    let recs = run_sweep(&spec, s.threads)?;
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&recs),
        _ => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &recs)?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
    };
    emit(s.out.as_deref(), &text)?;
    for r in recs.iter().filter(|r| r.status != CellStatus::Ok) {
        eprintln!(
            "cell a={} lambda={}: {}",
            r.a,
            r.lambda,
            r.message.as_deref().unwrap_or(r.status.as_str())
        );
    }
    Ok(if recs.iter().any(|r| r.status != CellStatus::Ok) {
        EXIT_NOT_CONVERGED
    } else if recs.iter().any(|r| !r.certified()) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}
