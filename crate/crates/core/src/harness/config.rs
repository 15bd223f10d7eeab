//! Flat settings shared by the command-line flags and the JSON config file.
//!
//! A config file holds the same keys as the long flags (`rel_tol` or `rel-tol`);
//! any flag given on the command line wins over the file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::StepControl;
use crate::model::{from_standard, Params, StandardParams};

use super::sweep::{SweepMode, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct Settings {
    /// Scaled half-saturation constant.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Scaled predator death rate.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Prey growth rate (standard-parameter mode).
    #[arg(long)]
    pub r: Option<f64>,
    /// Carrying capacity.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub K: Option<f64>,
    /// Maximal predation rate.
    #[arg(long)]
    pub q: Option<f64>,
    /// Half-saturation constant.
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub H: Option<f64>,
    /// Predator conversion rate.
    #[arg(long)]
    pub p: Option<f64>,
    /// Predator death rate.
    #[arg(long)]
    pub d: Option<f64>,
    /// Starting predator value on the section `s = λ`.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Starting prey value for `simulate` (defaults to λ).
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    #[serde(alias = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    #[serde(alias = "abs-tol")]
    pub abs_tol: Option<f64>,
    /// Scaled predator maximum inserted into the bounds (defaults to the computed cycle).
    #[arg(long)]
    #[serde(alias = "x-max")]
    pub x_max: Option<f64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `LO:HI:N`, evenly spaced and inclusive.
    #[arg(long)]
    #[serde(alias = "grid-a")]
    pub grid_a: Option<String>,
    #[arg(long)]
    #[serde(alias = "grid-lambda")]
    pub grid_lambda: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<SweepMode>,
    /// Worker threads for `sweep`; 1 runs sequentially.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Trace length for `simulate`.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    #[serde(alias = "max-points")]
    pub max_points: Option<usize>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        Settings { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Settings {
    pub fn from_json(text: &str) -> Result<Settings> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Settings> {
        Settings::from_json(&std::fs::read_to_string(path)?)
    }

    /// `self` with every unset field taken from `base`.
    pub fn over(self, base: Settings) -> Settings {
        overlay!(
            self, base, a, lambda, r, K, q, H, p, d, x0, s0, rel_tol, abs_tol, x_max, out, grid_a,
            grid_lambda, mode, threads, format, duration, max_points
        )
    }

    #[allow(non_snake_case)]
    fn standard(&self) -> Option<Result<StandardParams>> {
        let fields = [self.r, self.K, self.q, self.H, self.p, self.d];
        if fields.iter().all(Option::is_none) {
            return None;
        }
        if fields.iter().any(Option::is_none) {
            return Some(Err(Error::Config(
                "standard-parameter mode needs all of --r --K --q --H --p --d".into(),
            )));
        }
        let [r, K, q, H, p, d] = fields.map(Option::unwrap);
        Some(Ok(StandardParams { r, K, q, H, p, d }))
    }

    pub fn standard_params(&self) -> Result<Option<StandardParams>> {
        self.standard().transpose()
    }

    /// Scaled parameters from `--a/--lambda` (closed range) or from the standard set.
    pub fn params(&self) -> Result<Params> {
        if let Some(sp) = self.standard_params()? {
            if self.a.is_some() || self.lambda.is_some() {
                return Err(Error::Config("give either --a/--lambda or the standard set, not both".into()));
            }
            return from_standard(&sp);
        }
        match (self.a, self.lambda) {
            (Some(a), Some(l)) => Params::closed(a, l),
            _ => Err(Error::Config("--a and --lambda are required".into())),
        }
    }

    pub fn control(&self) -> Result<StepControl> {
        let mut ctl = StepControl::default();
        if let Some(t) = self.rel_tol {
            ctl.rel_tol = t;
        }
        if let Some(t) = self.abs_tol {
            ctl.abs_tol = t;
        }
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let mut spec = SweepSpec {
            control: self.control()?,
            ..SweepSpec::default()
        };
        if let Some(g) = &self.grid_a {
            spec.a_values = parse_grid(g)?;
        }
        if let Some(g) = &self.grid_lambda {
            spec.lambda_values = parse_grid(g)?;
        }
        if let Some(m) = self.mode {
            spec.mode = m;
        }
        if let Some(x0) = self.x0 {
            spec.cycle.x0 = x0;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Parse `LO:HI:N` into `N` evenly spaced values including both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("grid '{s}' is not LO:HI:N"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![lo]),
        _ => Ok((0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()),
    }
}
