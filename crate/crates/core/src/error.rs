use std::fmt;

use thiserror::Error;

/// Named analytical assumptions checked before a bound chain is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Assumption {
    /// `C1 > -(sqrt(x0) - sqrt(H0))^2`
    Ass1,
    /// `C2 > -(sqrt(x1+) - sqrt(H1))^2`
    Ass2,
    /// `k = H2 exp(C~/H2) > 4`
    Ass3,
    /// `0 < H <= 0.2`, `H < u`, `-(sqrt(u) - sqrt(H))^2 < C <= 0`
    QuadraticBracket,
    /// `C > theta(H)` and `k = H exp(C/H) > 4`
    ThetaBranch,
    /// `x0` inside the `(1, 1.6)` bracket of the maximal predator value.
    StartBracket,
    /// `z^` for the default section ratios must stay below 0.015.
    ZHat,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Assumption::Ass1 => "ass1",
            Assumption::Ass2 => "ass2",
            Assumption::Ass3 => "ass3",
            Assumption::QuadraticBracket => "quadratic-bracket",
            Assumption::ThetaBranch => "theta-branch",
            Assumption::StartBracket => "start-bracket",
            Assumption::ZHat => "z-hat",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("scaling violation: b = (p - d)/r = {b} is not 1")]
    ScalingViolation { b: f64 },
    #[error("invalid step control: {0}")]
    InvalidControl(String),
    #[error("step size underflow at tau = {tau}: required dt {dt:e} below dt_min")]
    StepSizeUnderflow { tau: f64, dt: f64 },
    #[error("no event before tau_max = {tau_max}")]
    NoEventBeforeTmax { tau_max: f64 },
    #[error("argument outside the domain: {0}")]
    OutOfDomain(String),
    #[error("return map did not converge in {iters} iterations (last residual {residual:e})")]
    NotConverged { iters: usize, residual: f64 },
    #[error("assumption {which} violated: {detail}")]
    AssumptionViolated { which: Assumption, detail: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn assumption(which: Assumption, detail: impl Into<String>) -> Self {
        Error::AssumptionViolated {
            which,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
