//! Poincaré return map on the section `s = λ` and the attracting limit cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{Direction, Dopri5, EventHit, EventSpec, StepControl};
use crate::model::{LogState, Params};

/// Default ratios `c1 = e⁻²`, `c2 = e⁻⁴` of the intermediate prey sections `s = cᵢλ`.
pub fn default_c1() -> f64 {
    (-2f64).exp()
}

pub fn default_c2() -> f64 {
    (-4f64).exp()
}

/// Prey level of the Region-4 checkpoint P7.
pub const S7: f64 = 0.8;

/// Predator density on the descending branch of the section `s = λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub x: f64,
}

impl SectionPoint {
    pub fn new(x: f64, p: &Params) -> Result<Self> {
        let h = p.isocline_h(p.lambda());
        if !(x > h) || !x.is_finite() {
            return Err(Error::OutOfDomain(format!(
                "section point x = {x} must exceed h(lambda) = {h}"
            )));
        }
        Ok(SectionPoint { x })
    }

    pub fn to_log(self, p: &Params) -> LogState {
        LogState::new(self.x.ln(), p.lambda().ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOptions {
    pub x0: f64,
    /// Relative change of the section value at which iteration stops.
    pub cycle_tol: f64,
    pub max_iters: usize,
    /// Integration horizon for a single crossing.
    pub tau_max: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            x0: 1.3,
            cycle_tol: 1e-9,
            max_iters: 50,
            tau_max: 1e7,
        }
    }
}

/// A localized crossing in log coordinates and its time since the start of the pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub state: LogState,
    pub tau: f64,
}

impl Crossing {
    pub fn x(&self) -> f64 {
        self.state.x()
    }

    pub fn s(&self) -> f64 {
        self.state.s()
    }
}

/// Crossings P1…P8 recorded on one revolution starting at `start` (P0) and
/// returning to the section at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleCrossings {
    pub c1: f64,
    pub c2: f64,
    pub start: Crossing,
    /// `s = c1·λ`, descending.
    pub p1: Crossing,
    /// `s = c2·λ`, descending.
    pub p2: Crossing,
    /// Isocline `x = h(s)`, Region 2 → 3 (minimum of `s`).
    pub p3: Crossing,
    /// `s = c2·λ`, ascending.
    pub p4: Crossing,
    /// `s = c1·λ`, ascending.
    pub p5: Crossing,
    /// `s = λ`, ascending (minimum of `x`).
    pub p6: Crossing,
    /// `s = 0.8`, ascending.
    pub p7: Crossing,
    /// Isocline, Region 4 → 1 (maximum of `s`).
    pub p8: Crossing,
    /// `s = λ`, descending (maximum of `x`).
    pub end: Crossing,
}

/// Converged limit cycle. The `ln_*` fields are authoritative; linear values of
/// tiny minima underflow to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleSummary {
    pub x_max: f64,
    pub x_min: f64,
    pub s_max: f64,
    pub s_min: f64,
    pub ln_x_min: f64,
    pub ln_s_min: f64,
    pub ln_s_max: f64,
    pub period: f64,
    pub x_star: f64,
    pub iterations: usize,
    /// Relative change of the last return-map iterate.
    pub residual: f64,
    /// `|x_{n+1} − x_n|` for every iterate.
    pub increments: Vec<f64>,
    pub crossings: CycleCrossings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauMeasures {
    pub tau_s: f64,
    pub tau_x: f64,
}

fn hit(ig: &mut Dopri5, events: &[EventSpec], tau_max: f64) -> Result<(usize, EventHit)> {
    ig.until_first(events, tau_max)
}

/// One application of the return map from `(x0, λ)` back to the descending branch of `s = λ`.
pub fn return_map(x0: SectionPoint, p: &Params, ctl: &StepControl) -> Result<SectionPoint> {
    return_map_with(x0, p, ctl, CycleOptions::default().tau_max).map(|(sp, _)| sp)
}

/// Return map that also reports the return time.
pub fn return_map_with(
    x0: SectionPoint,
    p: &Params,
    ctl: &StepControl,
    tau_max: f64,
) -> Result<(SectionPoint, f64)> {
    let x0 = SectionPoint::new(x0.x, p)?;
    let lambda = p.lambda();
    let mut ig = Dopri5::new(x0.to_log(p), p, ctl)?;
    hit(&mut ig, &[EventSpec::cross_s(lambda, Direction::Increasing)], tau_max)?;
    let (_, back) = hit(&mut ig, &[EventSpec::cross_s(lambda, Direction::Decreasing)], tau_max)?;
    Ok((SectionPoint { x: back.state.x() }, ig.time()))
}

/// Integrate one revolution from the section recording P1…P8 for the given `c1`, `c2`.
pub fn cycle_pass(
    x0: SectionPoint,
    p: &Params,
    ctl: &StepControl,
    c1: f64,
    c2: f64,
    tau_max: f64,
) -> Result<CycleCrossings> {
    if !(0.0 < c2 && c2 < c1 && c1 < 1.0) {
        return Err(Error::OutOfDomain(format!("need 0 < c2 < c1 < 1, got c1 = {c1}, c2 = {c2}")));
    }
    let x0 = SectionPoint::new(x0.x, p)?;
    let lambda = p.lambda();
    use Direction::{Decreasing as Dn, Increasing as Up};
    let expected = [
        EventSpec::cross_s(c1 * lambda, Dn),
        EventSpec::cross_s(c2 * lambda, Dn),
        EventSpec::cross_h(Dn),
        EventSpec::cross_s(c2 * lambda, Up),
        EventSpec::cross_s(c1 * lambda, Up),
        EventSpec::cross_s(lambda, Up),
        EventSpec::cross_s(S7, Up),
        EventSpec::cross_h(Up),
        EventSpec::cross_s(lambda, Dn),
    ];
    let start = x0.to_log(p);
    let mut ig = Dopri5::new(start, p, ctl)?;
    let mut got = Vec::with_capacity(expected.len());
    for (n, _) in expected.iter().enumerate() {
        let (i, h) = hit(&mut ig, &expected, tau_max)?;
        if i != n {
            return Err(Error::OutOfDomain(format!(
                "unexpected crossing order from x0 = {}: event {i} fired while waiting for {n}",
                x0.x
            )));
        }
        got.push(Crossing {
            state: h.state,
            tau: ig.time(),
        });
    }
    Ok(CycleCrossings {
        c1,
        c2,
        start: Crossing { state: start, tau: 0.0 },
        p1: got[0],
        p2: got[1],
        p3: got[2],
        p4: got[3],
        p5: got[4],
        p6: got[5],
        p7: got[6],
        p8: got[7],
        end: got[8],
    })
}

/// Iterate the return map from `x0 = 1.3` and summarize the converged cycle.
pub fn find_cycle(p: &Params, ctl: &StepControl, max_iters: usize) -> Result<LimitCycleSummary> {
    find_cycle_with(
        p,
        ctl,
        &CycleOptions {
            max_iters,
            ..CycleOptions::default()
        },
    )
}

/// Linear value of a logarithm, or 0 below 1e-300.
fn linear_or_zero(ln: f64) -> f64 {
    let v = ln.exp();
    if v >= 1e-300 {
        v
    } else {
        0.0
    }
}

pub fn find_cycle_with(p: &Params, ctl: &StepControl, opts: &CycleOptions) -> Result<LimitCycleSummary> {
    let mut x = SectionPoint::new(opts.x0, p)?;
    let mut increments = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let (next, _) = return_map_with(x, p, ctl, opts.tau_max)?;
        iterations += 1;
        let inc = (next.x - x.x).abs();
        increments.push(inc);
        residual = inc / x.x;
        x = next;
        if residual < opts.cycle_tol {
            break;
        }
    }
    if !(residual < opts.cycle_tol) {
        return Err(Error::NotConverged {
            iters: iterations,
            residual,
        });
    }
    let cr = cycle_pass(x, p, ctl, default_c1(), default_c2(), opts.tau_max)?;
    Ok(LimitCycleSummary {
        x_max: cr.end.x(),
        x_min: linear_or_zero(cr.p6.state.u),
        s_max: cr.p8.s(),
        s_min: linear_or_zero(cr.p3.state.v),
        ln_x_min: cr.p6.state.u,
        ln_s_min: cr.p3.state.v,
        ln_s_max: cr.p8.state.v,
        period: cr.end.tau,
        x_star: x.x,
        iterations,
        residual,
        increments,
        crossings: cr,
    })
}

/// Accepted-step samples `(τ, state)` of one revolution from the section point `x0`.
pub fn revolution_samples(
    x0: SectionPoint,
    p: &Params,
    ctl: &StepControl,
    tau_max: f64,
) -> Result<Vec<(f64, LogState)>> {
    let x0 = SectionPoint::new(x0.x, p)?;
    let lambda = p.lambda();
    let start = x0.to_log(p);
    let mut ig = Dopri5::new(start, p, ctl)?;
    let mut out = vec![(0.0, start)];
    ig.until_first_recording(&[EventSpec::cross_s(lambda, Direction::Increasing)], tau_max, &mut out)?;
    ig.until_first_recording(&[EventSpec::cross_s(lambda, Direction::Decreasing)], tau_max, &mut out)?;
    Ok(out)
}

/// `τ_s = −x_max/(λ ln s_min)` and `τ_x = −x_max/(a ln x_min)`.
pub fn tau_measures(c: &LimitCycleSummary, p: &Params) -> TauMeasures {
    TauMeasures {
        tau_s: -c.x_max / (p.lambda() * c.ln_s_min),
        tau_x: -c.x_max / (p.a() * c.ln_x_min),
    }
}
