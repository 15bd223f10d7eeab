//! Adaptive Dormand–Prince 5(4) integration of the log-coordinate field with
//! event detection on dense output.
//!
//! Integration always happens in `(u, v) = (ln x, ln s)`, so positivity of the
//! densities is structural. Events are sign changes of functions that are
//! themselves expressed in log coordinates (`v − ln level`,
//! `u − ln h(eᵛ)`), which avoids differencing tiny linear values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ln_isocline_h_log, log_vector_field, LogState, Params};

/// Step-size control for [`Dopri5`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    /// Also bounds the step where the prey density is within rounding of 1:
    /// there `v` is tiny, invisible to the error norm, and decays at rate ≈ 1.
    pub dt_max: f64,
    pub safety: f64,
    /// Required `|g|` at a localized event.
    pub event_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            dt_init: 1e-3,
            dt_min: 1e-12,
            dt_max: 1.0,
            safety: 0.9,
            event_tol: 1e-12,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.event_tol > 0.0
            && self.dt_min > 0.0
            && self.dt_min <= self.dt_init
            && self.dt_init <= self.dt_max
            && self.dt_max.is_finite()
            && self.safety > 0.0
            && self.safety < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidControl(format!("{self:?}")))
        }
    }

    /// Window after the start in which a crossing is ignored when the start already lies on the event surface.
    pub fn tau_arm(&self) -> f64 {
        10.0 * self.dt_min
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }
}

/// Surfaces a trajectory can be stopped on. Levels are given in linear coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventSpec {
    /// `s = level`.
    CrossS { level: f64, direction: Direction },
    /// `x = h(s)`; `Decreasing` means `x` falls below the isocline (Region 2 → 3).
    CrossIsoclineH { direction: Direction },
    /// `x = level`.
    CrossX { level: f64, direction: Direction },
}

impl EventSpec {
    pub fn cross_s(level: f64, direction: Direction) -> Self {
        EventSpec::CrossS { level, direction }
    }

    pub fn cross_h(direction: Direction) -> Self {
        EventSpec::CrossIsoclineH { direction }
    }

    pub fn cross_x(level: f64, direction: Direction) -> Self {
        EventSpec::CrossX { level, direction }
    }

    pub fn direction(&self) -> Direction {
        match *self {
            EventSpec::CrossS { direction, .. }
            | EventSpec::CrossIsoclineH { direction }
            | EventSpec::CrossX { direction, .. } => direction,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            EventSpec::CrossS { level, .. } | EventSpec::CrossX { level, .. }
                if !(level > 0.0 && level.is_finite()) =>
            {
                Err(Error::OutOfDomain(format!("event level {level} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// Signed event function; positive on the side the `Increasing` direction moves into.
    pub fn value(&self, ls: &LogState, p: &Params) -> f64 {
        match *self {
            EventSpec::CrossS { level, .. } => ls.v - level.ln(),
            EventSpec::CrossX { level, .. } => ls.u - level.ln(),
            EventSpec::CrossIsoclineH { .. } => {
                let lh = ln_isocline_h_log(ls.v, p.a());
                if lh == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    ls.u - lh
                }
            }
        }
    }
}

/// A localized event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventHit {
    pub state: LogState,
    /// Time elapsed since the start of the integration call.
    pub time: f64,
    pub n_steps: usize,
    /// `|g(state)| < event_tol` was reached.
    pub converged: bool,
}

/// Result of [`step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: LogState,
    /// Size of the step actually taken (smaller than requested after rejections).
    pub dt_taken: f64,
    pub dt_next: f64,
    /// Scaled error norm of the accepted step (≤ 1).
    pub err_est: f64,
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Controller constants.
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

type Vec2 = [f64; 2];

#[inline]
fn field(y: &Vec2, p: &Params) -> Vec2 {
    let (dv, du) = log_vector_field(&LogState { u: y[0], v: y[1] }, p);
    [du, dv]
}

#[inline]
fn to_state(y: &Vec2) -> LogState {
    LogState { u: y[0], v: y[1] }
}

#[inline]
fn axpy(y: &Vec2, terms: &[(f64, &Vec2)], h: f64) -> Vec2 {
    let mut out = *y;
    for i in 0..2 {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Continuous extension of the last accepted step.
#[derive(Debug, Clone, Copy)]
struct Dense {
    t0: f64,
    h: f64,
    r: [Vec2; 5],
}

impl Dense {
    fn eval(&self, theta: f64) -> Vec2 {
        let t1 = 1.0 - theta;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.r[0][i]
                + theta
                    * (self.r[1][i]
                        + t1 * (self.r[2][i] + theta * (self.r[3][i] + t1 * self.r[4][i])));
        }
        out
    }
}

/// Stepping state of one integration. Confined to a single thread; create one per task.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    p: Params,
    ctl: StepControl,
    t: f64,
    y: Vec2,
    k1: Vec2,
    h: f64,
    fac_old: f64,
    n_steps: usize,
    n_rejected: usize,
    last_err: f64,
    dense: Option<Dense>,
}

impl Dopri5 {
    pub fn new(start: LogState, p: &Params, ctl: &StepControl) -> Result<Self> {
        ctl.validate()?;
        if !start.is_finite() {
            return Err(Error::OutOfDomain(format!("non-finite start {start:?}")));
        }
        let y = [start.u, start.v];
        Ok(Dopri5 {
            p: *p,
            ctl: *ctl,
            t: 0.0,
            y,
            k1: field(&y, p),
            h: ctl.dt_init,
            fac_old: 1e-4,
            n_steps: 0,
            n_rejected: 0,
            last_err: 0.0,
            dense: None,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> LogState {
        to_state(&self.y)
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_rejected(&self) -> usize {
        self.n_rejected
    }

    /// Scaled error norm of the most recent accepted step.
    pub fn last_error(&self) -> f64 {
        self.last_err
    }

    /// Proposed size of the next step.
    pub fn next_dt(&self) -> f64 {
        self.h
    }

    /// Override the next step size (clamped to `[dt_min, dt_max]`).
    pub fn set_dt(&mut self, dt: f64) {
        self.h = dt.clamp(self.ctl.dt_min, self.ctl.dt_max);
    }

    /// State on the last accepted step at absolute time `t` (must lie inside that step).
    pub fn dense_at(&self, t: f64) -> Option<LogState> {
        self.dense.map(|d| to_state(&d.eval((t - d.t0) / d.h)))
    }

    /// Take one accepted step, shrinking as needed; never steps past `t_limit`.
    pub fn advance(&mut self, t_limit: f64) -> Result<()> {
        let ctl = self.ctl;
        let p = self.p;
        let expo1 = 0.2 - BETA * 0.75;
        let mut h = self.h.min(ctl.dt_max);
        let mut last = false;
        if self.t + h >= t_limit {
            h = t_limit - self.t;
            last = true;
        }
        if h <= 0.0 {
            return Ok(());
        }
        loop {
            if h < ctl.dt_min && !last {
                return Err(Error::StepSizeUnderflow { tau: self.t, dt: h });
            }
            let y = self.y;
            let k1 = self.k1;
            let y2 = axpy(&y, &[(A21, &k1)], h);
            let k2 = field(&y2, &p);
            let y3 = axpy(&y, &[(A31, &k1), (A32, &k2)], h);
            let k3 = field(&y3, &p);
            let y4 = axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h);
            let k4 = field(&y4, &p);
            let y5 = axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h);
            let k5 = field(&y5, &p);
            let y6 = axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            );
            let k6 = field(&y6, &p);
            let y7 = axpy(
                &y,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                h,
            );
            let k7 = field(&y7, &p);

            let mut err = 0.0;
            for i in 0..2 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sk = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y7[i].abs());
                err += (e / sk) * (e / sk);
            }
            let err = (err / 2.0).sqrt();

            if !err.is_finite() {
                self.n_rejected += 1;
                h *= FAC_MIN;
                last = false;
                continue;
            }

            let fac11 = err.powf(expo1);
            if err <= 1.0 {
                let fac = (fac11 / self.fac_old.powf(BETA) / ctl.safety)
                    .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let h_new = (h / fac).min(ctl.dt_max);
                self.fac_old = err.max(1e-4);

                let ydiff = [y7[0] - y[0], y7[1] - y[1]];
                let mut r = [[0.0; 2]; 5];
                for i in 0..2 {
                    let bspl = h * k1[i] - ydiff[i];
                    r[0][i] = y[i];
                    r[1][i] = ydiff[i];
                    r[2][i] = bspl;
                    r[3][i] = ydiff[i] - h * k7[i] - bspl;
                    r[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                self.dense = Some(Dense { t0: self.t, h, r });
                self.t = if last { t_limit } else { self.t + h };
                self.y = y7;
                self.k1 = k7;
                self.h = h_new.max(ctl.dt_min);
                self.n_steps += 1;
                self.last_err = err;
                return Ok(());
            }
            self.n_rejected += 1;
            h /= (fac11 / ctl.safety).min(1.0 / FAC_MIN);
            last = false;
        }
    }

    /// Integrate until the earliest of `events` fires; returns its index and the hit.
    ///
    /// The integrator is left at the event, so successive calls chain crossings.
    pub fn until_first(&mut self, events: &[EventSpec], tau_max: f64) -> Result<(usize, EventHit)> {
        self.until_first_impl(events, tau_max, None)
    }

    /// As [`Dopri5::until_first`], appending `(τ, state)` after every accepted step and at the event.
    pub fn until_first_recording(
        &mut self,
        events: &[EventSpec],
        tau_max: f64,
        samples: &mut Vec<(f64, LogState)>,
    ) -> Result<(usize, EventHit)> {
        self.until_first_impl(events, tau_max, Some(samples))
    }

    fn until_first_impl(
        &mut self,
        events: &[EventSpec],
        tau_max: f64,
        mut samples: Option<&mut Vec<(f64, LogState)>>,
    ) -> Result<(usize, EventHit)> {
        for ev in events {
            ev.validate()?;
        }
        if !(tau_max > 0.0) {
            return Err(Error::OutOfDomain(format!("tau_max = {tau_max} must be positive")));
        }
        let p = self.p;
        let t_start = self.t;
        let t_end = t_start + tau_max;
        let steps_start = self.n_steps;
        let tau_arm = self.ctl.tau_arm();
        let start = self.state();

        let mut left: Vec<f64> = events.iter().map(|e| e.value(&start, &p)).collect();
        // Events whose surface contains the start are disarmed for tau_arm.
        let mut disarmed: Vec<bool> = left.iter().map(|g| g.abs() <= self.ctl.event_tol).collect();

        while self.t < t_end {
            self.advance(t_end)?;
            let dense = self.dense.expect("dense output after a step");
            let mut best: Option<(usize, f64, LogState, bool)> = None;
            for (i, ev) in events.iter().enumerate() {
                let mut theta_lo = 0.0;
                let mut g_lo = left[i];
                if disarmed[i] {
                    let t_arm = t_start + tau_arm;
                    if self.t <= t_arm {
                        left[i] = ev.value(&self.state(), &p);
                        continue;
                    }
                    theta_lo = ((t_arm - dense.t0) / dense.h).max(0.0);
                    g_lo = ev.value(&to_state(&dense.eval(theta_lo)), &p);
                    disarmed[i] = false;
                }
                let g_hi = ev.value(&self.state(), &p);
                left[i] = g_hi;
                let crossed = match ev.direction() {
                    Direction::Increasing => g_lo < 0.0 && g_hi >= 0.0,
                    Direction::Decreasing => g_lo > 0.0 && g_hi <= 0.0,
                };
                if !crossed {
                    continue;
                }
                let (theta, st, conv) =
                    locate(&dense, ev, &p, theta_lo, g_lo, 1.0, g_hi, self.ctl.event_tol);
                let t_hit = dense.t0 + theta * dense.h;
                if best.is_none_or(|b| t_hit < b.1) {
                    best = Some((i, t_hit, st, conv));
                }
            }
            if let Some((i, t_hit, st, conv)) = best {
                self.t = t_hit;
                self.reset_state(st);
                if let Some(out) = samples.as_deref_mut() {
                    out.push((t_hit, st));
                }
                return Ok((
                    i,
                    EventHit {
                        state: st,
                        time: t_hit - t_start,
                        n_steps: self.n_steps - steps_start,
                        converged: conv,
                    },
                ));
            }
            if let Some(out) = samples.as_deref_mut() {
                out.push((self.t, self.state()));
            }
        }
        Err(Error::NoEventBeforeTmax { tau_max })
    }

    /// Restart from `ls` at the current clock (keeps the step-size history).
    fn reset_state(&mut self, ls: LogState) {
        self.y = [ls.u, ls.v];
        self.k1 = field(&self.y, &self.p);
        self.dense = None;
    }
}

/// Root of the event function on dense output between `theta_a` and `theta_b`.
///
/// The returned point is the end of the final bracket on the far side of the
/// crossing, so a restart there sees the event as already passed.
#[allow(clippy::too_many_arguments)]
fn locate(
    dense: &Dense,
    ev: &EventSpec,
    p: &Params,
    mut ta: f64,
    mut ga: f64,
    mut tb: f64,
    mut gb: f64,
    tol: f64,
) -> (f64, LogState, bool) {
    let eval = |theta: f64| {
        let st = to_state(&dense.eval(theta));
        (ev.value(&st, p), st)
    };
    // Illinois variant of regula falsi, falling back to bisection on non-finite values.
    let mut side = 0i8;
    let mut st_b = eval(tb).1;
    for _ in 0..200 {
        if gb.abs() < tol {
            break;
        }
        let mut tm = 0.5 * (ta + tb);
        if ga.is_finite() && gb.is_finite() && gb != ga {
            let t = (ta * gb - tb * ga) / (gb - ga);
            if t > ta && t < tb {
                tm = t;
            }
        }
        if !(tm > ta && tm < tb) {
            break;
        }
        let (gm, st) = eval(tm);
        if gm == 0.0 || gm.signum() == gb.signum() {
            tb = tm;
            gb = gm;
            st_b = st;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            ta = tm;
            ga = gm;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
    }
    let g = ev.value(&st_b, p);
    (tb, st_b, g.abs() < tol)
}

/// One accepted embedded-pair step starting with size `dt`.
pub fn step(ls: LogState, dt: f64, p: &Params, ctl: &StepControl) -> Result<StepOutcome> {
    if !(dt >= ctl.dt_min && dt <= ctl.dt_max) {
        return Err(Error::InvalidControl(format!(
            "dt = {dt} outside [{}, {}]",
            ctl.dt_min, ctl.dt_max
        )));
    }
    let mut ig = Dopri5::new(ls, p, ctl)?;
    ig.set_dt(dt);
    ig.advance(f64::INFINITY)?;
    Ok(StepOutcome {
        state: ig.state(),
        dt_taken: ig.time(),
        dt_next: ig.next_dt(),
        err_est: ig.last_error(),
    })
}

/// Integrate from `ls` until `ev` fires.
pub fn integrate_until_event(
    ls: LogState,
    p: &Params,
    ev: EventSpec,
    ctl: &StepControl,
    tau_max: f64,
) -> Result<EventHit> {
    let mut ig = Dopri5::new(ls, p, ctl)?;
    ig.until_first(&[ev], tau_max).map(|(_, hit)| hit)
}

/// Accepted-step samples `(τ, state)` over `[0, duration]`, decimated to at most `max_points`.
pub fn trace(
    ls: LogState,
    p: &Params,
    duration: f64,
    max_points: usize,
    ctl: &StepControl,
) -> Result<Vec<(f64, LogState)>> {
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::OutOfDomain(format!("duration {duration} must be non-negative")));
    }
    let mut ig = Dopri5::new(ls, p, ctl)?;
    let mut out = vec![(0.0, ls)];
    while ig.time() < duration {
        ig.advance(duration)?;
        out.push((ig.time(), ig.state()));
    }
    Ok(decimate(out, max_points))
}

fn decimate(samples: Vec<(f64, LogState)>, max_points: usize) -> Vec<(f64, LogState)> {
    let n = samples.len();
    if max_points == 0 || n <= max_points {
        return samples;
    }
    if max_points == 1 {
        return vec![samples[0]];
    }
    let stride = (n - 1).div_ceil(max_points - 1);
    let mut out: Vec<_> = samples.iter().step_by(stride).copied().collect();
    if out.last().map(|s| s.0) != samples.last().map(|s| s.0) {
        if out.len() == max_points {
            out.pop();
        }
        out.push(samples[n - 1]);
    }
    out
}
