//! Parameters, phase-space points and the vector field of the scaled system
//!
//! ```text
//! ds/dτ = (h(s) − x)·s,   dx/dτ = (s − λ)·x,   h(s) = (1 − s)(s + a)
//! ```
//!
//! together with its log-coordinate form (`u = ln x`, `v = ln s`), which is
//! what the integrator actually advances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit (exclusive) for both scaled parameters.
pub const PARAM_LIMIT: f64 = 0.1;

/// Absolute distance to an isocline below which a point is tagged as lying on it.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Relative slack accepted on `b = (p − d)/r = 1`.
pub const SCALING_TOL: f64 = 1e-9;

/// Scaled parameter pair `(a, λ)`, validated against `0 < a, λ < 0.1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    a: f64,
    lambda: f64,
}

impl Params {
    pub fn new(a: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("lambda", lambda)] {
            if !v.is_finite() || v <= 0.0 || v >= PARAM_LIMIT {
                return Err(Error::OutOfRange(format!(
                    "{name} = {v} must lie in the open interval (0, {PARAM_LIMIT})"
                )));
            }
        }
        Self::checked(a, lambda)
    }

    /// Like [`Params::new`] but admits the closed upper end `a, λ ≤ 0.1`.
    ///
    /// The worst-case constants of the bound chain are evaluated at
    /// `a = λ = 0.1`; the simulation front ends use the strict constructor.
    pub fn closed(a: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("lambda", lambda)] {
            if !v.is_finite() || v <= 0.0 || v > PARAM_LIMIT {
                return Err(Error::OutOfRange(format!(
                    "{name} = {v} must lie in (0, {PARAM_LIMIT}]"
                )));
            }
        }
        Self::checked(a, lambda)
    }

    fn checked(a: f64, lambda: f64) -> Result<Self> {
        let p = Params { a, lambda };
        // Implied by the range check, kept explicit since every cycle routine relies on it.
        if p.hopf_margin() <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "1 - 2*lambda - a = {} must be positive",
                p.hopf_margin()
            )));
        }
        Ok(p)
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `1 − 2λ − a`; positive means the equilibrium is a source surrounded by an attracting cycle.
    pub fn hopf_margin(&self) -> f64 {
        hopf_margin(self.a, self.lambda)
    }

    /// `h(s) = (1 − s)(s + a)`.
    #[inline]
    pub fn isocline_h(&self, s: f64) -> f64 {
        isocline_h(s, self.a)
    }
}

/// Hopf margin for an arbitrary pair, including pairs outside the admissible range.
pub fn hopf_margin(a: f64, lambda: f64) -> f64 {
    1.0 - 2.0 * lambda - a
}

/// The prey isocline `h(s) = (1 − s)(s + a)`.
#[inline]
pub fn isocline_h(s: f64, a: f64) -> f64 {
    (1.0 - s) * (s + a)
}

/// `ln h(e^v)` evaluated without forming `1 − e^v` by subtraction.
///
/// Returns `-inf` for `v >= 0` (the isocline is non-positive there).
#[inline]
pub fn ln_isocline_h_log(v: f64, a: f64) -> f64 {
    if v >= 0.0 {
        return f64::NEG_INFINITY;
    }
    (-v.exp_m1()).ln() + (v.exp() + a).ln()
}

/// Rosenzweig–MacArthur parameters in the original (unscaled) units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct StandardParams {
    pub r: f64,
    pub K: f64,
    pub q: f64,
    pub H: f64,
    pub p: f64,
    pub d: f64,
}

impl StandardParams {
    /// `b = (p − d)/r`; the scaling onto the two-parameter system requires `b = 1`.
    pub fn b(&self) -> f64 {
        (self.p - self.d) / self.r
    }

    /// Predator scale `rK/q`: `X = (rK/q)·x`.
    pub fn predator_scale(&self) -> f64 {
        self.r * self.K / self.q
    }

    /// Prey scale `K`: `S = K·s`.
    pub fn prey_scale(&self) -> f64 {
        self.K
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("r", self.r),
            ("K", self.K),
            ("q", self.q),
            ("H", self.H),
            ("p", self.p),
            ("d", self.d),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::OutOfRange(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// Map standard parameters onto `(a, λ) = (H/K, dH/(rK))`.
pub fn from_standard(sp: &StandardParams) -> Result<Params> {
    sp.validate()?;
    let b = sp.b();
    if (b - 1.0).abs() > SCALING_TOL {
        return Err(Error::ScalingViolation { b });
    }
    Params::new(sp.H / sp.K, sp.d * sp.H / (sp.r * sp.K))
}

/// A point of the open positive quadrant in linear coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    /// Predator density.
    pub x: f64,
    /// Prey density.
    pub s: f64,
}

impl State {
    pub fn new(x: f64, s: f64) -> Result<Self> {
        if !(x.is_finite() && s.is_finite() && x > 0.0 && s > 0.0) {
            return Err(Error::OutOfDomain(format!(
                "state (x = {x}, s = {s}) must be finite and positive"
            )));
        }
        Ok(State { x, s })
    }

    pub fn to_log(self) -> LogState {
        LogState {
            u: self.x.ln(),
            v: self.s.ln(),
        }
    }
}

/// A phase point in log coordinates: `u = ln x`, `v = ln s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogState {
    pub u: f64,
    pub v: f64,
}

impl LogState {
    pub fn new(u: f64, v: f64) -> Self {
        LogState { u, v }
    }

    /// Back to linear coordinates. Components below the smallest normal double become 0.
    pub fn to_linear(self) -> (f64, f64) {
        (self.u.exp(), self.v.exp())
    }

    pub fn x(&self) -> f64 {
        self.u.exp()
    }

    pub fn s(&self) -> f64 {
        self.v.exp()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

impl From<State> for LogState {
    fn from(st: State) -> Self {
        st.to_log()
    }
}

/// `(ds/dτ, dx/dτ) = ((h(s) − x)s, (s − λ)x)`.
#[inline]
pub fn vector_field(st: &State, p: &Params) -> (f64, f64) {
    let ds = (p.isocline_h(st.s) - st.x) * st.s;
    let dx = (st.s - p.lambda) * st.x;
    (ds, dx)
}

/// `(dv/dτ, du/dτ) = (h(eᵛ) − eᵘ, eᵛ − λ)`.
///
/// `1 − s` is taken from `expm1` so the field keeps full relative precision
/// while the prey density sits within rounding distance of 1.
#[inline]
pub fn log_vector_field(ls: &LogState, p: &Params) -> (f64, f64) {
    let s = ls.v.exp();
    let one_minus_s = -ls.v.exp_m1();
    let dv = one_minus_s * (s + p.a) - ls.u.exp();
    let du = s - p.lambda;
    (dv, du)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `x > h(s)`, `s > λ`: predator grows, prey declines.
    R1,
    /// `x > h(s)`, `s < λ`: both decline.
    R2,
    /// `x < h(s)`, `s < λ`: predator declines, prey grows.
    R3,
    /// `x < h(s)`, `s > λ`: both grow.
    R4,
    OnIsoclineH,
    OnIsoclineS,
}

pub fn classify_region(st: &State, p: &Params) -> Region {
    let dh = st.x - p.isocline_h(st.s);
    let ds = st.s - p.lambda;
    if dh.abs() <= CLASSIFY_TOL {
        return Region::OnIsoclineH;
    }
    if ds.abs() <= CLASSIFY_TOL {
        return Region::OnIsoclineS;
    }
    match (dh > 0.0, ds > 0.0) {
        (true, true) => Region::R1,
        (true, false) => Region::R2,
        (false, false) => Region::R3,
        (false, true) => Region::R4,
    }
}

/// The unique positive equilibrium `((1 − λ)(λ + a), λ)`.
pub fn equilibrium(p: &Params) -> State {
    State {
        x: (1.0 - p.lambda) * (p.lambda + p.a),
        s: p.lambda,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, l: f64) -> Params {
        Params::new(a, l).unwrap()
    }

    #[test]
    fn isocline_values() {
        assert!((isocline_h(0.9, 0.0) - 0.09).abs() < 1e-15);
        assert_eq!(isocline_h(1.0, 0.05), 0.0);
        assert!((isocline_h(0.1, 0.1) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn ln_isocline_matches_direct_form() {
        for &s in &[1e-6, 0.01, 0.3, 0.9, 0.999] {
            let direct = isocline_h(s, 0.05).ln();
            let logged = ln_isocline_h_log(f64::ln(s), 0.05);
            assert!((direct - logged).abs() < 1e-12, "s={s}");
        }
        assert!(ln_isocline_h_log(-1e-30, 0.01).is_finite());
        assert_eq!(ln_isocline_h_log(0.0, 0.01), f64::NEG_INFINITY);
    }

    #[test]
    fn vector_field_examples() {
        let pp = p(0.05, 0.05);
        let eq = equilibrium(&pp);
        let (ds, dx) = vector_field(&eq, &pp);
        assert!(ds.abs() < 1e-15 && dx.abs() < 1e-15);

        let pp = p(0.099_999, 0.05);
        // x on the invariant axis
        let (ds, dx) = vector_field(&State { x: 0.0, s: 0.5 }, &pp);
        assert!((ds - 0.5 * isocline_h(0.5, pp.a())).abs() < 1e-15);
        assert_eq!(dx, 0.0);
    }

    #[test]
    fn vector_field_r1_point() {
        let pp = Params::closed(0.1, 0.1).unwrap();
        let (ds, dx) = vector_field(&State { x: 1.0, s: 0.5 }, &pp);
        assert!((ds + 0.35).abs() < 1e-15);
        assert!((dx - 0.4).abs() < 1e-15);
    }

    #[test]
    fn log_field_is_linear_field_over_state() {
        let pp = p(0.09, 0.09);
        let st = State::new(1.0, 0.5).unwrap();
        let (ds, dx) = vector_field(&st, &pp);
        let (dv, du) = log_vector_field(&st.to_log(), &pp);
        assert!((dv - ds / st.s).abs() <= 1e-14 * dv.abs());
        assert!((du - dx / st.x).abs() <= 1e-14 * du.abs());
    }

    #[test]
    fn log_field_survives_tiny_predator() {
        let pp = p(0.09, 0.09);
        let ls = LogState::new(f64::ln(1e-60), f64::ln(0.5));
        let (dv, du) = log_vector_field(&ls, &pp);
        assert!(dv.is_finite() && du.is_finite());
        assert!((dv - isocline_h(0.5, pp.a())).abs() < 1e-15);
        assert!((du - 0.41).abs() < 1e-15);
    }

    #[test]
    fn log_field_at_equilibrium_vanishes() {
        let pp = p(0.03, 0.07);
        let (dv, du) = log_vector_field(&equilibrium(&pp).to_log(), &pp);
        assert!(dv.abs() < 1e-15 && du.abs() < 1e-15);
    }

    #[test]
    fn regions() {
        let pp = p(0.09, 0.09);
        assert_eq!(classify_region(&State { x: 1.0, s: 0.5 }, &pp), Region::R1);
        assert_eq!(classify_region(&State { x: 1e-4, s: 0.5 }, &pp), Region::R4);
        assert_eq!(classify_region(&State { x: 1.0, s: 0.01 }, &pp), Region::R2);
        assert_eq!(classify_region(&State { x: 1e-4, s: 0.01 }, &pp), Region::R3);
        let corner = State {
            x: pp.isocline_h(pp.lambda()),
            s: pp.lambda(),
        };
        let tag = classify_region(&corner, &pp);
        assert!(matches!(tag, Region::OnIsoclineH | Region::OnIsoclineS));
        let on_s = State {
            x: 1.0,
            s: pp.lambda(),
        };
        assert_eq!(classify_region(&on_s, &pp), Region::OnIsoclineS);
    }

    #[test]
    fn equilibrium_values() {
        let e = equilibrium(&p(0.05, 0.025));
        assert!((e.x - 0.073125).abs() < 1e-15);
        assert_eq!(e.s, 0.025);
        let e = equilibrium(&Params::closed(0.1, 0.1).unwrap());
        assert!((e.x - 0.18).abs() < 1e-15 && e.s == 0.1);
    }

    #[test]
    fn hopf_margin_values() {
        assert!(hopf_margin(0.8, 0.1).abs() < 1e-15);
        assert!((hopf_margin(0.1, 0.1) - 0.7).abs() < 1e-15);
        assert!((hopf_margin(0.01, 0.01) - 0.97).abs() < 1e-15);
    }

    #[test]
    fn params_reject_boundary() {
        assert!(Params::new(0.1, 0.05).is_err());
        assert!(Params::new(0.05, 0.1).is_err());
        assert!(Params::new(0.0, 0.05).is_err());
        assert!(Params::new(f64::NAN, 0.05).is_err());
        assert!(Params::new(0.099, 0.099).is_ok());
        assert!(Params::closed(0.1, 0.1).is_ok());
        assert!(Params::closed(0.1000001, 0.1).is_err());
    }

    #[test]
    fn standard_scaling() {
        let sp = StandardParams {
            r: 1.0,
            K: 1.0,
            q: 1.0,
            H: 0.1,
            d: 0.05,
            p: 1.05,
        };
        assert!(matches!(from_standard(&sp), Err(Error::OutOfRange(_))));
        let sp = StandardParams { H: 0.099, ..sp };
        let pp = from_standard(&sp).unwrap();
        assert!((pp.a() - 0.099).abs() < 1e-15);
        assert!((pp.lambda() - 0.00495).abs() < 1e-15);

        let sp = StandardParams {
            r: 2.0,
            K: 10.0,
            q: 3.0,
            H: 0.5,
            d: 0.4,
            p: 2.4,
        };
        let pp = from_standard(&sp).unwrap();
        assert!((pp.a() - 0.05).abs() < 1e-15);
        assert!((pp.lambda() - 0.01).abs() < 1e-15);

        let sp = StandardParams {
            r: 1.0,
            K: 1.0,
            q: 1.0,
            H: 0.05,
            d: 0.1,
            p: 2.0,
        };
        match from_standard(&sp) {
            Err(Error::ScalingViolation { b }) => assert!((b - 1.9).abs() < 1e-12),
            other => panic!("expected scaling violation, got {other:?}"),
        }
    }

    #[test]
    fn state_rejects_nonpositive() {
        assert!(State::new(0.0, 0.5).is_err());
        assert!(State::new(1.0, -0.5).is_err());
        let st = State::new(0.3, 0.2).unwrap();
        let (x, s) = st.to_log().to_linear();
        assert!((x - 0.3).abs() < 1e-16 && (s - 0.2).abs() < 1e-16);
    }
}
