//! Closed-form brackets for the cycle extrema, in scaled and in standard units.
//!
//! Minimum bounds are carried as logarithms throughout: `e^{−x_max/a}` spans
//! dozens of decades over the admissible parameter range.

use serde::{Deserialize, Serialize};

use crate::certificates::{vg, CertificateReport, CheckEntry};
use crate::cycle::LimitCycleSummary;
use crate::error::{Error, Result};
use crate::model::{from_standard, Params, StandardParams};

/// Upper a-priori bound on the maximal predator density.
pub const X_MAX_CAP: f64 = 1.6;
/// Lower bound on the maximal prey density.
pub const S_MAX_FLOOR: f64 = 0.9;
/// Relative log-space slack used by [`check_bounds`].
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }

    fn shifted(self, by: f64) -> Self {
        Interval::new(self.lo + by, self.hi + by)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    /// `(1, min(1.6, V_g(λ)))`.
    pub x_max: Interval,
    pub s_max: Interval,
    pub ln_x_min: Interval,
    pub ln_s_min: Interval,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    /// The `V_g(λ)` bound on `x_max` before capping at 1.6.
    pub x_max_hi_vg: f64,
    pub x_max_used: f64,
}

/// Bounds in standard units: predator `X = (rK/q)·x`, prey `S = K·s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardBoundSet {
    pub x_max: Interval,
    pub s_max: Interval,
    pub ln_x_min: Interval,
    pub ln_s_min: Interval,
    pub predator_scale: f64,
    pub prey_scale: f64,
    pub scaled: BoundSet,
}

/// `κ₁ = (1 + e⁻²λ/a)/(1 − 2.1λ − 0.31a)`.
pub fn kappa1(a: f64, lambda: f64) -> Result<f64> {
    let den = 1.0 - 2.1 * lambda - 0.31 * a;
    if !(a > 0.0) || !(den > 0.0) {
        return Err(Error::OutOfRange(format!("kappa1 undefined at a = {a}, lambda = {lambda}")));
    }
    Ok((1.0 + (-2f64).exp() * lambda / a) / den)
}

/// `κ₂ = 1/(1 + λ(1 − ln λ))`.
pub fn kappa2(lambda: f64) -> f64 {
    1.0 / (1.0 + lambda * (1.0 - lambda.ln()))
}

/// `κ₃ = 1/(1 − 0.3λ − a(1.3 − ln a))`.
pub fn kappa3(a: f64, lambda: f64) -> Result<f64> {
    let den = 1.0 - 0.3 * lambda - a * (1.3 - a.ln());
    if !(a > 0.0) || !(den > 0.0) {
        return Err(Error::OutOfRange(format!("kappa3 undefined at a = {a}, lambda = {lambda}")));
    }
    Ok(1.0 / den)
}

/// Brackets for the four extrema with `x_max_used` inserted into the exponential bounds.
pub fn theorem1_bounds(p: &Params, x_max_used: f64) -> Result<BoundSet> {
    if !(1.0..=X_MAX_CAP).contains(&x_max_used) {
        return Err(Error::OutOfDomain(format!("x_max_used = {x_max_used} outside [1, 1.6]")));
    }
    let (a, l) = (p.a(), p.lambda());
    let k1 = kappa1(a, l)?;
    let k2 = kappa2(l);
    let k3 = kappa3(a, l)?;
    let vg_l = vg(l, p);
    Ok(BoundSet {
        x_max: Interval::new(1.0, X_MAX_CAP.min(vg_l)),
        s_max: Interval::new(S_MAX_FLOOR, 1.0),
        ln_x_min: Interval::new(-x_max_used / a, -x_max_used / (a * k1)),
        ln_s_min: Interval::new(-x_max_used / (l * k2), -x_max_used / (l * k3)),
        kappa1: k1,
        kappa2: k2,
        kappa3: k3,
        x_max_hi_vg: vg_l,
        x_max_used,
    })
}

/// [`theorem1_bounds`] for standard parameters; `x_max_used` is the scaled `qX_max/(rK)`.
pub fn corollary1_bounds(sp: &StandardParams, x_max_used: f64) -> Result<StandardBoundSet> {
    let p = from_standard(sp)?;
    let b = theorem1_bounds(&p, x_max_used)?;
    let px = sp.predator_scale();
    let ps = sp.prey_scale();
    Ok(StandardBoundSet {
        x_max: Interval::new(px * b.x_max.lo, px * b.x_max.hi),
        s_max: Interval::new(ps * b.s_max.lo, ps * b.s_max.hi),
        ln_x_min: b.ln_x_min.shifted(px.ln()),
        ln_s_min: b.ln_s_min.shifted(ps.ln()),
        predator_scale: px,
        prey_scale: ps,
        scaled: b,
    })
}

/// Log-space approximations `(ln x_min, ln s_min) ≈ (−x_max/a, −x_max/λ)`.
pub fn remark_approximations(p: &Params, x_max: f64) -> (f64, f64) {
    (-x_max / p.a(), -x_max / p.lambda())
}

/// Relative log-space margin of `v` inside `(lo, hi)`, minus [`BOUND_SLACK`].
fn log_margin(v: f64, iv: Interval) -> f64 {
    let dist = (v - iv.lo).min(iv.hi - v);
    let scale = v.abs();
    let rel = if scale > 0.0 { dist / scale } else { dist };
    rel - BOUND_SLACK
}

/// Compare measured extrema with `b` (built from the measured `x_max`) in log space.
pub fn check_bounds(c: &LimitCycleSummary, b: &BoundSet) -> CertificateReport {
    let ln_iv = |iv: Interval| Interval::new(iv.lo.ln(), iv.hi.ln());
    let entries = vec![
        CheckEntry::new(
            "x_max",
            log_margin(c.x_max.ln(), ln_iv(b.x_max)),
            "1 < x_max < min(1.6, V_g(lambda))",
        ),
        CheckEntry::new(
            "s_max",
            log_margin(c.ln_s_max, ln_iv(b.s_max)),
            "0.9 < s_max < 1",
        ),
        CheckEntry::new(
            "x_min",
            log_margin(c.ln_x_min, b.ln_x_min),
            "-x_max/a < ln x_min < -x_max/(a kappa1)",
        ),
        CheckEntry::new(
            "s_min",
            log_margin(c.ln_s_min, b.ln_s_min),
            "-x_max/(lambda kappa2) < ln s_min < -x_max/(lambda kappa3)",
        ),
    ];
    CertificateReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        assert!((kappa1(0.1, 0.1).unwrap() - 1.49583).abs() < 1e-5);
        assert!((kappa2(0.1) - 0.75174).abs() < 1e-5);
        assert!((kappa3(0.1, 0.1).unwrap() - 1.64004).abs() < 1e-5);
        assert!(kappa3(0.5, 0.1).is_err());
        assert!(kappa1(0.0, 0.1).is_err());
    }

    #[test]
    fn corner_brackets() {
        let p = Params::closed(0.1, 0.1).unwrap();
        let b = theorem1_bounds(&p, 1.0).unwrap();
        assert!((b.ln_x_min.lo + 10.0).abs() < 1e-12);
        assert!((b.ln_x_min.hi + 6.6853).abs() < 1e-3);
        assert!((b.ln_s_min.lo + 13.3025).abs() < 1e-3);
        assert!((b.ln_s_min.hi + 6.0974).abs() < 1e-3);
        assert!(b.x_max.hi < 1.588);
        assert!(theorem1_bounds(&p, 1.7).is_err());
    }

    #[test]
    fn log_approximations() {
        let p = Params::new(0.1 - 1e-12, 0.01).unwrap();
        let (lx, ls) = remark_approximations(&p, 1.2);
        assert!((lx + 12.0).abs() < 1e-9);
        assert!((ls + 120.0).abs() < 1e-9);
        let b = theorem1_bounds(&p, 1.2).unwrap();
        assert_eq!(lx, b.ln_x_min.lo);
        assert!(b.ln_s_min.contains(ls));
    }

    #[test]
    fn standard_rescaling() {
        let sp = StandardParams {
            r: 2.0,
            K: 10.0,
            q: 3.0,
            H: 0.5,
            p: 2.4,
            d: 0.4,
        };
        let sb = corollary1_bounds(&sp, 1.2).unwrap();
        let b = theorem1_bounds(&Params::new(0.5 / 10.0, 0.4 * 0.5 / (2.0 * 10.0)).unwrap(), 1.2).unwrap();
        assert_eq!(sb.scaled, b);
        assert!((sb.predator_scale - 20.0 / 3.0).abs() < 1e-15);
        assert_eq!(sb.s_max, Interval::new(9.0, 10.0));
        assert_eq!(sb.ln_s_min.lo, b.ln_s_min.lo + 10f64.ln());
    }
}
