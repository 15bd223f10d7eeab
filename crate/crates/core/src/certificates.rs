//! Barrier curves, energy functions and bracket equations that confine the
//! trajectory, together with numerical verifiers and a composite certifier for
//! a computed cycle.
//!
//! Every exponential bound is evaluated and compared in log space.

use serde::{Deserialize, Serialize};

use crate::bounds::{kappa1, kappa2, kappa3};
use crate::cycle::{CycleCrossings, LimitCycleSummary};
use crate::error::{Assumption, Error, Result};
use crate::model::{isocline_h, LogState, Params};

/// One verified inequality. `margin` is signed so that positive means passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub anchor: String,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, margin: f64, anchor: impl Into<String>) -> Self {
        CheckEntry {
            name: name.into(),
            passed: margin > 0.0,
            margin,
            anchor: anchor.into(),
        }
    }

    fn from_result(name: &str, margin: Result<f64>, anchor: &str) -> Self {
        match margin {
            Ok(m) => CheckEntry::new(name, m, anchor),
            Err(e) => CheckEntry::new(name, f64::NEG_INFINITY, format!("{anchor} ({e})")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub entries: Vec<CheckEntry>,
}

impl CertificateReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed).count()
    }

    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn merge(mut self, other: CertificateReport) -> Self {
        self.entries.extend(other.entries);
        self
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Constants of the intermediate prey sections `s = c1·λ` and `s = c2·λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Region2Constants {
    pub c1: f64,
    pub c2: f64,
    /// `(1 − c1 + ln c1)·λ`
    pub C1: f64,
    /// `(c1 − c2 + ln(c2/c1))·λ`
    pub C2: f64,
    /// `a + λ`
    pub H0: f64,
    /// `a + c1·λ`
    pub H1: f64,
    /// `a + c2·λ`
    pub H2: f64,
    /// `c2/c1`
    pub M: f64,
    /// `(1 − c1)·λ/H1`
    pub A: f64,
}

/// Default section ratios `c1 = e⁻²`, `c2 = e⁻⁴`.
pub fn default_cs() -> (f64, f64) {
    (crate::cycle::default_c1(), crate::cycle::default_c2())
}

/// `V_g(s) = α(1−s)/(1+β(1−s))`, `α = 2−λ+a`, `β = (λ+1)/(a−2λ+3)`.
pub fn vg(s: f64, p: &Params) -> f64 {
    vg_with(s, p.a(), p.lambda())
}

/// [`vg`] for raw parameters, admitting limits such as `λ = 0`.
pub fn vg_with(s: f64, a: f64, lambda: f64) -> f64 {
    let alpha = 2.0 - lambda + a;
    let beta = (lambda + 1.0) / (a - 2.0 * lambda + 3.0);
    alpha * (1.0 - s) / (1.0 + beta * (1.0 - s))
}

/// Time derivative of `V = (1+β(1−s))x − α(1−s)` along the flow at `(x, s)`.
pub fn vg_derivative(x: f64, s: f64, p: &Params) -> f64 {
    let (a, l) = (p.a(), p.lambda());
    let alpha = 2.0 - l + a;
    let beta = (l + 1.0) / (a - 2.0 * l + 3.0);
    let ds = (isocline_h(s, a) - x) * s;
    let dx = (s - l) * x;
    -beta * ds * x + (1.0 + beta * (1.0 - s)) * dx + alpha * ds
}

/// Sample `n` interior points of `x = V_g(s)` and check that the flow points inward.
///
/// `n` is raised to 100 if smaller. The endpoint `s = 1` must give `|V′| ≤ 1e−12`.
pub fn verify_vg_trapping(p: &Params, n: usize) -> CheckEntry {
    let n = n.max(100);
    let mut margin = f64::INFINITY;
    for i in 1..=n {
        let s = i as f64 / (n + 1) as f64;
        margin = margin.min(-vg_derivative(vg(s, p), s, p));
    }
    let end = vg_derivative(vg(1.0, p), 1.0, p).abs();
    if end > 1e-12 {
        margin = -end;
    }
    CheckEntry::new("vg_trapping", margin, "V' < 0 on x = V_g(s), 0 < s < 1")
}

const F_PIECES: [(f64, f64, [f64; 3]); 4] = [
    (0.7, 0.9, [0.513, 1.33, -2.0]),
    (0.5, 0.7, [1.045, -0.13, -1.0]),
    (0.3, 0.5, [1.08, -0.2, -1.0]),
    (0.1, 0.3, [0.975, 0.45, -2.0]),
];

fn f_piece(s: f64) -> Option<&'static [f64; 3]> {
    if !(0.1..=0.9).contains(&s) {
        return None;
    }
    F_PIECES
        .iter()
        .find(|(lo, hi, _)| s > *lo && s <= *hi)
        .or(F_PIECES.last())
        .map(|(_, _, c)| c)
}

/// Four-piece quadratic lower barrier on `[0.1, 0.9]`.
pub fn f_lower_barrier(s: f64) -> Result<f64> {
    let c = f_piece(s)
        .ok_or_else(|| Error::OutOfDomain(format!("barrier defined on [0.1, 0.9], got s = {s}")))?;
    Ok(c[0] + c[1] * s + c[2] * s * s)
}

/// Check `d/dτ (x − f(s)) > 0` on `x = f(s)` for `a = 0`, `λ = 0.1`, one entry per piece.
pub fn verify_f_transversality(n: usize) -> CertificateReport {
    let n = n.max(100);
    let lambda = 0.1;
    let entries = F_PIECES
        .iter()
        .map(|&(lo, hi, c)| {
            let mut margin = f64::INFINITY;
            for j in 0..n {
                let s = lo + (hi - lo) * j as f64 / (n - 1) as f64;
                let x = c[0] + c[1] * s + c[2] * s * s;
                let df = c[1] + 2.0 * c[2] * s;
                let ds = ((1.0 - s) * s - x) * s;
                let dx = (s - lambda) * x;
                margin = margin.min(dx - df * ds);
            }
            CheckEntry::new(
                format!("f_transversality[{lo},{hi}]"),
                margin,
                "flow crosses x = f(s) upward",
            )
        })
        .collect();
    CertificateReport { entries }
}

/// `U = x − H ln x + s − λ ln s`.
pub fn u_energy(x: f64, s: f64, h: f64, p: &Params) -> f64 {
    x - h * x.ln() + s - p.lambda() * s.ln()
}

/// [`u_energy`] from log coordinates.
pub fn u_energy_log(ls: &LogState, h: f64, p: &Params) -> f64 {
    ls.u.exp() - h * ls.u + ls.v.exp() - p.lambda() * ls.v
}

/// `θ(x) = x − H ln x`.
pub fn theta(x: f64, h: f64) -> f64 {
    x - h * x.ln()
}

/// Root of `θ(x) = C` below `H`, with its certified bracket `(e^{−C/H}, (1+ẑ)e^{−C/H})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRoot {
    pub x_bar: f64,
    pub ln_x_bar: f64,
    pub lo: f64,
    pub hi: f64,
    pub ln_lo: f64,
    pub ln_hi: f64,
    /// `ln k` with `k = H e^{C/H}`.
    pub ln_k: f64,
    pub z_hat: f64,
}

/// `ẑ = 1/√(k² − 4k)` from `ln k`, without overflowing `k`.
fn z_hat_from_ln_k(ln_k: f64) -> f64 {
    let inv_k = (-ln_k).exp();
    inv_k / (1.0 - 4.0 * inv_k).sqrt()
}

fn check_h(h: f64, which: Assumption) -> Result<()> {
    if h > 0.0 && h <= 0.2 {
        Ok(())
    } else {
        Err(Error::assumption(which, format!("H = {h} outside (0, 0.2]")))
    }
}

/// Solve `θ(x) = C`, `x < H`, by bisection on `ln x`.
pub fn solve_theta_small_branch(c: f64, h: f64) -> Result<ThetaRoot> {
    check_h(h, Assumption::ThetaBranch)?;
    if !(c > theta(h, h)) {
        return Err(Error::assumption(
            Assumption::ThetaBranch,
            format!("C = {c} must exceed theta(H) = {}", theta(h, h)),
        ));
    }
    let ln_k = h.ln() + c / h;
    if !(ln_k > 4f64.ln()) {
        return Err(Error::assumption(
            Assumption::ThetaBranch,
            format!("k = H exp(C/H) = {} must exceed 4", ln_k.exp()),
        ));
    }
    let g = |w: f64| w.exp() - h * w - c;
    let (mut lo, mut hi) = (-c / h, h.ln());
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z_hat = z_hat_from_ln_k(ln_k);
    let ln_lo = -c / h;
    let ln_hi = ln_lo + z_hat.ln_1p();
    let w = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    // Rounding in `C/H` can move the computed root an ulp past a bracket end.
    let w = w.clamp(ln_lo, ln_hi);
    Ok(ThetaRoot {
        x_bar: w.exp(),
        ln_x_bar: w,
        lo: ln_lo.exp(),
        hi: ln_hi.exp(),
        ln_lo,
        ln_hi,
        ln_k,
        z_hat,
    })
}

/// Larger root of `x² − (H+C+u)x + Hu`, the one in `(√(Hu), u)`.
pub fn q_root_plus(h: f64, c: f64, u: f64) -> Result<f64> {
    check_h(h, Assumption::QuadraticBracket)?;
    if !(h < u) {
        return Err(Error::assumption(
            Assumption::QuadraticBracket,
            format!("need H < u, got H = {h}, u = {u}"),
        ));
    }
    let floor = -(u.sqrt() - h.sqrt()).powi(2);
    if !(c > floor && c <= 0.0) {
        return Err(Error::assumption(
            Assumption::QuadraticBracket,
            format!("C = {c} outside ({floor}, 0]"),
        ));
    }
    let b = h + c + u;
    // Discriminant b² − 4Hu written without cancellation at small C.
    let disc = (u - h).powi(2) + c * (2.0 * (h + u) + c);
    Ok(0.5 * (b + disc.max(0.0).sqrt()))
}

pub fn region2_constants(p: &Params, c1: f64, c2: f64) -> Result<Region2Constants> {
    region2_constants_with(p.a(), p.lambda(), c1, c2)
}

/// [`region2_constants`] for raw parameters.
pub fn region2_constants_with(a: f64, lambda: f64, c1: f64, c2: f64) -> Result<Region2Constants> {
    if !(0.0 < c2 && c2 < c1 && c1 < 1.0) {
        return Err(Error::OutOfDomain(format!("need 0 < c2 < c1 < 1, got c1 = {c1}, c2 = {c2}")));
    }
    let h1 = a + c1 * lambda;
    Ok(Region2Constants {
        c1,
        c2,
        C1: (1.0 - c1 + c1.ln()) * lambda,
        C2: (c1 - c2 + (c2 / c1).ln()) * lambda,
        H0: a + lambda,
        H1: h1,
        H2: a + c2 * lambda,
        M: c2 / c1,
        A: (1.0 - c1) * lambda / h1,
    })
}

/// Intermediate values of the general Region-2/3 chain for the maximal start `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region2Chain {
    pub constants: Region2Constants,
    pub x1_plus: f64,
    pub x2_plus: f64,
    /// Lower bounds for the crossings of `s = c1·λ` and `s = c2·λ`.
    pub x1_lower: f64,
    pub x2_lower: f64,
    pub c_tilde: f64,
    pub ln_k: f64,
    pub z_hat: f64,
    /// `ln((1+ẑ) M^A e^{−C̃/H2})`
    pub ln_x6_upper: f64,
}

/// Evaluate the chain after checking its three assumptions.
pub fn region2_chain(p: &Params, x0: f64, c1: f64, c2: f64) -> Result<Region2Chain> {
    let rc = region2_constants(p, c1, c2)?;
    let floor1 = -(x0.max(rc.H0).sqrt() - rc.H0.sqrt()).powi(2);
    if !(x0 > rc.H0 && rc.C1 > floor1) {
        return Err(Error::assumption(
            Assumption::Ass1,
            format!("C1 = {} must exceed -(sqrt(x0) - sqrt(H0))^2 = {floor1}", rc.C1),
        ));
    }
    let x1p = q_root_plus(rc.H0, rc.C1, x0)?;
    let floor2 = -(x1p.max(rc.H1).sqrt() - rc.H1.sqrt()).powi(2);
    if !(x1p > rc.H1 && rc.C2 > floor2) {
        return Err(Error::assumption(
            Assumption::Ass2,
            format!("C2 = {} must exceed -(sqrt(x1+) - sqrt(H1))^2 = {floor2}", rc.C2),
        ));
    }
    let x2p = q_root_plus(rc.H1, rc.C2, x1p)?;
    let c_tilde = theta(x2p, rc.H2);
    let ln_k = rc.H2.ln() + c_tilde / rc.H2;
    if !(ln_k > 4f64.ln()) {
        return Err(Error::assumption(
            Assumption::Ass3,
            format!("k = H2 exp(C~/H2) = {} must exceed 4", ln_k.exp()),
        ));
    }
    let z_hat = z_hat_from_ln_k(ln_k);
    let x1_lower = x0 + rc.C1 / (1.0 - rc.H0 / x1p);
    Ok(Region2Chain {
        constants: rc,
        x1_plus: x1p,
        x2_plus: x2p,
        x1_lower,
        x2_lower: x1_lower + rc.C2 / (1.0 - rc.H1 / x2p),
        c_tilde,
        ln_k,
        z_hat,
        ln_x6_upper: z_hat.ln_1p() + rc.A * rc.M.ln() - c_tilde / rc.H2,
    })
}

/// Upper bound `(1+ẑ) M^A e^{−θ(x2+)/H2}` on the minimal predator density for general `c1`, `c2`.
pub fn lemma45_x6_upper(p: &Params, x0: f64, c1: f64, c2: f64) -> Result<f64> {
    Ok(region2_chain(p, x0, c1, c2)?.ln_x6_upper.exp())
}

/// The chain values `(x1*, x2*)` at `a = λ = 0.1`, `x0 = 1`.
pub fn frozen_roots(c1: f64, c2: f64) -> Result<(f64, f64)> {
    let rc = region2_constants_with(0.1, 0.1, c1, c2)?;
    let x1 = q_root_plus(rc.H0, rc.C1, 1.0)?;
    let x2 = q_root_plus(rc.H1, rc.C2, x1)?;
    Ok((x1, x2))
}

/// Variant of [`lemma45_x6_upper`] with `x2+` replaced by `x̃2 = x0 + C1/D1* + C2/D2*`; returns the log.
pub fn ln_lemma5_x6_upper(p: &Params, x0: f64, c1: f64, c2: f64) -> Result<f64> {
    let chain = region2_chain(p, x0, c1, c2)?;
    let rc = chain.constants;
    let (x1s, x2s) = frozen_roots(c1, c2)?;
    let d1 = 1.0 - 0.2 / x1s;
    let d2 = 1.0 - 0.1 * (1.0 + c1) / x2s;
    let x2t = x0 + rc.C1 / d1 + rc.C2 / d2;
    let th = theta(x2t, rc.H2);
    let z_hat = z_hat_from_ln_k(rc.H2.ln() + th / rc.H2);
    Ok(z_hat.ln_1p() + rc.A * rc.M.ln() - th / rc.H2)
}

/// Log of `1.015 e^{−2A−θ(x̃2)/H2}` with `x̃2 = x0 − 3.8λ` and the default section ratios.
pub fn ln_lemma3_x6_upper(p: &Params, x0: f64) -> Result<f64> {
    if !(1.0..=1.6).contains(&x0) {
        return Err(Error::assumption(
            Assumption::StartBracket,
            format!("x0 = {x0} outside [1, 1.6]"),
        ));
    }
    let (c1, c2) = default_cs();
    let chain = region2_chain(p, x0, c1, c2)?;
    let rc = chain.constants;
    let x2t = x0 - 3.8 * p.lambda();
    let th = theta(x2t, rc.H2);
    let z_hat = z_hat_from_ln_k(rc.H2.ln() + th / rc.H2);
    if !(z_hat < 0.015) {
        return Err(Error::assumption(Assumption::ZHat, format!("z^ = {z_hat} not below 0.015")));
    }
    Ok(1.015f64.ln() - 2.0 * rc.A - th / rc.H2)
}

pub fn lemma3_x6_upper(p: &Params, x0: f64) -> Result<f64> {
    ln_lemma3_x6_upper(p, x0).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredatorMinBracket {
    pub lo: f64,
    pub hi: f64,
    pub ln_lo: f64,
    pub ln_hi: f64,
    pub kappa1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreyMinBracket {
    pub lo: f64,
    pub hi: f64,
    pub ln_lo: f64,
    pub ln_hi: f64,
    pub kappa2: f64,
    pub kappa3: f64,
}

fn check_start(x0: f64) -> Result<()> {
    if (1.0..=1.6).contains(&x0) {
        Ok(())
    } else {
        Err(Error::assumption(Assumption::StartBracket, format!("x0 = {x0} outside [1, 1.6]")))
    }
}

/// `(e^{−x0/a}, e^{−x0/(aκ₁)})` for the minimal predator density.
pub fn statement2_bracket(p: &Params, x0: f64) -> Result<PredatorMinBracket> {
    check_start(x0)?;
    let k1 = kappa1(p.a(), p.lambda())?;
    let ln_lo = -x0 / p.a();
    let ln_hi = -x0 / (p.a() * k1);
    Ok(PredatorMinBracket {
        lo: ln_lo.exp(),
        hi: ln_hi.exp(),
        ln_lo,
        ln_hi,
        kappa1: k1,
    })
}

/// `(e^{−x0/(λκ₂)}, e^{−x0/(λκ₃)})` for the minimal prey density.
pub fn statement3_bracket(p: &Params, x0: f64) -> Result<PreyMinBracket> {
    check_start(x0)?;
    let k2 = kappa2(p.lambda());
    let k3 = kappa3(p.a(), p.lambda())?;
    let ln_lo = -x0 / (p.lambda() * k2);
    let ln_hi = -x0 / (p.lambda() * k3);
    Ok(PreyMinBracket {
        lo: ln_lo.exp(),
        hi: ln_hi.exp(),
        ln_lo,
        ln_hi,
        kappa2: k2,
        kappa3: k3,
    })
}

/// Energy bracket `(x̌, x̂)` for the next crossing of `s = λ*` from `(u, λ*)`:
/// small-branch roots of `θ(x) = θ(u)` with `H = a` and `H = a + λ*`.
pub fn energy_bracket(p: &Params, u: f64, lambda_star: f64) -> Result<(ThetaRoot, ThetaRoot)> {
    let lower = solve_theta_small_branch(theta(u, p.a()), p.a())?;
    let h = p.a() + lambda_star;
    let upper = solve_theta_small_branch(theta(u, h), h)?;
    Ok((lower, upper))
}

fn check_b_domain(s: f64, p: &Params) -> Result<()> {
    if s >= p.lambda() && s < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("s = {s} outside [lambda, 1)")))
    }
}

/// `ln B(s)`, `B = E1·E2·E3·E4 = F(s)/F(λ)`.
pub fn ln_region4_b(s: f64, p: &Params) -> Result<f64> {
    check_b_domain(s, p)?;
    let (a, l) = (p.a(), p.lambda());
    let k2 = l / a;
    let k3 = (1.0 - l) / (1.0 + a);
    let ln_e1 = k2 * ((s + a).ln() - s.ln());
    let ln_e2 = k2 * (l.ln() - (a + l).ln());
    let ln_e3 = k3 * ((s + a).ln() + (-l).ln_1p() - (-s).ln_1p());
    let ln_e4 = -k3 * (a + l).ln();
    Ok(ln_e1 + ln_e2 + ln_e3 + ln_e4)
}

pub fn region4_b(s: f64, p: &Params) -> Result<f64> {
    ln_region4_b(s, p).map(f64::exp)
}

/// `F(s)/F(λ)` with `F(y) = (y+a)^{k1}/(y^{k2}(1−y)^{k3})`, evaluated directly.
pub fn region4_b_direct(s: f64, p: &Params) -> Result<f64> {
    check_b_domain(s, p)?;
    let (a, l) = (p.a(), p.lambda());
    let k2 = l / a;
    let k3 = (1.0 - l) / (1.0 + a);
    let k1 = (a + l) / (a * (a + 1.0));
    let f = |y: f64| (y + a).powf(k1) / (y.powf(k2) * (1.0 - y).powf(k3));
    Ok(f(s) / f(l))
}

/// `K(s) = (e^{λ/s}(s+a)/(1−s))^{1/k}`.
pub fn region4_k(s: f64, k: f64, p: &Params) -> f64 {
    ((p.lambda() / s).exp() * (s + p.a()) / (1.0 - s)).powf(1.0 / k)
}

/// `η = K7·(1/(a+λ))^{1/k}·1.015 e^{−2A−θ(x̃2)/H2}`.
pub fn eta(p: &Params, k: f64, s7: f64, x0: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) || !(0.5..1.0).contains(&s7) {
        return Err(Error::OutOfDomain(format!("need 0 < k < 1 and 0.5 <= s7 < 1, got k = {k}, s7 = {s7}")));
    }
    let (a, l) = (p.a(), p.lambda());
    let ln_k7 = (l / s7 + (s7 + a).ln() - (1.0 - s7).ln()) / k;
    Ok((ln_k7 - (a + l).ln() / k + ln_lemma3_x6_upper(p, x0)?).exp())
}

/// Lower estimate of the prey density at which the trajectory from `(x7, s7)`
/// leaves the region `x < m(1−s)`.
pub fn region4_exit_s(x7: f64, s7: f64, m: f64) -> Result<f64> {
    if !(m > 0.0 && m <= s7 && x7 > 0.0 && x7 < m * (1.0 - s7)) {
        return Err(Error::OutOfDomain(format!(
            "need 0 < m <= s7 and 0 < x7 < m(1 - s7), got x7 = {x7}, s7 = {s7}, m = {m}"
        )));
    }
    let d = s7 + x7 / (1.0 + m) - 1.0;
    if d >= 0.0 {
        return Err(Error::OutOfDomain(format!("d = {d} must be negative")));
    }
    let e = 1.0 / (m + 1.0);
    let one_minus_s = (-d).powf(e) * x7.powf(m * e) * (1.0 + m).powf(e) / m.powf(m * e);
    Ok(1.0 - one_minus_s)
}

/// Threshold for the predator density where the trajectory crosses `s = 0.8`.
pub const X7_LIMIT: f64 = 0.012;
/// Threshold for the maximal prey density.
pub const S8_LIMIT: f64 = 0.9;

/// Check the recorded crossings of one revolution against every bound of the chain.
pub fn certify_cycle(c: &LimitCycleSummary, cr: &CycleCrossings, p: &Params) -> CertificateReport {
    let x0 = cr.start.x();
    let lambda = p.lambda();
    let ln_x6 = cr.p6.state.u;

    let check_i = CheckEntry::new(
        "x_max_bracket",
        (c.x_max - 1.0).min(vg(lambda, p) - c.x_max),
        "1 < x_max < V_g(lambda)",
    );
    let check_ii = CheckEntry::from_result(
        "region2_descent",
        region2_chain(p, x0, cr.c1, cr.c2)
            .map(|ch| (cr.p1.x() - ch.x1_lower).min(cr.p2.x() - ch.x2_lower)),
        "x1, x2 above the energy-barrier lower bounds",
    );
    let check_iii = CheckEntry::new(
        "x2_lower",
        cr.p2.x() - (x0 - 3.8 * lambda),
        "x2 > x0 - 3.8 lambda",
    );
    let check_iv = CheckEntry::from_result(
        "x6_bracket",
        statement2_bracket(p, x0).and_then(|b| {
            let l3 = ln_lemma3_x6_upper(p, x0)?;
            Ok((ln_x6 - b.ln_lo).min(b.ln_hi - ln_x6).min(l3 - ln_x6))
        }),
        "exp(-x0/a) < x6 < min(exp(-x0/(a kappa1)), 1.015 exp(-2A - theta(x0 - 3.8 lambda)/H2))",
    );
    let check_v = CheckEntry::from_result(
        "region3_ascent",
        region2_constants(p, cr.c1, cr.c2).map(|rc| cr.p4.state.u + rc.A * rc.M.ln() - cr.p5.state.u),
        "x5 < x4 M^A",
    );
    let check_vi = CheckEntry::from_result(
        "s_min_and_energy_bracket",
        statement3_bracket(p, x0).and_then(|b| {
            let ln_s3 = cr.p3.state.v;
            let (lower, upper) = energy_bracket(p, x0, lambda)?;
            Ok((ln_s3 - b.ln_lo)
                .min(b.ln_hi - ln_s3)
                .min(ln_x6 - lower.ln_x_bar)
                .min(upper.ln_x_bar - ln_x6))
        }),
        "exp(-x0/(lambda kappa2)) < s3 < exp(-x0/(lambda kappa3)); x_check < x6 < x_hat",
    );
    let check_vii = CheckEntry::new("x7_at_0.8", X7_LIMIT - cr.p7.x(), "x7 < 0.012 at s = 0.8");
    let check_viii = CheckEntry::new("s8_exit", cr.p8.s() - S8_LIMIT, "s8 > 0.9");
    CertificateReport {
        entries: vec![
            check_i, check_ii, check_iii, check_iv, check_v, check_vi, check_vii, check_viii,
        ],
    }
}
