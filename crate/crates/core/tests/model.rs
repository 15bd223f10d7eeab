use proptest::prelude::*;
use rmac::integrator::{Dopri5, StepControl};
use rmac::model::{
    classify_region, from_standard, isocline_h, log_vector_field, vector_field, LogState, Params, Region,
    StandardParams, State,
};

#[test]
fn log_field_matches_linear_field_on_grid() {
    let p = Params::new(0.04, 0.07).unwrap();
    for i in 0..100 {
        let x = 1e-8 * (2.0f64 / 1e-8).powf(i as f64 / 99.0);
        for j in 0..100 {
            let s = 1e-8 * (1.0f64 / 1e-8).powf(j as f64 / 99.0);
            let st = State { x, s };
            let (ds, dx) = vector_field(&st, &p);
            let (dv, du) = log_vector_field(&LogState::new(x.ln(), s.ln()), &p);
            for (lin, log) in [(ds / s, dv), (dx / x, du)] {
                let err = (lin - log).abs() / lin.abs().max(1e-300);
                // Near a zero of the field the comparison is absolute.
                assert!(err < 1e-13 || (lin - log).abs() < 1e-15, "x={x} s={s}: {lin} vs {log}");
            }
        }
    }
}

/// Standard-units right-hand side `(dS/dt, dX/dt, dτ/dt)`.
fn standard_rhs(sp: &StandardParams, s: f64, x: f64) -> [f64; 3] {
    let sat = sp.H + s;
    [
        sp.r * s * (1.0 - s / sp.K) - sp.q * s * x / sat,
        sp.p * s * x / sat - sp.d * x,
        sp.r * sp.K / sat,
    ]
}

fn rk4_standard(sp: &StandardParams, y: [f64; 3], dt: f64) -> [f64; 3] {
    let f = |y: [f64; 3]| standard_rhs(sp, y[0], y[1]);
    let add = |y: [f64; 3], k: [f64; 3], h: f64| [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]];
    let k1 = f(y);
    let k2 = f(add(y, k1, dt / 2.0));
    let k3 = f(add(y, k2, dt / 2.0));
    let k4 = f(add(y, k3, dt));
    std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

#[test]
fn scaled_system_reproduces_standard_trajectory() {
    let sp = StandardParams {
        r: 2.0,
        K: 10.0,
        q: 3.0,
        H: 0.5,
        p: 2.4,
        d: 0.4,
    };
    let p = from_standard(&sp).unwrap();
    let (s0, x0) = (5.0, 6.0);
    let mut y = [s0, x0, 0.0];
    let start = LogState::new((x0 / sp.predator_scale()).ln(), (s0 / sp.prey_scale()).ln());
    let mut ig = Dopri5::new(start, &p, &StepControl::default()).unwrap();
    let dt = 1e-4;
    for _ in 0..6 {
        for _ in 0..20_000 {
            y = rk4_standard(&sp, y, dt);
        }
        while ig.time() < y[2] {
            ig.advance(y[2]).unwrap();
        }
        let st = ig.state();
        let s = st.s() * sp.prey_scale();
        let x = st.x() * sp.predator_scale();
        assert!(((s - y[0]) / y[0]).abs() < 1e-6, "S {s} vs {}", y[0]);
        assert!(((x - y[1]) / y[1]).abs() < 1e-6, "X {x} vs {}", y[1]);
    }
}

proptest! {
    #[test]
    fn isocline_positive_with_peak(a in 1e-4f64..0.1, s in 1e-6f64..0.999_999) {
        prop_assert!(isocline_h(s, a) > 0.0);
        prop_assert!(isocline_h(s, a) <= isocline_h((1.0 - a) / 2.0, a));
    }

    #[test]
    fn region_matches_field_signs(
        a in 0.005f64..0.099,
        l in 0.005f64..0.099,
        x in 1e-6f64..2.0,
        s in 1e-6f64..0.999,
    ) {
        let p = Params::new(a, l).unwrap();
        let st = State { x, s };
        prop_assume!((x - isocline_h(s, a)).abs() > 1e-9 && (s - l).abs() > 1e-9);
        let (ds, dx) = vector_field(&st, &p);
        let expected = match (dx > 0.0, ds > 0.0) {
            (true, false) => Region::R1,
            (false, false) => Region::R2,
            (false, true) => Region::R3,
            (true, true) => Region::R4,
        };
        prop_assert_eq!(classify_region(&st, &p), expected);
    }

    #[test]
    fn scaling_depends_only_on_ratios(
        r in 0.1f64..5.0,
        k in 1.0f64..100.0,
        q in 0.1f64..5.0,
        frac_h in 0.001f64..0.099,
        d in 0.01f64..1.0,
    ) {
        let h = frac_h * k;
        let sp = StandardParams { r, K: k, q, H: h, p: r + d, d };
        let lambda = d * h / (r * k);
        prop_assume!(lambda < 0.1);
        let p = from_standard(&sp).unwrap();
        prop_assert!((p.a() - frac_h).abs() < 1e-15);
        prop_assert!((p.lambda() - lambda).abs() < 1e-15);
    }
}
