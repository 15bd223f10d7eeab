mod common;

use common::Oracle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmac::integrator::{integrate_until_event, step, trace, Direction, Dopri5, EventSpec, StepControl};
use rmac::model::{LogState, Params};

#[test]
fn matches_rk4_oracle_on_random_starts() {
    let p = Params::new(0.05, 0.05).unwrap();
    let oracle = Oracle { a: 0.05, lambda: 0.05 };
    let ctl = StepControl::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let starts: Vec<(f64, f64)> = (0..10)
        .map(|_| (rng.random_range(0.5..1.5), rng.random_range(0.05..0.5)))
        .collect();
    std::thread::scope(|sc| {
        let handles: Vec<_> = starts
            .iter()
            .map(|&(x, s)| {
                sc.spawn(move || {
                    let ls = LogState::new(x.ln(), s.ln());
                    let out = trace(ls, &p, 50.0, 0, &ctl).unwrap();
                    let (t, end) = *out.last().unwrap();
                    assert_eq!(t, 50.0);
                    let (u, v) = oracle.run(ls.u, ls.v, 1e-6, 50_000_000);
                    (x, s, (end.u - u).abs().max((end.v - v).abs()))
                })
            })
            .collect();
        for h in handles {
            let (x, s, d) = h.join().unwrap();
            assert!(d < 1e-8, "start ({x}, {s}) deviates by {d:e}");
        }
    });
}

#[test]
fn accepted_steps_meet_tolerance() {
    let p = Params::new(0.03, 0.07).unwrap();
    let ctl = StepControl::default();
    let mut ig = Dopri5::new(LogState::new(1.3f64.ln(), 0.07f64.ln()), &p, &ctl).unwrap();
    while ig.time() < 300.0 {
        ig.advance(300.0).unwrap();
        assert!(ig.last_error() <= 1.0);
        assert!(ig.state().is_finite());
    }
    assert!(ig.n_steps() > 100);
}

#[test]
fn prey_events_localized() {
    let p = Params::new(0.02, 0.04).unwrap();
    let ctl = StepControl::default();
    let mut ls = LogState::new(1.3f64.ln(), 0.04f64.ln());
    for (level, dir) in [
        (0.01, Direction::Decreasing),
        (1e-6, Direction::Decreasing),
        (1e-6, Direction::Increasing),
        (0.04, Direction::Increasing),
        (0.8, Direction::Increasing),
        (0.04, Direction::Decreasing),
    ] {
        let hit = integrate_until_event(ls, &p, EventSpec::cross_s(level, dir), &ctl, 1e6).unwrap();
        assert!(hit.converged);
        let miss = (hit.state.v - level.ln()).abs();
        assert!(miss < 1e-12 * level.ln().abs().max(1.0), "level {level}: {miss:e}");
        ls = hit.state;
    }
}

#[test]
fn isocline_and_predator_events() {
    let p = Params::new(0.05, 0.05).unwrap();
    let ctl = StepControl::default();
    let start = LogState::new(1.3f64.ln(), 0.05f64.ln());
    let h = integrate_until_event(start, &p, EventSpec::cross_h(Direction::Decreasing), &ctl, 1e6).unwrap();
    assert!(EventSpec::cross_h(Direction::Decreasing).value(&h.state, &p).abs() < 1e-10);
    let x = integrate_until_event(start, &p, EventSpec::cross_x(0.5, Direction::Decreasing), &ctl, 1e6).unwrap();
    assert!((x.state.u - 0.5f64.ln()).abs() < 1e-12);
}

#[test]
fn deterministic_bits() {
    let p = Params::new(0.04, 0.06).unwrap();
    let ctl = StepControl::default();
    let ls = LogState::new(0.2, -1.0);
    let a = trace(ls, &p, 120.0, 500, &ctl).unwrap();
    let b = trace(ls, &p, 120.0, 500, &ctl).unwrap();
    let bits = |v: &Vec<(f64, LogState)>| -> Vec<u64> {
        v.iter().flat_map(|(t, s)| [t.to_bits(), s.u.to_bits(), s.v.to_bits()]).collect()
    };
    assert_eq!(bits(&a), bits(&b));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn states_stay_positive(
        a in 0.005f64..0.099,
        l in 0.005f64..0.099,
        x in 1e-6f64..2.0,
        s in 1e-6f64..0.999,
    ) {
        let p = Params::new(a, l).unwrap();
        let out = trace(LogState::new(x.ln(), s.ln()), &p, 100.0, 0, &StepControl::default()).unwrap();
        for (_, st) in out {
            prop_assert!(st.is_finite());
            prop_assert!(st.x() >= 0.0 && st.s() >= 0.0);
        }
    }

    #[test]
    fn single_step_error_bounded(
        a in 0.005f64..0.099,
        l in 0.005f64..0.099,
        u in -30.0f64..0.5,
        v in -30.0f64..-0.01,
        dt in 1e-4f64..0.5,
    ) {
        let p = Params::new(a, l).unwrap();
        let out = step(LogState::new(u, v), dt, &p, &StepControl::default()).unwrap();
        prop_assert!(out.err_est <= 1.0);
        prop_assert!(out.dt_taken > 0.0 && out.dt_taken <= dt);
        prop_assert!(out.state.is_finite());
    }
}
