use rmac::bounds::{kappa1, kappa2, kappa3};
use rmac::certificates::u_energy_log;
use rmac::cycle::{
    default_c2, find_cycle, find_cycle_with, return_map, revolution_samples, tau_measures, CycleOptions,
    SectionPoint,
};
use rmac::integrator::{Dopri5, Direction, EventSpec, StepControl};
use rmac::model::Params;

const AXIS: [f64; 10] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.099];

fn grid() -> impl Iterator<Item = Params> {
    AXIS.iter()
        .flat_map(|&a| AXIS.iter().map(move |&l| Params::new(a, l).unwrap()))
}

#[test]
fn contraction_is_eventually_monotone() {
    let ctl = StepControl::default();
    for p in grid() {
        let opts = CycleOptions {
            cycle_tol: 1e-12,
            ..CycleOptions::default()
        };
        let c = find_cycle_with(&p, &ctl, &opts).unwrap();
        // Increments below 1e-11 are at the integration noise floor.
        let inc: Vec<f64> = c.increments.iter().copied().filter(|&d| d > 1e-11).collect();
        for w in inc.windows(2) {
            assert!(w[1] < w[0], "a={} lambda={}: {:?}", p.a(), p.lambda(), c.increments);
        }
    }
}

#[test]
fn unique_from_both_sides() {
    let ctl = StepControl::default();
    for &(a, l) in &[(0.01, 0.01), (0.05, 0.02), (0.099, 0.099), (0.02, 0.09), (0.09, 0.03)] {
        let p = Params::new(a, l).unwrap();
        let tol = CycleOptions::default().cycle_tol;
        let xs: Vec<f64> = [1.05, 1.55]
            .iter()
            .map(|&x0| {
                let opts = CycleOptions {
                    x0,
                    ..CycleOptions::default()
                };
                find_cycle_with(&p, &ctl, &opts).unwrap().x_star
            })
            .collect();
        assert!(((xs[0] - xs[1]) / xs[0]).abs() < 10.0 * tol, "a={a} lambda={l}: {xs:?}");
    }
}

#[test]
fn return_map_brackets_fixed_point() {
    let ctl = StepControl::default();
    let p = Params::new(0.06, 0.04).unwrap();
    let c = find_cycle(&p, &ctl, 50).unwrap();
    let below = return_map(SectionPoint::new(1.05, &p).unwrap(), &p, &ctl).unwrap();
    let above = return_map(SectionPoint::new(1.55, &p).unwrap(), &p, &ctl).unwrap();
    assert!(below.x > 1.05 && below.x < c.x_star);
    assert!(above.x < 1.55 && above.x > c.x_star);
}

#[test]
fn tau_inside_kappa_brackets() {
    let ctl = StepControl::default();
    for p in grid() {
        let c = find_cycle(&p, &ctl, 50).unwrap();
        let t = tau_measures(&c, &p);
        let (a, l) = (p.a(), p.lambda());
        assert!(t.tau_s > kappa2(l) && t.tau_s < kappa3(a, l).unwrap(), "a={a} l={l} {t:?}");
        assert!(t.tau_x > 1.0 && t.tau_x < kappa1(a, l).unwrap(), "a={a} l={l} {t:?}");
    }
}

#[test]
fn monotone_passage_through_regions_two_and_three() {
    let ctl = StepControl::default();
    for &(a, l) in &[(0.03, 0.05), (0.08, 0.02), (0.099, 0.099)] {
        let p = Params::new(a, l).unwrap();
        let c = find_cycle(&p, &ctl, 50).unwrap();
        let cr = c.crossings;
        let samples = revolution_samples(SectionPoint::new(c.x_star, &p).unwrap(), &p, &ctl, 1e7).unwrap();
        let seg = |t0: f64, t1: f64| -> Vec<_> {
            samples.iter().filter(|(t, _)| *t >= t0 && *t <= t1).map(|(_, s)| *s).collect()
        };
        // Region 2: start of the pass to the prey minimum.
        for w in seg(0.0, cr.p3.tau).windows(2) {
            assert!(w[1].v < w[0].v && w[1].u < w[0].u);
        }
        // Region 3: prey minimum to the predator minimum.
        for w in seg(cr.p3.tau, cr.p6.tau).windows(2) {
            assert!(w[1].v > w[0].v && w[1].u < w[0].u);
        }
    }
}

#[test]
fn energy_nondecreasing_below_second_section() {
    let ctl = StepControl::default();
    for &(a, l) in &[(0.01, 0.01), (0.05, 0.05), (0.09, 0.02), (0.02, 0.09)] {
        let p = Params::new(a, l).unwrap();
        let c = find_cycle(&p, &ctl, 50).unwrap();
        let start = c.crossings.p2.state;
        let h = a + default_c2() * l;
        let mut ig = Dopri5::new(start, &p, &ctl).unwrap();
        let mut seg = vec![(0.0, start)];
        ig.until_first_recording(&[EventSpec::cross_h(Direction::Decreasing)], 1e7, &mut seg)
            .unwrap();
        let e: Vec<f64> = seg.iter().map(|(_, s)| u_energy_log(s, h, &p)).collect();
        let pairs = e.len() - 1;
        let good = e.windows(2).filter(|w| w[1] >= w[0]).count();
        let scale = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bad_ok = e.windows(2).filter(|w| w[1] < w[0]).all(|w| w[0] - w[1] < 1e-12 * scale);
        assert!(pairs > 10);
        assert!(good as f64 >= 0.999 * pairs as f64 || bad_ok, "a={a} l={l}: {good}/{pairs}");
    }
}
