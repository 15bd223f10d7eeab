//! Fixed-step RK4 reference in log coordinates, written without the library's vector field.
#![allow(dead_code)]

#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub a: f64,
    pub lambda: f64,
}

impl Oracle {
    pub fn rhs(&self, u: f64, v: f64) -> (f64, f64) {
        let s = v.exp();
        let du = s - self.lambda;
        let dv = -v.exp_m1() * (s + self.a) - u.exp();
        (du, dv)
    }

    pub fn step(&self, u: f64, v: f64, dt: f64) -> (f64, f64) {
        let (k1u, k1v) = self.rhs(u, v);
        let (k2u, k2v) = self.rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
        let (k3u, k3v) = self.rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
        let (k4u, k4v) = self.rhs(u + dt * k3u, v + dt * k3v);
        (
            u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }

    /// State after `n` steps of size `dt`.
    pub fn run(&self, mut u: f64, mut v: f64, dt: f64, n: u64) -> (f64, f64) {
        for _ in 0..n {
            (u, v) = self.step(u, v, dt);
        }
        (u, v)
    }

    /// Extrema `(x_max, ln_x_min, s_max, ln_s_min)` over one revolution starting
    /// on the descending branch of `s = λ` at `ln x = u0`.
    pub fn revolution_extrema(&self, u0: f64, dt: f64) -> (f64, f64, f64, f64) {
        let lv = self.lambda.ln();
        let (mut u, mut v) = (u0, lv);
        let (mut u_max, mut u_min, mut v_max, mut v_min) = (f64::MIN, f64::MAX, f64::MIN, f64::MAX);
        // 0: left the section, 1: below λ after the minimum of x, 2: above λ again.
        let mut phase = 0;
        loop {
            let (nu, nv) = self.step(u, v, dt);
            match phase {
                0 if nv < lv => phase = 1,
                1 if nv >= lv => phase = 2,
                2 if nv < lv => {
                    u_max = u_max.max(u).max(nu);
                    break;
                }
                _ => {}
            }
            (u, v) = (nu, nv);
            u_min = u_min.min(u);
            v_min = v_min.min(v);
            v_max = v_max.max(v);
            if phase == 2 {
                u_max = u_max.max(u);
            }
        }
        (u_max.exp(), u_min, v_max.exp(), v_min)
    }
}
