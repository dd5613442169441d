//! Embedded Dormand-Prince 5(4) integrator for the complex coefficient
//! equations. Fixed-leading-coefficient controller, no dense output.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;

/// Solver control for the non-autonomous coefficient equations.
#[derive(Debug, Clone, Copy)]
pub struct OdeControl {
    /// Per-step relative tolerance.
    pub rtol: f64,
    /// Per-step absolute tolerance.
    pub atol: f64,
    /// Hard cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for OdeControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights: b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrate `y' = f(s, y)` from `s0` to `s1`. `observe` is called at every
/// accepted step (including the final state) and may abort the run.
pub(crate) fn dopri5<F, O>(
    f: F,
    y0: Vec<C64>,
    s0: f64,
    s1: f64,
    ctrl: &OdeControl,
    mut observe: O,
) -> Result<(Vec<C64>, usize)>
where
    F: Fn(f64, &[C64], &mut [C64]),
    O: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let span = s1 - s0;
    if span == 0.0 {
        return Ok((y0, 0));
    }
    let mut y = y0;
    let mut s = s0;
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut stage = k1.clone();
    let mut y_new = k1.clone();

    f(s, &y, &mut k1);
    let mut h = initial_step(span, &y, &k1, ctrl);
    let mut steps = 0usize;
    let mut accepted = 0usize;

    while (s1 - s) * span.signum() > 0.0 {
        steps += 1;
        if steps > ctrl.max_steps {
            return Err(Error::OdeStepLimit { steps });
        }
        if (s + h - s1) * span.signum() > 0.0 {
            h = s1 - s;
        }

        for i in 0..n {
            stage[i] = y[i] + h * A21 * k1[i];
        }
        f(s + C2 * h, &stage, &mut k2);
        for i in 0..n {
            stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(s + C3 * h, &stage, &mut k3);
        for i in 0..n {
            stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(s + C4 * h, &stage, &mut k4);
        for i in 0..n {
            stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(s + C5 * h, &stage, &mut k5);
        for i in 0..n {
            stage[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(s + h, &stage, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(s + h, &y_new, &mut k7);

        // weighted rms error estimate
        let mut err_sq = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let ya = math::sqrt(y[i].norm_sqr());
            let yb = math::sqrt(y_new[i].norm_sqr());
            let sc = ctrl.atol + ctrl.rtol * ya.max(yb);
            err_sq += e.norm_sqr() / (sc * sc);
        }
        let err = math::sqrt(err_sq / n as f64);

        if err <= 1.0 {
            s += h;
            core::mem::swap(&mut y, &mut y_new);
            core::mem::swap(&mut k1, &mut k7);
            accepted += 1;
            observe(s, &y)?;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * math::powf(err, -0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok((y, accepted))
}

fn initial_step(span: f64, y: &[C64], dy: &[C64], ctrl: &OdeControl) -> f64 {
    let ynorm = math::sqrt(y.iter().map(|v| v.norm_sqr()).sum::<f64>());
    let dnorm = math::sqrt(dy.iter().map(|v| v.norm_sqr()).sum::<f64>());
    let h = if dnorm > 1e-12 {
        0.01 * (ynorm.max(ctrl.atol) / dnorm)
    } else {
        0.01 * math::abs(span)
    };
    h.min(math::abs(span)) * span.signum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let lambda = C64::new(-0.7, 1.3);
        let (y, _) = dopri5(
            |_, y, dy| dy[0] = lambda * y[0],
            vec![C64::new(1.0, 0.0)],
            0.0,
            1.0,
            &OdeControl::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        let want = lambda.exp();
        assert!((y[0] - want).norm() < 1e-9);
    }

    #[test]
    fn two_level_rotation() {
        let g = 1.234;
        let (y, _) = dopri5(
            |_, y, dy| {
                dy[0] = g * y[1];
                dy[1] = -g * y[0];
            },
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            0.0,
            1.0,
            &OdeControl::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y[0].re - math::cos(g)).abs() < 1e-9);
        assert!((y[1].re + math::sin(g)).abs() < 1e-9);
    }

    #[test]
    fn step_limit_is_enforced() {
        let ctrl = OdeControl {
            max_steps: 3,
            ..OdeControl::default()
        };
        let r = dopri5(
            |s, y, dy| dy[0] = y[0] * math::cos(1e4 * s),
            vec![C64::new(1.0, 0.0)],
            0.0,
            1.0,
            &ctrl,
            |_, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::OdeStepLimit { .. })));
    }
}
