//! Dormand–Prince 5(4) integrator with embedded error control.
//!
//! States are fixed-size arrays so the hot loop stays on the stack. The
//! step controller is the usual `0.9 err^(-1/5)` rule clamped to [0.2, 5],
//! with growth suppressed right after a rejection.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntegrationError {
    #[error("step size underflow (h = {h:e}) at t = {t} ps")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("exceeded {steps} steps at t = {t} ps")]
    TooManySteps { t: f64, steps: usize },
    #[error("non-finite state at t = {t} ps")]
    NonFinite { t: f64 },
    #[error("conserved quantity drifted by {drift:e} at t = {t} ps")]
    InvariantDrift { t: f64, drift: f64 },
    #[error("invalid integration window [{t_start}, {t_end}]")]
    InvalidWindow { t_start: f64, t_end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coef, k) in terms {
        let c = h * coef;
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t1` (`t1 > t0`).
///
/// `observer` sees the initial state and every accepted step. The last step
/// is shortened to land exactly on `t1`.
pub fn dormand_prince<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    control: &StepControl,
    mut observer: O,
) -> Result<([f64; N], Stats), IntegrationError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(IntegrationError::InvalidWindow {
            t_start: t0,
            t_end: t1,
        });
    }
    let mut stats = Stats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    stats.evaluations += 1;
    observer(t, &y);

    let span = t1 - t0;
    let mut h = (span / 100.0).min(control.max_step);
    let mut last_rejected = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= control.max_steps {
            return Err(IntegrationError::TooManySteps {
                t,
                steps: control.max_steps,
            });
        }
        let mut last = false;
        if t + h >= t1 {
            h = t1 - t;
            last = true;
        }
        if h <= 1e-12 * t.abs().max(span) {
            return Err(IntegrationError::StepSizeUnderflow { t, h });
        }

        let k2 = rhs(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(
            t + C4 * h,
            &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &combine(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = combine(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(t + h, &y_new);
        stats.evaluations += 6;

        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = control.abs_tol + control.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale).powi(2);
            finite &= y_new[i].is_finite();
        }
        if !finite {
            return Err(IntegrationError::NonFinite { t: t + h });
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            observer(t, &y);
            let mut factor = if err == 0.0 {
                5.0
            } else {
                0.9 * err.powf(-0.2)
            };
            factor = factor.clamp(0.2, 5.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            last_rejected = false;
            h = (h * factor).min(control.max_step);
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok((y, stats))
}
