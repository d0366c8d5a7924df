//! Fixed-step RK4 references for the Lambda-system density matrix and the
//! four-level dye rate equations, written component by component.

/// Final state of the Lambda system as `[p1, p2, p3]`.
///
/// `pump(t)` and `stokes(t)` are real Rabi frequencies, `gamma_21`/`gamma_23`
/// population decay rates out of the excited level, all in rad/ps.
#[allow(clippy::too_many_arguments)]
pub fn lambda_populations(
    pump: impl Fn(f64) -> f64,
    stokes: impl Fn(f64) -> f64,
    gamma_21: f64,
    gamma_23: f64,
    detuning: f64,
    initial_populations: [f64; 3],
    t0: f64,
    t1: f64,
    steps: usize,
) -> [f64; 3] {
    let total = gamma_21 + gamma_23;
    // [r11, r22, r33, re12, im12, re13, im13, re23, im23]
    let rhs = |t: f64, y: &[f64; 9]| -> [f64; 9] {
        let p = pump(t);
        let s = stokes(t);
        let (r11, r22, r33) = (y[0], y[1], y[2]);
        let (a12, b12, a13, b13, a23, b23) = (y[3], y[4], y[5], y[6], y[7], y[8]);
        let d11 = -p * b12 + gamma_21 * r22;
        let d33 = s * b23 + gamma_23 * r22;
        let d22 = p * b12 - s * b23 - total * r22;
        // rho12' = -i(p/2 (r22 - r11) - D rho12 - s/2 rho13) - total/2 rho12
        let x12_re = 0.5 * p * (r22 - r11) - detuning * a12 - 0.5 * s * a13;
        let x12_im = -detuning * b12 - 0.5 * s * b13;
        let d12 = (x12_im - 0.5 * total * a12, -x12_re - 0.5 * total * b12);
        // rho13' = -i(p/2 rho23 - s/2 rho12)
        let x13_re = 0.5 * p * a23 - 0.5 * s * a12;
        let x13_im = 0.5 * p * b23 - 0.5 * s * b12;
        let d13 = (x13_im, -x13_re);
        // rho23' = -i(p/2 rho13 + D rho23 + s/2 (r33 - r22)) - total/2 rho23
        let x23_re = 0.5 * p * a13 + detuning * a23 + 0.5 * s * (r33 - r22);
        let x23_im = 0.5 * p * b13 + detuning * b23;
        let d23 = (x23_im - 0.5 * total * a23, -x23_re - 0.5 * total * b23);
        [d11, d22, d33, d12.0, d12.1, d13.0, d13.1, d23.0, d23.1]
    };
    let mut y = [0.0; 9];
    y[..3].copy_from_slice(&initial_populations);
    let y = rk4(rhs, y, t0, t1, steps);
    [y[0], y[1], y[2]]
}

/// Final `[n0, n0_vib, n1, n1_vib]` of the four-level dye scheme.
///
/// `excitation(t)` pumps n0 -> n1_vib and `depletion(t)` drives n1 -> n0_vib
/// (and, with `back_transfer`, n0_vib -> n1 at the same rate), all in 1/ps.
#[allow(clippy::too_many_arguments)]
pub fn dye_populations(
    excitation: impl Fn(f64) -> f64,
    depletion: impl Fn(f64) -> f64,
    tau_vib: f64,
    tau_fl: f64,
    back_transfer: bool,
    t0: f64,
    t1: f64,
    steps: usize,
) -> [f64; 4] {
    let rhs = |t: f64, y: &[f64; 4]| -> [f64; 4] {
        let e = excitation(t);
        let d = depletion(t);
        let [n0, n0v, n1, n1v] = *y;
        let stim = d * n1 - if back_transfer { d * n0v } else { 0.0 };
        [
            -e * n0 + n0v / tau_vib + n1 / tau_fl,
            stim - n0v / tau_vib,
            n1v / tau_vib - stim - n1 / tau_fl,
            e * n0 - n1v / tau_vib,
        ]
    };
    rk4(rhs, [1.0, 0.0, 0.0, 0.0], t0, t1, steps)
}

fn rk4<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    mut y: [f64; N],
    t0: f64,
    t1: f64,
    steps: usize,
) -> [f64; N] {
    let h = (t1 - t0) / steps as f64;
    let axpy = |y: &[f64; N], k: &[f64; N], a: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += a * k[i];
        }
        out
    };
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}
