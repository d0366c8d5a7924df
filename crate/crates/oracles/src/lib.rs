//! Slow reference computations for the test suites.
//!
//! Nothing here shares code with `slap-core`. Special functions and the
//! closed-form resolution laws are evaluated in 320-bit fixed point; the
//! dynamics references integrate hand-expanded equations of motion with a
//! fixed-step classical RK4, so they exercise a different arithmetic route
//! than the adaptive solver they are compared against.

pub mod dynamics;
pub mod fixed;

use fixed::Fixed;

/// J1(x) from its power series, summed in fixed point until the terms vanish.
///
/// Accurate to well below 1e-15 absolute for |x| <= 60.
pub fn bessel_j1_series(x: f64) -> f64 {
    let half = Fixed::from_f64(x).halve();
    let half_sq = half.mul(&half);
    let mut term = half.clone();
    let mut sum = term.clone();
    let mut m: u64 = 0;
    loop {
        term = term.mul(&half_sq).div_u64((m + 1) * (m + 2)).neg();
        m += 1;
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
        if m > 400 {
            break;
        }
    }
    sum.to_f64()
}

/// 2 J1(s)/s with the removable singularity filled in.
pub fn airy_series(s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    2.0 * bessel_j1_series(s) / s
}

/// Root of the series J1 in `[lo, hi]` by plain bisection.
pub fn bessel_j1_root(mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = bessel_j1_series(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = bessel_j1_series(mid);
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// SLAP resolution law in fixed point:
/// (lambda/2NA)(delta/pi)(sqrt(4R/(k^-2 - 1)) + 1)^(-1/2).
pub fn fwhm_slap_fixed(wavelength_nm: f64, na: f64, delta: f64, r: f64, k: f64) -> f64 {
    let one = Fixed::one();
    let base = diffraction_factor(wavelength_nm, na, delta);
    let k = Fixed::from_f64(k);
    let inv_k2 = one.div(&k.mul(&k));
    let denom = inv_k2.sub(&one);
    let inner = Fixed::from_f64(r).mul_u64(4).div(&denom).sqrt().add(&one);
    base.div(&inner.sqrt()).to_f64()
}

/// CPT resolution law in fixed point: (lambda/2NA)(2 delta/pi)(sqrt(2 sqrt(R) + 1))^(-1/2).
pub fn fwhm_cpt_fixed(wavelength_nm: f64, na: f64, delta: f64, r: f64) -> f64 {
    let one = Fixed::one();
    let base = diffraction_factor(wavelength_nm, na, delta).mul_u64(2);
    let inner = Fixed::from_f64(r).sqrt().mul_u64(2).add(&one).sqrt();
    base.div(&inner.sqrt()).to_f64()
}

fn diffraction_factor(wavelength_nm: f64, na: f64, delta: f64) -> Fixed {
    let lambda = Fixed::from_f64(wavelength_nm);
    let na = Fixed::from_f64(na);
    let delta = Fixed::from_f64(delta);
    lambda.div(&na.mul_u64(2)).mul(&delta).div(&Fixed::pi())
}

/// Half-max crossing of a sampled profile found by brute force on a fine
/// resampling; returns the full width between the crossings nearest `x_peak`.
pub fn brute_force_fwhm(f: impl Fn(f64) -> f64, x_peak: f64, x_max: f64, step: f64) -> f64 {
    let peak = f(x_peak);
    let half = 0.5 * peak;
    let crossing = |dir: f64| {
        let mut x = x_peak;
        while (x - x_peak).abs() < x_max {
            let next_x = x + dir * step;
            let next = f(next_x);
            if next < half {
                // bisection refine in [x, next_x]
                let (mut a, mut b) = (x, next_x);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if f(m) >= half {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return 0.5 * (a + b);
            }
            x = next_x;
        }
        f64::NAN
    };
    crossing(1.0) - crossing(-1.0)
}
