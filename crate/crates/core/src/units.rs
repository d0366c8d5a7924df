//! Physical constants (CODATA 2018, SI) and unit conversions.

use std::f64::consts::PI;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

pub const PS_PER_S: f64 = 1e12;

/// `2π × f` with `f` in GHz, expressed in rad/ps.
pub fn ghz_to_rad_per_ps(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz * 1e-3
}

/// Inverse of [`ghz_to_rad_per_ps`].
pub fn rad_per_ps_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e-3)
}

pub fn rad_per_s_to_rad_per_ps(omega: f64) -> f64 {
    omega / PS_PER_S
}

pub fn per_s_to_per_ps(rate: f64) -> f64 {
    rate / PS_PER_S
}

pub fn mw_per_cm2_to_w_per_cm2(intensity: f64) -> f64 {
    intensity * 1e6
}

pub fn w_per_cm2_to_w_per_m2(intensity: f64) -> f64 {
    intensity * 1e4
}

/// Photon energy `h c / λ` in joules.
pub fn photon_energy_j(wavelength_nm: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}
