//! Diffraction-limited driving fields.
//!
//! Lateral profiles are Airy amplitudes `F(υ, r) = 2 J1(υ + r)/(υ + r)` of a
//! lens focus, written in optical units `υ = 2π x NA / λ`. The Stokes beam is
//! a single Airy spot; the pump is the sum of two spots displaced by `±δ`,
//! which leaves a node on axis when `δ` sits on the first zero of `F`.
//! Temporal envelopes are Gaussians `exp(-(t - t0)^2 / σ^2)`.

use std::f64::consts::PI;

use crate::error::{check_range, Result};
use crate::units;

/// Doughnut offset `δ = 1.22π`, the rounded first zero of `2 J1(s)/s`.
///
/// The exact zero is 3.831706 (1.21967π); the on-axis pump amplitude left by
/// the rounding is about 4.4e-4 of its peak.
pub const DEFAULT_DOUGHNUT_OFFSET: f64 = 1.22 * PI;

/// Default Stokes-to-pump delay in units of the pulse width.
pub const DEFAULT_DELAY_OVER_SIGMA: f64 = 1.5;

/// Largest numerical aperture accepted (oil-immersion objectives top out near 1.7).
pub const MAX_NUMERICAL_APERTURE: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalGeometry {
    wavelength_nm: f64,
    numerical_aperture: f64,
}

impl OpticalGeometry {
    pub fn new(wavelength_nm: f64, numerical_aperture: f64) -> Result<Self> {
        check_range(
            "wavelength_nm",
            wavelength_nm,
            wavelength_nm > 0.0,
            "(0, inf)",
        )?;
        check_range(
            "numerical_aperture",
            numerical_aperture,
            numerical_aperture > 0.0 && numerical_aperture <= MAX_NUMERICAL_APERTURE,
            "(0, 1.7]",
        )?;
        Ok(Self {
            wavelength_nm,
            numerical_aperture,
        })
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    pub fn numerical_aperture(&self) -> f64 {
        self.numerical_aperture
    }

    /// `λ / (2 NA)`, the diffraction-limited FWHM scale.
    pub fn diffraction_limit_nm(&self) -> f64 {
        self.wavelength_nm / (2.0 * self.numerical_aperture)
    }

    pub fn optical_unit(&self, x_nm: f64) -> f64 {
        optical_unit(x_nm, self)
    }

    /// Lateral position in nm of an optical-unit coordinate.
    pub fn position_nm(&self, upsilon: f64) -> f64 {
        upsilon * self.wavelength_nm / (2.0 * PI * self.numerical_aperture)
    }
}

/// `υ = 2π x NA / λ`.
pub fn optical_unit(x_nm: f64, geom: &OpticalGeometry) -> f64 {
    2.0 * PI * x_nm * geom.numerical_aperture / geom.wavelength_nm
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1(s: f64) -> f64 {
    libm::j1(s)
}

/// `F(υ, r) = 2 J1(υ + r)/(υ + r)`, equal to 1 at `υ + r = 0`.
pub fn airy_amplitude(upsilon: f64, r: f64) -> f64 {
    let s = upsilon + r;
    if s.abs() < 1e-8 {
        // 2 J1(s)/s = 1 - s^2/8 + O(s^4)
        1.0 - s * s / 8.0
    } else {
        2.0 * bessel_j1(s) / s
    }
}

pub fn gaussian_envelope(t: f64, center: f64, sigma: f64) -> f64 {
    let u = (t - center) / sigma;
    (-u * u).exp()
}

/// Root-sum-square of the two Rabi frequencies.
pub fn total_rabi(omega_p: f64, omega_s: f64) -> f64 {
    omega_p.hypot(omega_s)
}

/// Peak Rabi angular frequency (rad/s) of a field of intensity `intensity_w_cm2`
/// acting on a transition dipole `dipole_c_m`: `Ω = μ E / ħ`, `E = sqrt(2I/(c ε0))`.
///
/// Zero intensity or dipole gives zero; negative inputs are rejected. The
/// wavelength does not enter the formula and is only validated.
pub fn rabi_from_intensity(
    intensity_w_cm2: f64,
    dipole_c_m: f64,
    wavelength_nm: f64,
) -> Result<f64> {
    check_range(
        "intensity",
        intensity_w_cm2,
        intensity_w_cm2 >= 0.0,
        "[0, inf)",
    )?;
    check_range("dipole_moment", dipole_c_m, dipole_c_m >= 0.0, "[0, inf)")?;
    check_range(
        "wavelength_nm",
        wavelength_nm,
        wavelength_nm > 0.0,
        "(0, inf)",
    )?;
    let intensity = units::w_per_cm2_to_w_per_m2(intensity_w_cm2);
    let field = (2.0 * intensity / (units::SPEED_OF_LIGHT * units::VACUUM_PERMITTIVITY)).sqrt();
    Ok(dipole_c_m * field / units::REDUCED_PLANCK)
}

/// Peak Rabi frequencies, pulse timing and doughnut offset of the Stokes/pump pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamDrive {
    omega_s0: f64,
    omega_p0: f64,
    sigma_ps: f64,
    t_s_ps: f64,
    t_p_ps: f64,
    delta: f64,
}

impl BeamDrive {
    pub fn new(
        omega_s0: f64,
        omega_p0: f64,
        sigma_ps: f64,
        t_s_ps: f64,
        t_p_ps: f64,
        delta: f64,
    ) -> Result<Self> {
        check_range("omega_s0", omega_s0, omega_s0 >= 0.0, "[0, inf)")?;
        check_range("omega_p0", omega_p0, omega_p0 >= 0.0, "[0, inf)")?;
        check_range("sigma_ps", sigma_ps, sigma_ps > 0.0, "(0, inf)")?;
        check_range("t_s_ps", t_s_ps, true, "finite")?;
        check_range(
            "t_p_ps",
            t_p_ps,
            t_p_ps >= t_s_ps,
            "[t_s_ps, inf) (Stokes must precede pump)",
        )?;
        check_range("delta", delta, delta > 0.0, "(0, inf)")?;
        Ok(Self {
            omega_s0,
            omega_p0,
            sigma_ps,
            t_s_ps,
            t_p_ps,
            delta,
        })
    }

    /// Counterintuitive sequence with the Stokes centred at t = 0 and the
    /// pump `delay_ps` later, using the default doughnut offset.
    pub fn counterintuitive(
        omega_s0: f64,
        omega_p0: f64,
        sigma_ps: f64,
        delay_ps: f64,
    ) -> Result<Self> {
        Self::new(
            omega_s0,
            omega_p0,
            sigma_ps,
            0.0,
            delay_ps,
            DEFAULT_DOUGHNUT_OFFSET,
        )
    }

    /// Same sequence parameterized by the intensity ratio `R = (Ω_P0/Ω_S0)^2`.
    pub fn from_ratio(omega_s0: f64, r_ratio: f64, sigma_ps: f64, delay_ps: f64) -> Result<Self> {
        check_range("r_ratio", r_ratio, r_ratio >= 0.0, "[0, inf)")?;
        Self::counterintuitive(omega_s0, omega_s0 * r_ratio.sqrt(), sigma_ps, delay_ps)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(
            self.omega_s0,
            self.omega_p0,
            self.sigma_ps,
            self.t_s_ps,
            self.t_p_ps,
            delta,
        )
    }

    pub fn with_pump(self, omega_p0: f64) -> Result<Self> {
        Self::new(
            self.omega_s0,
            omega_p0,
            self.sigma_ps,
            self.t_s_ps,
            self.t_p_ps,
            self.delta,
        )
    }

    pub fn omega_s0(&self) -> f64 {
        self.omega_s0
    }

    pub fn omega_p0(&self) -> f64 {
        self.omega_p0
    }

    pub fn sigma_ps(&self) -> f64 {
        self.sigma_ps
    }

    pub fn t_s_ps(&self) -> f64 {
        self.t_s_ps
    }

    pub fn t_p_ps(&self) -> f64 {
        self.t_p_ps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `T = t_P - t_S`.
    pub fn delay_ps(&self) -> f64 {
        self.t_p_ps - self.t_s_ps
    }

    /// `R = (Ω_P0/Ω_S0)^2`; infinite for a dark Stokes beam with a live pump.
    pub fn r_ratio(&self) -> f64 {
        (self.omega_p0 / self.omega_s0).powi(2)
    }

    pub fn stokes_profile(&self, upsilon: f64) -> f64 {
        airy_amplitude(upsilon, 0.0)
    }

    pub fn pump_profile(&self, upsilon: f64) -> f64 {
        airy_amplitude(upsilon, self.delta) + airy_amplitude(upsilon, -self.delta)
    }

    pub fn stokes_envelope(&self, t_ps: f64) -> f64 {
        gaussian_envelope(t_ps, self.t_s_ps, self.sigma_ps)
    }

    pub fn pump_envelope(&self, t_ps: f64) -> f64 {
        gaussian_envelope(t_ps, self.t_p_ps, self.sigma_ps)
    }

    pub fn stokes_rabi(&self, upsilon: f64, t_ps: f64) -> f64 {
        stokes_rabi(upsilon, t_ps, self)
    }

    pub fn pump_rabi(&self, upsilon: f64, t_ps: f64) -> f64 {
        pump_rabi(upsilon, t_ps, self)
    }

    pub fn total_rabi(&self, upsilon: f64, t_ps: f64) -> f64 {
        total_rabi(
            self.pump_rabi(upsilon, t_ps),
            self.stokes_rabi(upsilon, t_ps),
        )
    }

    /// `[t_S - 3σ, t_P + 3σ]`, outside of which both envelopes are below e^-9.
    pub fn default_window(&self) -> (f64, f64) {
        (
            self.t_s_ps - 3.0 * self.sigma_ps,
            self.t_p_ps + 3.0 * self.sigma_ps,
        )
    }
}

/// `Ω_S(υ, t) = Ω_S0 F(υ, 0) exp(-(t - t_S)^2/σ^2)`.
pub fn stokes_rabi(upsilon: f64, t_ps: f64, drive: &BeamDrive) -> f64 {
    drive.omega_s0 * drive.stokes_profile(upsilon) * drive.stokes_envelope(t_ps)
}

/// `Ω_P(υ, t) = Ω_P0 [F(υ, δ) + F(υ, -δ)] exp(-(t - t_P)^2/σ^2)`.
pub fn pump_rabi(upsilon: f64, t_ps: f64, drive: &BeamDrive) -> f64 {
    drive.omega_p0 * drive.pump_profile(upsilon) * drive.pump_envelope(t_ps)
}
