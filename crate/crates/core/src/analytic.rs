//! Closed-form resolution laws and dark-state algebra.
//!
//! With `R = (Ω_P0/Ω_S0)^2` and `k = Ω_S0 T / A` (A the global
//! adiabaticity constant), the SLAP population peak has width
//!
//! ```text
//! FWHM_SLAP = (λ/2NA) (δ/π) (sqrt(4R/(k^-2 - 1)) + 1)^(-1/2),   0 < k < 1
//! ```
//!
//! while coherent population trapping with the same beam profiles gives
//!
//! ```text
//! FWHM_CPT = (λ/2NA) (2δ/π) (sqrt(2 sqrt(R) + 1))^(-1/2).
//! ```

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::beams::OpticalGeometry;
use crate::error::{check_range, Error, Result};
use crate::localization::{fwhm_from_profile, LocalizationProfile};

/// Adiabaticity constant suggested for optimal Gaussian pulses.
pub const DEFAULT_ADIABATICITY_CONSTANT: f64 = 10.0;

/// Relative tolerance used by [`cpt_halfwidth_check`].
pub const CPT_HALFWIDTH_TOLERANCE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityParams {
    a_const: f64,
    k: f64,
    r_ratio: f64,
}

impl AdiabaticityParams {
    pub fn new(a_const: f64, k: f64, r_ratio: f64) -> Result<Self> {
        check_range("a_const", a_const, a_const > 0.0, "(0, inf)")?;
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::AdiabaticityRegime { k });
        }
        check_range("r_ratio", r_ratio, r_ratio >= 0.0, "[0, inf)")?;
        Ok(Self {
            a_const,
            k,
            r_ratio,
        })
    }

    /// Derives `k` and `R` from peak Rabi frequencies and the pulse delay.
    pub fn from_drive(omega_s0: f64, omega_p0: f64, t_delay_ps: f64, a_const: f64) -> Result<Self> {
        let k = k_of(omega_s0, t_delay_ps, a_const)?;
        Self::new(a_const, k, (omega_p0 / omega_s0).powi(2))
    }

    pub fn a_const(&self) -> f64 {
        self.a_const
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn r_ratio(&self) -> f64 {
        self.r_ratio
    }

    pub fn fwhm_slap(&self, geom: &OpticalGeometry, delta: f64) -> Result<f64> {
        fwhm_slap(geom, delta, self.r_ratio, self.k)
    }
}

/// Superposition of the two ground states, `(Ω_S* |1> - Ω_P* |3>)/Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkState {
    amp_1: Complex64,
    amp_3: Complex64,
}

impl DarkState {
    pub fn amp_1(&self) -> Complex64 {
        self.amp_1
    }

    pub fn amp_3(&self) -> Complex64 {
        self.amp_3
    }

    /// Always zero: the dark state has no excited-state component.
    pub fn amp_2(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        [self.amp_1, self.amp_2(), self.amp_3]
    }

    pub fn to_vector(&self) -> Vector3<Complex64> {
        Vector3::new(self.amp_1, self.amp_2(), self.amp_3)
    }

    /// `|<1|D>|^2`.
    pub fn population_1(&self) -> f64 {
        self.amp_1.norm_sqr()
    }
}

pub fn dark_state(omega_s: f64, omega_p: f64) -> Result<DarkState> {
    check_range("omega_s", omega_s, true, "finite")?;
    check_range("omega_p", omega_p, true, "finite")?;
    let omega = omega_p.hypot(omega_s);
    if omega == 0.0 {
        return Err(Error::UndefinedDarkState);
    }
    Ok(DarkState {
        amp_1: Complex64::new(omega_s / omega, 0.0),
        amp_3: Complex64::new(-omega_p / omega, 0.0),
    })
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(Error::AdiabaticityRegime { k })
    }
}

/// Analytic SLAP peak width in nm.
pub fn fwhm_slap(geom: &OpticalGeometry, delta: f64, r_ratio: f64, k: f64) -> Result<f64> {
    check_k(k)?;
    check_range("r_ratio", r_ratio, r_ratio >= 0.0, "[0, inf)")?;
    check_range("delta", delta, delta > 0.0, "(0, inf)")?;
    Ok(geom.diffraction_limit_nm() * (delta / PI) * slap_narrowing(r_ratio, k))
}

/// Analytic CPT peak width in nm.
pub fn fwhm_cpt(geom: &OpticalGeometry, delta: f64, r_ratio: f64) -> Result<f64> {
    check_range("r_ratio", r_ratio, r_ratio >= 0.0, "[0, inf)")?;
    check_range("delta", delta, delta > 0.0, "(0, inf)")?;
    Ok(geom.diffraction_limit_nm() * (2.0 * delta / PI) * cpt_narrowing(r_ratio))
}

fn slap_narrowing(r_ratio: f64, k: f64) -> f64 {
    let inner = (4.0 * r_ratio / (1.0 / (k * k) - 1.0)).sqrt() + 1.0;
    1.0 / inner.sqrt()
}

fn cpt_narrowing(r_ratio: f64) -> f64 {
    (2.0 * r_ratio.sqrt() + 1.0).powf(-0.25)
}

/// `FWHM_SLAP / FWHM_CPT`; the geometry cancels.
pub fn slap_cpt_ratio(r_ratio: f64, k: f64) -> Result<f64> {
    check_k(k)?;
    check_range("r_ratio", r_ratio, r_ratio >= 0.0, "[0, inf)")?;
    Ok(0.5 * slap_narrowing(r_ratio, k) / cpt_narrowing(r_ratio))
}

/// `k = Ω_S0 T / A`; fails outside the adiabatic-localization regime `k < 1`.
pub fn k_of(omega_s0: f64, t_delay_ps: f64, a_const: f64) -> Result<f64> {
    check_range("omega_s0", omega_s0, omega_s0 > 0.0, "(0, inf)")?;
    check_range("t_delay_ps", t_delay_ps, t_delay_ps > 0.0, "(0, inf)")?;
    check_range("a_const", a_const, a_const > 0.0, "(0, inf)")?;
    let k = omega_s0 * t_delay_ps / a_const;
    check_k(k)?;
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptHalfwidthReport {
    pub r_ratio: f64,
    pub analytic_fwhm_nm: f64,
    /// `None` when the profile has no half-maximum crossing.
    pub profile_fwhm_nm: Option<f64>,
    /// `analytic / profile - 1`.
    pub relative_deviation: Option<f64>,
    pub degenerate: bool,
    pub within_tolerance: bool,
}

/// Compares the closed-form CPT width with the half-maximum width of an
/// exact CPT profile sampled on a grid.
pub fn cpt_halfwidth_check(
    profile: &LocalizationProfile,
    geom: &OpticalGeometry,
    delta: f64,
    r_ratio: f64,
) -> Result<CptHalfwidthReport> {
    let analytic_fwhm_nm = fwhm_cpt(geom, delta, r_ratio)?;
    let report = match fwhm_from_profile(profile) {
        Ok(found) => {
            let deviation = analytic_fwhm_nm / found.fwhm_nm - 1.0;
            CptHalfwidthReport {
                r_ratio,
                analytic_fwhm_nm,
                profile_fwhm_nm: Some(found.fwhm_nm),
                relative_deviation: Some(deviation),
                degenerate: false,
                within_tolerance: deviation.abs() <= CPT_HALFWIDTH_TOLERANCE,
            }
        }
        Err(Error::NoPeak) | Err(Error::ZeroProfile) => CptHalfwidthReport {
            r_ratio,
            analytic_fwhm_nm,
            profile_fwhm_nm: None,
            relative_deviation: None,
            degenerate: true,
            within_tolerance: false,
        },
        Err(e) => return Err(e),
    };
    Ok(report)
}
