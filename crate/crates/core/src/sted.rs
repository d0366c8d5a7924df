//! Four-level rate-equation model of STED on Rhodamine B.
//!
//! Levels are the ground state `n0`, its vibrationally hot partner `n0_vib`,
//! the fluorescent excited level `n1` and the Franck-Condon excited level
//! `n1_vib`. The excitation pulse pumps `n0 -> n1_vib`, the depletion pulse
//! stimulates `n1 -> n0_vib`, both hot levels relax in `τ` and `n1` fluoresces
//! back to `n0` in `τ_fl`.
//!
//! Excitation and depletion beams each live in their own optical units; a
//! point given in excitation units `υ_E` sees the doughnut at
//! `υ_D = υ_E λ_E / λ_D`. The doughnut intensity `[F(υ,δ) + F(υ,-δ)]^2` is
//! divided by its own maximum so that `h_d_peak` is the intensity on the ring.

use rayon::prelude::*;

use crate::beams::{airy_amplitude, gaussian_envelope, OpticalGeometry, DEFAULT_DOUGHNUT_OFFSET};
use crate::error::{check_range, Error, Result};
use crate::localization::{LocalizationProfile, SpatialGrid, Technique};
use crate::ode::{dormand_prince, IntegrationError, StepControl};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StedDye {
    cross_section_cm2: f64,
    tau_vib_ps: f64,
    tau_fl_ps: f64,
}

impl StedDye {
    pub fn new(cross_section_cm2: f64, tau_vib_ps: f64, tau_fl_ps: f64) -> Result<Self> {
        check_range(
            "cross_section_cm2",
            cross_section_cm2,
            cross_section_cm2 > 0.0,
            "(0, inf)",
        )?;
        check_range("tau_vib_ps", tau_vib_ps, tau_vib_ps > 0.0, "(0, inf)")?;
        check_range("tau_fl_ps", tau_fl_ps, tau_fl_ps > 0.0, "(0, inf)")?;
        Ok(Self {
            cross_section_cm2,
            tau_vib_ps,
            tau_fl_ps,
        })
    }

    /// `σ = 1e-17 cm²`, `τ = 1 ps`, `τ_fl = 2 ns`.
    pub fn rhodamine_b() -> Self {
        Self {
            cross_section_cm2: 1e-17,
            tau_vib_ps: 1.0,
            tau_fl_ps: 2000.0,
        }
    }

    pub fn cross_section_cm2(&self) -> f64 {
        self.cross_section_cm2
    }

    pub fn tau_vib_ps(&self) -> f64 {
        self.tau_vib_ps
    }

    pub fn tau_fl_ps(&self) -> f64 {
        self.tau_fl_ps
    }
}

impl Default for StedDye {
    fn default() -> Self {
        Self::rhodamine_b()
    }
}

/// Excitation (E) and depletion (D) pulses. Intensities are in MW/cm².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StedBeams {
    pub h_e_peak: f64,
    pub h_d_peak: f64,
    pub lambda_e_nm: f64,
    pub lambda_d_nm: f64,
    pub sigma_ps: f64,
    pub delta_t_ps: f64,
    pub numerical_aperture: f64,
    pub delta: f64,
}

impl Default for StedBeams {
    /// 1200 MW/cm² on the excitation gives `photon_rate · √π · σ ≈ 5.2`, enough
    /// to move essentially all of the ground state.
    fn default() -> Self {
        Self {
            h_e_peak: 1200.0,
            h_d_peak: 1300.0,
            lambda_e_nm: 490.0,
            lambda_d_nm: 600.0,
            sigma_ps: 100.0,
            delta_t_ps: 90.0,
            numerical_aperture: 1.4,
            delta: DEFAULT_DOUGHNUT_OFFSET,
        }
    }
}

impl StedBeams {
    pub fn validate(&self) -> Result<()> {
        check_range("h_e_peak", self.h_e_peak, self.h_e_peak >= 0.0, "[0, inf)")?;
        check_range("h_d_peak", self.h_d_peak, self.h_d_peak >= 0.0, "[0, inf)")?;
        check_range("sigma_ps", self.sigma_ps, self.sigma_ps > 0.0, "(0, inf)")?;
        check_range("delta_t_ps", self.delta_t_ps, true, "finite")?;
        check_range("delta", self.delta, self.delta > 0.0, "(0, inf)")?;
        // wavelengths and NA are checked by the geometry constructor
        self.excitation_geometry()?;
        self.depletion_geometry()?;
        Ok(())
    }

    pub fn excitation_geometry(&self) -> Result<OpticalGeometry> {
        OpticalGeometry::new(self.lambda_e_nm, self.numerical_aperture)
    }

    pub fn depletion_geometry(&self) -> Result<OpticalGeometry> {
        OpticalGeometry::new(self.lambda_d_nm, self.numerical_aperture)
    }

    /// Excitation intensity profile `F(υ, 0)^2`, unit peak on axis.
    pub fn excitation_profile(&self, upsilon_e: f64) -> f64 {
        airy_amplitude(upsilon_e, 0.0).powi(2)
    }

    /// Depletion intensity profile at a point given in excitation units, unit
    /// peak on the ring.
    pub fn depletion_profile(&self, upsilon_e: f64) -> f64 {
        let upsilon_d = upsilon_e * self.lambda_e_nm / self.lambda_d_nm;
        doughnut_intensity(upsilon_d, self.delta) / doughnut_peak(self.delta).1
    }
}

fn doughnut_intensity(upsilon: f64, delta: f64) -> f64 {
    (airy_amplitude(upsilon, delta) + airy_amplitude(upsilon, -delta)).powi(2)
}

/// Location and value of the ring maximum of `[F(υ,δ) + F(υ,-δ)]^2`.
///
/// A coarse scan brackets the maximum on `(0, 2δ]`, golden-section search polishes it.
pub fn doughnut_peak(delta: f64) -> (f64, f64) {
    let f = |u: f64| doughnut_intensity(u, delta);
    let n = 400;
    let step = 2.0 * delta / n as f64;
    let best = (1..=n)
        .map(|i| i as f64 * step)
        .fold((0.0, f64::NEG_INFINITY), |b, u| {
            if f(u) > b.1 {
                (u, f(u))
            } else {
                b
            }
        });
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let u = 0.5 * (a + b);
    (u, f(u).max(best.1))
}

/// Populations `[n0, n0_vib, n1, n1_vib]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StedState {
    pub n0: f64,
    pub n0_vib: f64,
    pub n1: f64,
    pub n1_vib: f64,
}

impl StedState {
    pub fn ground() -> Self {
        Self::from_array([1.0, 0.0, 0.0, 0.0])
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            n0: a[0],
            n0_vib: a[1],
            n1: a[2],
            n1_vib: a[3],
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.n0, self.n0_vib, self.n1, self.n1_vib]
    }

    pub fn total(&self) -> f64 {
        self.to_array().iter().sum()
    }

    /// Sum within 1e-8 of one and every level above -1e-10.
    pub fn is_physical(&self) -> bool {
        let a = self.to_array();
        (self.total() - 1.0).abs() <= 1e-8 && a.iter().all(|&n| (-1e-10..=1.0 + 1e-10).contains(&n))
    }
}

/// Photon-flux rate `σ I / (h c / λ)` in ps⁻¹ for `I` in W/cm² and `σ` in cm².
pub fn photon_rate(intensity_w_cm2: f64, cross_section_cm2: f64, wavelength_nm: f64) -> f64 {
    let per_s = cross_section_cm2 * intensity_w_cm2 / units::photon_energy_j(wavelength_nm);
    units::per_s_to_per_ps(per_s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StedConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step_ps: f64,
    pub t_start_ps: f64,
    pub t_read_ps: f64,
    /// Include stimulated absorption `n0_vib -> n1` by the depletion beam.
    pub back_transfer: bool,
}

impl StedConfig {
    /// Starts `3σ` before the excitation peak and reads out `3σ` after the
    /// depletion peak.
    pub fn for_beams(beams: &StedBeams) -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step_ps: beams.sigma_ps / 50.0,
            t_start_ps: -3.0 * beams.sigma_ps,
            t_read_ps: beams.delta_t_ps + 3.0 * beams.sigma_ps,
            back_transfer: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("rel_tol", self.rel_tol, self.rel_tol > 0.0, "(0, inf)")?;
        check_range("abs_tol", self.abs_tol, self.abs_tol > 0.0, "(0, inf)")?;
        if !(self.max_step_ps > 0.0) {
            return Err(Error::Domain {
                name: "max_step_ps",
                value: self.max_step_ps,
                expected: "(0, inf)",
            });
        }
        check_range("t_start_ps", self.t_start_ps, true, "finite")?;
        check_range(
            "t_read_ps",
            self.t_read_ps,
            self.t_read_ps > self.t_start_ps,
            "(t_start_ps, inf)",
        )?;
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step_ps,
            ..StepControl::default()
        }
    }
}

/// Integrates the rate equations at `upsilon_e` and hands every accepted step
/// to `observer`. Returns the state at `cfg.t_read_ps`.
pub fn sted_evolve_observed(
    upsilon_e: f64,
    dye: &StedDye,
    beams: &StedBeams,
    cfg: &StedConfig,
    mut observer: impl FnMut(f64, &StedState),
) -> Result<StedState> {
    beams.validate()?;
    cfg.validate()?;
    let k_e = photon_rate(
        units::mw_per_cm2_to_w_per_cm2(beams.h_e_peak),
        dye.cross_section_cm2,
        beams.lambda_e_nm,
    ) * beams.excitation_profile(upsilon_e);
    let k_d = photon_rate(
        units::mw_per_cm2_to_w_per_cm2(beams.h_d_peak),
        dye.cross_section_cm2,
        beams.lambda_d_nm,
    ) * beams.depletion_profile(upsilon_e);
    let relax = 1.0 / dye.tau_vib_ps;
    let fluor = 1.0 / dye.tau_fl_ps;
    let back = cfg.back_transfer;
    let (sigma, delta_t) = (beams.sigma_ps, beams.delta_t_ps);

    let rhs = move |t: f64, y: &[f64; 4]| -> [f64; 4] {
        let [n0, n0v, n1, n1v] = *y;
        let exc = k_e * gaussian_envelope(t, 0.0, sigma);
        let dep = k_d * gaussian_envelope(t, delta_t, sigma);
        let stim = dep * (n1 - if back { n0v } else { 0.0 });
        [
            -exc * n0 + relax * n0v + fluor * n1,
            stim - relax * n0v,
            relax * n1v - stim - fluor * n1,
            exc * n0 - relax * n1v,
        ]
    };

    let mut drift: Option<(f64, f64)> = None;
    let (y, _) = dormand_prince(
        rhs,
        cfg.t_start_ps,
        cfg.t_read_ps,
        StedState::ground().to_array(),
        &cfg.step_control(),
        |t, y| {
            let state = StedState::from_array(*y);
            let d = (state.total() - 1.0).abs();
            if d > 1e-8 && drift.is_none() {
                drift = Some((t, d));
            }
            observer(t, &state);
        },
    )?;
    if let Some((t, drift)) = drift {
        return Err(IntegrationError::InvariantDrift { t, drift }.into());
    }
    Ok(StedState::from_array(y))
}

/// `n1` at the readout time, clamped into `[0, 1]`.
pub fn sted_point(
    upsilon_e: f64,
    dye: &StedDye,
    beams: &StedBeams,
    cfg: &StedConfig,
) -> Result<f64> {
    let state = sted_evolve_observed(upsilon_e, dye, beams, cfg, |_, _| {})?;
    Ok(state.n1.clamp(0.0, 1.0))
}

/// `n1(x)` across the grid, with `x` converted through the excitation wavelength.
pub fn scan_sted(
    grid: &SpatialGrid,
    dye: &StedDye,
    beams: &StedBeams,
    cfg: &StedConfig,
) -> Result<LocalizationProfile> {
    beams.validate()?;
    cfg.validate()?;
    let geom = beams.excitation_geometry()?;
    let values = grid
        .positions()
        .par_iter()
        .map(|&x| {
            sted_point(geom.optical_unit(x), dye, beams, cfg).map_err(|e| match e {
                Error::Integration(source) => Error::ScanPoint { x_nm: x, source },
                other => other,
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    LocalizationProfile::new(grid.clone(), values, Technique::Sted)
}
