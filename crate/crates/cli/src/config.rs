//! TOML experiment description.
//!
//! Values stay in the units people write them in (GHz for `γ/2π`, ps, nm,
//! MW/cm²); the accessor methods convert to the library's rad/ps. Keeping the
//! stored form in boundary units makes serialize/parse round trips exact.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use slap_core::beams::{BeamDrive, OpticalGeometry, MAX_NUMERICAL_APERTURE};
use slap_core::lambda_system::{IntegratorConfig, LambdaMedium};
use slap_core::localization::SpatialGrid;
use slap_core::sted::{StedBeams, StedConfig, StedDye};
use slap_core::units::ghz_to_rad_per_ps;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Malformed(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path} = {value} is out of range, expected {expected}")]
    OutOfRange {
        path: String,
        value: String,
        expected: String,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub fn path(&self) -> Option<&str> {
        match self {
            ConfigError::Schema { path, .. } | ConfigError::OutOfRange { path, .. } => Some(path),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    Slap,
    Cpt,
    Sted,
    Analytic,
    Sweep,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub technique: Technique,
    pub optics: OpticsConfig,
    pub medium: MediumConfig,
    pub drive: DriveConfig,
    pub analytic: AnalyticConfig,
    pub sted: StedSection,
    pub grid: GridConfig,
    pub integrator: IntegratorSection,
    pub sweep: SweepConfig,
    pub compare: CompareConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            technique: Technique::Slap,
            optics: OpticsConfig::default(),
            medium: MediumConfig::default(),
            drive: DriveConfig::default(),
            analytic: AnalyticConfig::default(),
            sted: StedSection::default(),
            grid: GridConfig::default(),
            integrator: IntegratorSection::default(),
            sweep: SweepConfig::default(),
            compare: CompareConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsConfig {
    pub wavelength_nm: f64,
    pub numerical_aperture: f64,
    /// Doughnut offset `δ` in units of π.
    pub delta_over_pi: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: 490.0,
            numerical_aperture: 1.4,
            delta_over_pi: 1.22,
        }
    }
}

/// Rates are given as `value` in `2π × value GHz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumConfig {
    pub gamma_21_ghz: f64,
    pub gamma_23_ghz: f64,
    pub detuning_ghz: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            gamma_21_ghz: 6.36,
            gamma_23_ghz: 6.36,
            detuning_ghz: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    /// `Ω_S0 / γ21`.
    pub omega_s0_over_gamma21: f64,
    /// `R = (Ω_P0/Ω_S0)^2`.
    pub r_ratio: f64,
    pub sigma_ps: f64,
    /// `T / σ`.
    pub delay_over_sigma: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            omega_s0_over_gamma21: 1.5,
            r_ratio: 50.0,
            sigma_ps: 100.0,
            delay_over_sigma: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticConfig {
    /// Adiabaticity constant `A`.
    pub a_const: f64,
    /// `k` values for the SLAP/CPT ratio curves.
    pub k_values: Vec<f64>,
    pub r_max: f64,
    pub r_points: usize,
}

impl Default for AnalyticConfig {
    fn default() -> Self {
        Self {
            a_const: 10.0,
            k_values: vec![0.1, 0.4, 0.9],
            r_max: 300.0,
            r_points: 301,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StedSection {
    pub cross_section_cm2: f64,
    pub tau_vib_ps: f64,
    pub tau_fl_ps: f64,
    pub h_e_peak_mw_cm2: f64,
    pub h_d_peak_mw_cm2: f64,
    pub lambda_e_nm: f64,
    pub lambda_d_nm: f64,
    pub sigma_ps: f64,
    pub delta_t_ps: f64,
    /// Readout time; `delta_t_ps + 3 sigma_ps` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_read_ps: Option<f64>,
    pub back_transfer: bool,
}

impl Default for StedSection {
    fn default() -> Self {
        let beams = StedBeams::default();
        let dye = StedDye::rhodamine_b();
        Self {
            cross_section_cm2: dye.cross_section_cm2(),
            tau_vib_ps: dye.tau_vib_ps(),
            tau_fl_ps: dye.tau_fl_ps(),
            h_e_peak_mw_cm2: beams.h_e_peak,
            h_d_peak_mw_cm2: beams.h_d_peak,
            lambda_e_nm: beams.lambda_e_nm,
            lambda_d_nm: beams.lambda_d_nm,
            sigma_ps: beams.sigma_ps,
            delta_t_ps: beams.delta_t_ps,
            t_read_ps: None,
            back_transfer: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min_nm: f64,
    pub x_max_nm: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min_nm: -400.0,
            x_max_nm: 400.0,
            points: 801,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Step cap as a fraction of the pulse width.
    pub max_step_over_sigma: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step_over_sigma: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    RRatio,
    OmegaS0OverGamma21,
    DelayOverSigma,
    NumericalAperture,
    HDPeakMwCm2,
}

impl SweepParameter {
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::RRatio => "r_ratio",
            SweepParameter::OmegaS0OverGamma21 => "omega_s0_over_gamma21",
            SweepParameter::DelayOverSigma => "delay_over_sigma",
            SweepParameter::NumericalAperture => "numerical_aperture",
            SweepParameter::HDPeakMwCm2 => "h_d_peak_mw_cm2",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Slap,
    Cpt,
    Sted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: SweepScale,
    pub target: SweepTarget,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::RRatio,
            min: 10.0,
            max: 300.0,
            count: 25,
            scale: SweepScale::Log,
            target: SweepTarget::Slap,
        }
    }
}

impl SweepConfig {
    /// Sample values, endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n {
                    return self.max;
                }
                let f = i as f64 / n as f64;
                match self.scale {
                    SweepScale::Linear => self.min + f * (self.max - self.min),
                    SweepScale::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub r_values: Vec<f64>,
    pub include_sted: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            r_values: vec![10.0, 50.0, 300.0],
            include_sted: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            stem: "run".into(),
        }
    }
}

/// Parses and validates; returns the config with any warnings.
pub fn parse_config(text: &str) -> Result<(ExperimentConfig, Vec<String>), ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().message().to_string();
        ConfigError::Schema { path, message }
    })?;
    let warnings = config.validate()?;
    Ok((config, warnings))
}

pub fn load_config(path: &std::path::Path) -> Result<(ExperimentConfig, Vec<String>), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn check(path: &str, value: f64, ok: bool, expected: &str) -> Result<(), ConfigError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            path: path.into(),
            value: value.to_string(),
            expected: expected.into(),
        })
    }
}

fn check_count(path: &str, value: usize, ok: bool, expected: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            path: path.into(),
            value: value.to_string(),
            expected: expected.into(),
        })
    }
}

const MAX_GRID_POINTS: usize = 1_000_001;
const MAX_SWEEP_POINTS: usize = 10_000;

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Range checks with key paths. Returns warnings for settings that are
    /// legal but disable part of the output.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        self.validate_point()?;

        let a = &self.analytic;
        check("analytic.a_const", a.a_const, a.a_const > 0.0, "(0, inf)")?;
        for (i, &k) in a.k_values.iter().enumerate() {
            check(
                &format!("analytic.k_values[{i}]"),
                k,
                k > 0.0 && k < 1.0,
                "(0, 1)",
            )?;
        }
        check("analytic.r_max", a.r_max, a.r_max > 0.0, "(0, inf)")?;
        check_count("analytic.r_points", a.r_points, a.r_points >= 2, "[2, inf)")?;

        let g = &self.grid;
        check("grid.x_min_nm", g.x_min_nm, true, "finite")?;
        check(
            "grid.x_max_nm",
            g.x_max_nm,
            g.x_max_nm > g.x_min_nm,
            "(grid.x_min_nm, inf)",
        )?;
        check_count(
            "grid.points",
            g.points,
            (3..=MAX_GRID_POINTS).contains(&g.points),
            "[3, 1000001]",
        )?;

        let c = &self.compare;
        for (i, &r) in c.r_values.iter().enumerate() {
            check(&format!("compare.r_values[{i}]"), r, r >= 0.0, "[0, inf)")?;
        }
        if self.technique == Technique::Compare && c.r_values.is_empty() && !c.include_sted {
            return Err(ConfigError::OutOfRange {
                path: "compare.r_values".into(),
                value: "[]".into(),
                expected: "at least one profile (or include_sted = true)".into(),
            });
        }

        let o = &self.output;
        if o.dir.is_empty() {
            return Err(ConfigError::OutOfRange {
                path: "output.dir".into(),
                value: "\"\"".into(),
                expected: "non-empty path".into(),
            });
        }
        if o.stem.is_empty() || o.stem.contains(['/', '\\']) {
            return Err(ConfigError::OutOfRange {
                path: "output.stem".into(),
                value: format!("{:?}", o.stem),
                expected: "non-empty file stem without path separators".into(),
            });
        }

        if self.technique == Technique::Sweep {
            self.validate_sweep()?;
        }

        let mut warnings = Vec::new();
        if let Some(k) = self.uses_slap_law().then(|| self.k()) {
            if !(k < 1.0) {
                warnings.push(format!(
                    "adiabaticity parameter k = {k:.4} >= 1 (Omega_S0 T / A); analytic SLAP FWHM overlay suppressed"
                ));
            }
        }
        Ok(warnings)
    }

    /// Checks every parameter a single scan point depends on.
    fn validate_point(&self) -> Result<(), ConfigError> {
        let o = &self.optics;
        check(
            "optics.wavelength_nm",
            o.wavelength_nm,
            o.wavelength_nm > 0.0,
            "(0, inf)",
        )?;
        check(
            "optics.numerical_aperture",
            o.numerical_aperture,
            o.numerical_aperture > 0.0 && o.numerical_aperture <= MAX_NUMERICAL_APERTURE,
            "(0, 1.7]",
        )?;
        check(
            "optics.delta_over_pi",
            o.delta_over_pi,
            o.delta_over_pi > 0.0,
            "(0, inf)",
        )?;

        let m = &self.medium;
        check(
            "medium.gamma_21_ghz",
            m.gamma_21_ghz,
            m.gamma_21_ghz > 0.0,
            "(0, inf)",
        )?;
        check(
            "medium.gamma_23_ghz",
            m.gamma_23_ghz,
            m.gamma_23_ghz >= 0.0,
            "[0, inf)",
        )?;
        check("medium.detuning_ghz", m.detuning_ghz, true, "finite")?;

        let d = &self.drive;
        check(
            "drive.omega_s0_over_gamma21",
            d.omega_s0_over_gamma21,
            d.omega_s0_over_gamma21 > 0.0,
            "(0, inf)",
        )?;
        check("drive.r_ratio", d.r_ratio, d.r_ratio >= 0.0, "[0, inf)")?;
        check("drive.sigma_ps", d.sigma_ps, d.sigma_ps > 0.0, "(0, inf)")?;
        check(
            "drive.delay_over_sigma",
            d.delay_over_sigma,
            d.delay_over_sigma >= 0.0,
            "[0, inf)",
        )?;

        let s = &self.sted;
        check(
            "sted.cross_section_cm2",
            s.cross_section_cm2,
            s.cross_section_cm2 > 0.0,
            "(0, inf)",
        )?;
        check(
            "sted.tau_vib_ps",
            s.tau_vib_ps,
            s.tau_vib_ps > 0.0,
            "(0, inf)",
        )?;
        check("sted.tau_fl_ps", s.tau_fl_ps, s.tau_fl_ps > 0.0, "(0, inf)")?;
        check(
            "sted.h_e_peak_mw_cm2",
            s.h_e_peak_mw_cm2,
            s.h_e_peak_mw_cm2 >= 0.0,
            "[0, inf)",
        )?;
        check(
            "sted.h_d_peak_mw_cm2",
            s.h_d_peak_mw_cm2,
            s.h_d_peak_mw_cm2 >= 0.0,
            "[0, inf)",
        )?;
        check(
            "sted.lambda_e_nm",
            s.lambda_e_nm,
            s.lambda_e_nm > 0.0,
            "(0, inf)",
        )?;
        check(
            "sted.lambda_d_nm",
            s.lambda_d_nm,
            s.lambda_d_nm > 0.0,
            "(0, inf)",
        )?;
        check("sted.sigma_ps", s.sigma_ps, s.sigma_ps > 0.0, "(0, inf)")?;
        check("sted.delta_t_ps", s.delta_t_ps, true, "finite")?;
        if let Some(t) = s.t_read_ps {
            check(
                "sted.t_read_ps",
                t,
                t > -3.0 * s.sigma_ps,
                "(-3 sted.sigma_ps, inf)",
            )?;
        }

        let i = &self.integrator;
        check(
            "integrator.rel_tol",
            i.rel_tol,
            i.rel_tol > 0.0 && i.rel_tol < 1.0,
            "(0, 1)",
        )?;
        check(
            "integrator.abs_tol",
            i.abs_tol,
            i.abs_tol > 0.0 && i.abs_tol < 1.0,
            "(0, 1)",
        )?;
        check(
            "integrator.max_step_over_sigma",
            i.max_step_over_sigma,
            i.max_step_over_sigma > 0.0,
            "(0, inf)",
        )?;
        Ok(())
    }

    fn validate_sweep(&self) -> Result<(), ConfigError> {
        let s = &self.sweep;
        check("sweep.min", s.min, true, "finite")?;
        check("sweep.max", s.max, s.max >= s.min, "[sweep.min, inf)")?;
        check_count(
            "sweep.count",
            s.count,
            (1..=MAX_SWEEP_POINTS).contains(&s.count),
            "[1, 10000]",
        )?;
        if s.count > 1 && s.max == s.min {
            return Err(ConfigError::OutOfRange {
                path: "sweep.max".into(),
                value: s.max.to_string(),
                expected: "(sweep.min, inf) when sweep.count > 1".into(),
            });
        }
        if s.scale == SweepScale::Log {
            check("sweep.min", s.min, s.min > 0.0, "(0, inf) for a log sweep")?;
        }
        let sted_param = s.parameter == SweepParameter::HDPeakMwCm2;
        let sted_target = s.target == SweepTarget::Sted;
        let compatible = match s.parameter {
            SweepParameter::NumericalAperture => true,
            SweepParameter::HDPeakMwCm2 => sted_target,
            _ => !sted_target,
        };
        if !compatible {
            return Err(ConfigError::OutOfRange {
                path: "sweep.parameter".into(),
                value: s.parameter.to_string(),
                expected: if sted_param {
                    "a parameter of the swept technique (h_d_peak_mw_cm2 needs target = \"sted\")"
                        .into()
                } else {
                    "a parameter of the swept technique (sted accepts numerical_aperture or h_d_peak_mw_cm2)".into()
                },
            });
        }
        for v in s.values() {
            self.with_sweep_value(v)
                .validate_point()
                .map_err(|e| match e {
                    ConfigError::OutOfRange {
                        path,
                        value,
                        expected,
                    } => ConfigError::OutOfRange {
                        path: format!("sweep (via {path})"),
                        value,
                        expected,
                    },
                    other => other,
                })?;
        }
        Ok(())
    }

    /// Copy with the swept parameter set to `value`.
    pub fn with_sweep_value(&self, value: f64) -> Self {
        let mut c = self.clone();
        match self.sweep.parameter {
            SweepParameter::RRatio => c.drive.r_ratio = value,
            SweepParameter::OmegaS0OverGamma21 => c.drive.omega_s0_over_gamma21 = value,
            SweepParameter::DelayOverSigma => c.drive.delay_over_sigma = value,
            SweepParameter::NumericalAperture => c.optics.numerical_aperture = value,
            SweepParameter::HDPeakMwCm2 => c.sted.h_d_peak_mw_cm2 = value,
        }
        c
    }

    fn uses_slap_law(&self) -> bool {
        match self.technique {
            Technique::Slap | Technique::Compare => true,
            Technique::Sweep => self.sweep.target == SweepTarget::Slap,
            _ => false,
        }
    }

    pub fn geometry(&self) -> OpticalGeometry {
        OpticalGeometry::new(self.optics.wavelength_nm, self.optics.numerical_aperture)
            .expect("validated optics")
    }

    pub fn delta(&self) -> f64 {
        self.optics.delta_over_pi * PI
    }

    pub fn gamma_21(&self) -> f64 {
        ghz_to_rad_per_ps(self.medium.gamma_21_ghz)
    }

    pub fn medium(&self) -> LambdaMedium {
        LambdaMedium::new(
            self.gamma_21(),
            ghz_to_rad_per_ps(self.medium.gamma_23_ghz),
            ghz_to_rad_per_ps(self.medium.detuning_ghz),
        )
        .expect("validated medium")
    }

    pub fn omega_s0(&self) -> f64 {
        self.drive.omega_s0_over_gamma21 * self.gamma_21()
    }

    pub fn delay_ps(&self) -> f64 {
        self.drive.delay_over_sigma * self.drive.sigma_ps
    }

    pub fn beam_drive(&self) -> BeamDrive {
        BeamDrive::from_ratio(
            self.omega_s0(),
            self.drive.r_ratio,
            self.drive.sigma_ps,
            self.delay_ps(),
        )
        .and_then(|d| d.with_delta(self.delta()))
        .expect("validated drive")
    }

    /// `k = Ω_S0 T / A`; not restricted to `(0, 1)`.
    pub fn k(&self) -> f64 {
        self.omega_s0() * self.delay_ps() / self.analytic.a_const
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        let drive = self.beam_drive();
        IntegratorConfig {
            rel_tol: self.integrator.rel_tol,
            abs_tol: self.integrator.abs_tol,
            max_step_ps: self.integrator.max_step_over_sigma * self.drive.sigma_ps,
            ..IntegratorConfig::for_drive(&drive)
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        SpatialGrid::uniform(self.grid.x_min_nm, self.grid.x_max_nm, self.grid.points)
            .expect("validated grid")
    }

    pub fn sted_dye(&self) -> StedDye {
        StedDye::new(
            self.sted.cross_section_cm2,
            self.sted.tau_vib_ps,
            self.sted.tau_fl_ps,
        )
        .expect("validated dye")
    }

    pub fn sted_beams(&self) -> StedBeams {
        StedBeams {
            h_e_peak: self.sted.h_e_peak_mw_cm2,
            h_d_peak: self.sted.h_d_peak_mw_cm2,
            lambda_e_nm: self.sted.lambda_e_nm,
            lambda_d_nm: self.sted.lambda_d_nm,
            sigma_ps: self.sted.sigma_ps,
            delta_t_ps: self.sted.delta_t_ps,
            numerical_aperture: self.optics.numerical_aperture,
            delta: self.delta(),
        }
    }

    pub fn sted_config(&self) -> StedConfig {
        let beams = self.sted_beams();
        let mut cfg = StedConfig::for_beams(&beams);
        cfg.rel_tol = self.integrator.rel_tol;
        cfg.abs_tol = self.integrator.abs_tol;
        cfg.max_step_ps = self.integrator.max_step_over_sigma * self.sted.sigma_ps;
        if let Some(t) = self.sted.t_read_ps {
            cfg.t_read_ps = t;
        }
        cfg.back_transfer = self.sted.back_transfer;
        cfg
    }
}

/// Named figure set-ups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3b,
    Fig3c,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig2, Preset::Fig3b, Preset::Fig3c];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn config(self) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.output.stem = self.name().into();
        c.analytic.a_const = 20.0;
        match self {
            Preset::Fig2 => {
                c.technique = Technique::Analytic;
                c.analytic.k_values = vec![0.1, 0.4, 0.9];
                c.analytic.r_max = 300.0;
                c.analytic.r_points = 301;
            }
            Preset::Fig3b => {
                c.technique = Technique::Sweep;
                c.sweep = SweepConfig::default();
            }
            Preset::Fig3c => {
                c.technique = Technique::Compare;
                c.compare = CompareConfig::default();
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_slap_document_gets_defaults() {
        let (c, warnings) = parse_config("technique = \"slap\"\n").unwrap();
        assert!(warnings.is_empty());
        assert_eq!(c, ExperimentConfig::default());
        assert!((c.gamma_21() - 0.039_961_058_553_662_17).abs() < 1e-15);
        assert!((c.omega_s0() - 1.5 * c.gamma_21()).abs() < 1e-15);
        assert_eq!(c.delay_ps(), 150.0);
        assert_eq!(c.geometry().numerical_aperture(), 1.4);
        assert_eq!(c.geometry().wavelength_nm(), 490.0);
        let m = c.medium();
        assert_eq!(m.gamma_21(), m.gamma_23());
    }

    #[test]
    fn bad_numerical_aperture_names_key() {
        let err = parse_config("[optics]\nnumerical_aperture = 2.5\n").unwrap_err();
        assert_eq!(err.path(), Some("optics.numerical_aperture"));
        assert!(err.to_string().contains("(0, 1.7]"));
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let err = parse_config("[drive]\nomega_p0 = 3.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Schema { .. }));
        assert!(err.path().unwrap().starts_with("drive"), "{err}");
        assert!(parse_config("colour = 1\n").is_err());
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(
            parse_config("[optics\n"),
            Err(ConfigError::Malformed(_))
        ));
        let err = parse_config("[grid]\npoints = \"many\"\n").unwrap_err();
        assert_eq!(err.path(), Some("grid.points"));
    }

    #[test]
    fn large_k_warns_but_parses() {
        let (c, warnings) = parse_config("[analytic]\na_const = 2.0\n").unwrap();
        assert!(c.k() >= 1.0);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("k ="));
    }

    #[test]
    fn round_trip() {
        for preset in Preset::ALL {
            let c = preset.config();
            let (back, _) = parse_config(&c.to_toml()).unwrap();
            assert_eq!(back, c);
        }
        let mut c = ExperimentConfig::default();
        c.sted.t_read_ps = Some(123.456_789_012_345_67);
        c.drive.r_ratio = 1.0 / 3.0;
        let (back, _) = parse_config(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn sweep_values() {
        let s = SweepConfig::default();
        let v = s.values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 10.0);
        assert_eq!(v[24], 300.0);
        assert!(v
            .windows(2)
            .all(|w| (w[1] / w[0] - (30f64).powf(1.0 / 24.0)).abs() < 1e-12));
        let lin = SweepConfig {
            scale: SweepScale::Linear,
            min: 0.0,
            max: 1.0,
            count: 5,
            ..s
        };
        assert_eq!(lin.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn sweep_validation() {
        let text =
            "technique = \"sweep\"\n[sweep]\nparameter = \"r_ratio\"\nmin = 0.0\nscale = \"log\"\n";
        assert_eq!(parse_config(text).unwrap_err().path(), Some("sweep.min"));
        let text = "technique = \"sweep\"\n[sweep]\nparameter = \"h_d_peak_mw_cm2\"\nmin = 0.0\nmax = 2600.0\nscale = \"linear\"\n";
        assert_eq!(
            parse_config(text).unwrap_err().path(),
            Some("sweep.parameter")
        );
        let text = "technique = \"sweep\"\n[sweep]\nparameter = \"numerical_aperture\"\nmin = 1.0\nmax = 2.0\nscale = \"linear\"\n";
        let err = parse_config(text).unwrap_err();
        assert!(
            err.path().unwrap().contains("optics.numerical_aperture"),
            "{err}"
        );
    }

    #[test]
    fn k_values_checked() {
        let err = parse_config("[analytic]\nk_values = [0.5, 1.0]\n").unwrap_err();
        assert_eq!(err.path(), Some("analytic.k_values[1]"));
    }

    #[test]
    fn presets() {
        let c = Preset::Fig3b.config();
        assert_eq!(c.technique, Technique::Sweep);
        assert_eq!(c.sweep.count, 25);
        assert_eq!(c.analytic.a_const, 20.0);
        assert!(c.k() < 1.0);
        assert_eq!(Preset::from_name("fig3c"), Some(Preset::Fig3c));
        assert_eq!(Preset::from_name("fig4"), None);
    }

    #[test]
    fn sted_mapping() {
        let c = ExperimentConfig::default();
        assert_eq!(c.sted_beams(), StedBeams::default());
        assert_eq!(
            c.sted_config(),
            StedConfig::for_beams(&StedBeams::default())
        );
        assert_eq!(c.sted_dye(), StedDye::rhodamine_b());
    }
}
