//! Spatial scans, FWHM extraction and the effective PSF.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::beams::{airy_amplitude, BeamDrive, OpticalGeometry};
use crate::error::{Error, Result};
use crate::lambda_system::{slap_point, IntegratorConfig, LambdaMedium};

/// Values may overshoot 1 by this much from integration round-off.
const VALUE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    positions: Vec<f64>,
}

impl SpatialGrid {
    /// Strictly increasing, at least three points, uniform spacing.
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.len() < 3 {
            return Err(Error::Grid(format!(
                "need at least 3 points, got {}",
                positions.len()
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::Grid("non-finite position".into()));
        }
        let step = (positions[positions.len() - 1] - positions[0]) / (positions.len() - 1) as f64;
        if !(step > 0.0) {
            return Err(Error::Grid("positions must be strictly increasing".into()));
        }
        for w in positions.windows(2) {
            let d = w[1] - w[0];
            if !(d > 0.0) {
                return Err(Error::Grid("positions must be strictly increasing".into()));
            }
            if ((d - step) / step).abs() > 1e-9 {
                return Err(Error::Grid(format!("non-uniform spacing {d} vs {step}")));
            }
        }
        Ok(Self { positions })
    }

    pub fn uniform(x_min_nm: f64, x_max_nm: f64, points: usize) -> Result<Self> {
        if points < 3 {
            return Err(Error::Grid(format!("need at least 3 points, got {points}")));
        }
        let step = (x_max_nm - x_min_nm) / (points - 1) as f64;
        let positions = (0..points)
            .map(|i| {
                if i == points - 1 {
                    x_max_nm
                } else {
                    x_min_nm + step * i as f64
                }
            })
            .collect();
        Self::new(positions)
    }

    /// `[-400, 400]` nm in 1 nm steps.
    pub fn default_lateral() -> Self {
        Self::uniform(-400.0, 400.0, 801).expect("static grid is valid")
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.positions[self.len() - 1] - self.positions[0]) / (self.len() - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technique {
    Slap,
    Cpt,
    Sted,
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Technique::Slap => "SLAP",
            Technique::Cpt => "CPT",
            Technique::Sted => "STED",
        })
    }
}

/// Population (or normalized PSF) sampled on a lateral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationProfile {
    grid: SpatialGrid,
    values: Vec<f64>,
    label: Technique,
}

impl LocalizationProfile {
    pub fn new(grid: SpatialGrid, values: Vec<f64>, label: Technique) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Profile(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values
            .iter()
            .find(|v| !(**v >= 0.0 && **v <= 1.0 + VALUE_SLACK))
        {
            return Err(Error::Profile(format!("value {bad} outside [0, 1]")));
        }
        Ok(Self {
            grid,
            values,
            label,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Technique {
        self.label
    }

    pub fn peak(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linear interpolation at `x_nm`, `None` outside the grid.
    pub fn value_at(&self, x_nm: f64) -> Option<f64> {
        let xs = self.grid.positions();
        if x_nm < xs[0] || x_nm > xs[xs.len() - 1] {
            return None;
        }
        let i = xs.partition_point(|&x| x <= x_nm).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        Some(y0 + (y1 - y0) * (x_nm - x0) / (x1 - x0))
    }

    /// CSV with header `x_nm,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["x_nm", "value"])?;
        for (x, v) in self.grid.positions().iter().zip(&self.values) {
            csv.write_record([format_number(*x), format_number(*v)])?;
        }
        csv.flush()
    }
}

/// Decimal rendering with 12 significant digits, plain notation for
/// moderate magnitudes and exponent notation otherwise.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let exponent: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        if fixed.contains('.') {
            fixed
        } else {
            format!("{fixed}.0")
        }
    } else {
        sci
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwhmResult {
    pub fwhm_nm: f64,
    pub left_cross_nm: f64,
    pub right_cross_nm: f64,
    pub peak_value: f64,
    /// Another part of the profile, outside the crossings, reaches half maximum.
    pub multimodal: bool,
}

/// Half-maximum width around the global maximum, crossings by linear
/// interpolation between bracketing samples.
pub fn fwhm_from_profile(profile: &LocalizationProfile) -> Result<FwhmResult> {
    let xs = profile.grid.positions();
    let ys = &profile.values;
    let (peak_index, peak_value) =
        ys.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
    if !(peak_value > 0.0) {
        return Err(Error::ZeroProfile);
    }
    let half = 0.5 * peak_value;
    let interpolate =
        |i: usize, j: usize| xs[i] + (half - ys[i]) * (xs[j] - xs[i]) / (ys[j] - ys[i]);

    let left = (0..peak_index)
        .rev()
        .find(|&i| ys[i] < half)
        .ok_or(Error::NoPeak)?;
    let right = (peak_index + 1..ys.len())
        .find(|&i| ys[i] < half)
        .ok_or(Error::NoPeak)?;
    let left_cross_nm = interpolate(left, left + 1);
    let right_cross_nm = interpolate(right, right - 1);

    let multimodal = ys[..left]
        .iter()
        .chain(&ys[right + 1..])
        .any(|&v| v >= half);
    Ok(FwhmResult {
        fwhm_nm: right_cross_nm - left_cross_nm,
        left_cross_nm,
        right_cross_nm,
        peak_value,
        multimodal,
    })
}

/// Final `|1>` population across the grid. Points are integrated
/// independently (in parallel) and gathered in grid order.
pub fn scan_slap(
    grid: &SpatialGrid,
    geom: &OpticalGeometry,
    drive: &BeamDrive,
    medium: &LambdaMedium,
    cfg: &IntegratorConfig,
) -> Result<LocalizationProfile> {
    cfg.validate()?;
    let values = grid
        .positions()
        .par_iter()
        .map(|&x| {
            slap_point(geom.optical_unit(x), drive, medium, cfg).map_err(|e| match e {
                Error::Integration(source) => Error::ScanPoint { x_nm: x, source },
                other => other,
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    LocalizationProfile::new(grid.clone(), values, Technique::Slap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CptScan {
    pub profile: LocalizationProfile,
    /// Positions (nm) where both fields vanish; their value is set to 1.
    pub degenerate_points: Vec<f64>,
}

/// Dark-state population `|<1|D(υ)>|^2 = |Ω_S|^2/(|Ω_S|^2 + |Ω_P|^2)` with both
/// fields at their envelope peaks.
pub fn cpt_profile(
    grid: &SpatialGrid,
    drive: &BeamDrive,
    geom: &OpticalGeometry,
) -> Result<CptScan> {
    let mut degenerate_points = Vec::new();
    let values = grid
        .positions()
        .iter()
        .map(|&x| {
            let v = geom.optical_unit(x);
            let s = drive.omega_s0() * drive.stokes_profile(v);
            let p = drive.omega_p0() * drive.pump_profile(v);
            let total = s * s + p * p;
            if total == 0.0 {
                degenerate_points.push(x);
                1.0
            } else {
                s * s / total
            }
        })
        .collect();
    let profile = LocalizationProfile::new(grid.clone(), values, Technique::Cpt)?;
    Ok(CptScan {
        profile,
        degenerate_points,
    })
}

/// `h_exc(υ) p1(υ)` with `h_exc = F(υ, 0)^2`, normalized to unit peak.
pub fn effective_psf(
    p1: &LocalizationProfile,
    geom: &OpticalGeometry,
) -> Result<LocalizationProfile> {
    let product: Vec<f64> = p1
        .grid
        .positions()
        .iter()
        .zip(&p1.values)
        .map(|(&x, &p)| airy_amplitude(geom.optical_unit(x), 0.0).powi(2) * p)
        .collect();
    let peak = product.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::ZeroProfile);
    }
    let values = product.into_iter().map(|v| v / peak).collect();
    LocalizationProfile::new(p1.grid.clone(), values, p1.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz_to_rad_per_ps;
    use proptest::prelude::*;

    fn geom() -> OpticalGeometry {
        OpticalGeometry::new(490.0, 1.4).unwrap()
    }

    fn profile_of(grid: &SpatialGrid, f: impl Fn(f64) -> f64) -> LocalizationProfile {
        let values = grid.positions().iter().map(|&x| f(x)).collect();
        LocalizationProfile::new(grid.clone(), values, Technique::Slap).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::new(vec![0.0, 1.0]).is_err());
        assert!(SpatialGrid::new(vec![0.0, 1.0, 3.0]).is_err());
        assert!(SpatialGrid::new(vec![2.0, 1.0, 0.0]).is_err());
        assert!(SpatialGrid::new(vec![0.0, 1.0, 2.0]).is_ok());
        let g = SpatialGrid::default_lateral();
        assert_eq!(g.len(), 801);
        assert!((g.spacing() - 1.0).abs() < 1e-12);
        assert_eq!(g.positions()[400], 0.0);
    }

    #[test]
    fn profile_validation() {
        let grid = SpatialGrid::uniform(-1.0, 1.0, 3).unwrap();
        assert!(LocalizationProfile::new(grid.clone(), vec![0.0, 1.0], Technique::Cpt).is_err());
        assert!(
            LocalizationProfile::new(grid.clone(), vec![0.0, 1.1, 0.0], Technique::Cpt).is_err()
        );
        assert!(
            LocalizationProfile::new(grid.clone(), vec![0.0, -0.1, 0.0], Technique::Cpt).is_err()
        );
        assert!(LocalizationProfile::new(grid, vec![0.0, 1.0 + 1e-9, 0.0], Technique::Cpt).is_ok());
    }

    #[test]
    fn triangle_fwhm() {
        let w = 50.0;
        let grid = SpatialGrid::uniform(-100.0, 100.0, 201).unwrap();
        let profile = profile_of(&grid, |x| (1.0 - x.abs() / w).max(0.0));
        let r = fwhm_from_profile(&profile).unwrap();
        assert!((r.fwhm_nm - w).abs() < 1e-12);
        assert!((r.left_cross_nm + w / 2.0).abs() < 1e-12);
        assert_eq!(r.peak_value, 1.0);
        assert!(!r.multimodal);
    }

    #[test]
    fn gaussian_fwhm_within_one_step() {
        let s = 30.0;
        let grid = SpatialGrid::uniform(-200.0, 200.0, 101).unwrap();
        let profile = profile_of(&grid, |x| (-(x / s).powi(2)).exp());
        let r = fwhm_from_profile(&profile).unwrap();
        let exact = 2.0 * 2f64.ln().sqrt() * s;
        assert!((r.fwhm_nm - exact).abs() < grid.spacing());
    }

    #[test]
    fn degenerate_profiles() {
        let grid = SpatialGrid::uniform(-10.0, 10.0, 21).unwrap();
        assert_eq!(
            fwhm_from_profile(&profile_of(&grid, |_| 0.0)),
            Err(Error::ZeroProfile)
        );
        assert_eq!(
            fwhm_from_profile(&profile_of(&grid, |_| 1.0)),
            Err(Error::NoPeak)
        );
        assert_eq!(
            fwhm_from_profile(&profile_of(&grid, |x| if x < 5.0 { 1.0 } else { 0.0 })),
            Err(Error::NoPeak)
        );
    }

    #[test]
    fn multimodal_is_flagged() {
        let grid = SpatialGrid::uniform(-100.0, 100.0, 201).unwrap();
        let bump = |x: f64, c: f64, h: f64| h * (-((x - c) / 5.0).powi(2)).exp();
        let profile = profile_of(&grid, |x| bump(x, 0.0, 1.0) + bump(x, 60.0, 0.8));
        let r = fwhm_from_profile(&profile).unwrap();
        assert!(r.multimodal);
        assert!(r.left_cross_nm < 0.0 && r.right_cross_nm < 10.0);
    }

    #[test]
    fn refinement_stability() {
        let f = |x: f64| 1.0 / (1.0 + (x / 23.0).powi(4));
        let coarse = SpatialGrid::uniform(-200.0, 200.0, 81).unwrap();
        let fine = SpatialGrid::uniform(-200.0, 200.0, 161).unwrap();
        let a = fwhm_from_profile(&profile_of(&coarse, f)).unwrap().fwhm_nm;
        let b = fwhm_from_profile(&profile_of(&fine, f)).unwrap().fwhm_nm;
        assert!((a - b).abs() < coarse.spacing());
    }

    #[test]
    fn csv_format() {
        let grid = SpatialGrid::uniform(-1.0, 1.0, 3).unwrap();
        let profile =
            LocalizationProfile::new(grid, vec![0.25, 1.0, 1.0 / 3.0], Technique::Cpt).unwrap();
        let mut out = Vec::new();
        profile.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "x_nm,value\n-1.00000000000,0.250000000000\n0,1.00000000000\n1.00000000000,0.333333333333\n"
        );
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(123.456), "123.456000000");
        assert_eq!(format_number(-400.0), "-400.000000000");
        assert_eq!(format_number(1.5e-7), "1.50000000000e-7");
        assert_eq!(format_number(2.5e13), "2.50000000000e13");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
    }

    #[test]
    fn cpt_profile_examples() {
        let g = ghz_to_rad_per_ps(6.36);
        let grid = SpatialGrid::default_lateral();
        let drive = BeamDrive::from_ratio(1.5 * g, 100.0, 100.0, 150.0).unwrap();
        let scan = cpt_profile(&grid, &drive, &geom()).unwrap();
        assert!(scan.degenerate_points.is_empty());
        assert!((scan.profile.value_at(0.0).unwrap() - 0.999_981_003_229_089).abs() < 1e-12);
        let no_pump = drive.with_pump(0.0).unwrap();
        let flat = cpt_profile(&grid, &no_pump, &geom()).unwrap();
        assert!(flat.profile.values().iter().all(|&v| v == 1.0));
        let dark = BeamDrive::counterintuitive(0.0, 0.0, 100.0, 150.0).unwrap();
        let degenerate = cpt_profile(&grid, &dark, &geom()).unwrap();
        assert_eq!(degenerate.degenerate_points.len(), 801);
    }

    #[test]
    fn effective_psf_examples() {
        let grid = SpatialGrid::default_lateral();
        let ones = profile_of(&grid, |_| 1.0);
        let psf = effective_psf(&ones, &geom()).unwrap();
        for (&x, &v) in grid.positions().iter().zip(psf.values()) {
            let expected = airy_amplitude(geom().optical_unit(x), 0.0).powi(2);
            assert!((v - expected).abs() < 1e-15);
        }
        assert_eq!(psf.peak(), 1.0);

        let spike = profile_of(&grid, |x| if x == 37.0 { 0.2 } else { 0.0 });
        let psf = effective_psf(&spike, &geom()).unwrap();
        for (&x, &v) in grid.positions().iter().zip(psf.values()) {
            assert_eq!(v, if x == 37.0 { 1.0 } else { 0.0 });
        }

        // the only nonzero sample sits on the first zero of h_exc
        let node = geom().position_nm(slap_oracles::bessel_j1_root(3.0, 4.5));
        let grid = SpatialGrid::uniform(node - 1.0, node + 1.0, 3).unwrap();
        let tiny = LocalizationProfile::new(grid, vec![0.0, 1.0, 0.0], Technique::Slap).unwrap();
        let near_zero = effective_psf(&tiny, &geom());
        assert!(matches!(near_zero, Err(Error::ZeroProfile)) || near_zero.unwrap().peak() == 1.0);

        let zero = profile_of(&SpatialGrid::default_lateral(), |_| 0.0);
        assert_eq!(effective_psf(&zero, &geom()), Err(Error::ZeroProfile));
    }

    proptest! {
        #[test]
        fn interpolation_hits_samples(i in 0usize..801) {
            let grid = SpatialGrid::default_lateral();
            let profile = profile_of(&grid, |x| (-(x / 80.0).powi(2)).exp());
            let x = grid.positions()[i];
            prop_assert!((profile.value_at(x).unwrap() - profile.values()[i]).abs() < 1e-15);
        }

        #[test]
        fn psf_peak_is_one(scale in 0.01f64..1.0, width in 20.0f64..200.0) {
            let grid = SpatialGrid::uniform(-300.0, 300.0, 301).unwrap();
            let p1 = profile_of(&grid, |x| scale * (-(x / width).powi(2)).exp());
            prop_assert_eq!(effective_psf(&p1, &geom()).unwrap().peak(), 1.0);
        }
    }
}
