//! Executes a validated configuration and writes its CSV tables and plot.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use slap_core::analytic::{fwhm_cpt, fwhm_slap, slap_cpt_ratio};
use slap_core::localization::{
    cpt_profile, format_number, fwhm_from_profile, scan_slap, LocalizationProfile, SpatialGrid,
};
use slap_core::sted::scan_sted;

use crate::config::{ConfigError, ExperimentConfig, Preset, SweepScale, SweepTarget, Technique};
use crate::plot::{render_svg, Figure, PlotError, Series};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: slap_core::Error,
    },
    #[error("plot: {0}")]
    Plot(#[from] PlotError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 1 for configuration problems, 2 for everything that fails later.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn numerical(context: impl Into<String>) -> impl FnOnce(slap_core::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Numerical { context, source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactRole {
    ProfileCsv,
    SummaryCsv,
    CurveCsv,
    Plot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub role: ArtifactRole,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunArtifacts {
    pub files: Vec<Artifact>,
    pub warnings: Vec<String>,
}

impl RunArtifacts {
    pub fn path_of(&self, role: ArtifactRole) -> Option<&Path> {
        self.files
            .iter()
            .find(|a| a.role == role)
            .map(|a| a.path.as_path())
    }
}

/// Command-line overrides applied on top of a configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub grid_points: Option<usize>,
    pub threads: Option<usize>,
}

struct Output {
    role: ArtifactRole,
    name: String,
    contents: Vec<u8>,
}

#[derive(Default)]
struct Products {
    outputs: Vec<Output>,
    warnings: Vec<String>,
}

impl Products {
    fn push(&mut self, role: ArtifactRole, name: String, contents: impl Into<Vec<u8>>) {
        self.outputs.push(Output {
            role,
            name,
            contents: contents.into(),
        });
    }
}

pub fn run_preset(preset: Preset, options: &RunOptions) -> Result<RunArtifacts, RunError> {
    run(&preset.config(), options)
}

pub fn run(config: &ExperimentConfig, options: &RunOptions) -> Result<RunArtifacts, RunError> {
    let mut config = config.clone();
    if let Some(points) = options.grid_points {
        config.grid.points = points;
    }
    if let Some(dir) = &options.out_dir {
        config.output.dir = dir.display().to_string();
    }
    let mut warnings = config.validate()?;

    let products = match options.threads {
        Some(0) => {
            return Err(ConfigError::OutOfRange {
                path: "--threads".into(),
                value: "0".into(),
                expected: "[1, inf)".into(),
            }
            .into())
        }
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ConfigError::Schema {
                path: "--threads".into(),
                message: e.to_string(),
            })?
            .install(|| compute(&config))?,
        None => compute(&config)?,
    };
    warnings.extend(products.warnings);

    let dir = PathBuf::from(&config.output.dir);
    let files = write_all(&dir, products.outputs)?;
    Ok(RunArtifacts { files, warnings })
}

/// Writes every output or, on the first failure, removes what was written.
fn write_all(dir: &Path, outputs: Vec<Output>) -> Result<Vec<Artifact>, RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written: Vec<Artifact> = Vec::new();
    for output in outputs {
        let path = dir.join(&output.name);
        if let Err(source) = fs::write(&path, &output.contents) {
            let _ = fs::remove_file(&path);
            for a in &written {
                let _ = fs::remove_file(&a.path);
            }
            return Err(RunError::Io { path, source });
        }
        written.push(Artifact {
            role: output.role,
            path,
        });
    }
    Ok(written)
}

fn compute(config: &ExperimentConfig) -> Result<Products, RunError> {
    let mut products = Products::default();
    match config.technique {
        Technique::Slap | Technique::Cpt | Technique::Sted => single(config, &mut products)?,
        Technique::Analytic => ratio_curves(config, &mut products)?,
        Technique::Sweep => sweep(config, &mut products)?,
        Technique::Compare => compare(config, &mut products)?,
    }
    Ok(products)
}

fn opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn table_csv(header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writes into memory cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn profiles_csv(grid: &SpatialGrid, columns: &[(String, &LocalizationProfile)]) -> Vec<u8> {
    let mut header = vec!["x_nm".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    let rows: Vec<Vec<String>> = grid
        .positions()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut row = vec![format_number(x)];
            row.extend(columns.iter().map(|(_, p)| format_number(p.values()[i])));
            row
        })
        .collect();
    table_csv(&header, &rows)
}

fn profile_series(label: String, p: &LocalizationProfile) -> Series {
    Series::new(label, p.grid().positions().to_vec(), p.values().to_vec())
}

/// Numerical FWHM, or a warning when the profile has none.
fn numeric_fwhm(
    profile: &LocalizationProfile,
    what: &str,
    warnings: &mut Vec<String>,
) -> Option<f64> {
    match fwhm_from_profile(profile) {
        Ok(r) => {
            if r.multimodal {
                warnings.push(format!(
                    "{what}: profile is multimodal, FWHM taken around the global maximum"
                ));
            }
            Some(r.fwhm_nm)
        }
        Err(e) => {
            warnings.push(format!("{what}: no FWHM ({e})"));
            None
        }
    }
}

fn slap_analytic(config: &ExperimentConfig) -> Option<f64> {
    let k = config.k();
    if !(k > 0.0 && k < 1.0) {
        return None;
    }
    fwhm_slap(&config.geometry(), config.delta(), config.drive.r_ratio, k).ok()
}

fn profile_for(
    config: &ExperimentConfig,
    target: SweepTarget,
) -> Result<LocalizationProfile, RunError> {
    let grid = config.grid();
    match target {
        SweepTarget::Slap => scan_slap(
            &grid,
            &config.geometry(),
            &config.beam_drive(),
            &config.medium(),
            &config.integrator_config(),
        )
        .map_err(numerical(format!(
            "SLAP scan (R = {})",
            config.drive.r_ratio
        ))),
        SweepTarget::Cpt => cpt_profile(&grid, &config.beam_drive(), &config.geometry())
            .map(|scan| scan.profile)
            .map_err(numerical("CPT profile")),
        SweepTarget::Sted => scan_sted(
            &grid,
            &config.sted_dye(),
            &config.sted_beams(),
            &config.sted_config(),
        )
        .map_err(numerical("STED scan")),
    }
}

fn analytic_for(config: &ExperimentConfig, target: SweepTarget) -> Option<f64> {
    match target {
        SweepTarget::Slap => slap_analytic(config),
        SweepTarget::Cpt => fwhm_cpt(&config.geometry(), config.delta(), config.drive.r_ratio).ok(),
        SweepTarget::Sted => None,
    }
}

fn single(config: &ExperimentConfig, products: &mut Products) -> Result<(), RunError> {
    let stem = &config.output.stem;
    let (target, key, value, y_label) = match config.technique {
        Technique::Slap => (SweepTarget::Slap, "r_ratio", config.drive.r_ratio, "p1"),
        Technique::Cpt => (
            SweepTarget::Cpt,
            "r_ratio",
            config.drive.r_ratio,
            "p1 (dark state)",
        ),
        _ => (
            SweepTarget::Sted,
            "h_d_peak_mw_cm2",
            config.sted.h_d_peak_mw_cm2,
            "n1",
        ),
    };
    let profile = profile_for(config, target)?;
    let label = profile.label().to_string();
    let fwhm = numeric_fwhm(&profile, &label, &mut products.warnings);
    let analytic = analytic_for(config, target);

    let mut csv = Vec::new();
    profile.write_csv(&mut csv).map_err(|source| RunError::Io {
        path: PathBuf::from(format!("{stem}_profile.csv")),
        source,
    })?;
    products.push(ArtifactRole::ProfileCsv, format!("{stem}_profile.csv"), csv);

    let header = [key, "fwhm_numerical_nm", "fwhm_analytic_nm"].map(String::from);
    let rows = vec![vec![format_number(value), opt(fwhm), opt(analytic)]];
    products.push(
        ArtifactRole::SummaryCsv,
        format!("{stem}_summary.csv"),
        table_csv(&header, &rows),
    );

    let mut fig = Figure::new(format!("{label} profile"), "x (nm)", y_label)
        .with_series(profile_series(label, &profile));
    fig.y_range = Some((0.0, 1.0));
    products.push(ArtifactRole::Plot, format!("{stem}.svg"), render_svg(&fig)?);
    Ok(())
}

fn ratio_curves(config: &ExperimentConfig, products: &mut Products) -> Result<(), RunError> {
    let stem = &config.output.stem;
    let a = &config.analytic;
    let rs: Vec<f64> = (0..a.r_points)
        .map(|i| a.r_max * i as f64 / (a.r_points - 1) as f64)
        .collect();
    let mut curves = Vec::with_capacity(a.k_values.len());
    for &k in &a.k_values {
        let ys = rs
            .iter()
            .map(|&r| slap_cpt_ratio(r, k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(numerical(format!("SLAP/CPT ratio at k = {k}")))?;
        curves.push((k, ys));
    }

    let mut header = vec!["r_ratio".to_string()];
    header.extend(curves.iter().map(|(k, _)| format!("ratio_k{k}")));
    let rows: Vec<Vec<String>> = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut row = vec![format_number(r)];
            row.extend(curves.iter().map(|(_, ys)| format_number(ys[i])));
            row
        })
        .collect();
    products.push(
        ArtifactRole::CurveCsv,
        format!("{stem}_ratio.csv"),
        table_csv(&header, &rows),
    );

    let mut fig = Figure::new(
        "SLAP / CPT resolution ratio",
        "R = (Omega_P0/Omega_S0)^2",
        "FWHM_SLAP / FWHM_CPT",
    );
    for (k, ys) in curves {
        fig = fig.with_series(Series::new(format!("k = {k}"), rs.clone(), ys));
    }
    fig.y_range = Some((0.0, 1.0));
    products.push(ArtifactRole::Plot, format!("{stem}.svg"), render_svg(&fig)?);
    Ok(())
}

fn sweep(config: &ExperimentConfig, products: &mut Products) -> Result<(), RunError> {
    let stem = &config.output.stem;
    let s = &config.sweep;
    let key = s.parameter.key();
    let values = s.values();
    let profiles = values
        .par_iter()
        .map(|&v| profile_for(&config.with_sweep_value(v), s.target))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::with_capacity(values.len());
    let mut numeric = Vec::with_capacity(values.len());
    let mut analytic = Vec::with_capacity(values.len());
    for (&v, profile) in values.iter().zip(&profiles) {
        let point = config.with_sweep_value(v);
        let fwhm = numeric_fwhm(profile, &format!("{key} = {v}"), &mut products.warnings);
        let law = analytic_for(&point, s.target);
        rows.push(vec![format_number(v), opt(fwhm), opt(law)]);
        numeric.push(fwhm.unwrap_or(f64::NAN));
        analytic.push(law.unwrap_or(f64::NAN));
    }

    let columns: Vec<(String, &LocalizationProfile)> = values
        .iter()
        .zip(&profiles)
        .map(|(v, p)| (format!("{key}={v}"), p))
        .collect();
    products.push(
        ArtifactRole::ProfileCsv,
        format!("{stem}_profiles.csv"),
        profiles_csv(&config.grid(), &columns),
    );
    let header = [key, "fwhm_numerical_nm", "fwhm_analytic_nm"].map(String::from);
    products.push(
        ArtifactRole::SummaryCsv,
        format!("{stem}_summary.csv"),
        table_csv(&header, &rows),
    );

    let target = match s.target {
        SweepTarget::Slap => "SLAP",
        SweepTarget::Cpt => "CPT",
        SweepTarget::Sted => "STED",
    };
    let mut fig = Figure::new(format!("{target} FWHM vs {key}"), key, "FWHM (nm)")
        .with_series(Series::new("numerical", values.clone(), numeric));
    if analytic.iter().any(|v| v.is_finite()) {
        fig = fig.with_series(Series::new("analytic", values, analytic).dashed());
    }
    fig.log_x = s.scale == SweepScale::Log;
    products.push(ArtifactRole::Plot, format!("{stem}.svg"), render_svg(&fig)?);
    Ok(())
}

fn compare(config: &ExperimentConfig, products: &mut Products) -> Result<(), RunError> {
    let stem = &config.output.stem;
    let c = &config.compare;
    let mut jobs: Vec<(String, ExperimentConfig, SweepTarget)> = c
        .r_values
        .iter()
        .map(|&r| {
            let mut point = config.clone();
            point.drive.r_ratio = r;
            (format!("slap_r{r}"), point, SweepTarget::Slap)
        })
        .collect();
    if c.include_sted {
        jobs.push(("sted".into(), config.clone(), SweepTarget::Sted));
    }
    let profiles = jobs
        .par_iter()
        .map(|(_, point, target)| profile_for(point, *target))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let header = [
        "profile",
        "r_ratio",
        "fwhm_numerical_nm",
        "fwhm_analytic_nm",
        "peak_value",
    ]
    .map(String::from);
    let mut rows = Vec::new();
    for ((name, point, target), profile) in jobs.iter().zip(&profiles) {
        let fwhm = numeric_fwhm(profile, name, &mut products.warnings);
        let r = (*target == SweepTarget::Slap).then_some(point.drive.r_ratio);
        rows.push(vec![
            name.clone(),
            opt(r),
            opt(fwhm),
            opt(analytic_for(point, *target)),
            format_number(profile.peak()),
        ]);
    }

    let columns: Vec<(String, &LocalizationProfile)> = jobs
        .iter()
        .zip(&profiles)
        .map(|((name, _, _), p)| (name.clone(), p))
        .collect();
    products.push(
        ArtifactRole::ProfileCsv,
        format!("{stem}_profiles.csv"),
        profiles_csv(&config.grid(), &columns),
    );
    products.push(
        ArtifactRole::SummaryCsv,
        format!("{stem}_summary.csv"),
        table_csv(&header, &rows),
    );

    let mut fig = Figure::new("Localization profiles", "x (nm)", "population");
    for ((_, point, target), p) in jobs.iter().zip(&profiles) {
        let label = match target {
            SweepTarget::Sted => "STED n1".to_string(),
            _ => format!("SLAP R = {}", point.drive.r_ratio),
        };
        fig = fig.with_series(profile_series(label, p));
    }
    fig.y_range = Some((0.0, 1.0));
    products.push(ArtifactRole::Plot, format!("{stem}.svg"), render_svg(&fig)?);
    Ok(())
}
