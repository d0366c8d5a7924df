use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slap_cli::config::ExperimentConfig;
use slap_cli::{load_config, run, run_preset, Preset, RunArtifacts, RunError, RunOptions};
use slap_core::analytic::{fwhm_cpt, fwhm_slap, slap_cpt_ratio};
use slap_core::beams::OpticalGeometry;

#[derive(Parser)]
#[command(
    name = "slap",
    version,
    about = "Localization scans for SLAP, CPT and STED"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a built-in figure set-up (fig2, fig3b, fig3c)
    Preset {
        #[arg(value_parser = ["fig2", "fig3b", "fig3c"])]
        name: String,
        #[command(flatten)]
        flags: RunFlags,
        /// Print the preset's configuration instead of running it
        #[arg(long)]
        print_config: bool,
    },
    /// Print the closed-form SLAP and CPT widths
    Analytic {
        /// Intensity ratio R = (Omega_P0/Omega_S0)^2
        #[arg(long, default_value_t = 50.0)]
        r: f64,
        /// Adiabaticity parameter k; derived from the default drive and --a when absent
        #[arg(long)]
        k: Option<f64>,
        /// Adiabaticity constant A
        #[arg(long, default_value_t = 10.0)]
        a: f64,
        #[arg(long, default_value_t = 490.0)]
        wavelength_nm: f64,
        #[arg(long, default_value_t = 1.4)]
        na: f64,
        /// Doughnut offset in units of pi
        #[arg(long, default_value_t = 1.22)]
        delta_over_pi: f64,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Number of grid points (overrides grid.points)
    #[arg(long)]
    grid_points: Option<usize>,
    /// Worker threads
    #[arg(long)]
    threads: Option<usize>,
}

impl RunFlags {
    fn options(self) -> RunOptions {
        RunOptions {
            out_dir: self.out_dir,
            grid_points: self.grid_points,
            threads: self.threads,
        }
    }
}

fn report(result: Result<RunArtifacts, RunError>) -> ExitCode {
    match result {
        Ok(artifacts) => {
            for w in &artifacts.warnings {
                eprintln!("warning: {w}");
            }
            for a in &artifacts.files {
                println!("{}", a.path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn analytic(
    r: f64,
    k: Option<f64>,
    a: f64,
    wavelength_nm: f64,
    na: f64,
    delta_over_pi: f64,
) -> ExitCode {
    let geom = match OpticalGeometry::new(wavelength_nm, na) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let k = k.unwrap_or_else(|| {
        let mut c = ExperimentConfig::default();
        c.analytic.a_const = a;
        c.k()
    });
    let delta = delta_over_pi * std::f64::consts::PI;
    println!("R = {r}, k = {k:.6}, lambda = {wavelength_nm} nm, NA = {na}");
    let mut code = ExitCode::SUCCESS;
    match fwhm_cpt(&geom, delta, r) {
        Ok(w) => println!("fwhm_cpt_nm = {w:.6}"),
        Err(e) => {
            eprintln!("error: {e}");
            code = ExitCode::from(1);
        }
    }
    match (fwhm_slap(&geom, delta, r, k), slap_cpt_ratio(r, k)) {
        (Ok(w), Ok(ratio)) => {
            println!("fwhm_slap_nm = {w:.6}");
            println!("slap_cpt_ratio = {ratio:.6}");
        }
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            code = ExitCode::from(1);
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, flags } => match load_config(&config) {
            Ok((config, _)) => report(run(&config, &flags.options())),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Preset {
            name,
            flags,
            print_config,
        } => {
            let preset = Preset::from_name(&name).expect("clap restricts preset names");
            if print_config {
                print!("{}", preset.config().to_toml());
                return ExitCode::SUCCESS;
            }
            report(run_preset(preset, &flags.options()))
        }
        Command::Analytic {
            r,
            k,
            a,
            wavelength_nm,
            na,
            delta_over_pi,
        } => analytic(r, k, a, wavelength_nm, na, delta_over_pi),
    }
}
