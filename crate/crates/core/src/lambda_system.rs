//! Lindblad dynamics of the driven three-level Lambda system.
//!
//! Basis order is `{|1>, |2>, |3>}`: two degenerate ground states and the
//! excited state `|2>`. The pump couples `|1> <-> |2>`, the Stokes
//! `|3> <-> |2>`. In the rotating frame, two-photon resonant,
//!
//! ```text
//! H/ħ = Δ|2><2| + (Ω_P |2><1| + Ω_S |2><3| + h.c.)/2
//! ```
//!
//! and spontaneous emission from `|2>` is described by the jump operators
//! `|1><2|` and `|3><2|` with population rates `γ21`, `γ23`.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::beams::BeamDrive;
use crate::error::{check_range, Error, Result};
use crate::ode::{dormand_prince, IntegrationError, StepControl};

pub type ComplexMatrix3 = Matrix3<Complex64>;

const HERMITICITY_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-8;
const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    One,
    Two,
    Three,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::One => 0,
            Level::Two => 1,
            Level::Three => 2,
        }
    }
}

/// Decay rates and detuning of the Lambda medium, in rad/ps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaMedium {
    gamma_21: f64,
    gamma_23: f64,
    detuning: f64,
}

impl LambdaMedium {
    pub fn new(gamma_21: f64, gamma_23: f64, detuning: f64) -> Result<Self> {
        check_range("gamma_21", gamma_21, gamma_21 >= 0.0, "[0, inf)")?;
        check_range("gamma_23", gamma_23, gamma_23 >= 0.0, "[0, inf)")?;
        check_range("detuning", detuning, true, "finite")?;
        Ok(Self {
            gamma_21,
            gamma_23,
            detuning,
        })
    }

    /// Symmetric decay `γ21 = γ23 = gamma`, on resonance.
    pub fn symmetric(gamma: f64) -> Result<Self> {
        Self::new(gamma, gamma, 0.0)
    }

    pub fn gamma_21(&self) -> f64 {
        self.gamma_21
    }

    pub fn gamma_23(&self) -> f64 {
        self.gamma_23
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// Total population decay rate of `|2>`.
    pub fn total_decay(&self) -> f64 {
        self.gamma_21 + self.gamma_23
    }
}

/// Hermitian, unit-trace, positive semidefinite 3x3 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(ComplexMatrix3);

impl DensityMatrix {
    /// All population in `level`.
    pub fn level(level: Level) -> Self {
        let mut m = ComplexMatrix3::zeros();
        m[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    /// Projector onto a normalized state vector (normalization is applied).
    pub fn pure(amplitudes: [Complex64; 3]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let scale = 1.0 / norm_sq.sqrt();
        let m =
            ComplexMatrix3::from_fn(|i, j| amplitudes[i] * amplitudes[j].conj() * scale * scale);
        Ok(Self(m))
    }

    /// Validates `m` against the density-matrix invariants.
    pub fn from_matrix(m: ComplexMatrix3) -> Result<Self> {
        let rho = Self(m);
        let herm = rho.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let drift = (rho.trace() - 1.0).abs();
        if drift > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace off by {drift:e}")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.0
    }

    pub fn population(&self, level: Level) -> f64 {
        self.0[(level.index(), level.index())].re
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Largest `|ρ_ij - conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        hermitian.symmetric_eigenvalues().min()
    }

    fn to_flat(self) -> [f64; 18] {
        let mut out = [0.0; 18];
        for i in 0..3 {
            for j in 0..3 {
                let z = self.0[(i, j)];
                out[3 * i + j] = z.re;
                out[9 + 3 * i + j] = z.im;
            }
        }
        out
    }
}

/// Invariant residuals of a raw (possibly drifted) integrator state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    /// `|tr ρ - 1|`.
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

pub fn diagnose(m: &ComplexMatrix3) -> StateDiagnostics {
    let rho = DensityMatrix(*m);
    StateDiagnostics {
        trace_error: (rho.trace() - 1.0).abs(),
        hermiticity_error: rho.hermiticity_error(),
        min_eigenvalue: rho.min_eigenvalue(),
    }
}

fn from_flat(y: &[f64; 18]) -> ComplexMatrix3 {
    ComplexMatrix3::from_fn(|i, j| Complex64::new(y[3 * i + j], y[9 + 3 * i + j]))
}

fn to_flat(m: &ComplexMatrix3) -> [f64; 18] {
    DensityMatrix(*m).to_flat()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian(ComplexMatrix3);

impl Hamiltonian {
    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.0
    }
}

/// Rotating-wave Hamiltonian in rad/ps for real Rabi frequencies.
pub fn hamiltonian(omega_p: f64, omega_s: f64, medium: &LambdaMedium) -> Hamiltonian {
    let zero = Complex64::new(0.0, 0.0);
    let p = Complex64::new(0.5 * omega_p, 0.0);
    let s = Complex64::new(0.5 * omega_s, 0.0);
    let d = Complex64::new(medium.detuning, 0.0);
    Hamiltonian(ComplexMatrix3::new(
        zero, p, zero, //
        p, d, s, //
        zero, s, zero,
    ))
}

/// `dρ/dt = -i[H, ρ] + Σ_j γ2j (L_j ρ L_j† - {L_j† L_j, ρ}/2)`.
///
/// Assumes `rho` is Hermitian, so `ρH = (Hρ)†`.
pub fn lindblad_rhs(
    rho: &ComplexMatrix3,
    h: &Hamiltonian,
    medium: &LambdaMedium,
) -> ComplexMatrix3 {
    let h_rho = h.0 * rho;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = (h_rho - h_rho.adjoint()) * minus_i;

    // L_j ρ L_j† = ρ22 |j><j|; {|2><2|, ρ}/2 halves row and column 2
    let p2 = rho[(1, 1)];
    let total = medium.total_decay();
    out[(0, 0)] += p2 * medium.gamma_21;
    out[(2, 2)] += p2 * medium.gamma_23;
    for k in 0..3 {
        if k != 1 {
            out[(1, k)] -= rho[(1, k)] * (0.5 * total);
            out[(k, 1)] -= rho[(k, 1)] * (0.5 * total);
        }
    }
    out[(1, 1)] -= p2 * total;
    out
}

/// A time-dependent `(Ω_P, Ω_S)` pair in rad/ps.
pub trait RabiDrive {
    fn rabi_pair(&self, t_ps: f64) -> (f64, f64);
}

impl<F: Fn(f64) -> (f64, f64)> RabiDrive for F {
    fn rabi_pair(&self, t_ps: f64) -> (f64, f64) {
        self(t_ps)
    }
}

/// The beam pair sampled at one lateral position, with spatial factors cached.
#[derive(Debug, Clone, Copy)]
pub struct PointDrive {
    drive: BeamDrive,
    pump_amplitude: f64,
    stokes_amplitude: f64,
}

impl PointDrive {
    pub fn new(drive: &BeamDrive, upsilon: f64) -> Self {
        Self {
            drive: *drive,
            pump_amplitude: drive.omega_p0() * drive.pump_profile(upsilon),
            stokes_amplitude: drive.omega_s0() * drive.stokes_profile(upsilon),
        }
    }
}

impl RabiDrive for PointDrive {
    fn rabi_pair(&self, t_ps: f64) -> (f64, f64) {
        (
            self.pump_amplitude * self.drive.pump_envelope(t_ps),
            self.stokes_amplitude * self.drive.stokes_envelope(t_ps),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step_ps: f64,
    pub t_start_ps: f64,
    pub t_end_ps: f64,
}

impl IntegratorConfig {
    /// Default tolerances, `σ/50` step cap and the `[t_S - 3σ, t_P + 3σ]` window.
    pub fn for_drive(drive: &BeamDrive) -> Self {
        let (t_start_ps, t_end_ps) = drive.default_window();
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step_ps: drive.sigma_ps() / 50.0,
            t_start_ps,
            t_end_ps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("rel_tol", self.rel_tol, self.rel_tol > 0.0, "(0, inf)")?;
        check_range("abs_tol", self.abs_tol, self.abs_tol > 0.0, "(0, inf)")?;
        if !(self.max_step_ps > 0.0) {
            return Err(Error::Domain {
                name: "max_step_ps",
                value: self.max_step_ps,
                expected: "(0, inf]",
            });
        }
        check_range("t_start_ps", self.t_start_ps, true, "finite")?;
        check_range(
            "t_end_ps",
            self.t_end_ps,
            self.t_end_ps > self.t_start_ps,
            "(t_start_ps, inf)",
        )?;
        Ok(())
    }

    pub(crate) fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step_ps,
            ..StepControl::default()
        }
    }
}

/// Integrates the master equation over `cfg`'s window.
pub fn evolve(
    rho0: &DensityMatrix,
    drive: &impl RabiDrive,
    medium: &LambdaMedium,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    evolve_observed(rho0, drive, medium, cfg, |_, _| {})
}

/// [`evolve`], calling `observer` with the raw state after every accepted step.
pub fn evolve_observed(
    rho0: &DensityMatrix,
    drive: &impl RabiDrive,
    medium: &LambdaMedium,
    cfg: &IntegratorConfig,
    mut observer: impl FnMut(f64, &ComplexMatrix3),
) -> Result<DensityMatrix> {
    cfg.validate()?;
    let rhs = |t: f64, y: &[f64; 18]| {
        let (omega_p, omega_s) = drive.rabi_pair(t);
        let h = hamiltonian(omega_p, omega_s, medium);
        to_flat(&lindblad_rhs(&from_flat(y), &h, medium))
    };
    let (y, _) = dormand_prince(
        rhs,
        cfg.t_start_ps,
        cfg.t_end_ps,
        rho0.to_flat(),
        &cfg.step_control(),
        |t, y| observer(t, &from_flat(y)),
    )?;
    finalize(from_flat(&y), cfg.t_end_ps)
}

/// Re-symmetrizes and renormalizes within the trace drift budget.
fn finalize(m: ComplexMatrix3, t: f64) -> Result<DensityMatrix> {
    let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let trace = hermitian.trace().re;
    let drift = (trace - 1.0).abs();
    if drift > TRACE_TOL {
        return Err(IntegrationError::InvariantDrift { t, drift }.into());
    }
    Ok(DensityMatrix(hermitian / Complex64::new(trace, 0.0)))
}

/// Population left in `|1>` at lateral position `upsilon` after the pulse pair,
/// starting from `|1><1|`.
pub fn slap_point(
    upsilon: f64,
    drive: &BeamDrive,
    medium: &LambdaMedium,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let rho = evolve(
        &DensityMatrix::level(Level::One),
        &PointDrive::new(drive, upsilon),
        medium,
        cfg,
    )?;
    Ok(rho.population(Level::One).clamp(0.0, 1.0))
}
