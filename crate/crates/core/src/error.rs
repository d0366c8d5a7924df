use thiserror::Error;

use crate::ode::IntegrationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its valid range {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("dark state is undefined when both Rabi frequencies vanish")]
    UndefinedDarkState,
    #[error("adiabaticity parameter k = {k} must lie in (0, 1)")]
    AdiabaticityRegime { k: f64 },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("integration failed at x = {x_nm} nm: {source}")]
    ScanPoint {
        x_nm: f64,
        #[source]
        source: IntegrationError,
    },
    #[error("profile has no half-maximum crossing on one side of its peak")]
    NoPeak,
    #[error("profile is identically zero")]
    ZeroProfile,
    #[error("invalid spatial grid: {0}")]
    Grid(String),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
