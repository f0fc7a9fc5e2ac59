use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("z = {z} lies in the essential band [{lower}, {upper}]")]
    InsideEssentialSpectrum { z: f64, lower: f64, upper: f64 },

    #[error("quadrature did not converge after {refinements} refinements (last change {last_change:e})")]
    NonConvergence {
        refinements: u32,
        value: f64,
        last_change: f64,
    },

    #[error("denominator vanishes away from the singular point (|D| = {magnitude:e})")]
    DenominatorVanishesOutsideBall { magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("coupling function vanishes identically")]
    ZeroCoupling,

    #[error("shell-slope fit unstable (slope {slope}, residual {residual})")]
    FitUnstable { slope: f64, residual: f64 },

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("invalid coupling function: {0}")]
    InvalidCoupling(&'static str),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::FitUnstable { .. } | Error::DenominatorVanishesOutsideBall { .. }
        )
    }
}
