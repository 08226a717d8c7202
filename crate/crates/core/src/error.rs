use thiserror::Error;

use crate::delay::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The i0 = 1 game has no survival-probability closed form; use the constant-risk branch.
    #[error("initial prevalence is 1; use the constant-risk branch")]
    ConstantRisk,

    #[error("lambert W argument {0} is below -1/e")]
    LambertDomain(f64),

    #[error("operation requires an interior equilibrium, found {0:?}")]
    NotInterior(Regime),

    #[error("potential {phi0} is already above the switching level 1/m = {threshold}")]
    AlreadyLocked { phi0: f64, threshold: f64 },

    #[error(
        "free flow crosses the switching surface after {tau} (requested {dt}); split the step"
    )]
    SwitchCrossing { tau: f64, dt: f64 },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

pub(crate) fn check(
    cond: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
