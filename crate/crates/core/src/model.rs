//! Nondimensional SI epidemic closed forms.
//!
//! Units are chosen so that the cost of infection, the transmission rate and the
//! population size are all 1. Prevalence then follows the logistic law
//! `I' = I (1 - I)` whenever the population does not distance.

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};

/// Parameters of one game: distancing efficiency `m`, initial prevalence `i0`
/// and game duration `tf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct GameParams {
    m: f64,
    i0: f64,
    tf: f64,
}

#[derive(Deserialize)]
struct RawParams {
    m: f64,
    i0: f64,
    tf: f64,
}

impl TryFrom<RawParams> for GameParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        GameParams::new(raw.m, raw.i0, raw.tf)
    }
}

impl GameParams {
    pub fn new(m: f64, i0: f64, tf: f64) -> Result<Self> {
        check(
            m.is_finite() && m > 0.0,
            "m",
            m,
            "must be finite and positive",
        )?;
        check(i0 > 0.0 && i0 <= 1.0, "i0", i0, "must lie in (0, 1]")?;
        check(
            tf.is_finite() && tf > 0.0,
            "tf",
            tf,
            "must be finite and positive",
        )?;
        Ok(Self { m, i0, tf })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn i0(&self) -> f64 {
        self.i0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    /// Same game with a different duration.
    pub fn with_tf(&self, tf: f64) -> Result<Self> {
        Self::new(self.m, self.i0, tf)
    }

    /// `i0 = 1`: infection risk is constant and independent of behaviour.
    pub fn is_constant_risk(&self) -> bool {
        self.i0 == 1.0
    }

    /// Prevalence after `u` time units of undistanced spread.
    pub fn prevalence(&self, u: f64) -> Prevalence {
        prevalence_at(u, self.i0)
    }

    pub(crate) fn check_duration(&self, name: &'static str, x: f64) -> Result<()> {
        check(
            (0.0..=self.tf).contains(&x),
            name,
            x,
            "duration must lie in [0, tf]",
        )
    }
}

/// Infected fraction of the population.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Prevalence(f64);

impl Prevalence {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Prevalence> for f64 {
    fn from(p: Prevalence) -> f64 {
        p.0
    }
}

/// Relative susceptibility `(1 - m c)^+` of an individual spending at rate `c`.
pub fn sigma(c: f64, m: f64) -> Result<f64> {
    check(c >= 0.0, "c", c, "spending rate must be non-negative")?;
    check(m > 0.0, "m", m, "must be positive")?;
    Ok((1.0 - m * c).max(0.0))
}

/// Logistic prevalence `I0 / (I0 + (1 - I0) e^{-u})`.
///
/// For negative `u` the exponential is folded into the numerator so that it
/// cannot overflow.
pub fn prevalence_at(u: f64, i0: f64) -> Prevalence {
    debug_assert!(i0 > 0.0 && i0 <= 1.0);
    if i0 == 1.0 {
        return Prevalence(1.0);
    }
    let value = if u >= 0.0 {
        i0 / (i0 + (1.0 - i0) * (-u).exp())
    } else {
        let a = i0 * u.exp();
        a / (a + (1.0 - i0))
    };
    Prevalence(value)
}

/// `(1 - I(u)) / (1 - I0)`, the probability of escaping infection for `u`
/// undistanced time units, evaluated without forming `1 - I(u)`.
pub fn escape_ratio(u: f64, i0: f64) -> f64 {
    if u >= 0.0 {
        let e = (-u).exp();
        e / (i0 + (1.0 - i0) * e)
    } else {
        1.0 / (i0 * u.exp() + (1.0 - i0))
    }
}

/// Survival probability `p(x, x̄)` of an individual who distances for the last
/// `x` time units while the population distances for the last `xbar`.
pub fn survival_probability(x: f64, xbar: f64, params: &GameParams) -> Result<f64> {
    params.check_duration("x", x)?;
    params.check_duration("xbar", xbar)?;
    if params.is_constant_risk() {
        return Err(Error::ConstantRisk);
    }
    let s = params.tf() - x.max(xbar);
    let i_s = params.prevalence(s).value();
    Ok(escape_ratio(s, params.i0()) * (-i_s * (xbar - x).max(0.0)).exp())
}
