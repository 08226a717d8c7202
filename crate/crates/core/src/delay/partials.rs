//! Analytic partial derivatives of the survival probability and of the
//! restricted disutility.

use serde::Serialize;

use super::DelayPair;
use crate::error::Result;
use crate::model::{escape_ratio, survival_probability, GameParams};

/// `(∂/∂x, ∂/∂x̄)` of some function of a delay pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partials {
    pub dx: f64,
    pub dxbar: f64,
}

/// Partials of `p(x, x̄)`. On the diagonal `x = x̄` the one-sided limits
/// coincide and are returned.
///
/// For `x < x̄`, with `I = I(tf - x̄)` and `d = x̄ - x`:
/// `∂p/∂x = I (1 - I) e^{-I d} / (1 - I0)` and
/// `∂p/∂x̄ = I (1 - I)² d e^{-I d} / (1 - I0)`.
/// For `x ≥ x̄`, with `I = I(tf - x)`: `∂p/∂x = I (1 - I) / (1 - I0)`, `∂p/∂x̄ = 0`.
pub fn survival_partials(pair: DelayPair, params: &GameParams) -> Result<Partials> {
    // validates the pair and the i0 < 1 precondition
    survival_probability(pair.x, pair.xbar, params)?;
    let tf = params.tf();
    let i0 = params.i0();
    if pair.x < pair.xbar {
        let s = tf - pair.xbar;
        let infected = params.prevalence(s).value();
        let ratio = escape_ratio(s, i0);
        let d = pair.xbar - pair.x;
        let decay = (-infected * d).exp();
        Ok(Partials {
            dx: infected * ratio * decay,
            dxbar: infected * ratio * (1.0 - i0) * ratio * d * decay,
        })
    } else {
        let s = tf - pair.x;
        let infected = params.prevalence(s).value();
        Ok(Partials {
            dx: infected * escape_ratio(s, i0),
            dxbar: 0.0,
        })
    }
}

/// Partials of `D(x, x̄) = 1 - p(x, x̄)(1 - x/m)`.
pub fn disutility_partials(pair: DelayPair, params: &GameParams) -> Result<Partials> {
    pair.validate(params)?;
    let m = params.m();
    let keep = 1.0 - pair.x / m;
    if params.is_constant_risk() {
        let e = (pair.x - params.tf()).exp();
        return Ok(Partials {
            dx: e * (1.0 / m - keep),
            dxbar: 0.0,
        });
    }
    let p = survival_probability(pair.x, pair.xbar, params)?;
    let dp = survival_partials(pair, params)?;
    Ok(Partials {
        dx: -dp.dx * keep + p / m,
        dxbar: -dp.dxbar * keep,
    })
}
