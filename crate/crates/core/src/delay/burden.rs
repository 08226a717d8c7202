use serde::Serialize;

use super::{emblematic_disutility, nash_equilibrium};
use crate::error::{check, Result};
use crate::model::{escape_ratio, GameParams};

/// Per-capita burden at a population delay, next to the no-distancing burden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurdenReport {
    pub burden: f64,
    pub burden_indifferent: f64,
    pub improvement: f64,
}

/// Per-capita cost of infection plus prevention when everyone delays `xbar`:
/// `I(tf - x̄) + (x̄/m) (1 - I(tf - x̄))`.
pub fn burden(xbar: f64, params: &GameParams) -> Result<f64> {
    params.check_duration("xbar", xbar)?;
    let s = params.tf() - xbar;
    let infected = params.prevalence(s).value();
    let susceptible = if params.is_constant_risk() {
        0.0
    } else {
        (1.0 - params.i0()) * escape_ratio(s, params.i0())
    };
    Ok(infected + xbar / params.m() * susceptible)
}

/// The same burden assembled as `I0 + (1 - I0) E(x̄)`.
pub fn burden_from_emblematic(xbar: f64, params: &GameParams) -> Result<f64> {
    let i0 = params.i0();
    Ok(i0 + (1.0 - i0) * emblematic_disutility(xbar, params)?)
}

/// Burden reduction achieved by the equilibrium relative to nobody distancing.
pub fn improvement_over_indifference(params: &GameParams) -> Result<BurdenReport> {
    let x_star = nash_equilibrium(params).x_star;
    let at_equilibrium = burden(x_star, params)?;
    let indifferent = burden(0.0, params)?;
    Ok(BurdenReport {
        burden: at_equilibrium,
        burden_indifferent: indifferent,
        improvement: indifferent - at_equilibrium,
    })
}

/// Approximate game duration `ln((m-1)(1/i0-1))` at which the improvement
/// peaks.
pub fn peak_duration(m: f64, i0: f64) -> Result<f64> {
    check(m > 1.0, "m", m, "peak duration needs m > 1")?;
    check(i0 > 0.0 && i0 < 1.0, "i0", i0, "must lie in (0, 1)")?;
    Ok(((m - 1.0) * (1.0 / i0 - 1.0)).ln())
}

/// Small-`i0` approximation of `max_tf ΔB*`:
/// `1 - 2/m - 2 (m-1) ln(m-1) / m²`.
pub fn improvement_bound(m: f64) -> Result<f64> {
    check(m > 1.0, "m", m, "bound needs m > 1")?;
    Ok(1.0 - 2.0 / m - 2.0 * (m - 1.0) * (m - 1.0).ln() / (m * m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementPeak {
    pub tf: f64,
    pub improvement: f64,
}

/// Grid search of the improvement over game durations.
pub fn scan_improvement(
    m: f64,
    i0: f64,
    durations: impl IntoIterator<Item = f64>,
) -> Result<ImprovementPeak> {
    let mut best = ImprovementPeak {
        tf: f64::NAN,
        improvement: f64::NEG_INFINITY,
    };
    for tf in durations {
        let params = GameParams::new(m, i0, tf)?;
        let gain = improvement_over_indifference(&params)?.improvement;
        if gain > best.improvement {
            best = ImprovementPeak {
                tf,
                improvement: gain,
            };
        }
    }
    Ok(best)
}
