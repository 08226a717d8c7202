//! Principal branch of the Lambert W function on the real line.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 64;
const STEP_TOLERANCE: f64 = 1e-15;

/// Real principal branch `W0(z)`, the solution `w >= -1` of `w e^w = z`.
///
/// Starts from a branch-point series, a Taylor series near zero or the
/// `ln z - ln ln z` asymptote, then refines with Halley's method.
pub fn lambert_w0(z: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if z.is_nan() || z < branch {
        return Err(Error::LambertDomain(z));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == branch {
        return Ok(-1.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(z);
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= STEP_TOLERANCE * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// `W0(e^ln_z)` for arguments whose exponential may overflow.
pub fn lambert_w0_of_exp(ln_z: f64) -> Result<f64> {
    if ln_z < 700.0 {
        return lambert_w0(ln_z.exp());
    }
    // w + ln w = ln_z, Newton from the asymptote
    let mut w = ln_z - ln_z.ln();
    for _ in 0..MAX_ITERATIONS {
        let step = (w + w.ln() - ln_z) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= STEP_TOLERANCE * w {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.25 {
        // expansion about the branch point z = -1/e
        let p = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z.abs() <= 0.5 {
        z * (1.0 - z * (1.0 - 1.5 * z))
    } else if z <= E {
        // Winitzki's uniform approximation
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}
