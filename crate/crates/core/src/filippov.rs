//! Necessary conditions of the general game in decision-potential coordinates.
//!
//! With shadow value `V` of susceptibility, the decision potential
//! `Φ = I (V + 1)` alone selects the equilibrium control: spend nothing while
//! `Φ < 1/m`, spend `1/m` once `Φ > 1/m`. Forward dynamics are
//!
//! ```text
//! I' = (1 - m c)^+ I (1 - I)
//! Φ' = (1 - m c)^+ Φ + c I
//! ```
//!
//! and a game of duration `tf` ends on the surface `Φ = I`. Both constant-control
//! flows integrate in closed form, so every trajectory here is exact. Since
//! `Φ' > 0`, the switching surface is crossed at most once, upward, and the
//! duration of the game is a strictly decreasing function of `Φ(0)`; inverting
//! that map yields the unique equilibrium for each `tf`.

use serde::Serialize;

use crate::error::{check, Error, Result};
use crate::model::{prevalence_at, GameParams};

/// Relative tolerance for landing on the switching surface after a free flow.
const SURFACE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialState {
    pub t: f64,
    pub i: f64,
    pub phi: f64,
}

impl PotentialState {
    pub fn new(t: f64, i: f64, phi: f64) -> Self {
        Self { t, i, phi }
    }
}

/// Admissible controls at a given potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ControlSet {
    /// `{0}`
    Off,
    /// `{1/m}`
    On,
    /// `[0, 1/m]` on the switching surface. The forward flow leaves it
    /// upward immediately, so it is crossed rather than followed.
    Sliding,
}

impl ControlSet {
    /// Control applied by the forward flow.
    pub fn forward_control(self, m: f64) -> f64 {
        match self {
            ControlSet::Off => 0.0,
            ControlSet::On | ControlSet::Sliding => 1.0 / m,
        }
    }
}

pub fn control_rule(phi: f64, m: f64) -> ControlSet {
    let threshold = 1.0 / m;
    if phi < threshold {
        ControlSet::Off
    } else if phi > threshold {
        ControlSet::On
    } else {
        ControlSet::Sliding
    }
}

/// Potential at `V`, and back.
pub fn shadow_value(state: &PotentialState) -> f64 {
    state.phi / state.i - 1.0
}

/// Exact flow with `c = 0`: `I` follows the logistic law and `Φ` grows as `e^t`.
pub fn flow_free(state: &PotentialState, dt: f64, m: f64) -> Result<PotentialState> {
    check(dt >= 0.0, "dt", dt, "must be non-negative")?;
    let phi = state.phi * dt.exp();
    let threshold = 1.0 / m;
    if phi > threshold * (1.0 + SURFACE_TOLERANCE) {
        let tau = (threshold / state.phi).ln().max(0.0);
        return Err(Error::SwitchCrossing { tau, dt });
    }
    Ok(PotentialState {
        t: state.t + dt,
        i: prevalence_at(dt, state.i).value(),
        phi,
    })
}

/// Exact flow with `c = 1/m`: `I` is frozen and `Φ` grows linearly at `I/m`.
pub fn flow_locked(state: &PotentialState, dt: f64, m: f64) -> Result<PotentialState> {
    check(dt >= 0.0, "dt", dt, "must be non-negative")?;
    Ok(PotentialState {
        t: state.t + dt,
        i: state.i,
        phi: state.phi + state.i / m * dt,
    })
}

/// Time `-ln(m Φ0)` for the free flow to reach the switching surface.
pub fn switch_time(phi0: f64, m: f64) -> Result<f64> {
    check(phi0 > 0.0, "phi0", phi0, "must be positive")?;
    let threshold = 1.0 / m;
    if phi0 > threshold {
        return Err(Error::AlreadyLocked { phi0, threshold });
    }
    Ok(-(m * phi0).ln())
}

/// Shape of the equilibrium control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// `c ≡ 0`.
    SinglePhaseFree,
    /// `c ≡ 1/m`.
    SinglePhaseLocked,
    /// `c = 0` until `τ`, then `1/m`.
    TwoPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminalTime {
    pub tf: f64,
    pub phase: Phase,
}

/// Duration of a free-only game: from `Φ0 = I0 / ((1 - I0) + I0 e^t)`,
/// `t = ln(1/Φ0 - (1 - I0)/I0)`.
pub fn free_phase_tf(phi0: f64, i0: f64) -> f64 {
    (1.0 / phi0 - (1.0 - i0) / i0).ln()
}

/// Duration of a locked-only game, `m (I0 - Φ0) / I0`.
pub fn locked_phase_tf(phi0: f64, m: f64, i0: f64) -> f64 {
    m * (i0 - phi0) / i0
}

/// Duration of a free-then-locked game,
/// `m - ln(m Φ0) - (m (1 - I0) Φ0 + I0) / I0`.
pub fn two_phase_tf(phi0: f64, m: f64, i0: f64) -> f64 {
    m - (m * phi0).ln() - (m * (1.0 - i0) * phi0 + i0) / i0
}

/// Game duration whose equilibrium starts at potential `phi0`, and the phase
/// structure of that equilibrium.
pub fn tf_of_phi0(phi0: f64, m: f64, i0: f64) -> Result<TerminalTime> {
    check(m > 0.0, "m", m, "must be positive")?;
    check(i0 > 0.0 && i0 <= 1.0, "i0", i0, "must lie in (0, 1]")?;
    check(
        phi0 > 0.0 && phi0 <= i0,
        "phi0",
        phi0,
        "must lie in (0, i0]",
    )?;
    if phi0 >= 1.0 / m {
        return Ok(TerminalTime {
            tf: locked_phase_tf(phi0, m, i0),
            phase: Phase::SinglePhaseLocked,
        });
    }
    let terminal = free_phase_tf(phi0, i0);
    let tau = -(m * phi0).ln();
    if terminal <= tau {
        Ok(TerminalTime {
            tf: terminal.max(0.0),
            phase: Phase::SinglePhaseFree,
        })
    } else {
        Ok(TerminalTime {
            tf: two_phase_tf(phi0, m, i0),
            phase: Phase::TwoPhase,
        })
    }
}

/// Game duration up to which no distancing happens, i.e. the free flow from
/// `Φ0 = I0`-side reaches the terminal surface before `I = 1/m`. `None` when
/// the locked phase is reachable from `t = 0` or never reachable.
fn free_duration_limit(m: f64, i0: f64) -> Option<f64> {
    if m <= 1.0 {
        return Some(f64::INFINITY);
    }
    if i0 * m >= 1.0 {
        return None;
    }
    Some(((1.0 - i0) / (i0 * (m - 1.0))).ln())
}

/// Initial potential of the unique equilibrium of a game of duration `tf`.
pub fn phi0_of_tf(tf: f64, m: f64, i0: f64) -> Result<f64> {
    Ok(solve_initial_potential(tf, m, i0)?.0)
}

fn solve_initial_potential(tf: f64, m: f64, i0: f64) -> Result<(f64, Phase)> {
    check(
        tf >= 0.0 && tf.is_finite(),
        "tf",
        tf,
        "must be finite and non-negative",
    )?;
    check(m > 0.0, "m", m, "must be positive")?;
    check(i0 > 0.0 && i0 <= 1.0, "i0", i0, "must lie in (0, 1]")?;
    if tf == 0.0 {
        let phase = if i0 * m >= 1.0 {
            Phase::SinglePhaseLocked
        } else {
            Phase::SinglePhaseFree
        };
        return Ok((i0, phase));
    }

    match free_duration_limit(m, i0) {
        Some(limit) if tf <= limit => {
            let phi0 = i0 / ((1.0 - i0) + i0 * tf.exp());
            return Ok((phi0, Phase::SinglePhaseFree));
        }
        None if tf <= m - 1.0 / i0 => {
            return Ok((i0 * (1.0 - tf / m), Phase::SinglePhaseLocked));
        }
        _ => {}
    }

    // bracket from the unbounded-duration argument: the free flow from
    // e^{-(tf+1)} min(I0, 1/m) cannot finish before tf + 1
    let mut lo = (-(tf + 1.0)).exp() * i0.min(1.0 / m);
    let mut hi = i0.min(1.0 / m);
    let duration = |phi: f64| tf_of_phi0(phi, m, i0).map(|t| t.tf);
    debug_assert!(duration(lo)? >= tf);

    // geometric halving until the bracket spans less than a factor of two,
    // then arithmetic bisection down to adjacent floats
    for _ in 0..4000 {
        let mid = if hi > 2.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if duration(mid)? > tf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi0 = if (duration(lo)? - tf).abs() <= (duration(hi)? - tf).abs() {
        lo
    } else {
        hi
    };
    Ok((phi0, tf_of_phi0(phi0, m, i0)?.phase))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: PotentialState,
    pub control: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumTrajectory {
    pub m: f64,
    pub segments: Vec<Segment>,
    pub phase: Phase,
    /// Switch time, for two-phase equilibria.
    pub tau: Option<f64>,
    pub tf: f64,
    pub phi0: f64,
    /// Shadow value at `t = 0`, `Φ0 / I0 - 1`.
    pub v0: f64,
    /// `-V(0)`, the equilibrium player's expected cost.
    pub disutility: f64,
}

impl EquilibriumTrajectory {
    pub fn terminal_state(&self) -> PotentialState {
        let last = self.segments.last().expect("at least one segment");
        self.advance(last, last.duration)
    }

    fn advance(&self, segment: &Segment, dt: f64) -> PotentialState {
        if segment.control > 0.0 {
            flow_locked(&segment.start, dt, self.m).expect("dt checked")
        } else {
            // the free segment ends on the surface; avoid rejecting the last
            // rounding step
            let s = &segment.start;
            PotentialState {
                t: s.t + dt,
                i: prevalence_at(dt, s.i).value(),
                phi: s.phi * dt.exp(),
            }
        }
    }

    /// State at time `t ∈ [0, tf]`.
    pub fn state_at(&self, t: f64) -> PotentialState {
        let t = t.clamp(0.0, self.tf);
        let segment = self
            .segments
            .iter()
            .rev()
            .find(|s| s.start.t <= t)
            .unwrap_or(&self.segments[0]);
        self.advance(segment, (t - segment.start.t).min(segment.duration))
    }

    /// Equilibrium spending rate at time `t`.
    pub fn control_at(&self, t: f64) -> f64 {
        match self.tau {
            Some(tau) if t < tau => 0.0,
            Some(_) => 1.0 / self.m,
            None => self.segments[0].control,
        }
    }

    /// Length of the final distancing phase, the delay-strategy view of the
    /// same equilibrium.
    pub fn distancing_duration(&self) -> f64 {
        match (self.phase, self.tau) {
            (Phase::TwoPhase, Some(tau)) => self.tf - tau,
            (Phase::SinglePhaseLocked, _) => self.tf,
            _ => 0.0,
        }
    }

    /// `n` equally spaced states including both ends.
    pub fn sample(&self, n: usize) -> Vec<PotentialState> {
        let n = n.max(2);
        (0..n)
            .map(|k| self.state_at(self.tf * k as f64 / (n - 1) as f64))
            .collect()
    }

    /// `|Φ(tf) - I(tf)|`.
    pub fn terminal_residual(&self) -> f64 {
        let end = self.terminal_state();
        (end.phi - end.i).abs()
    }
}

/// The unique equilibrium of the general game, assembled from exact flows.
pub fn equilibrium_trajectory(params: &GameParams) -> Result<EquilibriumTrajectory> {
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    let (phi0, phase) = solve_initial_potential(tf, m, i0)?;
    let start = PotentialState::new(0.0, i0, phi0);
    let (segments, tau) = match phase {
        Phase::SinglePhaseFree => (
            vec![Segment {
                start,
                control: 0.0,
                duration: tf,
            }],
            None,
        ),
        Phase::SinglePhaseLocked => (
            vec![Segment {
                start,
                control: 1.0 / m,
                duration: tf,
            }],
            None,
        ),
        Phase::TwoPhase => {
            let tau = switch_time(phi0, m)?.min(tf);
            let mut switch = flow_free(&start, tau, m)?;
            switch.phi = 1.0 / m;
            (
                vec![
                    Segment {
                        start,
                        control: 0.0,
                        duration: tau,
                    },
                    Segment {
                        start: switch,
                        control: 1.0 / m,
                        duration: tf - tau,
                    },
                ],
                Some(tau),
            )
        }
    };
    let v0 = phi0 / i0 - 1.0;
    Ok(EquilibriumTrajectory {
        m,
        segments,
        phase,
        tau,
        tf,
        phi0,
        v0,
        disutility: -v0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub grid_size: usize,
    /// Adjacent grid pairs where `min(t*, τ)` fails to strictly decrease in `Φ0`.
    pub free_switch_violations: usize,
    /// Same for the locked-only duration (zero when `i0 < 1/m`).
    pub locked_violations: usize,
    /// Same for the full duration map `tf(Φ0)`.
    pub duration_violations: usize,
    /// Max `|dtf/dτ - (1 + (1-I0)/I0 e^{-τ})|` against central differences.
    pub switch_derivative_error: f64,
    /// `|free - two-phase|` where the free flow meets both surfaces at once.
    pub free_two_phase_mismatch: Option<f64>,
    /// `|locked - two-phase|` at `Φ0 = 1/m`.
    pub locked_two_phase_mismatch: Option<f64>,
}

impl MonotonicityReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.free_switch_violations == 0
            && self.locked_violations == 0
            && self.duration_violations == 0
            && self.switch_derivative_error <= tolerance
            && self.free_two_phase_mismatch.is_none_or(|e| e <= tolerance)
            && self
                .locked_two_phase_mismatch
                .is_none_or(|e| e <= tolerance)
    }
}

fn strict_decrease_violations(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] >= w[0]).count()
}

/// Grid scan of the monotonicity facts behind uniqueness of the equilibrium.
pub fn monotonicity_suite(params: &GameParams, n: usize) -> Result<MonotonicityReport> {
    check(n >= 2, "n", n as f64, "need at least 2 points")?;
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    let threshold = 1.0 / m;
    let cap = i0.min(threshold);
    let lowest = (-(tf + 1.0)).exp() * cap;
    let log_grid = |lo: f64, hi: f64| -> Vec<f64> {
        (0..n)
            .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
            .collect()
    };

    // strictly below min(I0, 1/m)
    let below: Vec<f64> = log_grid(lowest, cap)
        .into_iter()
        .map(|p| p * (1.0 - 1e-9))
        .collect();
    let first_hit: Vec<f64> = below
        .iter()
        .map(|&p| {
            // terminal time from Φ0 = I0 / ((1 - I0) + I0 e^{t*})
            let terminal = ((i0 / p - (1.0 - i0)) / i0).ln();
            let tau = -(m * p).ln();
            terminal.min(tau)
        })
        .collect();
    let free_switch_violations = strict_decrease_violations(&first_hit);

    let locked_violations = if i0 > threshold {
        let locked: Vec<f64> = (0..n)
            .map(|k| threshold + (i0 - threshold) * k as f64 / (n - 1) as f64)
            .map(|p| locked_phase_tf(p, m, i0))
            .collect();
        strict_decrease_violations(&locked)
    } else {
        0
    };

    let durations = log_grid(lowest, i0)
        .into_iter()
        .map(|p| tf_of_phi0(p.min(i0), m, i0).map(|t| t.tf))
        .collect::<Result<Vec<_>>>()?;
    let duration_violations = strict_decrease_violations(&durations);

    // tf as a function of the switch time τ on the two-phase branch
    let two_phase_of_tau = |tau: f64| tau + m - ((1.0 - i0) * (-tau).exp() + i0) / i0;
    let h = 1e-5;
    let switch_derivative_error = (0..n)
        .map(|k| h + tf * k as f64 / (n - 1) as f64)
        .map(|tau| {
            let fd = (two_phase_of_tau(tau + h) - two_phase_of_tau(tau - h)) / (2.0 * h);
            let exact = 1.0 + (1.0 - i0) / i0 * (-tau).exp();
            (fd - exact).abs()
        })
        .fold(0.0, f64::max);

    let free_two_phase_mismatch =
        free_duration_limit(m, i0)
            .filter(|l| l.is_finite())
            .map(|limit| {
                let phi = (-limit).exp() / m;
                (free_phase_tf(phi, i0) - two_phase_tf(phi, m, i0)).abs()
            });
    let locked_two_phase_mismatch = (i0 >= threshold)
        .then(|| (locked_phase_tf(threshold, m, i0) - two_phase_tf(threshold, m, i0)).abs());

    Ok(MonotonicityReport {
        grid_size: n,
        free_switch_violations,
        locked_violations,
        duration_violations,
        switch_derivative_error,
        free_two_phase_mismatch,
        locked_two_phase_mismatch,
    })
}
