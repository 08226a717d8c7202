//! Brute-force verification of the closed forms.
//!
//! [`simulate`] integrates the individual's survival probability and running
//! cost under arbitrary piecewise-constant strategies with fixed-step RK4.
//! [`best_response_search`] searches a discretised strategy space for the
//! cheapest reply to a population strategy without using any structure of the
//! equilibrium beyond the fact that the individual's equations are linear in
//! the survival probability `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delay::{nash_equilibrium, survival_partials, DelayPair};
use crate::error::{check, Error, Result};
use crate::model::{survival_probability, GameParams};

/// Steps across the whole game used by [`default_step`].
pub const DEFAULT_STEPS: usize = 2048;

/// Largest lattice searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 4096;

const RESTARTS: usize = 5;
const RESTART_SEED: u64 = 0x5eed_d15c;

/// Piecewise-constant spending rate on `[0, tf]`.
///
/// `values[k]` applies on `[breakpoints[k-1], breakpoints[k])`, so there is
/// one more value than breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseStrategy {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseStrategy {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidStrategy(format!(
                "{} values for {} breakpoints",
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidStrategy(
                "breakpoints must be finite and non-negative".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStrategy(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidStrategy(
                "values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![c])
    }

    /// Delay strategy: nothing until `tf - x`, then `1/m`.
    pub fn delay(x: f64, params: &GameParams) -> Result<Self> {
        params.check_duration("x", x)?;
        let on = 1.0 / params.m();
        let tf = params.tf();
        if x == 0.0 {
            Self::constant(0.0)
        } else if x == tf {
            Self::constant(on)
        } else {
            Self::new(vec![tf - x], vec![0.0, on])
        }
    }

    /// One value per cell of a uniform grid over `[0, tf]`.
    pub fn uniform(values: Vec<f64>, tf: f64) -> Result<Self> {
        check(tf > 0.0, "tf", tf, "must be positive")?;
        if values.is_empty() {
            return Err(Error::InvalidStrategy("no values".into()));
        }
        let n = values.len();
        let breakpoints = (1..n).map(|k| tf * k as f64 / n as f64).collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|b| *b <= t)]
    }

    /// Checks that the strategy fits on `[0, tf]`.
    pub fn validate(&self, tf: f64) -> Result<()> {
        match self.breakpoints.last() {
            Some(&last) if last > tf => Err(Error::InvalidStrategy(format!(
                "breakpoint {last} beyond tf = {tf}"
            ))),
            _ => Ok(()),
        }
    }

    /// Same function with equal neighbouring pieces merged.
    pub fn simplified(&self) -> Self {
        let mut breakpoints = Vec::new();
        let mut values = vec![self.values[0]];
        for (b, v) in self.breakpoints.iter().zip(&self.values[1..]) {
            if *v != *values.last().unwrap() {
                breakpoints.push(*b);
                values.push(*v);
            }
        }
        Self {
            breakpoints,
            values,
        }
    }

    /// Switch time when the strategy is `0` and then `on` (each possibly
    /// empty). `Some(tf)` means it never switches on, `Some(0)` always on.
    pub fn off_then_on(&self, on: f64, tf: f64) -> Option<f64> {
        let s = self.simplified();
        match s.values.as_slice() {
            [v] if *v == 0.0 => Some(tf),
            [v] if *v == on => Some(0.0),
            [a, b] if *a == 0.0 && *b == on => Some(s.breakpoints[0]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    /// `∫ [c + (1 - m c)^+ I] p dt` over the whole game.
    pub disutility: f64,
    pub times: Vec<f64>,
    pub p_path: Vec<f64>,
    pub i_path: Vec<f64>,
    pub step: f64,
}

/// State `(I, p, J)`: prevalence, survival probability, accrued cost.
type State = [f64; 3];

struct Paths<'a> {
    times: &'a mut Vec<f64>,
    p: &'a mut Vec<f64>,
    i: &'a mut Vec<f64>,
}

/// RK4 over `[t0, t1]`, restarting at every breakpoint of either strategy.
fn integrate(
    c: &PiecewiseStrategy,
    cbar: &PiecewiseStrategy,
    m: f64,
    (t0, t1): (f64, f64),
    mut y: State,
    step: f64,
    mut paths: Option<Paths<'_>>,
) -> State {
    let mut knots: Vec<f64> = c
        .breakpoints
        .iter()
        .chain(&cbar.breakpoints)
        .copied()
        .filter(|&b| b > t0 && b < t1)
        .collect();
    knots.push(t0);
    knots.push(t1);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    for span in knots.windows(2) {
        let (a, b) = (span[0], span[1]);
        let mid = 0.5 * (a + b);
        let spend = c.value_at(mid);
        let own = (1.0 - m * spend).max(0.0);
        let population = (1.0 - m * cbar.value_at(mid)).max(0.0);
        let f = |y: &State| -> State {
            let (i, p) = (y[0], y[1]);
            [
                population * i * (1.0 - i),
                -own * i * p,
                (spend + own * i) * p,
            ]
        };
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let k1 = f(&y);
            let k2 = f(&std::array::from_fn(|j| y[j] + 0.5 * h * k1[j]));
            let k3 = f(&std::array::from_fn(|j| y[j] + 0.5 * h * k2[j]));
            let k4 = f(&std::array::from_fn(|j| y[j] + h * k3[j]));
            for j in 0..3 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            if let Some(paths) = paths.as_mut() {
                let t = if k + 1 == n {
                    b
                } else {
                    a + h * (k + 1) as f64
                };
                paths.times.push(t);
                paths.p.push(y[1]);
                paths.i.push(y[0]);
            }
        }
    }
    y
}

pub fn default_step(params: &GameParams) -> f64 {
    params.tf() / DEFAULT_STEPS as f64
}

/// Disutility of an individual playing `c` against population strategy `cbar`.
pub fn simulate(
    c: &PiecewiseStrategy,
    cbar: &PiecewiseStrategy,
    params: &GameParams,
    step: f64,
) -> Result<SimulationResult> {
    check(
        step > 0.0 && step.is_finite(),
        "step",
        step,
        "must be positive",
    )?;
    let tf = params.tf();
    c.validate(tf)?;
    cbar.validate(tf)?;
    let i0 = params.i0();
    let (mut times, mut p_path, mut i_path) = (vec![0.0], vec![1.0], vec![i0]);
    let end = integrate(
        c,
        cbar,
        params.m(),
        (0.0, tf),
        [i0, 1.0, 0.0],
        step,
        Some(Paths {
            times: &mut times,
            p: &mut p_path,
            i: &mut i_path,
        }),
    );
    Ok(SimulationResult {
        disutility: end[2],
        times,
        p_path,
        i_path,
        step,
    })
}

/// Per-cell effect of each candidate level: with `p = 1` entering cell `k`,
/// `escape[k][l]` is `p` leaving it and `cost[k][l]` the cost accrued inside.
struct CellTable {
    escape: Vec<Vec<f64>>,
    cost: Vec<Vec<f64>>,
}

impl CellTable {
    fn build(cbar: &PiecewiseStrategy, params: &GameParams, n: usize, ladder: &[f64]) -> Self {
        let tf = params.tf();
        let m = params.m();
        let step = default_step(params);
        let idle = PiecewiseStrategy::constant(0.0).expect("valid");
        let edge = |k: usize| if k == n { tf } else { tf * k as f64 / n as f64 };
        let mut escape = Vec::with_capacity(n);
        let mut cost = Vec::with_capacity(n);
        let mut i = params.i0();
        for k in 0..n {
            let span = (edge(k), edge(k + 1));
            let mut row_escape = Vec::with_capacity(ladder.len());
            let mut row_cost = Vec::with_capacity(ladder.len());
            for &level in ladder {
                let c = PiecewiseStrategy::constant(level).expect("valid level");
                let y = integrate(&c, cbar, m, span, [i, 1.0, 0.0], step, None);
                row_escape.push(y[1]);
                row_cost.push(y[2]);
            }
            escape.push(row_escape);
            cost.push(row_cost);
            i = integrate(&idle, cbar, m, span, [i, 1.0, 0.0], step, None)[0];
        }
        Self { escape, cost }
    }

    fn total(&self, choice: &[usize]) -> f64 {
        let mut p = 1.0;
        let mut total = 0.0;
        for (k, &l) in choice.iter().enumerate() {
            total += p * self.cost[k][l];
            p *= self.escape[k][l];
        }
        total
    }
}

fn coordinate_descent(table: &CellTable, levels: usize, choice: &mut [usize]) -> f64 {
    let mut best = table.total(choice);
    loop {
        let mut improved = false;
        for k in 0..choice.len() {
            let mut keep = choice[k];
            for l in 0..levels {
                choice[k] = l;
                let value = table.total(choice);
                if value < best {
                    best = value;
                    keep = l;
                    improved = true;
                }
            }
            choice[k] = keep;
        }
        if !improved {
            return best;
        }
    }
}

/// Cheapest reply to `cbar` among strategies constant on each of
/// `n_intervals` equal cells, with values from the ladder
/// `{0, 1/(m (levels-1)), ..., 1/m}`.
///
/// The `{0, 1/m}` lattice is searched exhaustively when it has at most
/// [`EXHAUSTIVE_LIMIT`] members; otherwise, and for richer ladders, coordinate
/// descent from several seeded random starts refines the result.
pub fn best_response_search(
    cbar: &PiecewiseStrategy,
    params: &GameParams,
    n_intervals: usize,
    levels: usize,
) -> Result<PiecewiseStrategy> {
    check(
        n_intervals >= 2,
        "n_intervals",
        n_intervals as f64,
        "need at least 2",
    )?;
    check(levels >= 2, "levels", levels as f64, "need at least 2")?;
    cbar.validate(params.tf())?;
    let on = 1.0 / params.m();
    let ladder: Vec<f64> = (0..levels)
        .map(|l| {
            if l + 1 == levels {
                on
            } else {
                on * l as f64 / (levels - 1) as f64
            }
        })
        .collect();
    let table = CellTable::build(cbar, params, n_intervals, &ladder);
    let top = levels - 1;

    let mut best_choice = vec![0; n_intervals];
    let mut best = table.total(&best_choice);
    let exhaustive =
        n_intervals < usize::BITS as usize && (1usize << n_intervals) <= EXHAUSTIVE_LIMIT;
    if exhaustive {
        let mut choice = vec![0; n_intervals];
        for mask in 0usize..(1 << n_intervals) {
            for (k, slot) in choice.iter_mut().enumerate() {
                *slot = if mask >> k & 1 == 1 { top } else { 0 };
            }
            let value = table.total(&choice);
            if value < best {
                best = value;
                best_choice.copy_from_slice(&choice);
            }
        }
    }

    if !exhaustive || levels > 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
        let mut starts = vec![
            best_choice.clone(),
            vec![0; n_intervals],
            vec![top; n_intervals],
        ];
        for _ in 0..RESTARTS {
            starts.push(
                (0..n_intervals)
                    .map(|_| rng.random_range(0..levels))
                    .collect(),
            );
        }
        for mut start in starts {
            let value = coordinate_descent(&table, levels, &mut start);
            if value < best {
                best = value;
                best_choice = start;
            }
        }
    }

    PiecewiseStrategy::uniform(
        best_choice.into_iter().map(|l| ladder[l]).collect(),
        params.tf(),
    )
}

/// `D(BR(c*), c*) - D(c*, c*)` for the delay equilibrium `c*`, with the best
/// reply searched on an `n_intervals` `{0, 1/m}` lattice.
///
/// Non-negative up to integration error whenever `c*` is a true best reply,
/// since the lattice is a subset of all strategies.
pub fn nash_residual(params: &GameParams, n_intervals: usize) -> Result<f64> {
    let x_star = nash_equilibrium(params).x_star;
    let equilibrium = PiecewiseStrategy::delay(x_star, params)?;
    let reply = best_response_search(&equilibrium, params, n_intervals, 2)?.simplified();
    let step = default_step(params);
    let reply_cost = simulate(&reply, &equilibrium, params, step)?.disutility;
    let own_cost = simulate(&equilibrium, &equilibrium, params, step)?.disutility;
    Ok(reply_cost - own_cost)
}

/// Finite-difference step used by [`derivative_check`].
pub const DERIVATIVE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeReport {
    /// Largest disagreement between the analytic partials of `p(x, x̄)` and
    /// finite differences (central off the diagonal, one-sided on it).
    pub max_error: f64,
    /// Disagreement of `I (1 - I) d e^{-I d} / (1 - I0)`, a form of `∂p/∂x̄`
    /// missing one factor `1 - I`, with the central difference (`x < x̄` only).
    pub single_factor_error: Option<f64>,
}

pub fn derivative_check(pair: DelayPair, params: &GameParams) -> Result<DerivativeReport> {
    let h = DERIVATIVE_STEP;
    let tf = params.tf();
    check(
        pair.x >= h && pair.x <= tf - h,
        "x",
        pair.x,
        "must be at least one step inside (0, tf)",
    )?;
    check(
        pair.xbar >= h && pair.xbar <= tf - h,
        "xbar",
        pair.xbar,
        "must be at least one step inside (0, tf)",
    )?;
    let p = |x: f64, xbar: f64| survival_probability(x, xbar, params);
    let analytic = survival_partials(pair, params)?;
    let (x, xbar) = (pair.x, pair.xbar);

    if x == xbar {
        let centre = p(x, x)?;
        let left = (centre - p(x - h, x)?) / h;
        let right = (p(x + h, x)? - centre) / h;
        let below = (centre - p(x, x - h)?) / h;
        let above = (p(x, x + h)? - centre) / h;
        let max_error = [
            (analytic.dx - left).abs(),
            (analytic.dx - right).abs(),
            (analytic.dxbar - below).abs(),
            (analytic.dxbar - above).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        return Ok(DerivativeReport {
            max_error,
            single_factor_error: None,
        });
    }

    let fx = (p(x + h, xbar)? - p(x - h, xbar)?) / (2.0 * h);
    let fxbar = (p(x, xbar + h)? - p(x, xbar - h)?) / (2.0 * h);
    let max_error = (analytic.dx - fx).abs().max((analytic.dxbar - fxbar).abs());
    let single_factor_error = (x < xbar).then(|| {
        let infected = params.prevalence(tf - xbar).value();
        let d = xbar - x;
        let value = infected * (1.0 - infected) * d * (-infected * d).exp() / (1.0 - params.i0());
        (value - fxbar).abs()
    });
    Ok(DerivativeReport {
        max_error,
        single_factor_error,
    })
}
