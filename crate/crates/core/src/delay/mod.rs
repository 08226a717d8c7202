//! The restricted game in which every strategy is a delay strategy: spend
//! nothing until `tf - x`, then distance perfectly (spend `1/m`) for the final
//! `x` time units.
//!
//! Every quantity here is a closed form in `(x, x̄)`; the [`crate::oracle`]
//! module reproduces them by brute-force integration.

mod burden;
mod ess;
mod partials;

pub use burden::{
    burden, burden_from_emblematic, improvement_bound, improvement_over_indifference,
    peak_duration, scan_improvement, BurdenReport, ImprovementPeak,
};
pub use ess::{ess_check, minimizer_check, EssReport, MinimizerReport, DEFAULT_GRID};
pub use partials::{disutility_partials, survival_partials, Partials};

use serde::Serialize;

use crate::error::{check, Error, Result};
use crate::lambert::lambert_w0_of_exp;
use crate::model::{escape_ratio, survival_probability, GameParams};

/// Individual (`x`) and population (`xbar`) distancing durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayPair {
    pub x: f64,
    pub xbar: f64,
}

impl DelayPair {
    pub fn new(x: f64, xbar: f64) -> Self {
        Self { x, xbar }
    }

    /// Both players use the same delay.
    pub fn symmetric(x: f64) -> Self {
        Self { x, xbar: x }
    }

    pub fn validate(&self, params: &GameParams) -> Result<()> {
        params.check_duration("x", self.x)?;
        params.check_duration("xbar", self.xbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// No distancing (`x* = 0`).
    Never,
    /// Distancing for part of the game.
    Interior,
    /// Distancing for the whole game (`x* = tf`).
    Always,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Never => "Never",
            Regime::Interior => "Interior",
            Regime::Always => "Always",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub x_star: f64,
    pub regime: Regime,
    /// `e^x - e^tf (I0/(1-I0)) (m-1-x)` at `x_star`; only for interior
    /// equilibria of games with `i0 < 1`.
    pub residual: Option<f64>,
}

/// Which asymptotic expansion of `x*` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Asymptote {
    /// `tf → ∞`.
    LongGame,
    /// Brief distancing with `i0 < 1/m`.
    ShortGame,
}

/// Expected cost `D(x, x̄)` of delay `x` against population delay `x̄`.
pub fn restricted_disutility(pair: DelayPair, params: &GameParams) -> Result<f64> {
    pair.validate(params)?;
    let keep = 1.0 - pair.x / params.m();
    if params.is_constant_risk() {
        return Ok(1.0 - (pair.x - params.tf()).exp() * keep);
    }
    Ok(1.0 - survival_probability(pair.x, pair.xbar, params)? * keep)
}

/// `E(x̄) = D(x̄, x̄)`, the cost to a typical individual when everyone uses `x̄`.
pub fn emblematic_disutility(xbar: f64, params: &GameParams) -> Result<f64> {
    if params.is_constant_risk() {
        return restricted_disutility(DelayPair::symmetric(xbar), params);
    }
    params.check_duration("xbar", xbar)?;
    let i0 = params.i0();
    let denom = 1.0 - i0 + i0 * (params.tf() - xbar).exp();
    Ok(1.0 - (1.0 - xbar / params.m()) / denom)
}

/// `D(x, x̄) / E(x̄)`.
pub fn relative_disutility(pair: DelayPair, params: &GameParams) -> Result<f64> {
    Ok(restricted_disutility(pair, params)? / emblematic_disutility(pair.xbar, params)?)
}

/// `D(a) - D(b)`, evaluated as a log-ratio of the complements `1 - D` so that
/// nearly equal pairs do not lose their difference to rounding.
pub fn disutility_gap(a: DelayPair, b: DelayPair, params: &GameParams) -> Result<f64> {
    let da = restricted_disutility(a, params)?;
    let db = restricted_disutility(b, params)?;
    let m = params.m();
    if a.x >= m || b.x >= m {
        return Ok(da - db);
    }
    let complement_b = 1.0 - db;
    if complement_b <= 0.0 {
        return Ok(da - db);
    }

    let log_cost = ((b.x - a.x) / (m - b.x)).ln_1p();
    let log_escape = if params.is_constant_risk() {
        a.x - b.x
    } else {
        let tf = params.tf();
        let i0 = params.i0();
        let s_a = tf - a.x.max(a.xbar);
        let s_b = tf - b.x.max(b.xbar);
        let infected_b = params.prevalence(s_b).value();
        let susceptible_b = (1.0 - i0) * escape_ratio(s_b, i0);
        let shift = (susceptible_b * (s_b - s_a).exp_m1()).ln_1p();
        let exposure = params.prevalence(s_a).value() * (a.xbar - a.x).max(0.0)
            - infected_b * (b.xbar - b.x).max(0.0);
        (s_b - s_a) - shift - exposure
    };
    Ok(-complement_b * (log_escape + log_cost).exp_m1())
}

/// Symmetric equilibrium of the delay game, with its regime.
pub fn nash_equilibrium(params: &GameParams) -> EquilibriumResult {
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    if params.is_constant_risk() {
        let x_star = tf.min((m - 1.0).max(0.0));
        return EquilibriumResult {
            x_star,
            regime: classify_value(x_star, tf),
            residual: None,
        };
    }
    if m <= 1.0 {
        return never();
    }
    match regime_of(params) {
        Regime::Never => never(),
        Regime::Always => EquilibriumResult {
            x_star: tf,
            regime: Regime::Always,
            residual: None,
        },
        Regime::Interior => {
            // W((1/I0 - 1) e^{m-1-tf}), argument kept in log form
            let ln_z = ((1.0 - i0) / i0).ln() + (m - 1.0 - tf);
            let w = lambert_w0_of_exp(ln_z).expect("argument is positive");
            let x_star = (m - 1.0 - w).clamp(0.0, tf);
            EquilibriumResult {
                x_star,
                regime: Regime::Interior,
                residual: Some(transcendental_residual(x_star, params)),
            }
        }
    }
}

/// Regime of the equilibrium from the two threshold tests. Exact ties count as
/// interior.
pub fn regime_of(params: &GameParams) -> Regime {
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    if params.is_constant_risk() {
        return classify_value(tf.min((m - 1.0).max(0.0)), tf);
    }
    if m <= 1.0 || i0 * (1.0 + (m - 1.0) * tf.exp()) < 1.0 {
        Regime::Never
    } else if i0 * (m - tf) > 1.0 {
        Regime::Always
    } else {
        Regime::Interior
    }
}

fn classify_value(x: f64, tf: f64) -> Regime {
    if x <= 0.0 {
        Regime::Never
    } else if x >= tf {
        Regime::Always
    } else {
        Regime::Interior
    }
}

fn never() -> EquilibriumResult {
    EquilibriumResult {
        x_star: 0.0,
        regime: Regime::Never,
        residual: None,
    }
}

fn transcendental_residual(x: f64, params: &GameParams) -> f64 {
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    x.exp() - tf.exp() * (i0 / (1.0 - i0)) * (m - 1.0 - x)
}

/// Interior equilibrium by bracketing bisection on the transcendental
/// condition, independent of the Lambert W route.
pub fn nash_equilibrium_bisection(params: &GameParams) -> Result<EquilibriumResult> {
    let regime = regime_of(params);
    if regime != Regime::Interior {
        return Err(Error::NotInterior(regime));
    }
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    // (1 - I0) e^{x - tf} - I0 (m - 1 - x): same sign as e^x - e^tf I0/(1-I0) (m-1-x)
    // and finite at i0 = 1
    let g = |x: f64| (1.0 - i0) * (x - tf).exp() - i0 * (m - 1.0 - x);
    let (mut lo, mut hi) = (0.0, tf.min(m - 1.0));
    if g(lo) >= 0.0 {
        hi = lo;
    } else if g(hi) <= 0.0 {
        lo = hi;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let x_star = 0.5 * (lo + hi);
    Ok(EquilibriumResult {
        x_star,
        regime,
        residual: (!params.is_constant_risk()).then(|| transcendental_residual(x_star, params)),
    })
}

/// Long- and short-game approximations of `x*`.
pub fn asymptotic_equilibrium(params: &GameParams, which: Asymptote) -> Result<f64> {
    let (m, i0, tf) = (params.m(), params.i0(), params.tf());
    check(m > 1.0, "m", m, "asymptotic forms need m > 1")?;
    match which {
        Asymptote::LongGame => Ok(m - 1.0 - (1.0 / i0 - 1.0) * (m - 1.0 - tf).exp()),
        Asymptote::ShortGame => {
            check(i0 < 1.0, "i0", i0, "short-game form needs i0 < 1")?;
            let bracket = tf - (1.0 / i0 - 1.0).ln() + (m - 1.0).ln();
            Ok((1.0 - 1.0 / m) * bracket.max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> GameParams {
        GameParams::new(6.0, 0.02, 6.0).unwrap()
    }

    /// RK4 on (I, p, D) for two delay strategies; independent of every closed form.
    fn integrate_delay(x: f64, xbar: f64, params: &GameParams, steps: usize) -> (f64, f64) {
        let (m, tf) = (params.m(), params.tf());
        let mut knots = [0.0, tf - x, tf - xbar, tf];
        knots.sort_by(f64::total_cmp);
        let mut s = [params.i0(), 1.0, 0.0];
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            let c = if mid >= tf - x { 1.0 / m } else { 0.0 };
            let cbar = if mid >= tf - xbar { 1.0 / m } else { 0.0 };
            let sig = (1.0 - m * c).max(0.0);
            let sigbar = (1.0 - m * cbar).max(0.0);
            let f = |st: [f64; 3]| {
                [
                    sigbar * st[0] * (1.0 - st[0]),
                    -sig * st[0] * st[1],
                    (c + sig * st[0]) * st[1],
                ]
            };
            let h = (b - a) / steps as f64;
            for _ in 0..steps {
                let k1 = f(s);
                let k2 = f(add(s, k1, 0.5 * h));
                let k3 = f(add(s, k2, 0.5 * h));
                let k4 = f(add(s, k3, h));
                for j in 0..3 {
                    s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
            }
        }
        (s[1], s[2])
    }

    fn add(s: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
        [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]]
    }

    #[test]
    fn constant_risk_disutility() {
        let p = GameParams::new(6.0, 1.0, 3.0).unwrap();
        for xbar in [0.0, 1.0, 3.0] {
            let d = restricted_disutility(DelayPair::new(0.0, xbar), &p).unwrap();
            assert!((d - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn full_distancing_costs_duration_over_m() {
        let p = GameParams::new(6.0, 0.02, 3.0).unwrap();
        let d = restricted_disutility(DelayPair::symmetric(3.0), &p).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disutility_matches_rk4_oracle() {
        let p = baseline();
        let (surv, cost) = integrate_delay(1.0, 2.0, &p, 4000);
        let d = restricted_disutility(DelayPair::new(1.0, 2.0), &p).unwrap();
        let s = survival_probability(1.0, 2.0, &p).unwrap();
        assert!((d - cost).abs() <= 1e-6, "{d} vs {cost}");
        assert!((s - surv).abs() <= 1e-8, "{s} vs {surv}");
    }

    #[test]
    fn emblematic_matches_diagonal() {
        let p = baseline();
        for k in 0..=60 {
            let x = 0.1 * k as f64;
            let e = emblematic_disutility(x, &p).unwrap();
            let d = restricted_disutility(DelayPair::symmetric(x), &p).unwrap();
            assert!((e - d).abs() <= 1e-12);
        }
    }

    #[test]
    fn emblematic_at_equilibrium_cases() {
        let p = baseline();
        let tf_case = emblematic_disutility(6.0, &p).unwrap();
        assert!((tf_case - 1.0).abs() < 1e-15);
        let zero_case = emblematic_disutility(0.0, &p).unwrap();
        let expected = 1.0 - (1.0 - p.prevalence(6.0).value()) / (1.0 - 0.02);
        assert!((zero_case - expected).abs() < 1e-14);
        let x = nash_equilibrium(&p).x_star;
        let interior = emblematic_disutility(x, &p).unwrap();
        let closed = (1.0 + x - 6.0 * 0.02) / (6.0 * (1.0 - 0.02));
        assert!((interior - closed).abs() < 1e-12);
    }

    #[test]
    fn relative_disutility_examples() {
        let p = baseline();
        let x = nash_equilibrium(&p).x_star;
        assert!((relative_disutility(DelayPair::symmetric(2.0), &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_disutility(DelayPair::symmetric(x), &p).unwrap() - 1.0).abs() < 1e-15);
        for k in 0..=600 {
            let y = 0.01 * k as f64;
            assert!(relative_disutility(DelayPair::new(y, x), &p).unwrap() >= 1.0 - 1e-15);
        }
        assert!(relative_disutility(DelayPair::new(0.0, x), &p).unwrap() > 1.0);
    }

    #[test]
    fn baseline_equilibrium() {
        let r = nash_equilibrium(&baseline());
        assert_eq!(r.regime, Regime::Interior);
        assert!((r.x_star - 2.87).abs() <= 0.01);
        let scale = 6f64.exp() * 0.02 / 0.98;
        assert!(r.residual.unwrap().abs() <= 1e-9 * scale);
        let local = baseline().prevalence(6.0 - r.x_star).value() - 1.0 / (6.0 - r.x_star);
        assert!(local.abs() <= 1e-9);
    }

    #[test]
    fn regime_examples() {
        let r = nash_equilibrium(&GameParams::new(6.0, 1.0, 10.0).unwrap());
        assert_eq!((r.x_star, r.regime), (5.0, Regime::Interior));
        let r = nash_equilibrium(&GameParams::new(6.0, 0.5, 2.0).unwrap());
        assert_eq!((r.x_star, r.regime), (2.0, Regime::Always));
        let r = nash_equilibrium(&GameParams::new(0.5, 0.1, 5.0).unwrap());
        assert_eq!((r.x_star, r.regime), (0.0, Regime::Never));
        let r = nash_equilibrium(&GameParams::new(0.5, 1.0, 5.0).unwrap());
        assert_eq!((r.x_star, r.regime), (0.0, Regime::Never));
        let r = nash_equilibrium(&GameParams::new(10.0, 1.0, 4.0).unwrap());
        assert_eq!((r.x_star, r.regime), (4.0, Regime::Always));
    }

    #[test]
    fn bisection_agrees_with_lambert() {
        let p = baseline();
        let w = nash_equilibrium(&p);
        let b = nash_equilibrium_bisection(&p).unwrap();
        assert!((w.x_star - b.x_star).abs() <= 1e-9);
        let never = GameParams::new(0.5, 0.1, 5.0).unwrap();
        assert_eq!(
            nash_equilibrium_bisection(&never),
            Err(Error::NotInterior(Regime::Never))
        );
        let constant = GameParams::new(6.0, 1.0, 10.0).unwrap();
        assert!((nash_equilibrium_bisection(&constant).unwrap().x_star - 5.0).abs() < 1e-12);
    }

    #[test]
    fn regime_boundaries_are_continuous() {
        let (m, tf) = (6.0_f64, 6.0_f64);
        let i0 = 1.0 / (1.0 + (m - 1.0) * tf.exp());
        let p = GameParams::new(m, i0, tf).unwrap();
        let r = nash_equilibrium(&p);
        assert!(r.x_star.abs() < 1e-9, "{r:?}");
        if r.regime == Regime::Interior {
            assert!(nash_equilibrium_bisection(&p).unwrap().x_star.abs() < 1e-9);
        }

        let tf = 2.0;
        let p = GameParams::new(m, 1.0 / (m - tf), tf).unwrap();
        let r = nash_equilibrium(&p);
        assert!((r.x_star - tf).abs() < 1e-9, "{r:?}");
        if r.regime == Regime::Interior {
            assert!((nash_equilibrium_bisection(&p).unwrap().x_star - tf).abs() < 1e-9);
        }
    }

    #[test]
    fn asymptotics() {
        let long = GameParams::new(6.0, 0.02, 30.0).unwrap();
        let approx = asymptotic_equilibrium(&long, Asymptote::LongGame).unwrap();
        assert!((approx - nash_equilibrium(&long).x_star).abs() <= 1e-3);
        let huge = GameParams::new(6.0, 0.02, 200.0).unwrap();
        assert!((asymptotic_equilibrium(&huge, Asymptote::LongGame).unwrap() - 5.0).abs() < 1e-12);

        let (m, i0) = (6.0_f64, 0.02_f64);
        let tf0 = ((1.0 / i0 - 1.0) / (m - 1.0)).ln();
        let short = GameParams::new(m, i0, tf0).unwrap();
        assert!(
            asymptotic_equilibrium(&short, Asymptote::ShortGame)
                .unwrap()
                .abs()
                < 1e-12
        );
        let low_m = GameParams::new(1.0, 0.02, 3.0).unwrap();
        assert!(asymptotic_equilibrium(&low_m, Asymptote::LongGame).is_err());
    }

    #[test]
    fn gap_matches_direct_difference() {
        let p = baseline();
        let pairs = [
            (DelayPair::new(1.0, 2.87), DelayPair::symmetric(2.87)),
            (DelayPair::new(4.0, 2.87), DelayPair::symmetric(2.87)),
            (DelayPair::symmetric(1.0), DelayPair::new(2.87, 1.0)),
            (DelayPair::symmetric(5.5), DelayPair::new(2.87, 5.5)),
            (DelayPair::new(0.3, 5.0), DelayPair::new(4.0, 1.0)),
        ];
        for (a, b) in pairs {
            let direct =
                restricted_disutility(a, &p).unwrap() - restricted_disutility(b, &p).unwrap();
            let gap = disutility_gap(a, b, &p).unwrap();
            assert!((gap - direct).abs() <= 1e-14, "{a:?} {b:?} {gap} {direct}");
        }
        let c = GameParams::new(6.0, 1.0, 8.0).unwrap();
        let (a, b) = (DelayPair::new(2.0, 1.0), DelayPair::new(5.0, 3.0));
        let direct = restricted_disutility(a, &c).unwrap() - restricted_disutility(b, &c).unwrap();
        assert!((disutility_gap(a, b, &c).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn gap_resolves_quadratic_slack_near_equilibrium() {
        let p = baseline();
        let x = nash_equilibrium(&p).x_star;
        for k in 1..8 {
            let d = 10f64.powi(-k);
            let below =
                disutility_gap(DelayPair::new(x - d, x), DelayPair::symmetric(x), &p).unwrap();
            let above =
                disutility_gap(DelayPair::new(x + d, x), DelayPair::symmetric(x), &p).unwrap();
            assert!(below > 0.0 && above > 0.0, "d={d} {below} {above}");
        }
    }

    #[test]
    fn out_of_range_durations_rejected() {
        let p = baseline();
        assert!(restricted_disutility(DelayPair::new(-0.1, 1.0), &p).is_err());
        assert!(emblematic_disutility(6.5, &p).is_err());
    }
}
