//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use si_distancing::delay::{
    asymptotic_equilibrium, emblematic_disutility, ess_check, nash_equilibrium,
    nash_equilibrium_bisection, peak_duration, restricted_disutility, scan_improvement, Asymptote,
    DelayPair, Regime, DEFAULT_GRID,
};
use si_distancing::filippov::{equilibrium_trajectory, monotonicity_suite, phi0_of_tf, tf_of_phi0};
use si_distancing::model::survival_probability;
use si_distancing::oracle::{
    best_response_search, default_step, derivative_check, nash_residual, simulate,
    PiecewiseStrategy,
};
use si_distancing::GameParams;

use common::{baseline, interior_triples, random_triple, rng};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn equilibrium_golden() -> Outcome {
    let p = baseline();
    let eq = nash_equilibrium(&p);
    let reps = 10_000;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(nash_equilibrium(std::hint::black_box(&p)));
    }
    let per_call = start.elapsed() / reps;
    outcome(
        eq.regime == Regime::Interior
            && (eq.x_star - 2.87).abs() <= 0.01
            && per_call < Duration::from_millis(1),
        format!(
            "x* = {:.6} ({:?}), {per_call:?} per call",
            eq.x_star, eq.regime
        ),
    )
}

fn lambert_vs_bisection() -> Outcome {
    let triples = interior_triples(2, 1000);
    let start = Instant::now();
    let closed: Vec<f64> = triples.iter().map(|p| nash_equilibrium(p).x_star).collect();
    let elapsed = start.elapsed();
    let worst = triples
        .iter()
        .zip(&closed)
        .map(|(p, x)| (x - nash_equilibrium_bisection(p).unwrap().x_star).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("max |Δx*| = {worst:.3e} over 1000 triples, {elapsed:?}"),
    )
}

fn local_optimality() -> Outcome {
    let worst = interior_triples(2, 1000)
        .iter()
        .map(|p| {
            let x = nash_equilibrium(p).x_star;
            (p.prevalence(p.tf() - x).value() - 1.0 / (p.m() - x)).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("max |I(tf-x*) - 1/(m-x*)| = {worst:.3e}"),
    )
}

fn ess_suite() -> Outcome {
    let start = Instant::now();
    let mut min_nash = f64::INFINITY;
    let mut min_invasion = f64::INFINITY;
    let mut free_riding = 0;
    let mut uncovered = 0;
    for p in interior_triples(4, 100) {
        let r = ess_check(&p, DEFAULT_GRID).unwrap();
        if !r.covered {
            uncovered += 1;
        }
        min_nash = min_nash.min(r.nash_slack);
        min_invasion = min_invasion.min(r.invasion_slack.unwrap_or(f64::NEG_INFINITY));
        if !r.no_free_riding() {
            free_riding += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        min_nash > 0.0
            && min_invasion > 0.0
            && free_riding == 0
            && uncovered == 0
            && elapsed < Duration::from_secs(30),
        format!(
            "min slacks {min_nash:.3e} / {min_invasion:.3e}, {free_riding} free-riding, {elapsed:?}"
        ),
    )
}

fn oracle_agreement() -> Outcome {
    let mut r = rng(5);
    let (mut worst_d, mut worst_p) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let p = random_triple(&mut r);
        let x = r.random_range(0.0..=p.tf());
        let xbar = r.random_range(0.0..=p.tf());
        let c = PiecewiseStrategy::delay(x, &p).unwrap();
        let cbar = PiecewiseStrategy::delay(xbar, &p).unwrap();
        let sim = simulate(&c, &cbar, &p, default_step(&p)).unwrap();
        let pair = DelayPair::new(x, xbar);
        worst_d = worst_d.max((sim.disutility - restricted_disutility(pair, &p).unwrap()).abs());
        let survival = survival_probability(x, xbar, &p).unwrap();
        worst_p = worst_p.max((sim.p_path.last().unwrap() - survival).abs());
    }
    outcome(
        worst_d <= 1e-6 && worst_p <= 1e-8,
        format!("max |ΔD| = {worst_d:.3e}, max |Δp| = {worst_p:.3e} over 200 pairs"),
    )
}

fn filippov_bijection() -> Outcome {
    let mut r = rng(6);
    let (mut round_trip, mut violations, mut boundary) = (0.0f64, 0usize, 0.0f64);
    for _ in 0..500 {
        let p = random_triple(&mut r);
        let phi0 = phi0_of_tf(p.tf(), p.m(), p.i0()).unwrap();
        let back = tf_of_phi0(phi0, p.m(), p.i0()).unwrap().tf;
        round_trip = round_trip.max((back - p.tf()).abs());
        let suite = monotonicity_suite(&p, 1000).unwrap();
        violations += suite.duration_violations;
        boundary = boundary
            .max(suite.free_two_phase_mismatch.unwrap_or(0.0))
            .max(suite.locked_two_phase_mismatch.unwrap_or(0.0));
    }
    outcome(
        round_trip <= 1e-9 && violations == 0 && boundary <= 1e-10,
        format!(
            "max round-trip {round_trip:.3e}, {violations} monotonicity violations, max boundary gap {boundary:.3e}"
        ),
    )
}

fn cross_representation() -> Outcome {
    let (mut worst_e, mut worst_x) = (0.0f64, 0.0f64);
    for p in interior_triples(7, 100) {
        let x = nash_equilibrium(&p).x_star;
        let t = equilibrium_trajectory(&p).unwrap();
        worst_e = worst_e.max((t.disutility - emblematic_disutility(x, &p).unwrap()).abs());
        let tau = t.tau.unwrap_or(0.0);
        worst_x = worst_x.max((p.tf() - tau - x).abs());
    }
    outcome(
        worst_e <= 1e-6 && worst_x <= 1e-6,
        format!("max |1-Φ0/I0 - E(x*)| = {worst_e:.3e}, max |tf-τ-x*| = {worst_x:.3e}"),
    )
}

fn bang_bang_switch() -> Outcome {
    let p = baseline();
    let start = Instant::now();
    let x = nash_equilibrium(&p).x_star;
    let eq = PiecewiseStrategy::delay(x, &p).unwrap();
    let reply = best_response_search(&eq, &p, 12, 2).unwrap();
    let cell = p.tf() / 12.0;
    let switch = reply.off_then_on(1.0 / p.m(), p.tf());
    let elapsed = start.elapsed();
    let passed = switch.is_some_and(|s| (s - (p.tf() - x)).abs() <= cell)
        && elapsed < Duration::from_secs(60);
    outcome(
        passed,
        format!(
            "12-cell reply switches at {switch:?}, tf - x* = {:.6}, {elapsed:?}",
            p.tf() - x
        ),
    )
}

fn residual_halving() -> Outcome {
    let p = baseline();
    let start = Instant::now();
    let coarse = nash_residual(&p, 12).unwrap();
    let fine = nash_residual(&p, 24).unwrap();
    let elapsed = start.elapsed();
    let ratio = fine.abs() / coarse.abs();
    outcome(
        (0.3..=0.8).contains(&ratio) && elapsed < Duration::from_secs(60),
        format!(
            "residual n=12 {coarse:.4e}, n=24 {fine:.4e}, ratio {ratio:.3} (band [0.3, 0.8]), {elapsed:?}"
        ),
    )
}

fn derivatives() -> Outcome {
    let p = baseline();
    let mut r = rng(9);
    let (mut worst, mut single_factor_misses, mut below_diagonal) = (0.0f64, 0, 0);
    for k in 0..100 {
        let x = r.random_range(0.05..=p.tf() - 0.05);
        let pair = if k % 5 == 0 {
            DelayPair::symmetric(x)
        } else {
            DelayPair::new(x, r.random_range(0.05..=p.tf() - 0.05))
        };
        let report = derivative_check(pair, &p).unwrap();
        worst = worst.max(report.max_error);
        if let Some(e) = report.single_factor_error {
            below_diagonal += 1;
            if e > 1e-6 {
                single_factor_misses += 1;
            }
        }
    }
    outcome(
        worst <= 1e-6,
        format!(
            "max error {worst:.3e} over 100 points (20 diagonal); single-(1-I) form of ∂p/∂x̄ off by > 1e-6 at {single_factor_misses}/{below_diagonal} points with x < x̄"
        ),
    )
}

fn asymptotics() -> Outcome {
    let p = GameParams::new(6.0, 0.02, 30.0).unwrap();
    let gap = (asymptotic_equilibrium(&p, Asymptote::LongGame).unwrap()
        - nash_equilibrium(&p).x_star)
        .abs();
    let mut worst: f64 = 0.0;
    for i0 in [1e-2, 1e-3, 1e-4] {
        let grid = (0..6000).map(|k| 0.01 + 30.0 * k as f64 / 5999.0);
        let peak = scan_improvement(6.0, i0, grid).unwrap();
        let predicted = peak_duration(6.0, i0).unwrap();
        worst = worst.max((peak.tf - predicted).abs() / predicted);
    }
    outcome(
        gap <= 1e-3 && worst <= 0.25,
        format!("long-game |Δx*| = {gap:.3e}, worst relative peak offset {worst:.3}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 equilibrium golden value", equilibrium_golden),
        ("2 Lambert W vs bisection", lambert_vs_bisection),
        ("3 local-optimality identity", local_optimality),
        ("4 ESS grid suite", ess_suite),
        ("5 closed forms vs ODE oracle", oracle_agreement),
        ("6 decision-potential bijection", filippov_bijection),
        ("7 cross-representation", cross_representation),
        ("8a best reply is off-then-on", bang_bang_switch),
        ("8b residual halves on refinement", residual_halving),
        ("9 survival partials vs differences", derivatives),
        ("10 asymptotics", asymptotics),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {name}: {} ({})",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
