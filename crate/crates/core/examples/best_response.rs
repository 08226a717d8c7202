//! Brute-force best reply to the equilibrium population strategy, found by
//! searching piecewise-constant strategies with the ODE simulator.

use si_distancing::delay::nash_equilibrium;
use si_distancing::oracle::{
    best_response_search, default_step, nash_residual, simulate, PiecewiseStrategy,
};
use si_distancing::GameParams;

fn main() -> si_distancing::Result<()> {
    let params = GameParams::new(6.0, 0.02, 6.0)?;
    let x_star = nash_equilibrium(&params).x_star;
    let population = PiecewiseStrategy::delay(x_star, &params)?;
    println!(
        "population switches on at tf - x* = {:.6}",
        params.tf() - x_star
    );

    for (n, levels) in [(12, 2), (12, 5), (24, 2)] {
        let reply = best_response_search(&population, &params, n, levels)?;
        let cost = simulate(&reply, &population, &params, default_step(&params))?.disutility;
        let shape = match reply.off_then_on(1.0 / params.m(), params.tf()) {
            Some(t) => format!("off then on at t = {t:.4}"),
            None => format!("{:?}", reply.simplified().values()),
        };
        println!("n = {n:>2}, {levels} levels: {shape}, D = {cost:.8}");
    }

    let own = simulate(&population, &population, &params, default_step(&params))?.disutility;
    println!("equilibrium against itself: D = {own:.8}");
    for n in [6, 12, 24, 48] {
        println!(
            "lattice residual n = {n:>2}: {:.4e}",
            nash_residual(&params, n)?
        );
    }
    Ok(())
}
