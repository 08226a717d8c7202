//! The general game's equilibrium in decision-potential coordinates: the
//! initial potential solving the boundary-value problem, the switch time, and
//! the trajectory itself.

use si_distancing::delay::{emblematic_disutility, nash_equilibrium};
use si_distancing::filippov::{equilibrium_trajectory, monotonicity_suite};
use si_distancing::GameParams;

fn main() -> si_distancing::Result<()> {
    let params = GameParams::new(6.0, 0.02, 6.0)?;
    let traj = equilibrium_trajectory(&params)?;
    println!(
        "phase {:?}, Φ0 = {:.10e}, V(0) = {:.8}",
        traj.phase, traj.phi0, traj.v0
    );
    if let Some(tau) = traj.tau {
        println!(
            "switch at τ = {tau:.8}; distancing lasts tf - τ = {:.8}",
            traj.distancing_duration()
        );
    }
    let x_star = nash_equilibrium(&params).x_star;
    println!(
        "delay-game view: x* = {x_star:.8}, E(x*) = {:.8}, -V(0) = {:.8}",
        emblematic_disutility(x_star, &params)?,
        traj.disutility
    );

    println!("\n{:>6} {:>10} {:>12} {:>8}", "t", "I", "Φ", "c");
    for s in traj.sample(13) {
        println!(
            "{:>6.2} {:>10.6} {:>12.6e} {:>8.5}",
            s.t,
            s.i,
            s.phi,
            traj.control_at(s.t)
        );
    }
    println!("terminal |Φ - I| = {:.2e}", traj.terminal_residual());

    let suite = monotonicity_suite(&params, 1000)?;
    println!("\nuniqueness checks hold: {}", suite.holds(1e-6));
    Ok(())
}
