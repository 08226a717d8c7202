//! Individual disutility D(x, x̄) around the equilibrium, the relative
//! disutility D/E and the emblematic cost E(x̄) along the diagonal.

use si_distancing::delay::{
    emblematic_disutility, nash_equilibrium, relative_disutility, restricted_disutility, DelayPair,
};
use si_distancing::GameParams;

fn main() -> si_distancing::Result<()> {
    let params = GameParams::new(6.0, 0.02, 6.0)?;
    let x_star = nash_equilibrium(&params).x_star;
    println!("x* = {x_star:.6}");

    println!("\nD(x, x*) against x* (minimum at x = x*):");
    for k in 0..=12 {
        let x = 0.5 * k as f64;
        let d = restricted_disutility(DelayPair::new(x, x_star), &params)?;
        let rel = relative_disutility(DelayPair::new(x, x_star), &params)?;
        println!("  x = {x:>4.1}  D = {d:.6}  D/E = {rel:.6}");
    }

    println!("\nE(x̄) along the diagonal (also minimised at x*):");
    for k in 0..=6 {
        let xbar = k as f64;
        println!(
            "  x̄ = {xbar:.1}  E = {:.6}",
            emblematic_disutility(xbar, &params)?
        );
    }
    println!(
        "  x̄ = x*   E = {:.6}",
        emblematic_disutility(x_star, &params)?
    );
    Ok(())
}
