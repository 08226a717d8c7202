//! Grid check that the equilibrium is evolutionarily stable and that the
//! population optimum coincides with it.

use si_distancing::delay::{ess_check, minimizer_check, DEFAULT_GRID};
use si_distancing::GameParams;

fn main() -> si_distancing::Result<()> {
    for (m, i0, tf) in [(6.0, 0.02, 6.0), (20.0, 1e-4, 25.0), (3.0, 0.3, 1.5)] {
        let params = GameParams::new(m, i0, tf)?;
        let r = ess_check(&params, DEFAULT_GRID)?;
        println!(
            "m = {m}, i0 = {i0}, tf = {tf}: x* = {:.6} ({:?})",
            r.x_star, r.regime
        );
        println!(
            "  best-reply slack  {:.3e} (closest at y = {:.4})",
            r.nash_slack, r.nash_slack_at
        );
        match r.invasion_slack {
            Some(s) => println!("  invasion slack    {s:.3e}"),
            None => println!("  invasion slack    not checked at a boundary equilibrium"),
        }
        println!(
            "  argmin E          {:.4}  (no free riding: {})",
            r.emblematic_argmin,
            r.no_free_riding()
        );
        if let Ok(mc) = minimizer_check(&params, DEFAULT_GRID) {
            println!(
                "  auxiliary minimisers hold: {} (curvatures {:.3e}, {:.3e})",
                mc.holds(),
                mc.exponential_curvature,
                mc.susceptible_curvature
            );
        }
        println!("  stable: {}", r.holds());
    }
    Ok(())
}
