//! How much the equilibrium reduces the per-capita burden relative to nobody
//! distancing, as a function of game duration.

use si_distancing::delay::{
    improvement_bound, improvement_over_indifference, peak_duration, scan_improvement,
};
use si_distancing::GameParams;

fn main() -> si_distancing::Result<()> {
    let (m, i0) = (6.0, 1e-3);
    println!("m = {m}, i0 = {i0}");
    println!("{:>6} {:>10} {:>10} {:>10}", "tf", "B(x*)", "B(0)", "ΔB*");
    for tf in [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0] {
        let r = improvement_over_indifference(&GameParams::new(m, i0, tf)?)?;
        println!(
            "{tf:>6.1} {:>10.6} {:>10.6} {:>10.6}",
            r.burden, r.burden_indifferent, r.improvement
        );
    }

    let grid = (0..3000).map(|k| 0.01 + 30.0 * k as f64 / 2999.0);
    let peak = scan_improvement(m, i0, grid)?;
    println!(
        "\npeak ΔB* = {:.6} at tf = {:.3}; predicted location ln((m-1)(1/i0-1)) = {:.3}",
        peak.improvement,
        peak.tf,
        peak_duration(m, i0)?
    );
    println!(
        "small-i0 approximation of the peak: {:.6}",
        improvement_bound(m)?
    );
    Ok(())
}
