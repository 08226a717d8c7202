//! Symmetric equilibrium of the delay game across regimes, with the Lambert W
//! closed form checked against plain bisection.

use si_distancing::delay::{
    asymptotic_equilibrium, nash_equilibrium, nash_equilibrium_bisection, Asymptote, Regime,
};
use si_distancing::GameParams;

fn main() -> si_distancing::Result<()> {
    let cases = [
        (6.0, 0.02, 6.0),
        (6.0, 0.02, 1.0),
        (6.0, 0.5, 2.0),
        (0.8, 0.1, 10.0),
        (6.0, 0.02, 30.0),
        (6.0, 1.0, 8.0),
    ];
    println!(
        "{:>6} {:>6} {:>6} {:>9} {:>12} {:>10}",
        "m", "i0", "tf", "regime", "x*", "bisect"
    );
    for (m, i0, tf) in cases {
        let params = GameParams::new(m, i0, tf)?;
        let eq = nash_equilibrium(&params);
        let check = match eq.regime {
            Regime::Interior if !params.is_constant_risk() => {
                format!(
                    "{:.3e}",
                    (nash_equilibrium_bisection(&params)?.x_star - eq.x_star).abs()
                )
            }
            _ => "-".into(),
        };
        println!(
            "{m:>6} {i0:>6} {tf:>6} {:>9} {:>12.8} {check:>10}",
            eq.regime.as_str(),
            eq.x_star
        );
    }

    let long = GameParams::new(6.0, 0.02, 30.0)?;
    println!(
        "\nlong game: x* = {:.10}, asymptote m - 1 - (1/i0 - 1) e^(m-1-tf) = {:.10}",
        nash_equilibrium(&long).x_star,
        asymptotic_equilibrium(&long, Asymptote::LongGame)?
    );
    Ok(())
}
