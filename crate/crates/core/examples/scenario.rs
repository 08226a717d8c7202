//! A dimensional outbreak (10,000 people, 20 cases, doubling weekly, $1000
//! per infection, up to $10/week on distancing) over a range of vaccine waits.

use si_distancing::cli::{nondimensionalize, ScenarioConfig};
use si_distancing::delay::{improvement_over_indifference, nash_equilibrium};

fn main() -> si_distancing::Result<()> {
    let base = ScenarioConfig {
        population: 10_000.0,
        initial_cases: 20.0,
        doubling_time: 1.0,
        infection_cost: 1000.0,
        max_weekly_spend: 10.0,
        vaccine_wait: 52.0,
    };
    let params = nondimensionalize(&base)?;
    println!(
        "i0 = {}, m = {:.4}, one time unit = {:.4} weeks",
        params.i0(),
        params.m(),
        base.time_unit()
    );

    println!(
        "\n{:>6} {:>9} {:>16} {:>12} {:>12}",
        "weeks", "regime", "distance (wks)", "cost ($)", "saved ($)"
    );
    for weeks in [4.0, 8.0, 13.0, 26.0, 52.0, 78.0, 104.0, 156.0] {
        let scenario = ScenarioConfig {
            vaccine_wait: weeks,
            ..base
        };
        let p = nondimensionalize(&scenario)?;
        let eq = nash_equilibrium(&p);
        let burden = improvement_over_indifference(&p)?;
        println!(
            "{weeks:>6} {:>9} {:>16.2} {:>12.2} {:>12.2}",
            eq.regime.as_str(),
            eq.x_star * scenario.time_unit(),
            burden.burden * base.infection_cost,
            burden.improvement * base.infection_cost
        );
    }
    Ok(())
}
