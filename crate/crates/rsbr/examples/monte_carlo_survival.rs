//! Monte Carlo estimate of the survival function next to its closed form:
//! the estimate's 99% confidence interval should cover the closed form at
//! almost every grid point.
//!
//! Run with: `cargo run --example monte_carlo_survival`

use rsbr::sim::estimate_survival;
use rsbr::{
    BaselineHazard, ClosedForm, IntensityModel, RngPolicy, Scenario, ServiceTimeModel,
    StressDistribution,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario {
        baseline: BaselineHazard::Constant { rate: 0.02 },
        intensity: IntensityModel::Sinusoidal {
            base: 2.0,
            amplitude: 1.0,
            period: 5.0,
        },
        service: ServiceTimeModel::Weibull {
            shape: 2.0,
            scale: 0.8,
        },
        stress: StressDistribution::degenerate(0.04)?,
        reboot_mean_nu: 1.0,
    };

    let grid: Vec<f64> = (1..=20).map(|i| i as f64).collect();
    let closed = ClosedForm::new(&scenario).survival_curve(&grid)?;
    let empirical = estimate_survival(&scenario, &grid, 100_000, RngPolicy::new(42))?;

    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12} {:>7}",
        "t", "closed", "estimate", "ci_lo", "ci_hi", "inside"
    );
    let mut covered = 0;
    for (i, &t) in grid.iter().enumerate() {
        let (lo, hi) = empirical.ci_bounds(i);
        let inside = empirical.covers(i, closed.values[i]);
        covered += inside as usize;
        println!(
            "{:>5.1} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>7}",
            t, closed.values[i], empirical.estimates[i], lo, hi, inside
        );
    }
    println!("coverage: {covered}/{}", grid.len());
    Ok(())
}
