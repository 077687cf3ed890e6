//! Closed-form survival curve of a stressed server, printed as CSV.
//!
//! Run with: `cargo run --example survival_curve`

use rsbr::io::write_curve_csv;
use rsbr::{
    BaselineHazard, ClosedForm, IntensityModel, Scenario, ServiceTimeModel, StressDistribution,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A server with a small constant baseline hazard, jobs arriving at rate
    // 2, exponential service, and every job adding 0.05 to the breakdown
    // rate while in flight.
    let scenario = Scenario {
        baseline: BaselineHazard::Constant { rate: 0.01 },
        intensity: IntensityModel::Constant { rate: 2.0 },
        service: ServiceTimeModel::Exponential { rate: 1.0 },
        stress: StressDistribution::degenerate(0.05)?,
        reboot_mean_nu: 1.0,
    };
    scenario.validate()?;

    let closed_form = ClosedForm::new(&scenario);
    let grid: Vec<f64> = (1..=20).map(|i| i as f64).collect();
    let curve = closed_form.survival_curve(&grid)?;
    write_curve_csv(&curve, std::io::stdout().lock())?;
    Ok(())
}
