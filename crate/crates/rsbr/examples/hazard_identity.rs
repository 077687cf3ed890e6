//! The hazard rate is the negative slope of the log survival curve; this
//! example prints both sides of that identity on a grid.
//!
//! Run with: `cargo run --example hazard_identity`

use rsbr::{
    BaselineHazard, ClosedForm, IntensityModel, Scenario, ServiceTimeModel, StressDistribution,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario {
        baseline: BaselineHazard::Weibull {
            shape: 1.5,
            scale: 30.0,
        },
        intensity: IntensityModel::Sinusoidal {
            base: 2.0,
            amplitude: 1.0,
            period: 5.0,
        },
        service: ServiceTimeModel::Exponential { rate: 1.2 },
        stress: StressDistribution::new([(0.02, 0.5), (0.08, 0.5)])?,
        reboot_mean_nu: 1.0,
    };
    let cf = ClosedForm::new(&scenario);

    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "t", "hazard", "-d lnS/dt", "rel diff"
    );
    let h = 1e-4;
    for i in 1..=15 {
        let t = i as f64;
        let hazard = cf.hazard(t)?;
        let fd = -((cf.survival(t + h)?.ln() - cf.survival(t - h)?.ln()) / (2.0 * h));
        println!(
            "{t:>6.1} {hazard:>14.8} {fd:>14.8} {:>10.2e}",
            (hazard - fd).abs() / hazard
        );
    }
    Ok(())
}
