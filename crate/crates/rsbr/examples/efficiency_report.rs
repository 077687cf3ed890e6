//! Long-run efficiency of the server (completed jobs per unit time across
//! failure/reboot cycles), closed form, as the JSON result envelope.
//!
//! Run with: `cargo run --example efficiency_report`

use rsbr::io::EfficiencyEnvelope;
use rsbr::{
    BaselineHazard, ClosedForm, IntensityModel, Scenario, ServiceTimeModel, StressDistribution,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario {
        baseline: BaselineHazard::Constant { rate: 0.05 },
        intensity: IntensityModel::Constant { rate: 1.0 },
        service: ServiceTimeModel::Exponential { rate: 1.0 },
        stress: StressDistribution::new([(0.02, 0.5), (0.1, 0.3), (0.3, 0.2)])?,
        reboot_mean_nu: 1.0,
    };

    let report = ClosedForm::new(&scenario).efficiency()?;
    println!("mean cycle length E[Y]  = {:.6}", report.mean_cycle_length);
    println!(
        "jobs per cycle    E[M]  = {:.6}",
        report.expected_jobs_per_cycle
    );
    println!("mean reboot time  nu    = {:.6}", report.reboot_mean_nu);
    println!("efficiency        psi   = {:.6}", report.psi);
    println!();
    println!(
        "{}",
        serde_json::to_string_pretty(&EfficiencyEnvelope::from_report(&report))?
    );
    Ok(())
}
