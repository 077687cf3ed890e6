//! Renewal-reward estimate of the efficiency against its closed form: the
//! server runs boot-to-failure cycles and the estimator is the ratio of
//! completed jobs to elapsed time (including reboots).
//!
//! Run with: `cargo run --example renewal_efficiency`

use rsbr::sim::estimate_efficiency;
use rsbr::{
    BaselineHazard, ClosedForm, IntensityModel, RngPolicy, Scenario, ServiceTimeModel,
    StressDistribution,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario {
        baseline: BaselineHazard::Constant { rate: 0.01 },
        intensity: IntensityModel::Constant { rate: 2.0 },
        service: ServiceTimeModel::Exponential { rate: 1.0 },
        stress: StressDistribution::degenerate(0.05)?,
        reboot_mean_nu: 1.0,
    };

    let report = ClosedForm::new(&scenario).efficiency()?;
    let estimate = estimate_efficiency(&scenario, 100_000, RngPolicy::new(42))?;
    let (lo, hi) = estimate.ci(3.0);

    println!("closed form : psi = {:.6}", report.psi);
    println!(
        "simulation  : psi = {:.6} (3-sigma CI [{lo:.6}, {hi:.6}], {} cycles)",
        estimate.psi_hat, estimate.n_cycles
    );
    println!(
        "cycle length: E[Y] = {:.4} closed vs {:.4} simulated",
        report.mean_cycle_length, estimate.mean_cycle_length
    );
    println!(
        "jobs/cycle  : E[M] = {:.4} closed vs {:.4} simulated",
        report.expected_jobs_per_cycle, estimate.mean_completed_jobs
    );
    println!(
        "closed form inside simulated CI: {}",
        report.psi >= lo && report.psi <= hi
    );
    Ok(())
}
