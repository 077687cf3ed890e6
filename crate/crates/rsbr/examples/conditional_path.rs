//! Working with one fixed workload path: the integrated breakdown rate,
//! path-conditional survival and failure density, and failure times sampled
//! by inverting the cumulative — all of which must agree with each other.
//!
//! Run with: `cargo run --example conditional_path`

use rsbr::sim::{integrated_breakdown, sample_failure_time, Arrival};
use rsbr::{
    BaselineHazard, ClosedForm, IntensityModel, RngPolicy, Scenario, ServiceTimeModel,
    StressDistribution, WorkloadPath,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario {
        baseline: BaselineHazard::Constant { rate: 0.01 },
        intensity: IntensityModel::Constant { rate: 2.0 },
        service: ServiceTimeModel::Exponential { rate: 1.0 },
        stress: StressDistribution::degenerate(0.5)?,
        reboot_mean_nu: 1.0,
    };
    // Two jobs: one completes at t = 5, one is still running at the horizon.
    let path = WorkloadPath::new(
        vec![
            Arrival {
                time: 2.0,
                service: 3.0,
                stress: 0.5,
            },
            Arrival {
                time: 8.0,
                service: 5.0,
                stress: 0.5,
            },
        ],
        12.0,
    )?;

    let cf = ClosedForm::new(&scenario);
    println!(
        "{:>5} {:>14} {:>14} {:>14}",
        "t", "cum breakdown", "cond survival", "cond density"
    );
    for t in [1.0, 3.0, 5.0, 9.0, 12.0] {
        let lambda = integrated_breakdown(&scenario, &path, t)?;
        let survival = cf.conditional_survival_given_path(&path, t)?;
        let density = cf.conditional_failure_density(&path, t)?;
        println!("{t:>5.1} {lambda:>14.6} {survival:>14.6} {density:>14.6}");
        assert!(((-lambda).exp() - survival).abs() < 1e-12);
    }

    // Sampled failure times reproduce the conditional survival.
    let policy = RngPolicy::new(7);
    let n = 200_000u64;
    let t_check = 5.0;
    let mut survived = 0u64;
    for replica in 0..n {
        let mut rng = policy.stream_for(replica);
        if sample_failure_time(&scenario, &path, &mut rng)?.survives_past(t_check) {
            survived += 1;
        }
    }
    println!(
        "\nP(Y > {t_check}) = {:.6} closed form vs {:.6} over {n} sampled failure times",
        cf.conditional_survival_given_path(&path, t_check)?,
        survived as f64 / n as f64
    );
    Ok(())
}
