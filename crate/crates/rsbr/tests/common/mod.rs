//! Shared fixtures for the integration suites: the reference scenario used
//! throughout the docs plus a small family of mixed-model scenarios.
//!
//! Each test binary uses its own subset of these.
#![allow(dead_code)]

use rsbr::{BaselineHazard, IntensityModel, Scenario, ServiceTimeModel, StressDistribution};

/// The reference configuration: r0 ≡ 0.01, λ ≡ 2, W ~ Exponential(1),
/// H degenerate at 0.05, ν = 1.
pub fn s1() -> Scenario {
    Scenario {
        baseline: BaselineHazard::Constant { rate: 0.01 },
        intensity: IntensityModel::Constant { rate: 2.0 },
        service: ServiceTimeModel::Exponential { rate: 1.0 },
        stress: StressDistribution::degenerate(0.05).unwrap(),
        reboot_mean_nu: 1.0,
    }
}

/// Five scenarios mixing every model family: Weibull and piecewise
/// baselines, sinusoidal and piecewise-linear intensities, Weibull and
/// lognormal service, and multi-atom stress laws.
pub fn canonical_scenarios() -> Vec<(&'static str, Scenario)> {
    vec![
        ("constant/constant/exponential/degenerate", s1()),
        (
            "weibull-baseline/constant/exponential/2-atom",
            Scenario {
                baseline: BaselineHazard::Weibull {
                    shape: 1.5,
                    scale: 30.0,
                },
                intensity: IntensityModel::Constant { rate: 1.5 },
                service: ServiceTimeModel::Exponential { rate: 1.2 },
                stress: StressDistribution::new([(0.02, 0.5), (0.08, 0.5)]).unwrap(),
                reboot_mean_nu: 1.0,
            },
        ),
        (
            "constant/sinusoidal/weibull-service/degenerate",
            Scenario {
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
                stress: StressDistribution::degenerate(0.04).unwrap(),
                reboot_mean_nu: 1.0,
            },
        ),
        (
            "weibull-baseline/piecewise-linear/lognormal/3-atom",
            Scenario {
                baseline: BaselineHazard::Weibull {
                    shape: 0.8,
                    scale: 50.0,
                },
                intensity: IntensityModel::PiecewiseLinear {
                    knots: vec![(0.0, 1.0), (5.0, 3.0), (10.0, 1.0)],
                },
                service: ServiceTimeModel::Lognormal {
                    mu: -0.5,
                    sigma: 0.6,
                },
                stress: StressDistribution::new([(0.0, 0.2), (0.05, 0.5), (0.15, 0.3)]).unwrap(),
                reboot_mean_nu: 1.0,
            },
        ),
        (
            "piecewise-baseline/sinusoidal/lognormal/3-atom",
            Scenario {
                baseline: BaselineHazard::PiecewiseConstant {
                    breakpoints: vec![5.0, 15.0],
                    rates: vec![0.005, 0.02, 0.05],
                },
                intensity: IntensityModel::Sinusoidal {
                    base: 1.5,
                    amplitude: 1.5,
                    period: 8.0,
                },
                service: ServiceTimeModel::Lognormal {
                    mu: 0.0,
                    sigma: 0.5,
                },
                stress: StressDistribution::new([(0.01, 0.4), (0.05, 0.4), (0.2, 0.2)]).unwrap(),
                reboot_mean_nu: 1.0,
            },
        ),
    ]
}

/// A three-atom scenario whose cycles are short enough for large renewal
/// runs.
pub fn three_atom_efficiency_scenario() -> Scenario {
    Scenario {
        baseline: BaselineHazard::Constant { rate: 0.05 },
        intensity: IntensityModel::Constant { rate: 1.0 },
        service: ServiceTimeModel::Exponential { rate: 1.0 },
        stress: StressDistribution::new([(0.02, 0.5), (0.1, 0.3), (0.3, 0.2)]).unwrap(),
        reboot_mean_nu: 1.0,
    }
}

/// One pass/fail line per criterion, printed before the assertion fires so
/// failures still show up in the log.
pub fn report(criterion: &str, ok: bool) {
    println!(
        "acceptance {criterion}: {}",
        if ok { "PASS" } else { "FAIL" }
    );
}
