//! Monte Carlo engine for the stochastic process itself: NHPP arrivals by
//! thinning, i.i.d. service times and stresses, path-conditional failure
//! times by inversion of the integrated breakdown rate, renewal cycles, and
//! the conditional arrival-time check.
//!
//! # Reproducibility
//!
//! Every replica (or cycle, or conditioning attempt) draws from its own
//! counter-based stream derived from [`RngPolicy`], so results are
//! bit-identical for a fixed master seed regardless of how many threads run
//! the replicas. Aggregations are either exact integer counts or performed
//! in replica-index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{standard_exponential, IntensityModel, ModelError, Scenario};
use crate::stats::{ks_p_value, ks_statistic, Z_99};

/// Chunk length used by the thinning sampler's per-window majorant.
const THINNING_WINDOW: f64 = 4.0;
/// Horizon extension step used when realizing a renewal cycle.
const RENEWAL_WINDOW: f64 = 16.0;
/// Default safety cap on the realized length of one renewal cycle.
pub const DEFAULT_CYCLE_CAP: f64 = 1e6;
/// Bisection tolerance (absolute, in time units) for failure-time inversion.
const INVERSION_TOL: f64 = 1e-12;

/// One job: arrival time, service duration, and the stress it adds to the
/// breakdown rate while in flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub time: f64,
    pub service: f64,
    pub stress: f64,
}

/// One realized workload trajectory on `[0, horizon]`, sorted by arrival time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadPath {
    pub arrivals: Vec<Arrival>,
    pub horizon: f64,
}

impl WorkloadPath {
    pub fn new(arrivals: Vec<Arrival>, horizon: f64) -> Result<Self, PathError> {
        let path = Self { arrivals, horizon };
        path.validate()?;
        Ok(path)
    }

    pub fn empty(horizon: f64) -> Self {
        Self {
            arrivals: Vec::new(),
            horizon,
        }
    }

    pub fn validate(&self) -> Result<(), PathError> {
        if !self.horizon.is_finite() || self.horizon < 0.0 {
            return Err(PathError::BadHorizon {
                horizon: self.horizon,
            });
        }
        let mut previous = 0.0;
        for (index, a) in self.arrivals.iter().enumerate() {
            if !a.time.is_finite() || a.time < 0.0 || a.time > self.horizon {
                return Err(PathError::TimeOutOfRange {
                    index,
                    time: a.time,
                    horizon: self.horizon,
                });
            }
            if a.time < previous {
                return Err(PathError::OutOfOrder {
                    index,
                    time: a.time,
                    previous,
                });
            }
            if !a.service.is_finite() || a.service <= 0.0 {
                return Err(PathError::BadService {
                    index,
                    service: a.service,
                });
            }
            if !a.stress.is_finite() || a.stress < 0.0 {
                return Err(PathError::BadStress {
                    index,
                    stress: a.stress,
                });
            }
            previous = a.time;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("path horizon must be finite and nonnegative, got {horizon}")]
    BadHorizon { horizon: f64 },
    #[error("arrival {index}: time {time} outside [0, {horizon}]")]
    TimeOutOfRange {
        index: usize,
        time: f64,
        horizon: f64,
    },
    #[error("arrival {index}: time {time} is earlier than its predecessor {previous}")]
    OutOfOrder {
        index: usize,
        time: f64,
        previous: f64,
    },
    #[error("arrival {index}: service time must be positive, got {service}")]
    BadService { index: usize, service: f64 },
    #[error("arrival {index}: stress must be finite and nonnegative, got {stress}")]
    BadStress { index: usize, stress: f64 },
}

/// Deterministic family of independent generators: replica `i` always gets
/// stream `i` of a ChaCha12 generator keyed by the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngPolicy {
    pub master_seed: u64,
}

impl RngPolicy {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// The generator for one replica; a pure function of `(master_seed, replica)`.
    pub fn stream_for(&self, replica: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(replica);
        rng
    }
}

/// Empirical survival estimates on a grid with normal-approximation
/// confidence half-widths at the stated `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCurve {
    pub grid: Vec<f64>,
    pub estimates: Vec<f64>,
    pub ci_half_widths: Vec<f64>,
    pub n_replicas: usize,
    pub z: f64,
}

impl EmpiricalCurve {
    /// Confidence bounds at grid index `i`, clipped to `[0, 1]`.
    pub fn ci_bounds(&self, i: usize) -> (f64, f64) {
        let lo = (self.estimates[i] - self.ci_half_widths[i]).max(0.0);
        let hi = (self.estimates[i] + self.ci_half_widths[i]).min(1.0);
        (lo, hi)
    }

    pub fn covers(&self, i: usize, value: f64) -> bool {
        let (lo, hi) = self.ci_bounds(i);
        lo <= value && value <= hi
    }
}

/// Outcome of one renewal cycle: the failure time, the number of jobs
/// completed before it, and the number that had arrived by then.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOutcome {
    pub failure_time: f64,
    pub completed_jobs: u64,
    pub total_arrivals: u64,
}

/// Ratio-of-sums renewal-reward estimate of the efficiency, with a
/// delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEstimate {
    pub psi_hat: f64,
    pub std_error: f64,
    pub n_cycles: usize,
    pub mean_cycle_length: f64,
    pub mean_completed_jobs: f64,
    pub reboot_mean_nu: f64,
}

impl EfficiencyEstimate {
    /// `psi_hat ± z · std_error`.
    pub fn ci(&self, z: f64) -> (f64, f64) {
        (
            self.psi_hat - z * self.std_error,
            self.psi_hat + z * self.std_error,
        )
    }
}

/// A sampled failure time, or a censoring marker when the threshold was not
/// reached within the path horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailureTime {
    Observed(f64),
    Censored(f64),
}

impl FailureTime {
    /// Whether the server is still up at `t`. `t` must not exceed the
    /// horizon the failure time was sampled under.
    pub fn survives_past(&self, t: f64) -> bool {
        match *self {
            FailureTime::Observed(y) => y > t,
            FailureTime::Censored(horizon) => {
                debug_assert!(t <= horizon);
                true
            }
        }
    }

    pub fn observed(&self) -> Option<f64> {
        match *self {
            FailureTime::Observed(y) => Some(y),
            FailureTime::Censored(_) => None,
        }
    }
}

/// Result of the conditional arrival-time distribution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderStatReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n_pooled: usize,
    pub paths_retained: usize,
    pub attempts: usize,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("intensity majorant is zero on [{a}, {b}] although the intensity is positive there")]
    ZeroMajorant { a: f64, b: f64 },
    #[error("time {t} exceeds the path horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("failure threshold must be nonnegative, got {threshold}")]
    BadThreshold { threshold: f64 },
    #[error("renewal cycle exceeded the safety cap of {cap} time units without failing")]
    CycleCap { cap: f64 },
    #[error("at least {min} replicas are required, got {n}")]
    TooFewReplicas { n: usize, min: usize },
    #[error("grid must be nonempty, strictly increasing, and positive")]
    InvalidGrid,
    #[error("inversion sampling requires a constant intensity")]
    InversionNeedsConstant,
    #[error("expected arrival count m({t}) is zero; nothing to condition on")]
    NoArrivalMass { t: f64 },
    #[error(
        "conditioning on exactly {n_condition} arrivals accepted {retained} of {attempts} \
         paths; pick n_condition nearer E[N(t)] = {expected:.3}"
    )]
    ConditioningTooRare {
        n_condition: usize,
        retained: usize,
        attempts: usize,
        expected: f64,
    },
}

// ---------------------------------------------------------------------------
// Arrival sampling
// ---------------------------------------------------------------------------

/// Arrival times of the NHPP on `[0, horizon]`, sampled by thinning against
/// a per-window majorant of the intensity.
pub fn sample_arrivals<R: Rng + ?Sized>(
    scenario: &Scenario,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<f64>, SimError> {
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(PathError::BadHorizon { horizon }.into());
    }
    let mut times = Vec::new();
    let mut start = 0.0;
    while start < horizon {
        let end = (start + THINNING_WINDOW).min(horizon);
        let bound = scenario.intensity.max_on(start, end);
        if bound <= 0.0 {
            if scenario.intensity.rate(0.5 * (start + end)) > 0.0 {
                return Err(SimError::ZeroMajorant { a: start, b: end });
            }
            start = end;
            continue;
        }
        let mut t = start;
        loop {
            t += standard_exponential(rng) / bound;
            if t >= end {
                break;
            }
            let u: f64 = rng.random();
            if u * bound < scenario.intensity.rate(t) {
                times.push(t);
            }
        }
        start = end;
    }
    Ok(times)
}

/// Arrival times by direct inversion of the exponential gaps; only valid for
/// a constant intensity. Kept as an independent cross-check of the thinning
/// sampler.
pub fn sample_arrivals_by_inversion<R: Rng + ?Sized>(
    scenario: &Scenario,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<f64>, SimError> {
    let IntensityModel::Constant { rate } = scenario.intensity else {
        return Err(SimError::InversionNeedsConstant);
    };
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(PathError::BadHorizon { horizon }.into());
    }
    let mut times = Vec::new();
    if rate <= 0.0 {
        return Ok(times);
    }
    let mut t = 0.0;
    loop {
        t += standard_exponential(rng) / rate;
        if t > horizon {
            return Ok(times);
        }
        times.push(t);
    }
}

/// A full workload path: arrivals, then an i.i.d. service time and stress
/// per job (drawn in arrival order).
pub fn sample_path<R: Rng + ?Sized>(
    scenario: &Scenario,
    horizon: f64,
    rng: &mut R,
) -> Result<WorkloadPath, SimError> {
    let times = sample_arrivals(scenario, horizon, rng)?;
    let arrivals = times
        .into_iter()
        .map(|time| {
            let service = scenario.service.sample(rng);
            let stress = scenario.stress.sample(rng);
            Arrival {
                time,
                service,
                stress,
            }
        })
        .collect();
    Ok(WorkloadPath { arrivals, horizon })
}

// ---------------------------------------------------------------------------
// Path-conditional failure
// ---------------------------------------------------------------------------

/// Integrated breakdown rate `∫₀ᵗ B(s) ds`, computed exactly from the
/// piecewise structure: `R0(t) + Σ_{Tⱼ ≤ t} Hⱼ · min(Wⱼ, t - Tⱼ)`.
pub fn integrated_breakdown(
    scenario: &Scenario,
    path: &WorkloadPath,
    t: f64,
) -> Result<f64, SimError> {
    path.validate()?;
    if t < 0.0 {
        return Err(ModelError::NegativeTime { t }.into());
    }
    if t > path.horizon {
        return Err(SimError::BeyondHorizon {
            t,
            horizon: path.horizon,
        });
    }
    let mut acc = scenario.baseline.cumulative(t);
    for a in &path.arrivals {
        if a.time > t {
            break;
        }
        acc += a.stress * a.service.min(t - a.time);
    }
    Ok(acc)
}

/// The failure time `Y` solving `∫₀^Y B(s) ds = threshold` for a given
/// exponential threshold, or a censoring marker at the horizon if the
/// cumulative never reaches it.
///
/// Between job arrivals/completions the breakdown rate is `r0(t)` plus a
/// constant, so the crossing segment is located exactly and the root is
/// bisected inside that one segment to `1e-12` absolute.
pub fn failure_time_for_threshold(
    scenario: &Scenario,
    path: &WorkloadPath,
    threshold: f64,
) -> Result<FailureTime, SimError> {
    path.validate()?;
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(SimError::BadThreshold { threshold });
    }

    // Event boundaries: each arrival raises the stress sum, each completion
    // inside the horizon lowers it.
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * path.arrivals.len());
    for a in &path.arrivals {
        events.push((a.time, a.stress));
        let completion = a.time + a.service;
        if completion < path.horizon {
            events.push((completion, -a.stress));
        }
    }
    events.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite event times"));

    let mut seg_start = 0.0;
    let mut cumulative = 0.0; // Λ(seg_start)
    let mut r0_prev = 0.0; // R0(seg_start)
    let mut stress_sum = 0.0;
    for (time, delta) in events
        .into_iter()
        .chain(std::iter::once((path.horizon, 0.0)))
    {
        let r0_now = scenario.baseline.cumulative(time);
        let seg_end_value = cumulative + (r0_now - r0_prev) + stress_sum * (time - seg_start);
        if seg_end_value >= threshold {
            let y = bisect_crossing(
                scenario, seg_start, time, cumulative, r0_prev, stress_sum, threshold,
            );
            return Ok(FailureTime::Observed(y));
        }
        cumulative = seg_end_value;
        r0_prev = r0_now;
        seg_start = time;
        stress_sum += delta;
    }
    Ok(FailureTime::Censored(path.horizon))
}

/// Leftmost `t` in `[lo, hi]` with `Λ(t) >= threshold`, where
/// `Λ(t) = base + (R0(t) - r0_lo) + stress_sum (t - lo)` is nondecreasing.
#[allow(clippy::too_many_arguments)]
fn bisect_crossing(
    scenario: &Scenario,
    lo: f64,
    hi: f64,
    base: f64,
    r0_lo: f64,
    stress_sum: f64,
    threshold: f64,
) -> f64 {
    let start = lo;
    let value =
        |t: f64| base + (scenario.baseline.cumulative(t) - r0_lo) + stress_sum * (t - start);
    if value(lo) >= threshold {
        return lo;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > INVERSION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if value(mid) >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Draw the failure time of the server under a fixed path: an Exp(1)
/// threshold inverted through the integrated breakdown rate, so that
/// `P(Y > t | path) = exp(-∫₀ᵗ B)` by construction.
pub fn sample_failure_time<R: Rng + ?Sized>(
    scenario: &Scenario,
    path: &WorkloadPath,
    rng: &mut R,
) -> Result<FailureTime, SimError> {
    let threshold = standard_exponential(rng);
    failure_time_for_threshold(scenario, path, threshold)
}

// ---------------------------------------------------------------------------
// Survival estimation
// ---------------------------------------------------------------------------

/// Monte Carlo estimate of the unconditional survival function on the given
/// grid. The horizon is the last grid point; censored replicas count as
/// surviving the whole grid. Half-widths are 99% normal-approximation
/// binomial intervals.
pub fn estimate_survival(
    scenario: &Scenario,
    grid: &[f64],
    n_replicas: usize,
    policy: RngPolicy,
) -> Result<EmpiricalCurve, SimError> {
    validate_grid(grid)?;
    if n_replicas < 100 {
        return Err(SimError::TooFewReplicas {
            n: n_replicas,
            min: 100,
        });
    }
    let horizon = *grid.last().expect("nonempty grid");

    // Integer survivor counts are exact, so any reduction order gives
    // bit-identical estimates.
    let counts = (0..n_replicas as u64)
        .into_par_iter()
        .try_fold(
            || vec![0u64; grid.len()],
            |mut acc, replica| -> Result<Vec<u64>, SimError> {
                let mut rng = policy.stream_for(replica);
                let path = sample_path(scenario, horizon, &mut rng)?;
                let outcome = sample_failure_time(scenario, &path, &mut rng)?;
                for (k, &t) in grid.iter().enumerate() {
                    if outcome.survives_past(t) {
                        acc[k] += 1;
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; grid.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;

    let n = n_replicas as f64;
    let estimates: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let ci_half_widths = estimates
        .iter()
        .map(|&p| Z_99 * (p * (1.0 - p) / n).sqrt())
        .collect();
    Ok(EmpiricalCurve {
        grid: grid.to_vec(),
        estimates,
        ci_half_widths,
        n_replicas,
        z: Z_99,
    })
}

fn validate_grid(grid: &[f64]) -> Result<(), SimError> {
    if grid.is_empty() {
        return Err(SimError::InvalidGrid);
    }
    let mut previous = 0.0;
    for &t in grid {
        if !t.is_finite() || t <= previous {
            return Err(SimError::InvalidGrid);
        }
        previous = t;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Renewal cycles and efficiency
// ---------------------------------------------------------------------------

/// Realize one boot-to-failure cycle with the default safety cap.
pub fn simulate_renewal_cycle<R: Rng + ?Sized>(
    scenario: &Scenario,
    rng: &mut R,
) -> Result<CycleOutcome, SimError> {
    simulate_renewal_cycle_capped(scenario, DEFAULT_CYCLE_CAP, rng)
}

/// Realize one renewal cycle, extending the arrival horizon window by window
/// until the failure threshold is crossed, so the failure time is never
/// censored. Errors out if the cycle outlives `cap` time units.
pub fn simulate_renewal_cycle_capped<R: Rng + ?Sized>(
    scenario: &Scenario,
    cap: f64,
    rng: &mut R,
) -> Result<CycleOutcome, SimError> {
    let threshold = standard_exponential(rng);
    let mut arrivals: Vec<Arrival> = Vec::new();
    let mut window_start = 0.0;
    loop {
        if window_start >= cap {
            return Err(SimError::CycleCap { cap });
        }
        let window_end = (window_start + RENEWAL_WINDOW).min(cap);

        // Arrivals in [window_start, window_end), each with its service time
        // and stress drawn immediately.
        let bound = scenario.intensity.max_on(window_start, window_end);
        if bound <= 0.0 {
            if scenario.intensity.rate(0.5 * (window_start + window_end)) > 0.0 {
                return Err(SimError::ZeroMajorant {
                    a: window_start,
                    b: window_end,
                });
            }
        } else {
            let mut t = window_start;
            loop {
                t += standard_exponential(rng) / bound;
                if t >= window_end {
                    break;
                }
                let u: f64 = rng.random();
                if u * bound < scenario.intensity.rate(t) {
                    let service = scenario.service.sample(rng);
                    let stress = scenario.stress.sample(rng);
                    arrivals.push(Arrival {
                        time: t,
                        service,
                        stress,
                    });
                }
            }
        }

        let path = WorkloadPath {
            arrivals: std::mem::take(&mut arrivals),
            horizon: window_end,
        };
        match failure_time_for_threshold(scenario, &path, threshold)? {
            FailureTime::Observed(y) => {
                let completed_jobs = path
                    .arrivals
                    .iter()
                    .filter(|a| a.time + a.service <= y)
                    .count() as u64;
                let total_arrivals = path.arrivals.iter().filter(|a| a.time <= y).count() as u64;
                return Ok(CycleOutcome {
                    failure_time: y,
                    completed_jobs,
                    total_arrivals,
                });
            }
            FailureTime::Censored(_) => {
                arrivals = path.arrivals;
                window_start = window_end;
            }
        }
    }
}

/// Renewal-reward estimate `ψ̂ = (Σ Mᵢ) / (Σ Yᵢ + n·ν)` over `n_cycles`
/// independent cycles, with a delta-method standard error for the ratio.
pub fn estimate_efficiency(
    scenario: &Scenario,
    n_cycles: usize,
    policy: RngPolicy,
) -> Result<EfficiencyEstimate, SimError> {
    if n_cycles < 100 {
        return Err(SimError::TooFewReplicas {
            n: n_cycles,
            min: 100,
        });
    }
    let outcomes: Vec<CycleOutcome> = (0..n_cycles as u64)
        .into_par_iter()
        .map(|cycle| {
            let mut rng = policy.stream_for(cycle);
            simulate_renewal_cycle(scenario, &mut rng)
        })
        .collect::<Result<_, _>>()?;

    let n = n_cycles as f64;
    let nu = scenario.reboot_mean_nu;
    // Sequential sums in cycle order keep the estimate bit-stable.
    let sum_y: f64 = outcomes.iter().map(|o| o.failure_time).sum();
    let sum_m: f64 = outcomes.iter().map(|o| o.completed_jobs as f64).sum();
    let mean_y = sum_y / n;
    let mean_m = sum_m / n;
    let denominator = mean_y + nu;
    let psi_hat = mean_m / denominator;

    let mut s_yy = 0.0;
    let mut s_mm = 0.0;
    let mut s_my = 0.0;
    for o in &outcomes {
        let dy = o.failure_time - mean_y;
        let dm = o.completed_jobs as f64 - mean_m;
        s_yy += dy * dy;
        s_mm += dm * dm;
        s_my += dm * dy;
    }
    let denom_df = (n - 1.0).max(1.0);
    s_yy /= denom_df;
    s_mm /= denom_df;
    s_my /= denom_df;

    let variance =
        (s_mm - 2.0 * psi_hat * s_my + psi_hat * psi_hat * s_yy) / (n * denominator * denominator);
    let std_error = variance.max(0.0).sqrt();

    Ok(EfficiencyEstimate {
        psi_hat,
        std_error,
        n_cycles,
        mean_cycle_length: mean_y,
        mean_completed_jobs: mean_m,
        reboot_mean_nu: nu,
    })
}

// ---------------------------------------------------------------------------
// Conditional arrival-time check
// ---------------------------------------------------------------------------

/// KS test of the pooled arrival times, conditioned on exactly
/// `n_condition` arrivals in `[0, t]`, against the cdf `m(x)/m(t)` implied
/// by the order-statistics property of the NHPP.
pub fn order_statistics_test(
    scenario: &Scenario,
    t: f64,
    n_condition: usize,
    n_samples: usize,
    policy: RngPolicy,
) -> Result<OrderStatReport, SimError> {
    let m_t = scenario.cumulative_intensity(t).map_err(SimError::Model)?;
    if m_t <= 0.0 {
        return Err(SimError::NoArrivalMass { t });
    }
    order_statistics_test_against(scenario, t, n_condition, n_samples, policy, |x| {
        scenario.intensity.cumulative(x) / m_t
    })
}

/// Same conditioning and pooling as [`order_statistics_test`], but testing
/// against an arbitrary cdf on `[0, t]` — used for negative controls.
pub fn order_statistics_test_against(
    scenario: &Scenario,
    t: f64,
    n_condition: usize,
    n_samples: usize,
    policy: RngPolicy,
    cdf: impl Fn(f64) -> f64,
) -> Result<OrderStatReport, SimError> {
    let expected = scenario.cumulative_intensity(t).map_err(SimError::Model)?;
    if expected <= 0.0 {
        return Err(SimError::NoArrivalMass { t });
    }
    let mut pooled: Vec<f64> = Vec::with_capacity(n_samples + n_condition);
    let mut attempts = 0usize;
    let mut retained = 0usize;
    while pooled.len() < n_samples {
        let mut rng = policy.stream_for(attempts as u64);
        let times = sample_arrivals(scenario, t, &mut rng)?;
        attempts += 1;
        if times.len() == n_condition {
            pooled.extend(times);
            retained += 1;
        }
        if attempts >= 10_000 && (retained as f64) < 1e-4 * attempts as f64 {
            return Err(SimError::ConditioningTooRare {
                n_condition,
                retained,
                attempts,
                expected,
            });
        }
    }
    let statistic = ks_statistic(&pooled, cdf);
    let p_value = ks_p_value(statistic, pooled.len());
    Ok(OrderStatReport {
        statistic,
        p_value,
        n_pooled: pooled.len(),
        paths_retained: retained,
        attempts,
    })
}
