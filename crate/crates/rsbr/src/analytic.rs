//! Closed-form reliability quantities of the stressed server.
//!
//! With `m(t)` the mean arrival count, `Ḡ_W` the service survival, and `H`
//! the per-job stress, the unconditional survival of the server is
//!
//! ```text
//! S(t) = exp(-R0(t)) · exp(-E_H[ H ∫₀ᵗ e^{-Hw} m(t-w) Ḡ_W(w) dw ])
//! ```
//!
//! and the hazard rate is its exact logarithmic derivative,
//!
//! ```text
//! r(t) = r0(t) + E_H[ H ∫₀ᵗ e^{-Hw} λ(t-w) Ḡ_W(w) dw ].
//! ```
//!
//! The long-run efficiency (completed jobs per unit time over
//! failure/reboot cycles) is `ψ = E[M] / (E[Y] + ν)` with
//! `E[Y] = ∫₀^∞ S(t) dt` and
//!
//! ```text
//! E[M] = ∫₀^∞ exp(-R0(t) - m(t) + E_H[a+b]) (r0(t) E_H[a] + E_H[a]·E_H[H·b]) dt,
//! a(t) = ∫₀ᵗ e^{-Hv} g_W(v) m(t-v) dv,
//! b(t) = ∫₀ᵗ e^{-Hu} Ḡ_W(u) λ(t-u) du.
//! ```
//!
//! In the second `E[M]` term the `E_H[a]` factor belongs to the job that
//! completes and `E_H[H·b]` to the distinct job whose stress is active at
//! the failure instant; stresses of distinct jobs are independent, so the
//! two expectations factor (they merge into one only when the stress law is
//! degenerate). The renewal simulator pins this down: the factored form
//! tracks it within Monte Carlo error, a jointly averaged `E_H[H·a·b]` does
//! not.
//!
//! Stress expectations `E_H[·]` are exact finite sums taken outside the
//! quadrature: each inner integral is evaluated once per stress atom and
//! then weighted. Everything is a pure function of the scenario and the
//! quadrature settings; grid evaluations may run in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, Scenario, ServiceTimeModel, ValidationError};
use crate::quad::{
    integrate, integrate_to_infinity, integrate_with_breakpoints, QuadratureError,
    QuadratureSettings,
};
use crate::sim::{PathError, WorkloadPath};

/// Factor by which inner-integral tolerances are tightened when nested
/// inside an adaptive outer integral.
const NESTED_TIGHTENING: f64 = 10.0;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("m(t) = 0 at t = {t}; the conditional single-job law is undefined")]
    NoArrivalMass { t: f64 },
}

/// What a sampled [`Curve`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Survival,
    Hazard,
    Generic,
}

/// A function sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: CurveKind,
}

impl Curve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, kind: CurveKind) -> Result<Self, ValidationError> {
        if grid.len() != values.len() {
            return Err(ValidationError::new(
                "curve",
                format!("{} grid points but {} values", grid.len(), values.len()),
            ));
        }
        for (i, &t) in grid.iter().enumerate() {
            if !t.is_finite() || (i > 0 && t <= grid[i - 1]) {
                return Err(ValidationError::new(
                    format!("curve.grid[{i}]"),
                    "grid must be finite and strictly increasing",
                ));
            }
        }
        let curve = Self { grid, values, kind };
        curve.validate()?;
        Ok(curve)
    }

    /// Kind-specific sanity of the sampled values: survival curves live in
    /// [0, 1] (and equal 1 at t = 0) and are nonincreasing; hazard curves
    /// are nonnegative.
    pub fn validate(&self) -> Result<(), ValidationError> {
        match self.kind {
            CurveKind::Survival => {
                let mut previous = f64::INFINITY;
                for (i, &v) in self.values.iter().enumerate() {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(ValidationError::new(
                            format!("curve.values[{i}]"),
                            format!("survival value {v} outside [0, 1]"),
                        ));
                    }
                    if self.grid[i] == 0.0 && v != 1.0 {
                        return Err(ValidationError::new(
                            format!("curve.values[{i}]"),
                            format!("survival at t = 0 must be 1, got {v}"),
                        ));
                    }
                    if v > previous {
                        return Err(ValidationError::new(
                            format!("curve.values[{i}]"),
                            "survival values must be nonincreasing",
                        ));
                    }
                    previous = v;
                }
            }
            CurveKind::Hazard => {
                for (i, &v) in self.values.iter().enumerate() {
                    if !v.is_finite() || v < 0.0 {
                        return Err(ValidationError::new(
                            format!("curve.values[{i}]"),
                            format!("hazard value {v} must be finite and nonnegative"),
                        ));
                    }
                }
            }
            CurveKind::Generic => {}
        }
        Ok(())
    }
}

/// Closed-form efficiency and its ingredients. `diverged` is set (with
/// `psi = 0`) when the cycle-length integral does not converge, i.e. when
/// failure is not certain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub psi: f64,
    pub mean_cycle_length: f64,
    pub expected_jobs_per_cycle: f64,
    pub reboot_mean_nu: f64,
    pub diverged: bool,
}

/// Evaluator for every closed form of one scenario.
#[derive(Debug, Clone)]
pub struct ClosedForm<'a> {
    scenario: &'a Scenario,
    settings: QuadratureSettings,
    inner: QuadratureSettings,
}

impl<'a> ClosedForm<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self::with_settings(scenario, QuadratureSettings::default())
    }

    pub fn with_settings(scenario: &'a Scenario, settings: QuadratureSettings) -> Self {
        Self {
            scenario,
            settings,
            inner: settings.tightened(NESTED_TIGHTENING),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    // -- Survival-exponent building blocks ------------------------------------

    /// `η ∫₀ᵗ e^{-ηw} m(t-w) Ḡ_W(w) dw`: one stress atom's contribution to
    /// the survival exponent. Zero when `η = 0` or `t = 0`.
    pub fn inner_exposure(&self, t: f64, eta: f64) -> Result<f64, AnalyticError> {
        self.inner_exposure_with(t, eta, &self.settings)
    }

    fn inner_exposure_with(
        &self,
        t: f64,
        eta: f64,
        settings: &QuadratureSettings,
    ) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        if eta == 0.0 || t == 0.0 {
            return Ok(0.0);
        }
        let upper = self.service_support_cap(t);
        if upper == 0.0 {
            return Ok(0.0);
        }
        let intensity = &self.scenario.intensity;
        let service = &self.scenario.service;
        let value = integrate(
            |w| (-eta * w).exp() * intensity.cumulative(t - w) * service.survival(w),
            0.0,
            upper,
            settings,
        )?;
        Ok(eta * value)
    }

    /// Unconditional survival `S(t)`.
    pub fn survival(&self, t: f64) -> Result<f64, AnalyticError> {
        self.survival_with(t, &self.settings)
    }

    fn survival_with(&self, t: f64, settings: &QuadratureSettings) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        let exposure =
            self.stress_expect_result(|eta| self.inner_exposure_with(t, eta, settings))?;
        Ok((-(self.scenario.baseline.cumulative(t) + exposure)).exp())
    }

    /// Hazard rate `r(t) = -d ln S(t)/dt`, evaluated in its derivative form
    /// `r0(t) + E_H[H ∫₀ᵗ e^{-Hw} λ(t-w) Ḡ_W(w) dw]`.
    pub fn hazard(&self, t: f64) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        let extra = self.stress_expect_result(|eta| {
            if eta == 0.0 || t == 0.0 {
                return Ok(0.0);
            }
            let upper = self.service_support_cap(t);
            if upper == 0.0 {
                return Ok(0.0);
            }
            let intensity = &self.scenario.intensity;
            let service = &self.scenario.service;
            let value = integrate(
                |w| (-eta * w).exp() * intensity.rate(t - w) * service.survival(w),
                0.0,
                upper,
                &self.settings,
            )?;
            Ok(eta * value)
        })?;
        Ok(self.scenario.baseline.rate(t) + extra)
    }

    /// The hazard with `m(t-w)` in place of `λ(t-w)` inside the integrand,
    /// i.e. `r0(t) + E_H[inner_exposure]`. This is NOT the derivative of
    /// `-ln S(t)`; it is kept as a diagnostic so the difference between the
    /// two forms stays observable (see the acceptance suite).
    pub fn hazard_printed_form(&self, t: f64) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        let extra = self.stress_expect_result(|eta| self.inner_exposure(t, eta))?;
        Ok(self.scenario.baseline.rate(t) + extra)
    }

    // -- Path-conditional forms ----------------------------------------------

    /// Survival given a fixed workload path:
    /// `exp(-R0(t) - Σ_{Tⱼ ≤ t} Hⱼ min(Wⱼ, t - Tⱼ))`.
    ///
    /// `t` may exceed the path horizon; the path is then read as the
    /// complete workload (no arrivals beyond those listed).
    pub fn conditional_survival_given_path(
        &self,
        path: &WorkloadPath,
        t: f64,
    ) -> Result<f64, AnalyticError> {
        path.validate()?;
        require_nonnegative(t)?;
        let mut exponent = self.scenario.baseline.cumulative(t);
        for a in &path.arrivals {
            if a.time > t {
                break;
            }
            exponent += a.stress * a.service.min(t - a.time);
        }
        Ok((-exponent).exp())
    }

    /// Conditional failure density given a fixed path: the conditional
    /// survival times the breakdown rate
    /// `r0(t) + Σ Hⱼ 1{job j active at t}`.
    pub fn conditional_failure_density(
        &self,
        path: &WorkloadPath,
        t: f64,
    ) -> Result<f64, AnalyticError> {
        let survival = self.conditional_survival_given_path(path, t)?;
        let mut rate = self.scenario.baseline.rate(t);
        for a in &path.arrivals {
            if a.time > t {
                break;
            }
            if a.service > t - a.time {
                rate += a.stress;
            }
        }
        Ok(survival * rate)
    }

    // -- Single-job factor ----------------------------------------------------

    /// `E[e^{-η min(W, t - T')}]` for one job with arrival time `T'` drawn
    /// from the normalized intensity on `[0, t]`:
    /// `1 - inner_exposure(t, η)/m(t)`. Requires `m(t) > 0`.
    pub fn single_job_factor(&self, t: f64, eta: f64) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        let m_t = self.scenario.intensity.cumulative(t);
        if m_t <= 0.0 {
            return Err(AnalyticError::NoArrivalMass { t });
        }
        Ok(1.0 - self.inner_exposure(t, eta)? / m_t)
    }

    // -- Efficiency -----------------------------------------------------------

    /// `a(t; η) = ∫₀ᵗ e^{-ηv} g_W(v) m(t-v) dv`. For a deterministic
    /// service time the point mass is evaluated directly.
    pub fn a_func(&self, t: f64, eta: f64) -> Result<f64, AnalyticError> {
        self.a_func_with(t, eta, &self.settings)
    }

    fn a_func_with(
        &self,
        t: f64,
        eta: f64,
        settings: &QuadratureSettings,
    ) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let intensity = &self.scenario.intensity;
        if let Some(w) = self.scenario.service.point_mass() {
            if w <= t {
                return Ok((-eta * w).exp() * intensity.cumulative(t - w));
            }
            return Ok(0.0);
        }
        let service = &self.scenario.service;
        Ok(integrate(
            |v| (-eta * v).exp() * service.pdf(v) * intensity.cumulative(t - v),
            0.0,
            t,
            settings,
        )?)
    }

    /// `b(t; η) = ∫₀ᵗ e^{-H(t-r)} Ḡ_W(t-r) λ(r) dr`, evaluated after the
    /// substitution `u = t - r` as `∫₀ᵗ e^{-ηu} Ḡ_W(u) λ(t-u) du`.
    pub fn b_func(&self, t: f64, eta: f64) -> Result<f64, AnalyticError> {
        self.b_func_with(t, eta, &self.settings)
    }

    fn b_func_with(
        &self,
        t: f64,
        eta: f64,
        settings: &QuadratureSettings,
    ) -> Result<f64, AnalyticError> {
        require_nonnegative(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let upper = self.service_support_cap(t);
        if upper == 0.0 {
            return Ok(0.0);
        }
        let intensity = &self.scenario.intensity;
        let service = &self.scenario.service;
        Ok(integrate(
            |u| (-eta * u).exp() * service.survival(u) * intensity.rate(t - u),
            0.0,
            upper,
            settings,
        )?)
    }

    /// Mean renewal-cycle length `E[Y] = ∫₀^∞ S(t) dt`.
    pub fn mean_cycle_length(&self) -> Result<f64, AnalyticError> {
        let result = integrate_to_infinity(
            |t| {
                self.survival_with(t, &self.inner).unwrap_or(f64::NAN) // surfaced as a quadrature error
            },
            &self.settings,
        )?;
        Ok(result)
    }

    /// Expected jobs completed in one cycle,
    /// `E[M] = ∫₀^∞ exp(-R0 - m + E_H[a+b]) (r0 E_H[a] + E_H[a] E_H[H b]) dt`.
    ///
    /// The completing job and the job stressing the server at the failure
    /// instant are distinct, with independent stresses, so their averages
    /// factor (see the module docs).
    pub fn expected_jobs_per_cycle(&self) -> Result<f64, AnalyticError> {
        let scenario = self.scenario;
        let result = integrate_to_infinity(
            |t| {
                let integrand = || -> Result<f64, AnalyticError> {
                    let atoms = &scenario.stress.atoms;
                    let mut e_a = 0.0;
                    let mut e_hb = 0.0;
                    let mut e_a_plus_b = 0.0;
                    for atom in atoms {
                        let a = self.a_func_with(t, atom.eta, &self.inner)?;
                        let b = self.b_func_with(t, atom.eta, &self.inner)?;
                        e_a += atom.p * a;
                        e_hb += atom.p * atom.eta * b;
                        e_a_plus_b += atom.p * (a + b);
                    }
                    let exponent = -scenario.baseline.cumulative(t)
                        - scenario.intensity.cumulative(t)
                        + e_a_plus_b;
                    Ok(exponent.exp() * (scenario.baseline.rate(t) * e_a + e_a * e_hb))
                };
                integrand().unwrap_or(f64::NAN)
            },
            &self.settings,
        )?;
        Ok(result)
    }

    /// The efficiency `ψ = E[M] / (E[Y] + ν)` with its ingredients. A
    /// divergent cycle-length integral (failure not certain) yields the
    /// flagged zero-efficiency report instead of an error.
    pub fn efficiency(&self) -> Result<EfficiencyReport, AnalyticError> {
        let nu = self.scenario.reboot_mean_nu;
        let mean_cycle_length = match self.mean_cycle_length() {
            Ok(ey) => ey,
            Err(AnalyticError::Quadrature(QuadratureError::Divergent { .. })) => {
                return Ok(EfficiencyReport {
                    psi: 0.0,
                    mean_cycle_length: f64::INFINITY,
                    expected_jobs_per_cycle: f64::INFINITY,
                    reboot_mean_nu: nu,
                    diverged: true,
                });
            }
            Err(e) => return Err(e),
        };
        let expected_jobs_per_cycle = self.expected_jobs_per_cycle()?;
        Ok(EfficiencyReport {
            psi: expected_jobs_per_cycle / (mean_cycle_length + nu),
            mean_cycle_length,
            expected_jobs_per_cycle,
            reboot_mean_nu: nu,
            diverged: false,
        })
    }

    // -- Curves ----------------------------------------------------------------

    /// `S(t)` sampled on a grid; points are evaluated in parallel and placed
    /// by index.
    pub fn survival_curve(&self, grid: &[f64]) -> Result<Curve, AnalyticError> {
        let values = grid
            .par_iter()
            .map(|&t| self.survival(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Curve::new(grid.to_vec(), values, CurveKind::Survival)?)
    }

    /// `r(t)` sampled on a grid.
    pub fn hazard_curve(&self, grid: &[f64]) -> Result<Curve, AnalyticError> {
        let values = grid
            .par_iter()
            .map(|&t| self.hazard(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Curve::new(grid.to_vec(), values, CurveKind::Hazard)?)
    }

    // -- Helpers ----------------------------------------------------------------

    /// Exact stress expectation of a fallible per-atom evaluation.
    fn stress_expect_result(
        &self,
        f: impl Fn(f64) -> Result<f64, AnalyticError>,
    ) -> Result<f64, AnalyticError> {
        let mut acc = 0.0;
        for atom in &self.scenario.stress.atoms {
            acc += atom.p * f(atom.eta)?;
        }
        Ok(acc)
    }

    /// Upper integration limit for integrands carrying `Ḡ_W(w)`: the
    /// service survival vanishes past a deterministic point mass.
    fn service_support_cap(&self, t: f64) -> f64 {
        match self.scenario.service {
            ServiceTimeModel::Deterministic { w } => t.min(w),
            _ => t,
        }
    }
}

/// Integrate the conditional failure density of a fixed path over
/// `[0, upper]`, with panels split at the path's arrival and completion
/// instants (where the density jumps).
pub fn integrate_conditional_density(
    closed_form: &ClosedForm<'_>,
    path: &WorkloadPath,
    upper: f64,
    settings: &QuadratureSettings,
) -> Result<f64, AnalyticError> {
    path.validate()?;
    let mut jumps = Vec::with_capacity(2 * path.arrivals.len());
    for a in &path.arrivals {
        jumps.push(a.time);
        jumps.push(a.time + a.service);
    }
    Ok(integrate_with_breakpoints(
        |t| {
            closed_form
                .conditional_failure_density(path, t)
                .unwrap_or(f64::NAN)
        },
        0.0,
        upper,
        &jumps,
        settings,
    )?)
}

fn require_nonnegative(t: f64) -> Result<(), AnalyticError> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::Model(ModelError::NegativeTime { t }))
    }
}
