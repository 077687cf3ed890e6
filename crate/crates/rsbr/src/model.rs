//! Model primitives: baseline hazard, arrival intensity, service-time law,
//! per-job stress law, and the [`Scenario`] container tying them together.
//!
//! Every family below admits an exact cumulative (no quadrature), so the
//! only numerical integration in the crate happens in the outer integrals
//! of the analytic module. All types are immutable plain data: construct,
//! [`validate`](Scenario::validate), then share freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const TWO_PI: f64 = std::f64::consts::TAU;

/// A violated model invariant, reported with the field path that caused it
/// (paths follow the scenario-file layout, e.g. `stress.atoms[1].eta`).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct ValidationError {
    pub path: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Errors from evaluating model quantities.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("time must be nonnegative, got {t}")]
    NegativeTime { t: f64 },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

fn require_nonnegative_time(t: f64) -> Result<(), ModelError> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::NegativeTime { t })
    }
}

// ---------------------------------------------------------------------------
// Baseline hazard r0(t)
// ---------------------------------------------------------------------------

/// Baseline breakdown rate of the idle server.
///
/// Each variant has a closed-form cumulative `R0(t) = ∫₀ᵗ r0(x) dx`, so the
/// baseline survival `exp(-R0(t))` is exact. The `Tabulated` variant covers
/// user-supplied rates via piecewise-linear interpolation of `(time, rate)`
/// knots; its cumulative (trapezoid) is still exact for the interpolant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BaselineHazard {
    Constant {
        rate: f64,
    },
    /// `r0(t) = (shape/scale) (t/scale)^(shape-1)`, so `R0(t) = (t/scale)^shape`.
    Weibull {
        shape: f64,
        scale: f64,
    },
    /// `rates[i]` applies on `[breakpoints[i-1], breakpoints[i])`; the last
    /// rate extends to infinity, so `rates.len() == breakpoints.len() + 1`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        rates: Vec<f64>,
    },
    /// Piecewise-linear rate through `(time, rate)` knots, first knot at
    /// t = 0, constant extrapolation beyond the last knot.
    Tabulated {
        knots: Vec<(f64, f64)>,
    },
}

impl BaselineHazard {
    /// Instantaneous rate `r0(t)`. For `Weibull` with `shape < 1` the rate
    /// diverges as `t -> 0`; the cumulative stays finite.
    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Constant { rate } => *rate,
            Self::Weibull { shape, scale } => (shape / scale) * (t / scale).powf(shape - 1.0),
            Self::PiecewiseConstant { breakpoints, rates } => {
                let idx = breakpoints.partition_point(|&b| b <= t);
                rates[idx]
            }
            Self::Tabulated { knots } => piecewise_linear_rate(knots, t),
        }
    }

    /// Cumulative hazard `R0(t)`, exact per variant.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            Self::Constant { rate } => rate * t,
            Self::Weibull { shape, scale } => (t / scale).powf(*shape),
            Self::PiecewiseConstant { breakpoints, rates } => {
                let mut acc = 0.0;
                let mut prev = 0.0;
                for (i, &b) in breakpoints.iter().enumerate() {
                    if t <= b {
                        return acc + rates[i] * (t - prev);
                    }
                    acc += rates[i] * (b - prev);
                    prev = b;
                }
                acc + rates[breakpoints.len()] * (t - prev)
            }
            Self::Tabulated { knots } => piecewise_linear_cumulative(knots, t),
        }
    }

    /// Baseline survival `exp(-R0(t))`.
    pub fn survival(&self, t: f64) -> f64 {
        (-self.cumulative(t)).exp()
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            Self::Constant { rate } => require_finite_nonnegative(*rate, "baseline.rate"),
            Self::Weibull { shape, scale } => {
                require_positive(*shape, "baseline.shape")?;
                require_positive(*scale, "baseline.scale")
            }
            Self::PiecewiseConstant { breakpoints, rates } => {
                if rates.len() != breakpoints.len() + 1 {
                    return Err(ValidationError::new(
                        "baseline.rates",
                        format!(
                            "expected {} rates for {} breakpoints, got {}",
                            breakpoints.len() + 1,
                            breakpoints.len(),
                            rates.len()
                        ),
                    ));
                }
                require_strictly_increasing_positive(breakpoints, "baseline.breakpoints")?;
                for (i, &r) in rates.iter().enumerate() {
                    require_finite_nonnegative(r, &format!("baseline.rates[{i}]"))?;
                }
                Ok(())
            }
            Self::Tabulated { knots } => validate_rate_knots(knots, "baseline.knots"),
        }
    }
}

// ---------------------------------------------------------------------------
// Arrival intensity lambda(t)
// ---------------------------------------------------------------------------

/// Intensity of the nonhomogeneous Poisson arrival process.
///
/// `cumulative` is the mean function `m(t) = ∫₀ᵗ λ(s) ds`, exact per variant;
/// `max_on` supplies the majorant the thinning sampler needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum IntensityModel {
    Constant {
        rate: f64,
    },
    /// `λ(t) = base + amplitude · sin(2πt/period)`; requires `amplitude <= base`.
    Sinusoidal {
        base: f64,
        amplitude: f64,
        period: f64,
    },
    /// Piecewise-linear rate through `(time, rate)` knots, first knot at
    /// t = 0, constant extrapolation beyond the last knot.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
}

impl IntensityModel {
    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Constant { rate } => *rate,
            Self::Sinusoidal {
                base,
                amplitude,
                period,
            } => base + amplitude * (TWO_PI * t / period).sin(),
            Self::PiecewiseLinear { knots } => piecewise_linear_rate(knots, t),
        }
    }

    /// Mean function `m(t)`, exact per variant.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            Self::Constant { rate } => rate * t,
            Self::Sinusoidal {
                base,
                amplitude,
                period,
            } => base * t + amplitude * (period / TWO_PI) * (1.0 - (TWO_PI * t / period).cos()),
            Self::PiecewiseLinear { knots } => piecewise_linear_cumulative(knots, t),
        }
    }

    /// An upper bound for `λ` on `[a, b]`, exact for the shipped variants
    /// (a peak straddling a rounding boundary is counted as inside, which
    /// can only enlarge the bound).
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant { rate } => *rate,
            Self::Sinusoidal {
                base,
                amplitude,
                period,
            } => {
                // Peaks sit at t = period (1/4 + k), k integer.
                let k = (a / period - 0.25).ceil();
                let peak = period * (0.25 + k);
                let slack = period * 1e-12;
                if peak >= a - slack && peak <= b + slack {
                    base + amplitude
                } else {
                    self.rate(a).max(self.rate(b))
                }
            }
            Self::PiecewiseLinear { knots } => {
                let mut max = piecewise_linear_rate(knots, a).max(piecewise_linear_rate(knots, b));
                for &(kt, kr) in knots {
                    if kt > a && kt < b {
                        max = max.max(kr);
                    }
                }
                max
            }
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            Self::Constant { rate } => require_finite_nonnegative(*rate, "intensity.rate"),
            Self::Sinusoidal {
                base,
                amplitude,
                period,
            } => {
                require_finite_nonnegative(*base, "intensity.base")?;
                require_finite_nonnegative(*amplitude, "intensity.amplitude")?;
                require_positive(*period, "intensity.period")?;
                if amplitude > base {
                    return Err(ValidationError::new(
                        "intensity.amplitude",
                        format!("amplitude {amplitude} exceeds base {base}; intensity would go negative"),
                    ));
                }
                Ok(())
            }
            Self::PiecewiseLinear { knots } => validate_rate_knots(knots, "intensity.knots"),
        }
    }
}

// ---------------------------------------------------------------------------
// Service-time law W
// ---------------------------------------------------------------------------

/// Distribution of a job's service time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ServiceTimeModel {
    Exponential {
        rate: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
    Lognormal {
        mu: f64,
        sigma: f64,
    },
    /// Every job takes exactly `w` time units (a point mass; it has a cdf
    /// but no density — see [`ServiceTimeModel::point_mass`]).
    Deterministic {
        w: f64,
    },
}

impl ServiceTimeModel {
    /// Density `g_W(w)`. For the deterministic variant this is 0 everywhere;
    /// integrals against the point mass must use [`Self::point_mass`].
    pub fn pdf(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Exponential { rate } => rate * (-rate * w).exp(),
            Self::Weibull { shape, scale } => {
                let z = w / scale;
                (shape / scale) * z.powf(shape - 1.0) * (-z.powf(*shape)).exp()
            }
            Self::Lognormal { mu, sigma } => {
                let z = (w.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (w * sigma * (TWO_PI).sqrt())
            }
            Self::Deterministic { .. } => 0.0,
        }
    }

    /// Distribution function `G_W(w)`.
    pub fn cdf(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Exponential { rate } => 1.0 - (-rate * w).exp(),
            Self::Weibull { shape, scale } => 1.0 - (-(w / scale).powf(*shape)).exp(),
            Self::Lognormal { mu, sigma } => {
                let z = (w.ln() - mu) / (sigma * std::f64::consts::SQRT_2);
                0.5 * libm::erfc(-z)
            }
            Self::Deterministic { w: point } => {
                if w >= *point {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Survival `Ḡ_W(w) = 1 - G_W(w)`, computed without cancellation where
    /// the variant allows it.
    pub fn survival(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 1.0;
        }
        match self {
            Self::Exponential { rate } => (-rate * w).exp(),
            Self::Weibull { shape, scale } => (-(w / scale).powf(*shape)).exp(),
            Self::Lognormal { mu, sigma } => {
                let z = (w.ln() - mu) / (sigma * std::f64::consts::SQRT_2);
                0.5 * libm::erfc(z)
            }
            Self::Deterministic { w: point } => {
                if w >= *point {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// The location of the point mass for the deterministic variant.
    pub fn point_mass(&self) -> Option<f64> {
        match self {
            Self::Deterministic { w } => Some(*w),
            _ => None,
        }
    }

    /// Draw one service time. Strictly positive by construction.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential { rate } => standard_exponential(rng) / rate,
            Self::Weibull { shape, scale } => scale * standard_exponential(rng).powf(1.0 / shape),
            Self::Lognormal { mu, sigma } => {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                (mu + sigma * z).exp()
            }
            Self::Deterministic { w } => *w,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            Self::Exponential { rate } => require_positive(*rate, "service.rate"),
            Self::Weibull { shape, scale } => {
                require_positive(*shape, "service.shape")?;
                require_positive(*scale, "service.scale")
            }
            Self::Lognormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(ValidationError::new("service.mu", "must be finite"));
                }
                require_positive(*sigma, "service.sigma")
            }
            Self::Deterministic { w } => require_positive(*w, "service.w"),
        }
    }
}

/// Exp(1) draw that is strictly positive (rejects the measure-zero 0.0).
pub(crate) fn standard_exponential<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return -(-u).ln_1p(); // -ln(1 - u), u in (0, 1)
        }
    }
}

// ---------------------------------------------------------------------------
// Stress law H
// ---------------------------------------------------------------------------

/// One atom of the stress law: stress `eta` carried with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressAtom {
    pub eta: f64,
    pub p: f64,
}

/// Finite discrete law of the per-job stress H.
///
/// Expectations against it are exact weighted sums, so the stress average
/// contributes no numerical error to any closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressDistribution {
    pub atoms: Vec<StressAtom>,
}

/// Probabilities must sum to 1 within this tolerance.
pub const STRESS_PROBABILITY_TOL: f64 = 1e-12;

impl StressDistribution {
    /// A validated distribution from `(eta, p)` pairs.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, ValidationError> {
        let dist = Self {
            atoms: atoms
                .into_iter()
                .map(|(eta, p)| StressAtom { eta, p })
                .collect(),
        };
        dist.validate()?;
        Ok(dist)
    }

    /// The law putting all mass on a single stress value.
    pub fn degenerate(eta: f64) -> Result<Self, ValidationError> {
        Self::new([(eta, 1.0)])
    }

    /// Exact expectation `E[f(H)] = Σ pᵢ f(ηᵢ)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.p * f(a.eta)).sum()
    }

    /// Mean stress `E[H]`.
    pub fn mean(&self) -> f64 {
        self.expect(|eta| eta)
    }

    /// The single stress value, if the law is degenerate.
    pub fn as_degenerate(&self) -> Option<f64> {
        match self.atoms.as_slice() {
            [atom] => Some(atom.eta),
            _ => None,
        }
    }

    /// Draw one stress by inverting the cumulative probabilities.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for atom in &self.atoms {
            acc += atom.p;
            if u < acc {
                return atom.eta;
            }
        }
        // u landed in the rounding slack past the last cumulative.
        self.atoms.last().expect("validated nonempty").eta
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.atoms.is_empty() {
            return Err(ValidationError::new("stress.atoms", "must be nonempty"));
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if !atom.eta.is_finite() || atom.eta < 0.0 {
                return Err(ValidationError::new(
                    format!("stress.atoms[{i}].eta"),
                    format!("stress must be finite and nonnegative, got {}", atom.eta),
                ));
            }
            if !atom.p.is_finite() || atom.p <= 0.0 {
                return Err(ValidationError::new(
                    format!("stress.atoms[{i}].p"),
                    format!("probability must be positive, got {}", atom.p),
                ));
            }
        }
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                if a.eta == b.eta {
                    return Err(ValidationError::new(
                        "stress.atoms",
                        format!("duplicate stress value {}", a.eta),
                    ));
                }
            }
        }
        let total: f64 = self.atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > STRESS_PROBABILITY_TOL {
            return Err(ValidationError::new(
                "stress.atoms",
                format!("probabilities sum to {total}, expected 1"),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Complete description of one server model: baseline hazard, arrival
/// intensity, service-time law, stress law, and the mean reboot time `nu`
/// (only the mean enters the efficiency, so no reboot distribution is kept).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub baseline: BaselineHazard,
    pub intensity: IntensityModel,
    pub service: ServiceTimeModel,
    pub stress: StressDistribution,
    pub reboot_mean_nu: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.baseline.validate()?;
        self.intensity.validate()?;
        self.service.validate()?;
        self.stress.validate()?;
        if !self.reboot_mean_nu.is_finite() || self.reboot_mean_nu < 0.0 {
            return Err(ValidationError::new(
                "reboot.nu",
                format!(
                    "mean reboot time must be finite and nonnegative, got {}",
                    self.reboot_mean_nu
                ),
            ));
        }
        Ok(())
    }

    /// Expected arrival count `m(t) = ∫₀ᵗ λ(s) ds`.
    pub fn cumulative_intensity(&self, t: f64) -> Result<f64, ModelError> {
        require_nonnegative_time(t)?;
        Ok(self.intensity.cumulative(t))
    }

    /// Survival of the idle server, `exp(-R0(t))`.
    pub fn baseline_survival(&self, t: f64) -> Result<f64, ModelError> {
        require_nonnegative_time(t)?;
        Ok(self.baseline.survival(t))
    }
}

// ---------------------------------------------------------------------------
// Shared piecewise-linear helpers
// ---------------------------------------------------------------------------

fn piecewise_linear_rate(knots: &[(f64, f64)], t: f64) -> f64 {
    let last = knots.len() - 1;
    if t >= knots[last].0 {
        return knots[last].1;
    }
    let idx = knots.partition_point(|&(kt, _)| kt <= t);
    // idx >= 1 because the first knot sits at t = 0 and t >= 0.
    let (t0, r0) = knots[idx - 1];
    let (t1, r1) = knots[idx];
    r0 + (r1 - r0) * (t - t0) / (t1 - t0)
}

fn piecewise_linear_cumulative(knots: &[(f64, f64)], t: f64) -> f64 {
    let mut acc = 0.0;
    for window in knots.windows(2) {
        let (t0, r0) = window[0];
        let (t1, r1) = window[1];
        if t <= t1 {
            let r_t = r0 + (r1 - r0) * (t - t0) / (t1 - t0);
            return acc + 0.5 * (r0 + r_t) * (t - t0);
        }
        acc += 0.5 * (r0 + r1) * (t1 - t0);
    }
    let (t_last, r_last) = *knots.last().expect("validated nonempty");
    acc + r_last * (t - t_last)
}

fn validate_rate_knots(knots: &[(f64, f64)], path: &str) -> Result<(), ValidationError> {
    if knots.is_empty() {
        return Err(ValidationError::new(path, "must be nonempty"));
    }
    if knots[0].0 != 0.0 {
        return Err(ValidationError::new(
            format!("{path}[0]"),
            format!("first knot must sit at time 0, got {}", knots[0].0),
        ));
    }
    for (i, &(t, r)) in knots.iter().enumerate() {
        if !t.is_finite() || !r.is_finite() || r < 0.0 {
            return Err(ValidationError::new(
                format!("{path}[{i}]"),
                format!("knot ({t}, {r}) must be finite with a nonnegative rate"),
            ));
        }
        if i > 0 && t <= knots[i - 1].0 {
            return Err(ValidationError::new(
                format!("{path}[{i}]"),
                format!(
                    "knot times must be strictly increasing, got {t} after {}",
                    knots[i - 1].0
                ),
            ));
        }
    }
    Ok(())
}

fn require_positive(x: f64, path: &str) -> Result<(), ValidationError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ValidationError::new(
            path,
            format!("must be finite and positive, got {x}"),
        ))
    }
}

fn require_finite_nonnegative(x: f64, path: &str) -> Result<(), ValidationError> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(ValidationError::new(
            path,
            format!("must be finite and nonnegative, got {x}"),
        ))
    }
}

fn require_strictly_increasing_positive(xs: &[f64], path: &str) -> Result<(), ValidationError> {
    for (i, &x) in xs.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(ValidationError::new(
                format!("{path}[{i}]"),
                format!("must be finite and positive, got {x}"),
            ));
        }
        if i > 0 && x <= xs[i - 1] {
            return Err(ValidationError::new(
                format!("{path}[{i}]"),
                format!("must be strictly increasing, got {x} after {}", xs[i - 1]),
            ));
        }
    }
    Ok(())
}
