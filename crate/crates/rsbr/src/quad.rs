//! Adaptive numerical integration.
//!
//! A 15-point Gauss–Kronrod pair drives panel subdivision: the worst panel
//! (largest error estimate) is bisected until the summed error estimate
//! drops below `max(rel_tol · |result|, abs_tol)` or the subdivision budget
//! runs out. Improper integrals over `[0, ∞)` are handled by probing
//! fixed-length windows until one contributes less than `tail_abs_tol`;
//! every integrand this crate feeds it decays at least exponentially, so
//! window probing is safe there.
//!
//! Everything here is a pure function of its inputs: identical inputs and
//! settings give bit-identical results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ValidationError;

/// Tolerances and budgets for the adaptive engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    /// Target relative error of a finite integral.
    pub rel_tol: f64,
    /// Target absolute error of a finite integral.
    pub abs_tol: f64,
    /// Maximum number of panel bisections (and of tail windows).
    pub max_subdivisions: usize,
    /// A tail window contributing less than this ends the improper integral.
    pub tail_abs_tol: f64,
    /// Length of each tail probe window.
    pub tail_window: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail_abs_tol: 1e-10,
            tail_window: 50.0,
        }
    }
}

impl QuadratureSettings {
    /// The same budget with the finite-integral tolerances tightened by
    /// `factor`, used for inner integrals nested inside an adaptive outer
    /// one so the outer error estimate stays honest.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        for (value, path) in [
            (self.rel_tol, "numerics.rel_tol"),
            (self.abs_tol, "numerics.abs_tol"),
            (self.tail_abs_tol, "numerics.tail_abs_tol"),
            (self.tail_window, "numerics.tail_window"),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ValidationError::new(
                    path,
                    format!("must be finite and positive, got {value}"),
                ));
            }
        }
        if self.max_subdivisions < 10 {
            return Err(ValidationError::new(
                "numerics.max_subdivisions",
                format!("must be at least 10, got {}", self.max_subdivisions),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("integrand returned a non-finite value at x = {abscissa}")]
    NonFiniteEvaluation { abscissa: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error(
        "subdivision budget exhausted: best estimate {estimate} with error bound {error_bound}"
    )]
    ConvergenceFailed { estimate: f64, error_bound: f64 },
    #[error(
        "no decay after {windows} tail windows (partial sum {partial}); integral appears divergent"
    )]
    Divergent { windows: usize, partial: f64 },
}

/// `∫ₐᵇ f(x) dx` with the summed panel error bounded by
/// `max(rel_tol · |result|, abs_tol)`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<f64, QuadratureError> {
    if a > b || a.is_nan() || b.is_nan() {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }

    let mut panels = Vec::with_capacity(64);
    panels.push(Panel::evaluate(&f, a, b)?);

    let mut splits = 0usize;
    loop {
        let total: f64 = panels.iter().map(|p| p.estimate).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= (settings.rel_tol * total.abs()).max(settings.abs_tol) {
            return Ok(total);
        }
        if splits >= settings.max_subdivisions {
            return Err(QuadratureError::ConvergenceFailed {
                estimate: total,
                error_bound: err,
            });
        }

        // Bisect the worst panel; first maximum wins, keeping the walk
        // deterministic.
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // The panel is at floating-point resolution; its error estimate
            // will not improve further.
            return Err(QuadratureError::ConvergenceFailed {
                estimate: panels.iter().map(|p| p.estimate).sum(),
                error_bound: err,
            });
        }
        panels[worst] = Panel::evaluate(&f, a, mid)?;
        panels.push(Panel::evaluate(&f, mid, b)?);
        splits += 1;
    }
}

/// `∫ₐᵇ f(x) dx` where `f` is known to jump or kink at `breakpoints`:
/// integrates each smooth piece separately so the panel rule never straddles
/// a break. Breakpoints outside `(a, b)` are ignored; they need not be
/// sorted or distinct.
pub fn integrate_with_breakpoints(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    settings: &QuadratureSettings,
) -> Result<f64, QuadratureError> {
    if a > b || a.is_nan() || b.is_nan() {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    cuts.sort_unstable_by(|x, y| x.partial_cmp(y).expect("NaN breakpoint"));
    cuts.dedup();

    let mut total = 0.0;
    let mut lo = a;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        total += integrate(&f, lo, hi, settings)?;
        lo = hi;
    }
    Ok(total)
}

/// `∫₀^∞ f(x) dx` for nonnegative, eventually decreasing `f`: sums windows
/// `[k·w, (k+1)·w]` until one contributes less than `tail_abs_tol`.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    settings: &QuadratureSettings,
) -> Result<f64, QuadratureError> {
    let w = settings.tail_window;
    let mut acc = 0.0;
    for k in 0..settings.max_subdivisions {
        let piece = integrate(&f, k as f64 * w, (k + 1) as f64 * w, settings)?;
        acc += piece;
        if piece.abs() < settings.tail_abs_tol {
            return Ok(acc);
        }
    }
    Err(QuadratureError::Divergent {
        windows: settings.max_subdivisions,
        partial: acc,
    })
}

struct Panel {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

impl Panel {
    fn evaluate(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<Self, QuadratureError> {
        let (estimate, error) = gauss_kronrod_15(f, a, b)?;
        Ok(Self {
            a,
            b,
            estimate,
            error,
        })
    }
}

// 15-point Kronrod abscissae on [0, 1] (symmetric), with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss–Kronrod 15/7 evaluation of `∫ₐᵇ f`, returning the Kronrod
/// estimate and a QUADPACK-style rescaled error estimate.
fn gauss_kronrod_15(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
) -> Result<(f64, f64), QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let eval = |x: f64| -> Result<f64, QuadratureError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFiniteEvaluation { abscissa: x })
        }
    };

    let f_center = eval(center)?;
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();
    let mut values = [0.0f64; 15];
    values[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f_lo = eval(center - x)?;
        let f_hi = eval(center + x)?;
        values[j] = f_lo;
        values[14 - j] = f_hi;
        let sum = f_lo + f_hi;
        kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f_lo.abs() + f_hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }

    let estimate = kronrod * half;
    let res_abs = res_abs * half.abs();

    // The raw Kronrod/Gauss difference is a conservative error estimate; it
    // over-reports on smooth panels but stays honest at integrable
    // singularities, where the usual sharpened estimate can undershoot by
    // orders of magnitude. Floor it at attainable roundoff.
    let mut err = ((kronrod - gauss) * half).abs();
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    Ok((estimate, err))
}
