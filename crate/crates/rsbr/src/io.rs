//! Scenario documents and result serialization.
//!
//! A scenario is a single JSON document with one section per model
//! component plus optional numeric and simulation defaults:
//!
//! ```json
//! {
//!   "baseline":  { "form": "constant", "rate": 0.01 },
//!   "intensity": { "form": "constant", "rate": 2.0 },
//!   "service":   { "form": "exponential", "rate": 1.0 },
//!   "stress":    { "atoms": [ { "eta": 0.05, "p": 1.0 } ] },
//!   "reboot":    { "nu": 1.0 },
//!   "numerics":  { "rel_tol": 1e-9 },
//!   "simulation": { "n_replicas": 100000, "master_seed": 42, "horizon": 20.0 }
//! }
//! ```
//!
//! Every model invariant is re-checked at parse time and reported with its
//! field path. CSV output carries 17 significant digits so values round-trip
//! bit-exactly; identical inputs always produce identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{Curve, EfficiencyReport};
use crate::model::{
    BaselineHazard, IntensityModel, Scenario, ServiceTimeModel, StressDistribution, ValidationError,
};
use crate::quad::QuadratureSettings;
use crate::sim::{EfficiencyEstimate, EmpiricalCurve};

/// The on-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub baseline: BaselineHazard,
    pub intensity: IntensityModel,
    pub service: ServiceTimeModel,
    pub stress: StressDistribution,
    pub reboot: RebootSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerics: Option<QuadratureSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationDefaults>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RebootSection {
    pub nu: f64,
}

/// Optional simulation defaults carried by a scenario file; command-line
/// flags override them.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_replicas: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

/// A parsed and validated scenario with its effective settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScenario {
    pub scenario: Scenario,
    pub numerics: QuadratureSettings,
    pub simulation: SimulationDefaults,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<ParsedScenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let scenario = Scenario {
        baseline: file.baseline,
        intensity: file.intensity,
        service: file.service,
        stress: file.stress,
        reboot_mean_nu: file.reboot.nu,
    };
    scenario.validate()?;
    let numerics = file.numerics.unwrap_or_default();
    numerics.validate()?;
    let simulation = file.simulation.unwrap_or_default();
    if let Some(h) = simulation.horizon {
        if !h.is_finite() || h <= 0.0 {
            return Err(ValidationError::new(
                "simulation.horizon",
                format!("must be finite and positive, got {h}"),
            )
            .into());
        }
    }
    Ok(ParsedScenario {
        scenario,
        numerics,
        simulation,
    })
}

/// Serialize a scenario (plus optional sections) back to its document form.
/// Output is deterministic; `parse_scenario(serialize_scenario(x))` is
/// identity.
pub fn serialize_scenario(parsed: &ParsedScenario) -> String {
    let file = ScenarioFile {
        baseline: parsed.scenario.baseline.clone(),
        intensity: parsed.scenario.intensity.clone(),
        service: parsed.scenario.service.clone(),
        stress: parsed.scenario.stress.clone(),
        reboot: RebootSection {
            nu: parsed.scenario.reboot_mean_nu,
        },
        numerics: Some(parsed.numerics),
        simulation: Some(parsed.simulation),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("scenario serializes");
    text.push('\n');
    text
}

/// Format with 17 significant digits, enough for `f64` round-trips.
fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t,value` rows of a closed-form curve.
pub fn write_curve_csv(curve: &Curve, mut writer: impl Write) -> std::io::Result<()> {
    writeln!(writer, "t,value")?;
    for (t, v) in curve.grid.iter().zip(&curve.values) {
        writeln!(writer, "{},{}", full_precision(*t), full_precision(*v))?;
    }
    Ok(())
}

/// `t,estimate,ci_lo,ci_hi` rows of an empirical curve; bounds are clipped
/// to `[0, 1]`.
pub fn write_empirical_curve_csv(
    curve: &EmpiricalCurve,
    mut writer: impl Write,
) -> std::io::Result<()> {
    writeln!(writer, "t,estimate,ci_lo,ci_hi")?;
    for i in 0..curve.grid.len() {
        let (lo, hi) = curve.ci_bounds(i);
        writeln!(
            writer,
            "{},{},{},{}",
            full_precision(curve.grid[i]),
            full_precision(curve.estimates[i]),
            full_precision(lo),
            full_precision(hi)
        )?;
    }
    Ok(())
}

#[derive(Debug, Error)]
#[error("failed writing {path}: {source}")]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Write any rendered artifact to a file, surfacing the destination path on
/// failure.
pub fn write_bytes_to_path(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    std::fs::write(path, bytes).map_err(|source| OutputError {
        path: path.to_path_buf(),
        source,
    })
}

/// How an efficiency number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeMethod {
    ClosedForm,
    Simulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiBounds {
    pub lo: f64,
    pub hi: f64,
    pub z: f64,
}

/// The JSON result envelope for efficiency reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEnvelope {
    pub psi: f64,
    pub mean_cycle_length: f64,
    pub expected_jobs_per_cycle: f64,
    pub nu: f64,
    pub method: EnvelopeMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<CiBounds>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub diverged: bool,
}

impl EfficiencyEnvelope {
    pub fn from_report(report: &EfficiencyReport) -> Self {
        Self {
            psi: report.psi,
            mean_cycle_length: report.mean_cycle_length,
            expected_jobs_per_cycle: report.expected_jobs_per_cycle,
            nu: report.reboot_mean_nu,
            method: EnvelopeMethod::ClosedForm,
            ci: None,
            diverged: report.diverged,
        }
    }

    pub fn from_estimate(estimate: &EfficiencyEstimate, z: f64) -> Self {
        let (lo, hi) = estimate.ci(z);
        Self {
            psi: estimate.psi_hat,
            mean_cycle_length: estimate.mean_cycle_length,
            expected_jobs_per_cycle: estimate.mean_completed_jobs,
            nu: estimate.reboot_mean_nu,
            method: EnvelopeMethod::Simulation,
            ci: Some(CiBounds { lo, hi, z }),
            diverged: false,
        }
    }
}
