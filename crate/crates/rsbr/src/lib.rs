//! Reliability analysis for a server under a random workload.
//!
//! A server processes jobs that arrive by a nonhomogeneous Poisson process.
//! Each in-flight job adds a random stress to the server's breakdown rate
//! until the job completes, so the instantaneous failure rate is
//!
//! ```text
//! B(t) = r0(t) + sum over active jobs j of H_j
//! ```
//!
//! where `r0` is the baseline hazard and the stresses `H_j` are i.i.d. draws
//! from a finite discrete law. This crate computes the closed-form survival
//! function, hazard rate, and long-run efficiency (completed jobs per unit
//! time across failure/reboot cycles) of such a server, and cross-validates
//! every closed form against a direct Monte Carlo simulation of the
//! underlying stochastic process.
//!
//! The main entry points:
//!
//! - [`model`] — scenario primitives: baseline hazard, arrival intensity,
//!   service-time law, stress law.
//! - [`analytic`] — closed-form survival/hazard/efficiency via adaptive
//!   quadrature ([`quad`]).
//! - [`sim`] — reproducible Monte Carlo: workload paths, path-conditional
//!   failure times, renewal cycles, and statistical validation.
//! - [`io`] — scenario files (JSON) and CSV/JSON result output.
//! - [`cli`] — the `rsbr` command-line tool built on all of the above.
//!
//! See the crate examples for one runnable program per capability.

pub mod analytic;
pub mod cli;
pub mod io;
pub mod model;
pub mod quad;
pub mod sim;
pub mod stats;

pub use analytic::{ClosedForm, Curve, CurveKind, EfficiencyReport};
pub use model::{BaselineHazard, IntensityModel, Scenario, ServiceTimeModel, StressDistribution};
pub use quad::QuadratureSettings;
pub use sim::{EmpiricalCurve, RngPolicy, WorkloadPath};
