//! Scenario documents: parsing, validation diagnostics, and round-tripping.
//!
//! Run with: `cargo run --example scenario_files`

use rsbr::io::{parse_scenario, serialize_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let document = r#"{
        "baseline":  { "form": "piecewise_constant",
                       "breakpoints": [5.0, 15.0],
                       "rates": [0.005, 0.02, 0.05] },
        "intensity": { "form": "sinusoidal", "base": 1.5, "amplitude": 1.5, "period": 8.0 },
        "service":   { "form": "lognormal", "mu": 0.0, "sigma": 0.5 },
        "stress":    { "atoms": [ { "eta": 0.01, "p": 0.4 },
                                  { "eta": 0.05, "p": 0.4 },
                                  { "eta": 0.2,  "p": 0.2 } ] },
        "reboot":    { "nu": 1.0 },
        "numerics":  { "rel_tol": 1e-10 },
        "simulation": { "n_replicas": 50000, "master_seed": 7, "horizon": 20.0 }
    }"#;

    let parsed = parse_scenario(document)?;
    println!(
        "parsed OK: mean stress E[H] = {}",
        parsed.scenario.stress.mean()
    );
    println!("effective rel_tol = {:e}", parsed.numerics.rel_tol);
    println!("round-tripped document:\n{}", serialize_scenario(&parsed));

    // Validation failures name the offending field.
    let broken = document.replace("\"p\": 0.2", "\"p\": 0.17");
    match parse_scenario(&broken) {
        Err(e) => println!("diagnostic for a broken file: {e}"),
        Ok(_) => unreachable!("probabilities no longer sum to one"),
    }
    Ok(())
}
