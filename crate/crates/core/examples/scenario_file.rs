//! Runs a scenario described in TOML and writes the usual
//! `out/{scenario}/{scheme}/` files. Same as `hoskip simulate --config`.

use hoskip::experiment::{run_scenario, write_outputs, ScenarioConfig};

const SCENARIO: &str = r#"
name = "example"

[deployment]
model = "ppp"
lambda = 50.0

[window]
inner_side = 3.0
guard = 1.0

[run]
replications = 40
master_seed = 42
velocities = [0.0, 50.0, 100.0, 150.0]

[[policy]]
kind = "best_connected"

[[policy]]
kind = "hybrid"
location_threshold = { per_sqrt_lambda = 0.43 }
size_threshold = { per_lambda = 0.38 }
ic = true

[[policy]]
kind = "alternating"
ic = true
comp = true
"#;

fn main() -> hoskip::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ScenarioConfig::load(path.as_ref())?,
        None => ScenarioConfig::from_toml(SCENARIO)?,
    };
    let result = run_scenario(&cfg)?;
    let dir = write_outputs(&result, "out".as_ref(), &Default::default())?;
    for s in &result.schemes {
        for r in result.reports(s)? {
            println!(
                "{:<14} v = {:>5} km/h  T = {:.3e} nats/s",
                r.scheme, r.velocity, r.throughput.mean
            );
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}
