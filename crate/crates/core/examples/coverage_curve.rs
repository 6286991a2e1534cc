//! Best-connected coverage along random paths against the closed-form PPP
//! curve.

use hoskip::experiment::{ppp_coverage, run_scenario, single_tier_config, Budget, PolicySpec};
use hoskip::policy::PolicyKind;

fn main() -> hoskip::Result<()> {
    let mut cfg = single_tier_config(&Budget::fast());
    cfg.run.replications = 100;
    cfg.run.velocities.clear();
    cfg.run.coverage_thresholds_db = (-10..=20).step_by(5).map(f64::from).collect();
    cfg.policies = vec![PolicySpec::new(PolicyKind::BestConnected)];

    let result = run_scenario(&cfg)?;
    let curve = result.schemes[0].coverage(&cfg.coverage_thresholds());
    println!("T [dB]  simulated        closed form");
    for i in 0..curve.thresholds.len() {
        println!(
            "{:>6}  {:.4} ± {:.4}  {:.4}",
            curve.thresholds_db[i],
            curve.probabilities[i],
            curve.ci_halfwidth[i],
            ppp_coverage(curve.thresholds[i], 4.0)
        );
    }
    Ok(())
}
