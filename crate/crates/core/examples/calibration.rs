//! Tunes the location-aware distance threshold so the scheme reaches a
//! target spectral efficiency, then checks it on fresh replications.

use hoskip::experiment::{
    calibrate_thresholds, run_scenario, single_tier_config, Budget, CalibrationRequest, CalibrationTarget,
    PolicySpec,
};
use hoskip::policy::PolicyKind;

fn main() -> hoskip::Result<()> {
    let mut cfg = single_tier_config(&Budget::fast());
    cfg.run.replications = 60;
    let target = 1.40;
    let request = CalibrationRequest::new(
        PolicySpec::new(PolicyKind::LocationAware),
        CalibrationTarget::SpectralEfficiency(target),
    );
    let cal = calibrate_thresholds(&cfg, &request)?;
    println!("{}", serde_json::to_string_pretty(&cal)?);

    cfg.policies = vec![cal.apply(PolicySpec::new(PolicyKind::LocationAware))];
    cfg.run.velocities.clear();
    let r = run_scenario(&cfg)?.schemes[0].spectral_efficiency();
    println!("held-out R = {:.3} ± {:.3} (target {target})", r.mean, r.ci95());
    Ok(())
}
