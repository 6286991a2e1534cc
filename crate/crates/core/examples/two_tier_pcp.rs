//! Two-tier clustered deployment: tier mix, association shares and the
//! location-aware scheme with a threshold scaled to the total intensity.

use hoskip::experiment::{run_scenario, two_tier_config, Budget, PolicySpec, Threshold};
use hoskip::geometry::{sample_matern_pcp, serving_station, Point, Tier};
use hoskip::policy::PolicyKind;
use rand::Rng;

fn main() -> hoskip::Result<()> {
    let mut cfg = two_tier_config(&Budget::fast());
    let params = cfg.deployment.pcp_params().expect("clustered deployment");
    let d = sample_matern_pcp(&params, cfg.window()?, 11)?;
    let small = d.stations().iter().filter(|b| b.tier == Tier::Small).count();
    println!(
        "intensity {:.0}/km²: {} macro, {small} small cells",
        params.total_intensity(),
        d.len() - small
    );

    let inner = d.window().inner();
    let mut rng = hoskip::rng::StreamKey::new(1).rng();
    let n = 20_000;
    let to_small = (0..n)
        .filter(|_| {
            let p = Point::new(
                rng.random_range(inner.x_min..inner.x_max),
                rng.random_range(inner.y_min..inner.y_max),
            );
            serving_station(p, &d).is_ok_and(|b| b.tier == Tier::Small)
        })
        .count();
    println!("area served by small cells: {:.1}%", 100.0 * to_small as f64 / n as f64);

    cfg.run.replications = 60;
    cfg.policies = vec![
        PolicySpec::new(PolicyKind::BestConnected),
        PolicySpec::new(PolicyKind::LocationAware).location(Threshold::PerLambda(2.56)),
        PolicySpec::new(PolicyKind::LocationAware)
            .location(Threshold::PerLambda(2.56))
            .ic(true),
    ];
    for s in &run_scenario(&cfg)?.schemes {
        let r = s.spectral_efficiency();
        println!(
            "{:<10} R = {:.3} ± {:.3}  H_l = {:.2}/km",
            s.label,
            r.mean,
            r.ci95(),
            s.ho_per_km().mean
        );
    }
    Ok(())
}
