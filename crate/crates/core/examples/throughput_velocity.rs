//! Throughput against velocity for best-connected and skipping schemes,
//! with the velocities where skipping starts to pay off.

use hoskip::experiment::{crossover, run_scenario, single_tier_config, Budget, OperatingPoint, PolicySpec, Threshold};
use hoskip::policy::PolicyKind;

fn main() -> hoskip::Result<()> {
    let mut cfg = single_tier_config(&Budget::fast());
    cfg.run.replications = 60;
    cfg.policies = vec![
        PolicySpec::new(PolicyKind::BestConnected),
        PolicySpec::new(PolicyKind::LocationAware)
            .location(Threshold::PerSqrtLambda(0.45))
            .ic(true),
        PolicySpec::new(PolicyKind::SizeAware).size(Threshold::PerLambda(0.8)).ic(true),
        PolicySpec::new(PolicyKind::Alternating).ic(true),
    ];
    let result = run_scenario(&cfg)?;

    print!("{:>6}", "v");
    for s in &result.schemes {
        print!("{:>12}", s.label);
    }
    println!("   [Mnats/s]");
    for v in (0..=300).step_by(30) {
        print!("{v:>6}");
        for s in &result.schemes {
            let r = s.report(v as f64, cfg.run.ho_delay, cfg.run.bandwidth)?;
            print!("{:>12.3}", r.throughput.mean / 1e6);
        }
        println!();
    }

    let op = |i: usize| {
        let (r, h) = result.schemes[i].operating_point();
        OperatingPoint::new(r, h)
    };
    for i in 1..result.schemes.len() {
        match crossover(&op(i), &op(0), cfg.run.ho_delay, (0.0, 1000.0)) {
            Some(v) => println!("{} overtakes bc at {v:.1} km/h", result.schemes[i].label),
            None => println!("{} never overtakes bc", result.schemes[i].label),
        }
    }
    Ok(())
}
