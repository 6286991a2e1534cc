//! Reruns the single-tier comparison (calibration included) at a reduced
//! budget and prints each check. `hoskip reproduce --id table2` is the
//! full-budget equivalent.

use hoskip::experiment::{single_tier_study, Budget};

fn main() -> hoskip::Result<()> {
    let study = single_tier_study(&Budget::fast())?;
    for c in &study.calibrations {
        let unit = if c.parameter == "size_threshold" { "km²" } else { "km" };
        println!("{}: {} = {:.4} {unit}", c.scheme, c.parameter, c.threshold);
    }
    for c in study.table2_checks().iter().chain(&study.fig4_checks()) {
        println!("{c}");
    }
    Ok(())
}
