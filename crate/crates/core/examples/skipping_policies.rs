//! Applies every skipping policy to one path and prints the resulting
//! service schedules.

use hoskip::geometry::{sample_ppp, Point, Window};
use hoskip::mobility::{extract_visits, Trajectory, WalkParams};
use hoskip::policy::{schedule_for, PolicyConfig};

fn main() -> hoskip::Result<()> {
    let lambda = 50.0;
    let d = sample_ppp(lambda, Window::around_square(2.0, 0.7)?, 3)?;
    let t = Trajectory::between(Point::new(0.2, 1.0), Point::new(1.8, 1.2), 60.0)?;
    let walk = WalkParams::for_intensity(lambda);
    let visits = extract_visits(&t, &d, walk.step, walk.tol)?;
    println!("{} visits over {:.3} km", visits.len(), t.length());
    visits.write_csv(std::io::stdout().lock())?;

    let l = 0.45 / lambda.sqrt();
    let s = 0.8 / lambda;
    let policies = [
        ("best connected", PolicyConfig::best_connected()),
        ("alternating", PolicyConfig::alternating(false, false)),
        ("location aware", PolicyConfig::location_aware(l, false, false)),
        ("size aware", PolicyConfig::size_aware(s, false, false)),
        ("hybrid + IC", PolicyConfig::hybrid(l, 0.38 / lambda, true, false)),
        ("hybrid + CoMP", PolicyConfig::hybrid(l, 0.38 / lambda, true, true)),
    ];
    for (name, p) in policies {
        let sched = schedule_for(&visits, &d, &p)?;
        println!(
            "\n{name}: {} handovers, {} skips, blackout {:.3} km",
            sched.ho_count,
            sched.skip_count,
            sched.blackout_length()
        );
        sched.write_csv(std::io::stdout().lock())?;
    }
    Ok(())
}
