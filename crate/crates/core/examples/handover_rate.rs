//! Counts cell-boundary crossings along straight paths and compares them
//! with `(4 / pi) sqrt(lambda)` per km.

use hoskip::geometry::{sample_ppp, Point, Window};
use hoskip::metrics::analytic_ho_rate;
use hoskip::mobility::{extract_visits, Trajectory, WalkParams};

fn main() -> hoskip::Result<()> {
    let window = Window::around_square(6.0, 1.0)?;
    println!("lambda  simulated/km  analytic/km");
    for lambda in [10.0, 25.0, 50.0, 100.0] {
        let walk = WalkParams::for_intensity(lambda);
        let (mut n, mut km) = (0, 0.0);
        for seed in 0..20 {
            let d = sample_ppp(lambda, window, seed)?;
            for y in [1.0, 3.0, 5.0] {
                let t = Trajectory::between(Point::new(0.5, y), Point::new(5.5, y), 60.0)?;
                n += extract_visits(&t, &d, walk.step, walk.tol)?.crossings();
                km += t.length();
            }
        }
        // the analytic rate is per second at v km/h
        let per_km = analytic_ho_rate(lambda, 3600.0);
        println!("{lambda:>6}  {:>12.3}  {per_km:>11.3}", n as f64 / km);
    }
    Ok(())
}
