//! Samples a PPP deployment and prints its stations as CSV.
//!
//! `cargo run --example ppp_deployment -- 50 7 > stations.csv`

use hoskip::geometry::{sample_ppp, Window};

fn main() -> hoskip::Result<()> {
    let mut args = std::env::args().skip(1);
    let lambda: f64 = args.next().map_or(Ok(50.0), |a| a.parse()).expect("lambda");
    let seed: u64 = args.next().map_or(Ok(7), |a| a.parse()).expect("seed");

    let window = Window::around_square(1.0, 5.0 / lambda.sqrt())?;
    let d = sample_ppp(lambda, window, seed)?;
    eprintln!(
        "{} stations in {:.2} km², {} in the inner square",
        d.len(),
        window.area(),
        d.inner_count()
    );
    d.write_csv(std::io::stdout().lock())?;
    Ok(())
}
