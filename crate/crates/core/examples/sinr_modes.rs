//! SINR of one user under best-connected service, a blackout with and
//! without interference cancellation, and joint transmission.

use hoskip::geometry::{BaseStation, Deployment, ModelTag, Point, Tier, Window};
use hoskip::radio::{sinr, ChannelParams, FixedFading, ServiceMode};
use num_complex::Complex64;

fn station(id: usize, x: f64, y: f64) -> BaseStation {
    BaseStation {
        id,
        position: Point::new(x, y),
        tier: Tier::Macro,
        power: 1.0,
        path_loss_exp: 4.0,
    }
}

fn main() -> hoskip::Result<()> {
    let window = Window::new(-4.0, 4.0, -4.0, 4.0, 1.0)?;
    // serving behind, skipped cell at the user, target ahead, one far interferer
    let stations = vec![
        station(0, -1.0, 0.0),
        station(1, 0.0, 0.5),
        station(2, 2.0, 0.0),
        station(3, 0.0, -3.0),
    ];
    let d = Deployment::new(stations, window, ModelTag::Custom, 0)?;
    let user = Point::new(0.0, 0.0);
    let ch = ChannelParams::default();
    // unit power gains; CoMP branches add in phase
    let mut fading = FixedFading::uniform(1.0, Complex64::new(1.0, 0.0));

    let modes = [
        ("best connected", ServiceMode::BestConnected { serving: 1 }),
        ("blackout", ServiceMode::Blackout { serving: 0, target: 2, skipped: 1, ic: false }),
        ("blackout + IC", ServiceMode::Blackout { serving: 0, target: 2, skipped: 1, ic: true }),
        ("CoMP", ServiceMode::Comp { serving: 0, target: 2, skipped: 1, ic: false }),
        ("CoMP + IC", ServiceMode::Comp { serving: 0, target: 2, skipped: 1, ic: true }),
    ];
    for (name, mode) in modes {
        let s = sinr(user, &mode, &d, &ch, &mut fading)?;
        println!("{name:<15} {:>8.3} dB", s.db());
    }
    Ok(())
}
