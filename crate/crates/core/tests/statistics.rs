use hoskip::experiment::{run_scenario, single_tier_config, Budget, PolicySpec};
use hoskip::geometry::{
    cell_area, sample_matern_pcp, sample_ppp, serving_station, BaseStation, Deployment, ModelTag, PcpParams, Point,
    Tier, Window,
};
use hoskip::metrics::Moments;
use hoskip::mobility::{extract_visits, Trajectory, WalkParams};
use hoskip::policy::{decide_skips, PolicyConfig, PolicyKind};
use hoskip::radio::{sinr, sinr_best_connected, ChannelParams, FadingSource, RayleighFading, ServiceMode};
use hoskip::rng::StreamKey;

fn pcp(lambda_p: f64, lambda_c: f64, radius: f64) -> PcpParams {
    PcpParams {
        lambda_p,
        lambda_c,
        radius,
        p1: 1.0,
        p2: 0.1,
        eta1: 4.0,
        eta2: 4.0,
    }
}

fn inner_points(d: &Deployment) -> Vec<Point> {
    let inner = d.window().inner();
    d.stations().iter().map(|b| b.position).filter(|&p| inner.contains(p)).collect()
}

/// Ripley's K at `r` with the guard band as edge correction.
fn ripley_k(d: &Deployment, r: f64) -> f64 {
    let inner = d.window().inner();
    let all: Vec<Point> = d.stations().iter().map(|b| b.position).collect();
    let centers = inner_points(d);
    let pairs: usize = centers
        .iter()
        .map(|c| all.iter().filter(|q| q.distance_sq(*c) <= r * r).count() - 1)
        .sum();
    let lambda = centers.len() as f64 / inner.area();
    pairs as f64 / centers.len() as f64 / lambda
}

/// Regularized lower incomplete gamma by its power series.
fn gamma_cdf(a: f64, x: f64) -> f64 {
    // Stirling series for ln Gamma(a + 1)
    let z = a + 1.0;
    let ln_gamma = (z - 0.5) * z.ln() - z + 0.5 * std::f64::consts::TAU.ln() + 1.0 / (12.0 * z)
        - 1.0 / (360.0 * z.powi(3))
        + 1.0 / (1260.0 * z.powi(5));
    let (mut term, mut sum) = (1.0, 1.0);
    for n in 1..200 {
        term *= x / (a + n as f64);
        sum += term;
    }
    (a * x.ln() - x - ln_gamma).exp() * sum
}

#[test]
fn ppp_count_is_poisson() {
    let w = Window::around_square(29.8, 0.1).unwrap();
    let expect = 50.0 * w.area();
    let counts: Moments = (0..1000u64).map(|s| sample_ppp(50.0, w, s).unwrap().len() as f64).collect();
    assert!((counts.mean() / expect - 1.0).abs() < 0.01, "{}", counts.mean());
    assert!((counts.variance() / expect - 1.0).abs() < 0.15, "{}", counts.variance());
}

#[test]
fn pcp_intensity_and_degenerate_clusters() {
    let w = Window::around_square(4.0, 1.0).unwrap();
    let inner = w.inner().area();
    let p = pcp(4.0, 12.0, 0.6);
    let m: Moments = (0..300u64)
        .map(|s| sample_matern_pcp(&p, w, s).unwrap().inner_count() as f64 / inner)
        .collect();
    assert!((m.mean() / 52.0 - 1.0).abs() < 0.02, "{}", m.mean());

    let d = sample_matern_pcp(&pcp(4.0, 0.0, 0.6), w, 3).unwrap();
    assert!(d.stations().iter().all(|b| b.tier == Tier::Macro));
    let m: Moments = (0..300u64)
        .map(|s| sample_matern_pcp(&pcp(4.0, 0.0, 0.6), w, s).unwrap().inner_count() as f64 / inner)
        .collect();
    assert!((m.mean() / 4.0 - 1.0).abs() < 0.05, "{}", m.mean());
}

#[test]
fn tighter_clusters_raise_short_range_k() {
    let w = Window::around_square(4.0, 1.0).unwrap();
    let r = 0.1;
    let k = |params: PcpParams| -> f64 {
        (0..20u64)
            .map(|s| ripley_k(&sample_matern_pcp(&params, w, s).unwrap(), r))
            .sum::<f64>()
            / 20.0
    };
    let tight = k(pcp(4.0, 12.0, 0.2));
    let loose = k(pcp(4.0, 12.0, 2.0));
    let poisson: f64 = (0..20u64)
        .map(|s| ripley_k(&sample_ppp(52.0, w, s).unwrap(), r))
        .sum::<f64>()
        / 20.0;
    let csr = std::f64::consts::PI * r * r;
    assert!(tight > 2.0 * loose, "{tight} vs {loose}");
    assert!(loose > csr);
    assert!((poisson / csr - 1.0).abs() < 0.1, "{poisson} vs {csr}");
}

#[test]
fn hand_evaluated_two_tier_association() {
    let w = Window::new(-5.0, 5.0, -5.0, 5.0, 1.0).unwrap();
    let stations = vec![
        BaseStation {
            id: 0,
            position: Point::new(1.0, 0.0),
            tier: Tier::Macro,
            power: 1.0,
            path_loss_exp: 4.0,
        },
        BaseStation {
            id: 1,
            position: Point::new(0.0, 0.85),
            tier: Tier::Small,
            power: 0.5,
            path_loss_exp: 4.0,
        },
    ];
    let d = Deployment::new(stations, w, ModelTag::Custom, 0).unwrap();
    assert_eq!(serving_station(Point::new(0.0, 0.0), &d).unwrap().id, 0);
}

#[test]
fn voronoi_areas_average_to_inverse_intensity() {
    let w = Window::around_square(3.0, 0.6).unwrap();
    let mut areas = Moments::default();
    let mut coverage = Moments::default();
    for seed in 0..14u64 {
        let d = sample_ppp(50.0, w, seed).unwrap();
        let inner = d.window().inner();
        let mut total = 0.0;
        for b in d.stations().iter().filter(|b| inner.contains(b.position)) {
            let a = cell_area(b, &d, 4000).unwrap();
            assert!(!a.unbounded);
            areas.push(a.area);
            total += a.area;
        }
        coverage.push(total / inner.area());
    }
    assert!((areas.mean() * 50.0 - 1.0).abs() < 0.02, "{}", areas.mean());
    assert!((coverage.mean() - 1.0).abs() < 0.03, "{}", coverage.mean());
}

#[test]
fn size_aware_skips_small_cells() {
    let lambda = 50.0;
    let w = Window::around_square(3.0, 0.6).unwrap();
    let s = 1.28 / lambda;
    let mut small = Moments::default();
    let mut skipped = (0usize, 0usize);
    for seed in 0..12u64 {
        let d = sample_ppp(lambda, w, seed).unwrap();
        let inner = d.window().inner();
        for b in d.stations().iter().filter(|b| inner.contains(b.position)) {
            small.push(f64::from(cell_area(b, &d, 4000).unwrap().area < s));
        }
        for y in [0.5, 1.5, 2.5] {
            let t = Trajectory::between(Point::new(0.1, y), Point::new(2.9, y), 0.0).unwrap();
            let wp = WalkParams::for_intensity(lambda);
            let v = extract_visits(&t, &d, wp.step, wp.tol).unwrap();
            let flags = decide_skips(&v, &d, &PolicyConfig::size_aware(s, false, false)).unwrap();
            // first and last visits are never eligible
            skipped.0 += flags.iter().filter(|&&f| f).count();
            skipped.1 += v.len().saturating_sub(2);
        }
    }
    // typical cell area is close to Gamma(3.575) scaled to mean 1/lambda
    let oracle = gamma_cdf(3.575, 3.575 * 1.28);
    assert!((small.mean() - oracle).abs() < 0.03, "{} vs {oracle}", small.mean());
    // crossed cells are size-biased, so fewer of them are small
    let along = skipped.0 as f64 / skipped.1 as f64;
    assert!((along - 0.65).abs() < 0.04, "{along}");
}

#[test]
fn fading_gains_have_unit_mean() {
    let mut f = RayleighFading(StreamKey::new(11).rng());
    let n = 1_000_000;
    let h: Moments = (0..n).map(|_| f.power_gain(0)).collect();
    let g: Moments = (0..n).map(|_| f.comp_gain(0).norm_sqr()).collect();
    assert!((h.mean() - 1.0).abs() < 0.005, "{}", h.mean());
    assert!((g.mean() - 1.0).abs() < 0.005, "{}", g.mean());
    // Exp(1) has unit variance
    assert!((h.variance() - 1.0).abs() < 0.02);
}

#[test]
fn comp_numerator_adds_powers() {
    // serving and target both at distance 1.2 from the user, nothing else
    let w = Window::new(-5.0, 5.0, -5.0, 5.0, 1.0).unwrap();
    let at = |id: usize, x: f64, y: f64| BaseStation {
        id,
        position: Point::new(x, y),
        tier: Tier::Macro,
        power: 1.0,
        path_loss_exp: 4.0,
    };
    let d = Deployment::new(
        vec![at(0, -1.2, 0.0), at(1, 1.2, 0.0), at(2, 0.0, 3.0)],
        w,
        ModelTag::Custom,
        0,
    )
    .unwrap();
    let mode = ServiceMode::Comp {
        serving: 0,
        target: 1,
        skipped: 2,
        ic: true,
    };
    let noise = 1.0;
    let ch = ChannelParams::new(noise).unwrap();
    let mut f = RayleighFading(StreamKey::new(5).rng());
    let m: Moments = (0..1_000_000)
        .map(|_| sinr(Point::new(0.0, 0.0), &mode, &d, &ch, &mut f).unwrap().value * noise)
        .collect();
    let expect = 2.0 * 1.2f64.powi(-4);
    assert!((m.mean() / expect - 1.0).abs() < 0.005, "{} vs {expect}", m.mean());
}

#[test]
fn noise_limited_sinr_is_exponential() {
    let d = sample_ppp(50.0, Window::around_square(2.0, 0.5).unwrap(), 8).unwrap();
    let p = Point::new(1.0, 1.0);
    let bs = serving_station(p, &d).unwrap();
    let noise = 1e12;
    let mean = bs.rss_at(p) / noise;
    let ch = ChannelParams::new(noise).unwrap();
    let mut f = RayleighFading(StreamKey::new(2).rng());
    let n = 200_000;
    let xs: Vec<f64> = (0..n)
        .map(|_| sinr_best_connected(p, &d, &ch, &mut f).unwrap().value / mean)
        .collect();
    for t in [0.25, 1.0, 2.0] {
        let tail = xs.iter().filter(|&&x| x > t).count() as f64 / n as f64;
        assert!((tail - (-t as f64).exp()).abs() < 0.005, "{t}: {tail}");
    }
}

#[test]
fn spectral_efficiency_converges_in_samples() {
    let mut cfg = single_tier_config(&Budget::fast());
    cfg.run.replications = 40;
    cfg.run.velocities.clear();
    cfg.policies = vec![PolicySpec::new(PolicyKind::BestConnected)];
    let base = run_scenario(&cfg).unwrap();
    cfg.sampling.samples_per_km *= 2;
    let doubled = run_scenario(&cfg).unwrap();
    let a = base.schemes[0].spectral_efficiency();
    let b = doubled.schemes[0].spectral_efficiency();
    assert!((a.mean - b.mean).abs() < 2.0 * (a.std_err + b.std_err), "{} vs {}", a.mean, b.mean);
}

#[test]
fn skipping_never_beats_best_connected_per_deployment() {
    let mut cfg = single_tier_config(&Budget::fast());
    cfg.run.replications = 30;
    cfg.run.velocities.clear();
    cfg.policies = vec![
        PolicySpec::new(PolicyKind::BestConnected),
        PolicySpec::new(PolicyKind::Alternating),
        PolicySpec::new(PolicyKind::Alternating).ic(true),
    ];
    let r = run_scenario(&cfg).unwrap();
    let bc = &r.schemes[0].outcomes;
    for s in &r.schemes[1..] {
        for (x, b) in s.outcomes.iter().zip(bc) {
            assert!(x.ho_count <= b.ho_count);
        }
        let gap: Moments = s
            .outcomes
            .iter()
            .zip(bc)
            .map(|(x, b)| b.spectral_efficiency - x.spectral_efficiency)
            .collect();
        assert!(gap.mean() > 2.0 * gap.estimate().std_err, "{}", s.label);
    }
}
