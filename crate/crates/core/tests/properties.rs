use hoskip::geometry::{sample_ppp, serving_station, serving_station_linear, Deployment, Point, Window};
use hoskip::metrics::{ho_cost, throughput, SampleBank, SinrSummary};
use hoskip::mobility::{extract_visits, Trajectory, VisitSequence, WalkParams};
use hoskip::policy::{build_schedule, decide_skips, PolicyConfig, ServiceSchedule};
use hoskip::radio::{ChannelParams, FadedField, RayleighFading, ServiceMode};
use hoskip::rng::StreamKey;
use proptest::prelude::*;

const LAMBDA: f64 = 20.0;

fn deployment(seed: u64) -> Deployment {
    sample_ppp(LAMBDA, Window::around_square(2.0, 0.6).unwrap(), seed).unwrap()
}

fn path(x0: f64, y0: f64, angle: f64, len: f64) -> Option<Trajectory> {
    let t = Trajectory::with_heading(Point::new(x0, y0), angle, len, 0.0).unwrap();
    let inner = Window::around_square(2.0, 0.6).unwrap().inner();
    t.is_inside(&inner).then_some(t)
}

fn visits(seed: u64, t: &Trajectory) -> (Deployment, VisitSequence) {
    let d = deployment(seed);
    let w = WalkParams::for_intensity(LAMBDA);
    let v = extract_visits(t, &d, w.step, w.tol).unwrap();
    (d, v)
}

fn tiles(s: &ServiceSchedule) -> bool {
    let g = &s.segments;
    g.first().map(|x| x.s_start) == Some(0.0)
        && (g.last().unwrap().s_end - s.length).abs() < 1e-12
        && g.windows(2).all(|w| w[0].s_end == w[1].s_start)
        && g.iter().all(|x| x.s_end > x.s_start)
}

fn skip_set(flags: &[bool]) -> Vec<usize> {
    flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn traj() -> impl Strategy<Value = Trajectory> {
    (0.0..2.0f64, 0.0..2.0f64, 0.0..std::f64::consts::TAU, 0.3..1.8f64)
        .prop_filter_map("path leaves inner region", |(x, y, a, l)| path(x, y, a, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn visits_tile_the_path(seed in any::<u64>(), t in traj()) {
        let (_, v) = visits(seed, &t);
        prop_assert!(v.validate().is_ok());
        prop_assert_eq!(v.visits[0].s_entry, 0.0);
        prop_assert!((v.visits.last().unwrap().s_exit - t.length()).abs() < 1e-12);
        for w in v.visits.windows(2) {
            prop_assert_ne!(w[0].bs_id, w[1].bs_id);
        }
    }

    #[test]
    fn step_halving_keeps_boundaries(seed in any::<u64>(), t in traj()) {
        let d = deployment(seed);
        let w = WalkParams::for_intensity(LAMBDA);
        let a = extract_visits(&t, &d, w.step, w.tol).unwrap();
        let b = extract_visits(&t, &d, w.step / 2.0, w.tol).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.visits.iter().zip(&b.visits) {
            prop_assert_eq!(x.bs_id, y.bs_id);
            prop_assert!((x.s_exit - y.s_exit).abs() <= 2.0 * w.tol);
        }
    }

    #[test]
    fn serving_station_matches_brute_force(seed in any::<u64>(), x in -0.6..2.6f64, y in -0.6..2.6f64) {
        let d = deployment(seed);
        let p = Point::new(x, y);
        prop_assert_eq!(serving_station(p, &d).unwrap().id, serving_station_linear(p, &d).unwrap().id);
    }

    #[test]
    fn schedules_tile_and_never_add_handovers(
        seed in any::<u64>(),
        t in traj(),
        l in 0.0..0.3f64,
        s in 0.0..0.1f64,
        ic in any::<bool>(),
        comp in any::<bool>(),
    ) {
        let (d, v) = visits(seed, &t);
        let bc = build_schedule(&v, &vec![false; v.len()], &PolicyConfig::best_connected()).unwrap();
        prop_assert!(tiles(&bc));
        prop_assert_eq!(bc.ho_count, v.len() - 1);
        for cfg in [
            PolicyConfig::alternating(ic, comp),
            PolicyConfig::location_aware(l, ic, comp),
            PolicyConfig::size_aware(s, ic, comp),
            PolicyConfig::hybrid(l, s, ic, comp),
        ] {
            let flags = decide_skips(&v, &d, &cfg).unwrap();
            let sched = build_schedule(&v, &flags, &cfg).unwrap();
            prop_assert!(tiles(&sched));
            prop_assert!(sched.ho_count <= bc.ho_count);
            prop_assert_eq!(sched.ho_count == bc.ho_count, sched.skip_count == 0);
            prop_assert_eq!(sched.ho_count + sched.skip_count, v.len() - 1);
            for (g, visit) in sched.segments.iter().zip(&v.visits) {
                if let ServiceMode::BestConnected { serving } = g.mode {
                    if serving != visit.bs_id {
                        // a skipped visit back in the serving cell
                        prop_assert!(flags[v.visit_at(0.5 * (g.s_start + g.s_end))]);
                    }
                }
                prop_assert!(g.mode.validate().is_ok());
            }
        }
    }

    #[test]
    fn skip_sets_are_monotone_and_hybrid_is_union(
        seed in any::<u64>(),
        t in traj(),
        l1 in 0.0..0.3f64,
        dl in 0.0..0.3f64,
        s1 in 0.0..0.1f64,
        ds in 0.0..0.1f64,
    ) {
        let (d, v) = visits(seed, &t);
        let la = |l: f64| skip_set(&decide_skips(&v, &d, &PolicyConfig::location_aware(l, false, false)).unwrap());
        let sa = |s: f64| skip_set(&decide_skips(&v, &d, &PolicyConfig::size_aware(s, false, false)).unwrap());
        prop_assert!(subset(&la(l1 + dl), &la(l1)));
        prop_assert!(subset(&sa(s1), &sa(s1 + ds)));
        let hb = skip_set(&decide_skips(&v, &d, &PolicyConfig::hybrid(l1, s1, false, false)).unwrap());
        let mut union = la(l1);
        union.extend(sa(s1));
        union.sort_unstable();
        union.dedup();
        prop_assert_eq!(hb, union);
    }

    #[test]
    fn interference_cancellation_never_hurts(seed in any::<u64>(), t in traj(), l in 0.0..0.2f64) {
        let (d, v) = visits(seed, &t);
        let mut ids: Vec<usize> = v.visits.iter().map(|x| x.bs_id).collect();
        ids.sort_unstable();
        ids.dedup();
        let bank = SampleBank::draw(&t, &d, &ChannelParams::default(), &ids, 200, StreamKey::new(seed)).unwrap();
        let on = PolicyConfig::location_aware(l, true, false);
        let off = PolicyConfig::location_aware(l, false, false);
        let flags = decide_skips(&v, &d, &on).unwrap();
        let a = bank.sinrs(&build_schedule(&v, &flags, &on).unwrap()).unwrap();
        let b = bank.sinrs(&build_schedule(&v, &flags, &off).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(x >= y);
        }
    }

    #[test]
    fn coverage_counts_are_monotone(seed in any::<u64>(), t in traj(), mut th in prop::collection::vec(-20.0..30.0f64, 1..12)) {
        th.sort_by(f64::total_cmp);
        let lin: Vec<f64> = th.iter().map(|&x| 10f64.powf(x / 10.0)).collect();
        let (d, v) = visits(seed, &t);
        let mut ids: Vec<usize> = v.visits.iter().map(|x| x.bs_id).collect();
        ids.sort_unstable();
        ids.dedup();
        let bank = SampleBank::draw(&t, &d, &ChannelParams::default(), &ids, 100, StreamKey::new(seed)).unwrap();
        let s = build_schedule(&v, &vec![false; v.len()], &PolicyConfig::best_connected()).unwrap();
        let summary = SinrSummary::from_sinrs(&bank.sinrs(&s).unwrap(), &lin);
        prop_assert!(summary.covered.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn sinr_is_invariant_to_common_power_scaling(seed in any::<u64>(), c in 0.01..100.0f64, x in 0.0..2.0f64, y in 0.0..2.0f64) {
        let d = deployment(seed);
        let mut scaled = d.stations().to_vec();
        for b in &mut scaled {
            b.power *= c;
        }
        let d2 = Deployment::new(scaled, *d.window(), d.model(), d.seed()).unwrap();
        let p = Point::new(x, y);
        let serving = serving_station(p, &d).unwrap().id;
        let track = [serving];
        let f1 = FadedField::draw(p, &d, &track, &mut RayleighFading(StreamKey::new(seed).rng()));
        let f2 = FadedField::draw(p, &d2, &track, &mut RayleighFading(StreamKey::new(seed).rng()));
        let mode = ServiceMode::BestConnected { serving };
        let a = f1.sinr(&mode, 0.0).unwrap().value;
        let b = f2.sinr(&mode, 0.0).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn cost_and_throughput_identities(h in 0.0..50.0f64, v in 0.0..500.0f64, dl in 0.0..3.0f64, r in 0.0..5.0f64) {
        let d = ho_cost(h, v, dl).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ho_cost(h, 0.0, dl).unwrap(), 0.0);
        let t = throughput(r, d, 10e6).unwrap();
        prop_assert_eq!(t, 10e6 * r * (1.0 - d));
    }
}
