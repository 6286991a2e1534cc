//! Scenario configuration, replication runs, calibration and reproduction
//! of the reference figures and tables.

mod calibrate;
mod config;
mod engine;
mod output;
mod reproduce;

pub use calibrate::{calibrate_prepared, calibrate_thresholds, Calibration, CalibrationRequest, CalibrationTarget};
pub use config::{
    ChannelConfig, DeploymentConfig, MobilityConfig, PolicySpec, RunConfig, SamplingConfig, ScenarioConfig,
    Threshold, WindowConfig,
};
pub use engine::{
    paired_difference, prepare_replications, run_scenario, unpaired_std_err, PolicyOutcome, Replication,
    ReplicationRecord, ScenarioResult, SchemeResult,
};
pub use output::{error_line, write_coverage_csv, write_metrics_csv, write_outputs, COVERAGE_HEADER, METRICS_HEADER};
pub use reproduce::{
    reproduce, single_tier_config, single_tier_study, two_tier_config, two_tier_study, Artifact, Budget, Check,
    SingleTierStudy, TwoTierStudy, HYBRID_SIZE, TABLE1_SIZE, TABLE2, TABLE2_BC, TABLE3, TABLE3_BC,
};

/// Spectral efficiency and handover rate of a scheme; enough to draw its
/// throughput-versus-velocity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub spectral_efficiency: f64,
    /// HO per km
    pub ho_per_km: f64,
}

impl OperatingPoint {
    pub fn new(spectral_efficiency: f64, ho_per_km: f64) -> Self {
        OperatingPoint {
            spectral_efficiency,
            ho_per_km,
        }
    }

    /// `W R (1 - min(H_l v d, 1))` with `v` in km/h.
    pub fn throughput(&self, velocity: f64, ho_delay: f64, bandwidth: f64) -> f64 {
        let d = (self.ho_per_km * velocity / 3600.0 * ho_delay).min(1.0);
        bandwidth * self.spectral_efficiency * (1.0 - d)
    }

    /// Velocity at which the handover cost saturates.
    fn saturation(&self, ho_delay: f64) -> f64 {
        let rate = self.ho_per_km * ho_delay;
        if rate > 0.0 {
            3600.0 / rate
        } else {
            f64::INFINITY
        }
    }
}

fn pieces(a: &OperatingPoint, b: &OperatingPoint, ho_delay: f64, range: (f64, f64)) -> Vec<f64> {
    let mut pts = vec![range.0, range.1];
    for v in [a.saturation(ho_delay), b.saturation(ho_delay)] {
        if v > range.0 && v < range.1 {
            pts.push(v);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// First velocity in `range` at which `a`'s throughput reaches `b`'s.
///
/// Returns `range.0` when `a` is already ahead there and `None` when it
/// never catches up. Throughput curves are piecewise linear in `v`, so the
/// crossing is found exactly.
pub fn crossover(a: &OperatingPoint, b: &OperatingPoint, ho_delay: f64, range: (f64, f64)) -> Option<f64> {
    let f = |v: f64| a.throughput(v, ho_delay, 1.0) - b.throughput(v, ho_delay, 1.0);
    let pts = pieces(a, b, ho_delay, range);
    if f(pts[0]) >= 0.0 {
        return Some(pts[0]);
    }
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (fp, fq) = (f(p), f(q));
        if fp < 0.0 && fq >= 0.0 {
            return Some(p + (q - p) * (-fp) / (fq - fp));
        }
    }
    None
}

/// Largest relative throughput gain `T_a / T_b - 1` over `range`, and
/// where it occurs.
pub fn peak_gain(a: &OperatingPoint, b: &OperatingPoint, ho_delay: f64, range: (f64, f64)) -> (f64, f64) {
    // a ratio of linear functions is monotone on each piece
    let mut best = (range.0, f64::NEG_INFINITY);
    for v in pieces(a, b, ho_delay, range) {
        let tb = b.throughput(v, ho_delay, 1.0);
        let g = if tb > 0.0 {
            a.throughput(v, ho_delay, 1.0) / tb - 1.0
        } else {
            f64::INFINITY
        };
        if g > best.1 {
            best = (v, g);
        }
    }
    best
}

/// Interference-limited coverage `P(SINR > t)` of a typical user in a
/// Rayleigh-faded PPP with path-loss exponent `alpha`:
/// `1 / (1 + t^(2/a) * int_{t^(-2/a)}^inf du / (1 + u^(a/2)))`.
pub fn ppp_coverage(t: f64, alpha: f64) -> f64 {
    let k = alpha / 2.0;
    let a = t.powf(-1.0 / k);
    let b = a.max(1.0) * 1e4;
    // log-spaced Simpson on [a, b], series tail beyond b
    let n = 20_000;
    let (ya, yb) = (a.ln(), b.ln());
    let h = (yb - ya) / n as f64;
    let g = |y: f64| {
        let u = y.exp();
        u / (1.0 + u.powf(k))
    };
    let mut s = g(ya) + g(yb);
    for i in 1..n {
        s += g(ya + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let body = s * h / 3.0;
    let tail = b.powf(1.0 - k) / (k - 1.0) - b.powf(1.0 - 2.0 * k) / (2.0 * k - 1.0);
    let rho = t.powf(1.0 / k) * (body + tail);
    1.0 / (1.0 + rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossover_of_two_lines() {
        // T_a = 1.4 (1 - 5v/3600), T_b = 1.5 (1 - 9v/3600)
        let a = OperatingPoint::new(1.4, 5.0);
        let b = OperatingPoint::new(1.5, 9.0);
        let v = crossover(&a, &b, 1.0, (0.0, 400.0)).unwrap();
        let expect = 0.1 * 3600.0 / (1.5 * 9.0 - 1.4 * 5.0);
        assert!((v - expect).abs() < 1e-9, "{v} vs {expect}");
        assert_eq!(crossover(&b, &a, 1.0, (0.0, 400.0)), Some(0.0));
        assert_eq!(crossover(&a, &b, 1.0, (0.0, 10.0)), None);
    }

    #[test]
    fn crossover_after_saturation() {
        // b saturates at 100 km/h; a never does
        let a = OperatingPoint::new(0.1, 0.0);
        let b = OperatingPoint::new(1.0, 36.0);
        let v = crossover(&a, &b, 1.0, (0.0, 300.0)).unwrap();
        // 0.1 = 1 - v/100
        assert!((v - 90.0).abs() < 1e-9);
        let (at, g) = peak_gain(&a, &b, 1.0, (0.0, 99.0));
        assert_eq!(at, 99.0);
        assert!((g - 9.0).abs() < 1e-9);
    }

    #[test]
    fn coverage_limits() {
        assert!(ppp_coverage(1e-6, 4.0) > 0.99);
        assert!(ppp_coverage(1e6, 4.0) < 0.01);
        assert!(ppp_coverage(1.0, 4.0) > ppp_coverage(2.0, 4.0));
        assert!(ppp_coverage(1.0, 3.0) < ppp_coverage(1.0, 4.0));
    }
}
