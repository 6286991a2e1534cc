//! Threshold calibration by bisection on fixed replications.

use serde::Serialize;

use super::config::{PolicySpec, ScenarioConfig, Threshold};
use super::engine::{prepare_replications, Replication};
use crate::error::{Error, Result};
use crate::policy::PolicyKind;
use crate::rng::{domain, StreamKey};

/// What the calibrated threshold should achieve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationTarget {
    /// Fraction of would-be handovers that are skipped.
    SkipFraction(f64),
    /// Spectral efficiency of the policy as configured (its own `ic` flag).
    SpectralEfficiency(f64),
    /// Average of the non-IC and IC spectral efficiencies matching the
    /// average of the two targets.
    MeanSpectralEfficiency { non_ic: f64, ic: f64 },
}

impl CalibrationTarget {
    fn value(&self) -> f64 {
        match *self {
            CalibrationTarget::SkipFraction(x) | CalibrationTarget::SpectralEfficiency(x) => x,
            CalibrationTarget::MeanSpectralEfficiency { non_ic, ic } => 0.5 * (non_ic + ic),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRequest {
    /// Policy to tune. Location-aware and hybrid policies tune the location
    /// threshold (a hybrid keeps its size threshold fixed); size-aware tunes
    /// the size threshold. A threshold already present fixes the unit.
    pub policy: PolicySpec,
    pub target: CalibrationTarget,
    /// Accepted distance between achieved and target values.
    pub tolerance: f64,
    /// Search range for the threshold constant.
    pub bracket: (f64, f64),
    pub max_iterations: usize,
}

impl CalibrationRequest {
    pub fn new(policy: PolicySpec, target: CalibrationTarget) -> Self {
        CalibrationRequest {
            policy,
            target,
            tolerance: 0.002,
            bracket: (0.0, 6.0),
            max_iterations: 60,
        }
    }
}

/// A calibrated threshold, as recorded in run manifests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub scheme: String,
    pub parameter: &'static str,
    pub unit: &'static str,
    /// Threshold constant in `unit`.
    pub constant: f64,
    /// Threshold in km (location) or km² (size).
    pub threshold: f64,
    pub target: CalibrationTarget,
    pub achieved: f64,
    pub converged: bool,
    pub iterations: usize,
    pub replications: usize,
    pub master_seed: u64,
}

impl Calibration {
    /// The calibrated threshold in `unit`.
    pub fn threshold_spec(&self) -> Threshold {
        match self.unit {
            "per_lambda" => Threshold::PerLambda(self.constant),
            "per_sqrt_lambda" => Threshold::PerSqrtLambda(self.constant),
            _ => Threshold::Absolute(self.constant),
        }
    }

    /// `spec` with the calibrated threshold filled in.
    pub fn apply(&self, spec: PolicySpec) -> PolicySpec {
        match self.parameter {
            "size_threshold" => spec.size(self.threshold_spec()),
            _ => spec.location(self.threshold_spec()),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Param {
    Location,
    Size,
}

fn parameter_of(spec: &PolicySpec) -> Result<(Param, Threshold)> {
    match spec.kind {
        PolicyKind::LocationAware | PolicyKind::Hybrid => Ok((
            Param::Location,
            spec.location_threshold.unwrap_or(Threshold::PerSqrtLambda(1.0)),
        )),
        PolicyKind::SizeAware => Ok((Param::Size, spec.size_threshold.unwrap_or(Threshold::PerLambda(1.0)))),
        other => Err(Error::invalid(
            "scheme",
            format!("{other} has no threshold to calibrate"),
        )),
    }
}

fn with_constant(spec: &PolicySpec, param: Param, unit: Threshold, c: f64) -> PolicySpec {
    let t = unit.with_constant(c);
    match param {
        Param::Location => spec.clone().location(t),
        Param::Size => spec.clone().size(t),
    }
}

fn objective(reps: &mut [Replication], lambda: f64, spec: &PolicySpec, target: &CalibrationTarget) -> Result<f64> {
    let n = reps.len() as f64;
    match *target {
        CalibrationTarget::SkipFraction(_) => {
            let p = spec.resolve(lambda);
            let (mut skips, mut chances) = (0usize, 0usize);
            for r in reps.iter_mut() {
                let s = r.schedule(&p)?;
                skips += s.skip_count;
                chances += r.visits.len().saturating_sub(1);
            }
            Ok(if chances == 0 { 0.0 } else { skips as f64 / chances as f64 })
        }
        CalibrationTarget::SpectralEfficiency(_) => {
            let p = spec.resolve(lambda);
            let mut sum = 0.0;
            for r in reps.iter_mut() {
                sum += r.evaluate(&p, &[])?.spectral_efficiency;
            }
            Ok(sum / n)
        }
        CalibrationTarget::MeanSpectralEfficiency { .. } => {
            let a = spec.clone().ic(false).resolve(lambda);
            let b = spec.clone().ic(true).resolve(lambda);
            let mut sum = 0.0;
            for r in reps.iter_mut() {
                sum += r.evaluate(&a, &[])?.spectral_efficiency + r.evaluate(&b, &[])?.spectral_efficiency;
            }
            Ok(0.5 * sum / n)
        }
    }
}

/// Calibrates on already prepared replications of a network with
/// intensity `lambda`.
pub fn calibrate_prepared(
    reps: &mut [Replication],
    lambda: f64,
    master_seed: u64,
    request: &CalibrationRequest,
) -> Result<Calibration> {
    if reps.is_empty() {
        return Err(Error::invalid("replications", "calibration needs at least one replication"));
    }
    let (param, unit) = parameter_of(&request.policy)?;
    let (mut lo, mut hi) = request.bracket;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("bracket", format!("need 0 <= lo < hi, got ({lo}, {hi})")));
    }
    let target = request.target.value();
    let n_reps = reps.len();
    let lambda_scale = |c: f64| unit.with_constant(c).resolve(lambda);
    let finish = |constant: f64, achieved: f64, converged: bool, iterations: usize| Calibration {
        scheme: request.policy.label(),
        parameter: match param {
            Param::Location => "location_threshold",
            Param::Size => "size_threshold",
        },
        unit: unit.unit(),
        constant,
        threshold: lambda_scale(constant),
        target: request.target,
        achieved,
        converged,
        iterations,
        replications: n_reps,
        master_seed,
    };

    if let CalibrationTarget::SkipFraction(f) = request.target {
        if f <= 0.0 {
            // vacuous extreme: nothing is ever far enough / small enough
            let c = match param {
                Param::Location => f64::INFINITY,
                Param::Size => 0.0,
            };
            let achieved = objective(reps, lambda, &with_constant(&request.policy, param, unit, c), &request.target)?;
            return Ok(finish(c, achieved, achieved <= request.tolerance, 0));
        }
    }

    let mut eval = |c: f64| objective(reps, lambda, &with_constant(&request.policy, param, unit, c), &request.target);
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    let (min, max) = (f_lo.min(f_hi), f_lo.max(f_hi));
    if target < min - request.tolerance || target > max + request.tolerance {
        return Err(Error::CalibrationUnreachable {
            target,
            lo,
            hi,
            achieved_lo: f_lo,
            achieved_hi: f_hi,
        });
    }
    let increasing = f_hi >= f_lo;
    for (c, f) in [(lo, f_lo), (hi, f_hi)] {
        if (f - target).abs() <= request.tolerance {
            return Ok(finish(c, f, true, 0));
        }
    }
    let mut best = if (f_lo - target).abs() < (f_hi - target).abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    for it in 1..=request.max_iterations {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid)?;
        if (f - target).abs() < (best.1 - target).abs() {
            best = (mid, f);
        }
        if (f - target).abs() <= request.tolerance {
            return Ok(finish(mid, f, true, it));
        }
        if (f < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(finish(best.0, best.1, false, request.max_iterations))
}

/// Calibrates `request` on `cfg.run.replications` fresh replications
/// drawn from a calibration stream of the master seed (independent of the
/// replications [`super::run_scenario`] uses).
pub fn calibrate_thresholds(cfg: &ScenarioConfig, request: &CalibrationRequest) -> Result<Calibration> {
    let mut c = cfg.clone();
    c.run.master_seed = StreamKey::new(cfg.run.master_seed).child(domain::CALIBRATION).value();
    let mut reps = prepare_replications(&c)?;
    calibrate_prepared(&mut reps, cfg.intensity(), cfg.run.master_seed, request)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::from_toml(
            r#"
name = "cal"
[deployment]
model = "ppp"
lambda = 20.0
[window]
inner_side = 2.0
guard = 1.0
[mobility]
trajectory_length = 1.5
[sampling]
samples_per_km = 200
cell_area_probes = 2000
[run]
replications = 6
master_seed = 3
[[policy]]
kind = "best_connected"
"#,
        )
        .unwrap()
    }

    #[test]
    fn zero_skip_target_is_the_vacuous_extreme() {
        let c = cfg();
        let la = PolicySpec::new(PolicyKind::LocationAware);
        let r = calibrate_thresholds(&c, &CalibrationRequest::new(la, CalibrationTarget::SkipFraction(0.0))).unwrap();
        assert_eq!(r.constant, f64::INFINITY);
        assert_eq!(r.achieved, 0.0);
        let sa = PolicySpec::new(PolicyKind::SizeAware);
        let r = calibrate_thresholds(&c, &CalibrationRequest::new(sa, CalibrationTarget::SkipFraction(0.0))).unwrap();
        assert_eq!(r.constant, 0.0);
        assert_eq!(r.achieved, 0.0);
    }

    #[test]
    fn skip_fraction_calibration_hits_target_and_is_deterministic() {
        let c = cfg();
        let mut req = CalibrationRequest::new(
            PolicySpec::new(PolicyKind::SizeAware),
            CalibrationTarget::SkipFraction(0.3),
        );
        req.tolerance = 0.03;
        let a = calibrate_thresholds(&c, &req).unwrap();
        assert!(a.converged, "{a:?}");
        assert!((a.achieved - 0.3).abs() <= 0.03);
        assert!(a.constant > 0.0 && a.constant < 6.0);
        let b = calibrate_thresholds(&c, &req).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unreachable_and_invalid_requests() {
        let c = cfg();
        let req = CalibrationRequest::new(
            PolicySpec::new(PolicyKind::LocationAware),
            CalibrationTarget::SpectralEfficiency(9.0),
        );
        assert!(matches!(
            calibrate_thresholds(&c, &req),
            Err(Error::CalibrationUnreachable { .. })
        ));
        let req = CalibrationRequest::new(
            PolicySpec::new(PolicyKind::Alternating),
            CalibrationTarget::SpectralEfficiency(1.0),
        );
        assert!(calibrate_thresholds(&c, &req).is_err());
    }
}
