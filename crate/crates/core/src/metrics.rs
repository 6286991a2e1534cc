//! Coverage, spectral efficiency, handover rate/cost and throughput.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Deployment;
use crate::mobility::Trajectory;
use crate::policy::ServiceSchedule;
use crate::radio::{ChannelParams, FadedField, RayleighFading};
use crate::rng::{domain, StreamKey};
use rand::Rng;

/// Normal quantile for two-sided 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Estimate { mean, std_err: 0.0 }
    }

    pub fn ci95(&self) -> f64 {
        Z95 * self.std_err
    }
}

/// Running count, sum and sum of squares; merging is commutative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum / self.n as f64
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Mean with the standard error of i.i.d. observations.
    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean(),
            std_err: (self.variance() / self.n.max(1) as f64).sqrt(),
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `P{SINR > T}` over a list of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    /// Linear thresholds.
    pub thresholds: Vec<f64>,
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// 95% half-widths.
    pub ci_halfwidth: Vec<f64>,
}

impl CoverageCurve {
    pub fn from_counts(thresholds: &[f64], covered: &[u64], n: u64) -> Self {
        let probabilities: Vec<f64> = covered.iter().map(|&c| c as f64 / n as f64).collect();
        let ci_halfwidth = probabilities
            .iter()
            .map(|&p| Z95 * (p * (1.0 - p) / n as f64).sqrt())
            .collect();
        CoverageCurve {
            thresholds: thresholds.to_vec(),
            thresholds_db: thresholds.iter().map(|&t| to_db(t)).collect(),
            probabilities,
            ci_halfwidth,
        }
    }

    /// True when probabilities never increase along increasing thresholds.
    pub fn is_monotone(&self) -> bool {
        let mut pairs: Vec<(f64, f64)> = self.thresholds.iter().copied().zip(self.probabilities.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Fading realizations at stratified points along one trajectory.
///
/// Sample `j` sits uniformly inside the `j`-th of `n` equal strata, and its
/// position jitter and fading come from counter stream `j` of the key, so
/// schedules evaluated on the same bank share every random draw.
#[derive(Debug, Clone)]
pub struct SampleBank {
    positions: Vec<f64>,
    fields: Vec<FadedField>,
    noise_power: f64,
}

impl SampleBank {
    /// `track` lists every station a schedule may reference (sorted, unique).
    pub fn draw(
        trajectory: &Trajectory,
        deployment: &Deployment,
        channel: &ChannelParams,
        track: &[usize],
        n_samples: usize,
        key: StreamKey,
    ) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be positive"));
        }
        for &id in track {
            deployment.station(id)?;
        }
        let stream = key.child(domain::FADING);
        let length = trajectory.length();
        let mut positions = Vec::with_capacity(n_samples);
        let mut fields = Vec::with_capacity(n_samples);
        for j in 0..n_samples {
            let mut rng = stream.rng_at(j as u64);
            let s = (j as f64 + rng.random::<f64>()) / n_samples as f64 * length;
            let s = s.min(length);
            let mut fading = RayleighFading(rng);
            fields.push(FadedField::draw(trajectory.at(s), deployment, track, &mut fading));
            positions.push(s);
        }
        Ok(SampleBank {
            positions,
            fields,
            noise_power: channel.noise_power,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// SINR of every sample under `schedule`.
    pub fn sinrs(&self, schedule: &ServiceSchedule) -> Result<Vec<f64>> {
        self.positions
            .iter()
            .zip(&self.fields)
            .map(|(&s, f)| f.sinr(&schedule.segment_at(s).mode, self.noise_power).map(|x| x.value))
            .collect()
    }
}

/// Per-trajectory statistics of one schedule's SINR samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinrSummary {
    /// Sum and squares of `ln(1 + SINR)`.
    pub log_rate: Moments,
    pub covered: Vec<u64>,
}

impl SinrSummary {
    pub fn from_sinrs(values: &[f64], thresholds: &[f64]) -> Self {
        let log_rate = values.iter().map(|&v| v.ln_1p()).collect();
        let covered = thresholds
            .iter()
            .map(|&t| values.iter().filter(|&&v| v > t).count() as u64)
            .collect();
        SinrSummary { log_rate, covered }
    }
}

const BATCHES: usize = 20;

/// Mean of `ln(1 + x)` with a batch-means standard error (samples along one
/// path are correlated through the geometry).
pub fn log_rate_estimate(values: &[f64]) -> Estimate {
    let n = values.len();
    let mean = values.iter().map(|v| v.ln_1p()).sum::<f64>() / n as f64;
    if n < 2 * BATCHES {
        let m: Moments = values.iter().map(|v| v.ln_1p()).collect();
        return Estimate {
            mean,
            std_err: m.estimate().std_err,
        };
    }
    let batch_means: Moments = values
        .chunks(n.div_ceil(BATCHES))
        .map(|c| c.iter().map(|v| v.ln_1p()).sum::<f64>() / c.len() as f64)
        .collect();
    Estimate {
        mean,
        std_err: batch_means.estimate().std_err,
    }
}

fn bank_for(
    schedule: &ServiceSchedule,
    trajectory: &Trajectory,
    deployment: &Deployment,
    channel: &ChannelParams,
    n_samples: usize,
    seed: u64,
) -> Result<SampleBank> {
    if (schedule.length - trajectory.length()).abs() > 1e-9 * trajectory.length() {
        return Err(Error::invalid("schedule", "schedule and trajectory lengths differ"));
    }
    SampleBank::draw(
        trajectory,
        deployment,
        channel,
        &schedule.station_ids(),
        n_samples,
        StreamKey::new(seed),
    )
}

/// Arc-length averaged coverage of `schedule` along `trajectory`.
pub fn estimate_coverage(
    schedule: &ServiceSchedule,
    trajectory: &Trajectory,
    deployment: &Deployment,
    channel: &ChannelParams,
    thresholds: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<CoverageCurve> {
    if thresholds.is_empty() {
        return Err(Error::invalid("thresholds", "at least one threshold is required"));
    }
    let bank = bank_for(schedule, trajectory, deployment, channel, n_samples, seed)?;
    let summary = SinrSummary::from_sinrs(&bank.sinrs(schedule)?, thresholds);
    Ok(CoverageCurve::from_counts(thresholds, &summary.covered, bank.len() as u64))
}

/// Ergodic spectral efficiency `E[ln(1 + SINR)]` in nats/s/Hz along the path.
pub fn estimate_spectral_efficiency(
    schedule: &ServiceSchedule,
    trajectory: &Trajectory,
    deployment: &Deployment,
    channel: &ChannelParams,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let bank = bank_for(schedule, trajectory, deployment, channel, n_samples, seed)?;
    Ok(log_rate_estimate(&bank.sinrs(schedule)?))
}

/// km/h to km/s.
pub fn kmh_to_kms(v: f64) -> f64 {
    v / 3600.0
}

/// Fraction of airtime lost to handovers, `min(H_l * v * d, 1)`, with
/// `H_l` in HO/km, `v` in km/h and `d` in seconds.
pub fn ho_cost(ho_per_km: f64, velocity_kmh: f64, delay_s: f64) -> Result<f64> {
    for (name, v) in [("ho_per_km", ho_per_km), ("velocity", velocity_kmh), ("delay", delay_s)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, format!("must be finite and non-negative, got {v}")));
        }
    }
    Ok((ho_per_km * kmh_to_kms(velocity_kmh) * delay_s).min(1.0))
}

/// Handovers per second for a PPP of intensity `lambda` at speed `v` (km/h):
/// `4 v / pi * sqrt(lambda)`.
pub fn analytic_ho_rate(lambda: f64, velocity_kmh: f64) -> f64 {
    4.0 * kmh_to_kms(velocity_kmh) / std::f64::consts::PI * lambda.sqrt()
}

/// Average throughput `W R (1 - D)` in nats/s.
pub fn throughput(spectral_efficiency: f64, ho_cost: f64, bandwidth: f64) -> Result<f64> {
    if !(spectral_efficiency >= 0.0 && spectral_efficiency.is_finite()) {
        return Err(Error::invalid("spectral_efficiency", "must be non-negative"));
    }
    if !(0.0..=1.0).contains(&ho_cost) {
        return Err(Error::invalid("ho_cost", "must lie in [0, 1]"));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::invalid("bandwidth", "must be positive"));
    }
    Ok(bandwidth * spectral_efficiency * (1.0 - ho_cost))
}

/// Metrics of one scheme at one velocity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub scheme: String,
    /// nats/s/Hz
    pub spectral_efficiency: Estimate,
    /// HO per km
    pub ho_per_km: Estimate,
    /// HO per second
    pub ho_per_sec: f64,
    pub ho_cost: f64,
    /// nats/s
    pub throughput: Estimate,
    pub bandwidth: f64,
    /// km/h
    pub velocity: f64,
    pub ho_delay: f64,
    pub skip_fraction: f64,
    pub replications: usize,
}

impl MetricsReport {
    /// Derives HO rate, cost and throughput from per-length estimates.
    pub fn assemble(
        scheme: impl Into<String>,
        spectral_efficiency: Estimate,
        ho_per_km: Estimate,
        skip_fraction: f64,
        velocity: f64,
        ho_delay: f64,
        bandwidth: f64,
        replications: usize,
    ) -> Result<Self> {
        let d = ho_cost(ho_per_km.mean, velocity, ho_delay)?;
        let t = throughput(spectral_efficiency.mean.max(0.0), d, bandwidth)?;
        // delta method, treating R and H_l as independent
        let dd = if d < 1.0 {
            kmh_to_kms(velocity) * ho_delay * ho_per_km.std_err
        } else {
            0.0
        };
        let se = bandwidth
            * ((1.0 - d).powi(2) * spectral_efficiency.std_err.powi(2) + (spectral_efficiency.mean * dd).powi(2))
                .sqrt();
        Ok(MetricsReport {
            scheme: scheme.into(),
            spectral_efficiency,
            ho_per_km,
            ho_per_sec: ho_per_km.mean * kmh_to_kms(velocity),
            ho_cost: d,
            throughput: Estimate { mean: t, std_err: se },
            bandwidth,
            velocity,
            ho_delay,
            skip_fraction,
            replications,
        })
    }
}
