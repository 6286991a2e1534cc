//! Replications and their aggregation.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{sample_matern_pcp, sample_ppp_with, CellAreaCache, Deployment, Point};
use crate::metrics::{to_db, CoverageCurve, Estimate, MetricsReport, Moments, SampleBank, Z95};
use crate::mobility::{extract_visits, Trajectory, VisitSequence};
use crate::policy::{build_schedule, decide_skips_cached, PolicyConfig, ServiceSchedule};
use crate::radio::ChannelParams;
use crate::rng::{domain, StreamKey};

use super::config::DeploymentConfig;

const PLACEMENT_ATTEMPTS: usize = 10_000;

/// Seeds and bookkeeping of one replication, as recorded in manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReplicationRecord {
    pub index: usize,
    pub key: u64,
    pub deployment_seed: u64,
    pub resamples: usize,
    pub stations: usize,
    pub visits: usize,
}

/// Everything a policy needs to be scored on one replication.
#[derive(Debug, Clone)]
pub struct Replication {
    pub record: ReplicationRecord,
    pub deployment: Deployment,
    pub visits: VisitSequence,
    pub bank: SampleBank,
    areas: CellAreaCache,
}

/// One policy scored on one replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyOutcome {
    /// Mean `ln(1 + SINR)` over the samples.
    pub spectral_efficiency: f64,
    /// Fraction of samples above each coverage threshold.
    pub coverage: Vec<f64>,
    pub ho_count: usize,
    pub skip_count: usize,
    pub visits: usize,
    pub length: f64,
    pub blackout_length: f64,
}

fn sample_deployment(cfg: &ScenarioConfig, seed: u64) -> Result<Deployment> {
    let window = cfg.window()?;
    match cfg.deployment {
        DeploymentConfig::Ppp {
            lambda,
            power,
            path_loss_exp,
        } => sample_ppp_with(lambda, power, path_loss_exp, window, seed),
        DeploymentConfig::Matern { .. } => sample_matern_pcp(&cfg.deployment.pcp_params().expect("matern"), window, seed),
    }
}

/// Uniform origin and heading, rejected until the whole path lies in the
/// measurement region.
fn place_trajectory(cfg: &ScenarioConfig, deployment: &Deployment, key: StreamKey) -> Result<Trajectory> {
    let inner = deployment.window().inner();
    let len = cfg.mobility.trajectory_length;
    let mut rng = key.child(domain::TRAJECTORY).rng();
    for _ in 0..PLACEMENT_ATTEMPTS {
        let o = Point::new(
            inner.x_min + inner.width() * rng.random::<f64>(),
            inner.y_min + inner.height() * rng.random::<f64>(),
        );
        let t = Trajectory::with_heading(o, std::f64::consts::TAU * rng.random::<f64>(), len, 0.0)?;
        if t.is_inside(&inner) {
            return Ok(t);
        }
    }
    Err(Error::TrajectoryOutside(format!(
        "no placement of a {len} km path found in {PLACEMENT_ATTEMPTS} attempts"
    )))
}

impl Replication {
    /// Samples the deployment, trajectory, visits and fading bank of
    /// replication `index`. Deployments with no station in the measurement
    /// region are redrawn up to `run.max_resamples` times.
    pub fn prepare(cfg: &ScenarioConfig, index: usize) -> Result<Self> {
        let key = StreamKey::new(cfg.run.master_seed).child(domain::REPLICATION).child(index as u64);
        let mut resamples = 0;
        let (deployment, deployment_seed) = loop {
            let seed = key.child(domain::DEPLOYMENT).child(resamples as u64).value();
            let d = sample_deployment(cfg, seed)?;
            if d.inner_count() > 0 {
                break (d, seed);
            }
            resamples += 1;
            if resamples >= cfg.run.max_resamples {
                return Err(Error::ResampleLimit(resamples));
            }
        };
        let trajectory = place_trajectory(cfg, &deployment, key)?;
        let walk = cfg.walk();
        let visits = extract_visits(&trajectory, &deployment, walk.step, walk.tol)?;
        let mut track: Vec<usize> = visits.visits.iter().map(|v| v.bs_id).collect();
        track.sort_unstable();
        track.dedup();
        let channel = ChannelParams::new(cfg.channel.noise_power)?;
        let bank = SampleBank::draw(&trajectory, &deployment, &channel, &track, cfg.samples_per_replication(), key)?;
        Ok(Replication {
            record: ReplicationRecord {
                index,
                key: key.value(),
                deployment_seed,
                resamples,
                stations: deployment.len(),
                visits: visits.len(),
            },
            areas: CellAreaCache::new(cfg.sampling.cell_area_probes),
            deployment,
            visits,
            bank,
        })
    }

    pub fn schedule(&mut self, policy: &PolicyConfig) -> Result<ServiceSchedule> {
        let flags = decide_skips_cached(&self.visits, &self.deployment, policy, &mut self.areas)?;
        build_schedule(&self.visits, &flags, policy)
    }

    /// Scores `policy` on the shared sample bank.
    pub fn evaluate(&mut self, policy: &PolicyConfig, thresholds: &[f64]) -> Result<PolicyOutcome> {
        let schedule = self.schedule(policy)?;
        let sinrs = self.bank.sinrs(&schedule)?;
        let n = sinrs.len() as f64;
        Ok(PolicyOutcome {
            spectral_efficiency: sinrs.iter().map(|v| v.ln_1p()).sum::<f64>() / n,
            coverage: thresholds
                .iter()
                .map(|&t| sinrs.iter().filter(|&&v| v > t).count() as f64 / n)
                .collect(),
            ho_count: schedule.ho_count,
            skip_count: schedule.skip_count,
            visits: self.visits.len(),
            length: schedule.length,
            blackout_length: schedule.blackout_length(),
        })
    }
}

fn worker_count(cfg: &ScenarioConfig) -> usize {
    cfg.run
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `job` on replications `0..n` over a worker pool and returns the
/// results in index order.
pub(crate) fn for_each_replication<T, F>(cfg: &ScenarioConfig, n: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Replication) -> Result<T> + Sync,
{
    let workers = worker_count(cfg).min(n).max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = Replication::prepare(cfg, i).and_then(&job);
                let failed = out.is_err();
                slots.lock().expect("result slots")[i] = Some(out);
                if failed {
                    next.store(n, Ordering::Relaxed);
                }
            });
        }
    });
    let mut results = Vec::with_capacity(n);
    for slot in slots.into_inner().expect("result slots") {
        match slot {
            Some(r) => results.push(r?),
            None => break,
        }
    }
    Ok(results)
}

/// Prepares replications `0..cfg.run.replications` and keeps them.
pub fn prepare_replications(cfg: &ScenarioConfig) -> Result<Vec<Replication>> {
    cfg.validate()?;
    for_each_replication(cfg, cfg.run.replications, Ok)
}

/// All replications of one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeResult {
    pub label: String,
    pub policy: PolicyConfig,
    pub outcomes: Vec<PolicyOutcome>,
}

impl SchemeResult {
    /// Mean spectral efficiency with a between-replication standard error.
    pub fn spectral_efficiency(&self) -> Estimate {
        self.outcomes.iter().map(|o| o.spectral_efficiency).collect::<Moments>().estimate()
    }

    /// Handovers per km (ratio of totals) with a between-replication error.
    pub fn ho_per_km(&self) -> Estimate {
        let ho: f64 = self.outcomes.iter().map(|o| o.ho_count as f64).sum();
        let len: f64 = self.outcomes.iter().map(|o| o.length).sum();
        let per_rep = self.outcomes.iter().map(|o| o.ho_count as f64 / o.length).collect::<Moments>();
        Estimate {
            mean: ho / len,
            std_err: per_rep.estimate().std_err,
        }
    }

    /// Skipped visits over would-be handovers.
    pub fn skip_fraction(&self) -> f64 {
        let skips: usize = self.outcomes.iter().map(|o| o.skip_count).sum();
        let chances: usize = self.outcomes.iter().map(|o| o.visits.saturating_sub(1)).sum();
        if chances == 0 {
            0.0
        } else {
            skips as f64 / chances as f64
        }
    }

    pub fn blackout_fraction(&self) -> f64 {
        let b: f64 = self.outcomes.iter().map(|o| o.blackout_length).sum();
        let len: f64 = self.outcomes.iter().map(|o| o.length).sum();
        b / len
    }

    /// Coverage curve; the half-widths come from between-replication spread.
    pub fn coverage(&self, thresholds: &[f64]) -> CoverageCurve {
        let k = thresholds.len();
        let mut m = vec![Moments::default(); k];
        for o in &self.outcomes {
            for (mi, &p) in m.iter_mut().zip(&o.coverage) {
                mi.push(p);
            }
        }
        CoverageCurve {
            thresholds: thresholds.to_vec(),
            thresholds_db: thresholds.iter().map(|&t| to_db(t)).collect(),
            probabilities: m.iter().map(Moments::mean).collect(),
            ci_halfwidth: m.iter().map(|mi| Z95 * mi.estimate().std_err).collect(),
        }
    }

    pub fn report(&self, velocity: f64, ho_delay: f64, bandwidth: f64) -> Result<MetricsReport> {
        MetricsReport::assemble(
            self.label.clone(),
            self.spectral_efficiency(),
            self.ho_per_km(),
            self.skip_fraction(),
            velocity,
            ho_delay,
            bandwidth,
            self.outcomes.len(),
        )
    }

    /// `(R, H_l)` point estimates.
    pub fn operating_point(&self) -> (f64, f64) {
        (self.spectral_efficiency().mean, self.ho_per_km().mean)
    }
}

/// Difference of spectral efficiencies `a - b`, with the standard error of
/// the per-replication differences (both schemes see the same draws).
pub fn paired_difference(a: &SchemeResult, b: &SchemeResult) -> Estimate {
    a.outcomes
        .iter()
        .zip(&b.outcomes)
        .map(|(x, y)| x.spectral_efficiency - y.spectral_efficiency)
        .collect::<Moments>()
        .estimate()
}

/// Standard error of `a - b` as if the two estimates were independent.
pub fn unpaired_std_err(a: &SchemeResult, b: &SchemeResult) -> f64 {
    let (ea, eb) = (a.spectral_efficiency(), b.spectral_efficiency());
    ea.std_err.hypot(eb.std_err)
}

/// Output of [`run_scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub schemes: Vec<SchemeResult>,
    pub replications: Vec<ReplicationRecord>,
    pub elapsed: Duration,
    pub workers: usize,
}

impl ScenarioResult {
    pub fn scheme(&self, label: &str) -> Option<&SchemeResult> {
        self.schemes.iter().find(|s| s.label == label)
    }

    /// One report per configured velocity (a single `v = 0` row when none are set).
    pub fn reports(&self, scheme: &SchemeResult) -> Result<Vec<MetricsReport>> {
        let run = &self.config.run;
        let vs = if run.velocities.is_empty() {
            vec![0.0]
        } else {
            run.velocities.clone()
        };
        vs.iter()
            .map(|&v| scheme.report(v, run.ho_delay, run.bandwidth))
            .collect()
    }
}

/// Scores every configured policy on `cfg.run.replications` replications.
///
/// Replications run on a worker pool; each derives its streams from the
/// master seed and its index, and results are reduced in index order, so
/// the output does not depend on the number of workers.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let start = Instant::now();
    let lambda = cfg.intensity();
    let policies: Vec<PolicyConfig> = cfg.policies.iter().map(|p| p.resolve(lambda)).collect();
    let thresholds = cfg.coverage_thresholds();
    let per_rep = for_each_replication(cfg, cfg.run.replications, |mut rep| {
        let outcomes = policies
            .iter()
            .map(|p| rep.evaluate(p, &thresholds))
            .collect::<Result<Vec<_>>>()?;
        Ok((rep.record, outcomes))
    })?;
    let mut schemes: Vec<SchemeResult> = cfg
        .policies
        .iter()
        .zip(&policies)
        .map(|(spec, p)| SchemeResult {
            label: spec.label(),
            policy: *p,
            outcomes: Vec::with_capacity(per_rep.len()),
        })
        .collect();
    let mut replications = Vec::with_capacity(per_rep.len());
    for (record, outcomes) in per_rep {
        replications.push(record);
        for (s, o) in schemes.iter_mut().zip(outcomes) {
            s.outcomes.push(o);
        }
    }
    Ok(ScenarioResult {
        config: cfg.clone(),
        schemes,
        replications,
        elapsed: start.elapsed(),
        workers: worker_count(cfg).min(cfg.run.replications).max(1),
    })
}
