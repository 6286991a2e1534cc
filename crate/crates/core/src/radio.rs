//! Instantaneous downlink SINR under best-connected service and under the
//! two blackout variants (single-server with optional cancellation of the
//! skipped station, and non-coherent two-station CoMP).
//!
//! Every evaluation draws one Rayleigh power gain per station, in id order,
//! from a [`FadingSource`]. A [`FadedField`] keeps the aggregate received
//! power plus the individual terms of a few tracked stations, so several
//! service modes can be scored against the same fading realization.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rss_from_sq, serving_station, Deployment, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Noise power sigma², watt.
    pub noise_power: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams { noise_power: 0.0 }
    }
}

impl ChannelParams {
    pub fn new(noise_power: f64) -> Result<Self> {
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return Err(Error::invalid("noise_power", "must be finite and non-negative"));
        }
        Ok(ChannelParams { noise_power })
    }
}

/// Supplies small-scale fading: exponential power gains `h` and complex
/// gains `g` for the cooperative branches.
pub trait FadingSource {
    fn power_gain(&mut self, station: usize) -> f64;
    fn comp_gain(&mut self, station: usize) -> Complex64;
}

/// i.i.d. unit-mean Rayleigh fading drawn from `R`.
#[derive(Debug)]
pub struct RayleighFading<R>(pub R);

impl<R: Rng> FadingSource for RayleighFading<R> {
    #[inline]
    fn power_gain(&mut self, _station: usize) -> f64 {
        Exp1.sample(&mut self.0)
    }

    fn comp_gain(&mut self, _station: usize) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.0);
        let im: f64 = StandardNormal.sample(&mut self.0);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Deterministic fading override for tests: a default gain pair plus
/// per-station exceptions.
#[derive(Debug, Clone)]
pub struct FixedFading {
    pub h: f64,
    pub g: Complex64,
    pub h_by_station: HashMap<usize, f64>,
    pub g_by_station: HashMap<usize, Complex64>,
}

impl FixedFading {
    pub fn uniform(h: f64, g: Complex64) -> Self {
        FixedFading {
            h,
            g,
            h_by_station: HashMap::new(),
            g_by_station: HashMap::new(),
        }
    }

    pub fn with_h(mut self, station: usize, h: f64) -> Self {
        self.h_by_station.insert(station, h);
        self
    }

    pub fn with_g(mut self, station: usize, g: Complex64) -> Self {
        self.g_by_station.insert(station, g);
        self
    }
}

impl FadingSource for FixedFading {
    fn power_gain(&mut self, station: usize) -> f64 {
        self.h_by_station.get(&station).copied().unwrap_or(self.h)
    }

    fn comp_gain(&mut self, station: usize) -> Complex64 {
        self.g_by_station.get(&station).copied().unwrap_or(self.g)
    }
}

/// Who serves the user and which station's interference is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ServiceMode {
    BestConnected {
        serving: usize,
    },
    /// Served by whichever of `serving`/`target` has the higher average RSS.
    Blackout {
        serving: usize,
        target: usize,
        skipped: usize,
        ic: bool,
    },
    /// Jointly served by `serving` and `target` (non-coherent sum).
    Comp {
        serving: usize,
        target: usize,
        skipped: usize,
        ic: bool,
    },
}

impl ServiceMode {
    pub fn tag(&self) -> &'static str {
        match self {
            ServiceMode::BestConnected { .. } => "best_connected",
            ServiceMode::Blackout { ic: true, .. } => "blackout_ic",
            ServiceMode::Blackout { ic: false, .. } => "blackout",
            ServiceMode::Comp { ic: true, .. } => "blackout_comp_ic",
            ServiceMode::Comp { ic: false, .. } => "blackout_comp",
        }
    }

    pub fn serving(&self) -> usize {
        match *self {
            ServiceMode::BestConnected { serving }
            | ServiceMode::Blackout { serving, .. }
            | ServiceMode::Comp { serving, .. } => serving,
        }
    }

    pub fn target(&self) -> Option<usize> {
        match *self {
            ServiceMode::BestConnected { .. } => None,
            ServiceMode::Blackout { target, .. } | ServiceMode::Comp { target, .. } => Some(target),
        }
    }

    pub fn skipped(&self) -> Option<usize> {
        match *self {
            ServiceMode::BestConnected { .. } => None,
            ServiceMode::Blackout { skipped, .. } | ServiceMode::Comp { skipped, .. } => Some(skipped),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ServiceMode::BestConnected { .. } => Ok(()),
            ServiceMode::Blackout { serving, skipped, .. } if skipped == serving => Err(Error::invalid(
                "skipped",
                "the skipped station cannot be the serving one",
            )),
            ServiceMode::Comp { serving, target, skipped, .. } if skipped == serving || target == serving => {
                Err(Error::invalid("target", "CoMP needs distinct serving, target and skipped stations"))
            }
            _ => Ok(()),
        }
    }

    fn ids(&self) -> impl Iterator<Item = usize> {
        [Some(self.serving()), self.target(), self.skipped()].into_iter().flatten()
    }
}

/// Outcome of one SINR evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinr {
    /// Signal over interference-plus-noise; [`Sinr::NO_INTERFERENCE`] when
    /// the denominator vanishes.
    pub value: f64,
    pub interference_free: bool,
}

impl Sinr {
    pub const NO_INTERFERENCE: f64 = f64::MAX;

    fn from_parts(signal: f64, denominator: f64) -> Sinr {
        if denominator > 0.0 {
            Sinr {
                value: signal / denominator,
                interference_free: false,
            }
        } else {
            Sinr {
                value: Sinr::NO_INTERFERENCE,
                interference_free: true,
            }
        }
    }

    pub fn db(&self) -> f64 {
        10.0 * self.value.log10()
    }
}

#[derive(Debug, Clone, Copy)]
struct Tracked {
    id: usize,
    // average RSS P r^-eta
    rss: f64,
    // faded power P h r^-eta
    term: f64,
    // sqrt(P) g r^(-eta/2)
    amp: Complex64,
}

/// One fading realization of the whole network seen from a point.
#[derive(Debug, Clone)]
pub struct FadedField {
    total: f64,
    tracked: Vec<Tracked>,
}

impl FadedField {
    /// Draws a fading gain for every station and records the terms of the
    /// `track` stations, which must be sorted, deduplicated, valid ids.
    pub fn draw<F: FadingSource>(point: Point, deployment: &Deployment, track: &[usize], fading: &mut F) -> Self {
        debug_assert!(track.windows(2).all(|w| w[0] < w[1]));
        let mut tracked = Vec::with_capacity(track.len());
        let mut next = 0;
        let mut total = 0.0;
        for bs in deployment.stations() {
            let d2 = bs.position.distance_sq(point);
            let rss = rss_from_sq(bs.power, 0.5 * bs.path_loss_exp, d2);
            let term = rss * fading.power_gain(bs.id);
            total += term;
            if next < track.len() && track[next] == bs.id {
                tracked.push(Tracked {
                    id: bs.id,
                    rss,
                    term,
                    amp: Complex64::new(0.0, 0.0),
                });
                next += 1;
            }
        }
        for t in &mut tracked {
            t.amp = fading.comp_gain(t.id) * t.rss.sqrt();
        }
        FadedField { total, tracked }
    }

    fn get(&self, id: usize) -> Result<&Tracked> {
        self.tracked
            .binary_search_by_key(&id, |t| t.id)
            .map(|i| &self.tracked[i])
            .map_err(|_| Error::UnknownStation(id))
    }

    /// Total faded power received from all stations.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// SINR under `mode`; all ids in `mode` must be tracked.
    pub fn sinr(&self, mode: &ServiceMode, noise_power: f64) -> Result<Sinr> {
        let mut excluded: [usize; 3] = [usize::MAX; 3];
        let mut n_excluded = 0;
        let mut exclude = |id: usize| {
            if !excluded[..n_excluded].contains(&id) {
                excluded[n_excluded] = id;
                n_excluded += 1;
            }
        };
        let signal = match *mode {
            ServiceMode::BestConnected { serving } => {
                exclude(serving);
                self.get(serving)?.term
            }
            ServiceMode::Blackout {
                serving,
                target,
                skipped,
                ic,
            } => {
                let s = self.get(serving)?;
                let t = self.get(target)?;
                let x = if t.rss > s.rss { t } else { s };
                exclude(x.id);
                if ic {
                    self.get(skipped)?;
                    exclude(skipped);
                }
                x.term
            }
            ServiceMode::Comp {
                serving,
                target,
                skipped,
                ic,
            } => {
                let s = self.get(serving)?;
                let t = self.get(target)?;
                exclude(serving);
                exclude(target);
                if ic {
                    self.get(skipped)?;
                    exclude(skipped);
                }
                (s.amp + t.amp).norm_sqr()
            }
        };
        let mut removed = 0.0;
        for &id in &excluded[..n_excluded] {
            removed += self.get(id)?.term;
        }
        let interference = (self.total - removed).max(0.0);
        Ok(Sinr::from_parts(signal, interference + noise_power))
    }
}

fn check_ids(mode: &ServiceMode, deployment: &Deployment) -> Result<Vec<usize>> {
    mode.validate()?;
    let mut ids: Vec<usize> = mode.ids().collect();
    for &id in &ids {
        deployment.station(id)?;
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

/// SINR at `point` served by its max-RSS station, all others interfering.
pub fn sinr_best_connected<F: FadingSource>(
    point: Point,
    deployment: &Deployment,
    channel: &ChannelParams,
    fading: &mut F,
) -> Result<Sinr> {
    let serving = serving_station(point, deployment)?.id;
    let mode = ServiceMode::BestConnected { serving };
    FadedField::draw(point, deployment, &[serving], fading).sinr(&mode, channel.noise_power)
}

/// Blackout SINR: the closer (stronger) of serving and target serves; the
/// skipped station is removed from the interference when `ic` is set.
pub fn sinr_blackout_ic<F: FadingSource>(
    point: Point,
    mode: &ServiceMode,
    deployment: &Deployment,
    channel: &ChannelParams,
    fading: &mut F,
) -> Result<Sinr> {
    if !matches!(mode, ServiceMode::Blackout { .. }) {
        return Err(Error::invalid("mode", format!("expected a blackout mode, got {}", mode.tag())));
    }
    sinr(point, mode, deployment, channel, fading)
}

/// Blackout SINR with non-coherent joint transmission from serving and target.
pub fn sinr_blackout_comp<F: FadingSource>(
    point: Point,
    mode: &ServiceMode,
    deployment: &Deployment,
    channel: &ChannelParams,
    fading: &mut F,
) -> Result<Sinr> {
    if !matches!(mode, ServiceMode::Comp { .. }) {
        return Err(Error::invalid("mode", format!("expected a CoMP mode, got {}", mode.tag())));
    }
    sinr(point, mode, deployment, channel, fading)
}

/// SINR at `point` under any service mode.
pub fn sinr<F: FadingSource>(
    point: Point,
    mode: &ServiceMode,
    deployment: &Deployment,
    channel: &ChannelParams,
    fading: &mut F,
) -> Result<Sinr> {
    let ids = check_ids(mode, deployment)?;
    FadedField::draw(point, deployment, &ids, fading).sinr(mode, channel.noise_power)
}
