//! Handover policies: which cell visits to skip and who serves meanwhile.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CellAreaCache, Deployment};
use crate::mobility::{min_distance_in_visit, VisitSequence};
use crate::radio::ServiceMode;

/// Default probe budget for cell-size decisions.
pub const DEFAULT_AREA_PROBES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    BestConnected,
    Alternating,
    LocationAware,
    SizeAware,
    Hybrid,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::BestConnected => "best_connected",
            PolicyKind::Alternating => "alternating",
            PolicyKind::LocationAware => "location_aware",
            PolicyKind::SizeAware => "size_aware",
            PolicyKind::Hybrid => "hybrid",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            PolicyKind::BestConnected => "bc",
            PolicyKind::Alternating => "al",
            PolicyKind::LocationAware => "la",
            PolicyKind::SizeAware => "sa",
            PolicyKind::Hybrid => "hb",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "bc" | "best_connected" => PolicyKind::BestConnected,
            "al" | "alternating" => PolicyKind::Alternating,
            "la" | "location_aware" => PolicyKind::LocationAware,
            "sa" | "size_aware" => PolicyKind::SizeAware,
            "hb" | "hybrid" => PolicyKind::Hybrid,
            other => return Err(Error::invalid("scheme", format!("unknown policy `{other}`"))),
        })
    }
}

/// A policy with absolute thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Minimum trajectory-to-station distance below which a cell is kept, km.
    pub location_threshold: Option<f64>,
    /// Cell area below which a cell is skipped, km².
    pub size_threshold: Option<f64>,
    pub comp: bool,
    pub ic: bool,
}

impl PolicyConfig {
    pub fn best_connected() -> Self {
        PolicyConfig {
            kind: PolicyKind::BestConnected,
            location_threshold: None,
            size_threshold: None,
            comp: false,
            ic: false,
        }
    }

    pub fn alternating(ic: bool, comp: bool) -> Self {
        PolicyConfig {
            kind: PolicyKind::Alternating,
            ic,
            comp,
            ..Self::best_connected()
        }
    }

    pub fn location_aware(l: f64, ic: bool, comp: bool) -> Self {
        PolicyConfig {
            kind: PolicyKind::LocationAware,
            location_threshold: Some(l),
            ic,
            comp,
            ..Self::best_connected()
        }
    }

    pub fn size_aware(s: f64, ic: bool, comp: bool) -> Self {
        PolicyConfig {
            kind: PolicyKind::SizeAware,
            size_threshold: Some(s),
            ic,
            comp,
            ..Self::best_connected()
        }
    }

    pub fn hybrid(l: f64, s: f64, ic: bool, comp: bool) -> Self {
        PolicyConfig {
            kind: PolicyKind::Hybrid,
            location_threshold: Some(l),
            size_threshold: Some(s),
            ic,
            comp,
        }
    }

    fn location(&self) -> Result<f64> {
        match self.location_threshold {
            Some(l) if l >= 0.0 => Ok(l),
            Some(_) => Err(Error::invalid("location_threshold", "must be non-negative")),
            None => Err(Error::MissingThreshold {
                policy: self.kind.name(),
                field: "location_threshold",
            }),
        }
    }

    fn size(&self) -> Result<f64> {
        match self.size_threshold {
            Some(s) if s >= 0.0 => Ok(s),
            Some(_) => Err(Error::invalid("size_threshold", "must be non-negative")),
            None => Err(Error::MissingThreshold {
                policy: self.kind.name(),
                field: "size_threshold",
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            PolicyKind::BestConnected | PolicyKind::Alternating => Ok(()),
            PolicyKind::LocationAware => self.location().map(drop),
            PolicyKind::SizeAware => self.size().map(drop),
            PolicyKind::Hybrid => {
                self.location()?;
                self.size().map(drop)
            }
        }
    }
}

/// Skip flags for each visit.
///
/// The first and last visits are always kept.
pub fn decide_skips(visits: &VisitSequence, deployment: &Deployment, config: &PolicyConfig) -> Result<Vec<bool>> {
    let mut cache = CellAreaCache::new(DEFAULT_AREA_PROBES);
    decide_skips_cached(visits, deployment, config, &mut cache)
}

/// [`decide_skips`] reusing cell areas across calls on one deployment.
pub fn decide_skips_cached(
    visits: &VisitSequence,
    deployment: &Deployment,
    config: &PolicyConfig,
    areas: &mut CellAreaCache,
) -> Result<Vec<bool>> {
    config.validate()?;
    if visits.is_empty() {
        return Err(Error::invalid("visits", "empty visit sequence"));
    }
    let n = visits.len();
    let traj = &visits.trajectory;
    let mut raw = vec![false; n];
    for (i, v) in visits.visits.iter().enumerate().take(n - 1).skip(1) {
        raw[i] = match config.kind {
            PolicyKind::BestConnected => false,
            PolicyKind::Alternating => i % 2 == 1,
            PolicyKind::LocationAware => {
                let bs = deployment.station(v.bs_id)?;
                min_distance_in_visit(traj, v, bs) > config.location()?
            }
            PolicyKind::SizeAware => {
                let bs = deployment.station(v.bs_id)?;
                areas.get(bs, deployment)?.area < config.size()?
            }
            PolicyKind::Hybrid => {
                let bs = deployment.station(v.bs_id)?;
                min_distance_in_visit(traj, v, bs) > config.location()?
                    || areas.get(bs, deployment)?.area < config.size()?
            }
        };
    }
    Ok(raw)
}

/// A stretch of trajectory under one service mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ServiceSegment {
    pub s_start: f64,
    pub s_end: f64,
    pub mode: ServiceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServiceSchedule {
    pub segments: Vec<ServiceSegment>,
    pub ho_count: usize,
    pub skip_count: usize,
    pub length: f64,
}

impl ServiceSchedule {
    /// Segment covering arc-length `s`.
    pub fn segment_at(&self, s: f64) -> &ServiceSegment {
        let k = self.segments.partition_point(|g| g.s_start <= s);
        &self.segments[k.saturating_sub(1)]
    }

    /// Station ids any segment refers to, sorted and deduplicated.
    pub fn station_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .segments
            .iter()
            .flat_map(|g| [Some(g.mode.serving()), g.mode.target(), g.mode.skipped()])
            .flatten()
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Arc-length spent in blackout.
    pub fn blackout_length(&self) -> f64 {
        self.segments
            .iter()
            .filter(|g| !matches!(g.mode, ServiceMode::BestConnected { .. }))
            .fold(0.0, |acc, g| acc + (g.s_end - g.s_start))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s_start,s_end,mode,serving,target,skipped")?;
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for g in &self.segments {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                g.s_start,
                g.s_end,
                g.mode.tag(),
                g.mode.serving(),
                opt(g.mode.target()),
                opt(g.mode.skipped())
            )?;
        }
        Ok(())
    }
}

/// Turns skip flags into service segments and counts handovers.
///
/// Kept visits are served best-connected. Each skipped visit becomes a
/// blackout segment bracketed by the last kept station before the run and
/// the first kept station after it; a skipped visit that re-enters the
/// serving cell is simply served by it. One handover is counted per kept
/// visit after the first.
pub fn build_schedule(visits: &VisitSequence, skip_flags: &[bool], config: &PolicyConfig) -> Result<ServiceSchedule> {
    let n = visits.len();
    if skip_flags.len() != n {
        return Err(Error::InconsistentSkips(format!("{} flags for {n} visits", skip_flags.len())));
    }
    if n == 0 {
        return Err(Error::InconsistentSkips("empty visit sequence".into()));
    }
    if skip_flags[0] || skip_flags[n - 1] {
        return Err(Error::InconsistentSkips("first and last visits must be kept".into()));
    }

    let mut segments = Vec::with_capacity(n);
    let mut last_kept = visits.visits[0].bs_id;
    let mut next_kept = vec![0usize; n];
    let mut upcoming = visits.visits[n - 1].bs_id;
    for i in (0..n).rev() {
        if !skip_flags[i] {
            upcoming = visits.visits[i].bs_id;
        }
        next_kept[i] = upcoming;
    }

    let mut kept = 0;
    let mut skipped_count = 0;
    for (i, v) in visits.visits.iter().enumerate() {
        let mode = if skip_flags[i] {
            skipped_count += 1;
            let target = next_kept[i];
            if v.bs_id == last_kept {
                // back inside the serving cell: nothing to skip
                ServiceMode::BestConnected { serving: last_kept }
            } else if config.comp && target != last_kept {
                ServiceMode::Comp {
                    serving: last_kept,
                    target,
                    skipped: v.bs_id,
                    ic: config.ic,
                }
            } else {
                ServiceMode::Blackout {
                    serving: last_kept,
                    target,
                    skipped: v.bs_id,
                    ic: config.ic,
                }
            }
        } else {
            kept += 1;
            last_kept = v.bs_id;
            ServiceMode::BestConnected { serving: v.bs_id }
        };
        segments.push(ServiceSegment {
            s_start: v.s_entry,
            s_end: v.s_exit,
            mode,
        });
    }
    Ok(ServiceSchedule {
        segments,
        ho_count: kept - 1,
        skip_count: skipped_count,
        length: visits.trajectory.length(),
    })
}

/// [`decide_skips`] followed by [`build_schedule`].
pub fn schedule_for(visits: &VisitSequence, deployment: &Deployment, config: &PolicyConfig) -> Result<ServiceSchedule> {
    let flags = decide_skips(visits, deployment, config)?;
    build_schedule(visits, &flags, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BaseStation, ModelTag, Point, Tier, Window};
    use crate::mobility::{CellVisit, Trajectory};

    fn seq(ids: &[usize]) -> VisitSequence {
        let n = ids.len();
        let t = Trajectory::between(Point::new(0.0, 0.0), Point::new(n as f64, 0.0), 30.0).unwrap();
        VisitSequence {
            visits: ids
                .iter()
                .enumerate()
                .map(|(i, &id)| CellVisit {
                    bs_id: id,
                    s_entry: i as f64,
                    s_exit: (i + 1) as f64,
                })
                .collect(),
            trajectory: t,
            merged: 0,
        }
    }

    fn dep(n: usize) -> Deployment {
        let w = Window::new(-20.0, 20.0, -20.0, 20.0, 1.0).unwrap();
        let stations = (0..n)
            .map(|id| BaseStation {
                id,
                position: Point::new(id as f64 + 0.5, if id % 2 == 0 { 0.1 } else { 0.6 }),
                tier: Tier::Macro,
                power: 1.0,
                path_loss_exp: 4.0,
            })
            .collect();
        Deployment::new(stations, w, ModelTag::Custom, 0).unwrap()
    }

    #[test]
    fn alternating_parity() {
        let v = seq(&[0, 1, 2, 3, 4]);
        let cfg = PolicyConfig::alternating(true, false);
        let flags = decide_skips(&v, &dep(5), &cfg).unwrap();
        assert_eq!(flags, vec![false, true, false, true, false]);
        let s = build_schedule(&v, &flags, &cfg).unwrap();
        assert_eq!((s.ho_count, s.skip_count), (2, 2));
    }

    #[test]
    fn alternating_ho_count_matches_parity_oracle() {
        for n in 1..12usize {
            let ids: Vec<usize> = (0..n).collect();
            let v = seq(&ids);
            let cfg = PolicyConfig::alternating(false, false);
            let s = schedule_for(&v, &dep(n), &cfg).unwrap();
            assert_eq!(s.ho_count, (n - 1).div_ceil(2), "n = {n}");
            assert_eq!(s.ho_count + s.skip_count, n - 1);
        }
    }

    #[test]
    fn identity_schedule_without_skips() {
        let v = seq(&[0, 1, 2, 3]);
        let cfg = PolicyConfig::best_connected();
        let s = schedule_for(&v, &dep(4), &cfg).unwrap();
        assert_eq!(s.ho_count, 3);
        assert_eq!(s.skip_count, 0);
        for (g, v) in s.segments.iter().zip(&v.visits) {
            assert_eq!(g.mode, ServiceMode::BestConnected { serving: v.bs_id });
            assert_eq!((g.s_start, g.s_end), (v.s_entry, v.s_exit));
        }
    }

    #[test]
    fn single_skip_construction() {
        let v = seq(&[0, 1, 2]);
        let cfg = PolicyConfig::location_aware(0.0, true, false);
        let s = build_schedule(&v, &[false, true, false], &cfg).unwrap();
        assert_eq!(s.ho_count, 1);
        assert_eq!(
            s.segments[1].mode,
            ServiceMode::Blackout {
                serving: 0,
                target: 2,
                skipped: 1,
                ic: true
            }
        );
        let comp = PolicyConfig::location_aware(0.0, true, true);
        let s = build_schedule(&v, &[false, true, false], &comp).unwrap();
        assert!(matches!(s.segments[1].mode, ServiceMode::Comp { serving: 0, target: 2, .. }));
    }

    #[test]
    fn consecutive_skips_share_brackets() {
        let v = seq(&[0, 1, 2, 3, 4]);
        let cfg = PolicyConfig::size_aware(1.0, false, false);
        let s = build_schedule(&v, &[false, true, true, false, false], &cfg).unwrap();
        for (k, skipped) in [(1, 1), (2, 2)] {
            assert_eq!(
                s.segments[k].mode,
                ServiceMode::Blackout {
                    serving: 0,
                    target: 3,
                    skipped,
                    ic: false
                }
            );
        }
        assert_eq!(s.ho_count, 2);
    }

    #[test]
    fn huge_location_threshold_is_best_connected() {
        let v = seq(&[0, 1, 2, 3, 4]);
        let d = dep(5);
        let la = schedule_for(&v, &d, &PolicyConfig::location_aware(1e9, true, false)).unwrap();
        let bc = schedule_for(&v, &d, &PolicyConfig::best_connected()).unwrap();
        assert_eq!(la, bc);
    }

    #[test]
    fn zero_location_threshold_skips_all_interior_visits() {
        let v = seq(&[0, 1, 2, 3, 4]);
        let flags = decide_skips(&v, &dep(5), &PolicyConfig::location_aware(0.0, false, false)).unwrap();
        assert_eq!(flags, vec![false, true, true, true, false]);
    }

    #[test]
    fn skipped_return_to_serving_cell_stays_connected() {
        let v = seq(&[0, 1, 0, 2]);
        let cfg = PolicyConfig::location_aware(0.0, false, false);
        let s = build_schedule(&v, &[false, true, true, false], &cfg).unwrap();
        assert_eq!(s.segments[2].mode, ServiceMode::BestConnected { serving: 0 });
        assert!(matches!(s.segments[1].mode, ServiceMode::Blackout { serving: 0, target: 2, .. }));
        assert_eq!((s.ho_count, s.skip_count), (1, 2));
    }

    #[test]
    fn missing_thresholds_and_bad_flags() {
        let v = seq(&[0, 1, 2]);
        let d = dep(3);
        let mut cfg = PolicyConfig::location_aware(1.0, false, false);
        cfg.location_threshold = None;
        assert!(matches!(decide_skips(&v, &d, &cfg), Err(Error::MissingThreshold { .. })));
        let mut cfg = PolicyConfig::hybrid(1.0, 1.0, false, false);
        cfg.size_threshold = None;
        assert!(matches!(decide_skips(&v, &d, &cfg), Err(Error::MissingThreshold { .. })));
        let ok = PolicyConfig::alternating(false, false);
        assert!(build_schedule(&v, &[true, false, false], &ok).is_err());
        assert!(build_schedule(&v, &[false, false, true], &ok).is_err());
        assert!(build_schedule(&v, &[false, false], &ok).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("la".parse::<PolicyKind>().unwrap(), PolicyKind::LocationAware);
        assert_eq!("Hybrid".parse::<PolicyKind>().unwrap(), PolicyKind::Hybrid);
        assert!("xx".parse::<PolicyKind>().is_err());
    }
}
