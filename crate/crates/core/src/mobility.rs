//! Linear user trajectories and the sequence of cells they cross.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{serving_station, BaseStation, Deployment, Point, Rect};

/// A directed segment traversed at constant speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    origin: Point,
    direction: Point,
    length: f64,
    /// km/h
    velocity: f64,
}

impl Trajectory {
    pub fn new(origin: Point, direction: Point, length: f64, velocity: f64) -> Result<Self> {
        let norm = (direction.x * direction.x + direction.y * direction.y).sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::invalid("direction", format!("must be a unit vector, norm is {norm}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("length", "must be positive"));
        }
        if !(velocity >= 0.0 && velocity.is_finite()) {
            return Err(Error::invalid("velocity", "must be non-negative"));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::invalid("origin", "must be finite"));
        }
        Ok(Trajectory {
            origin,
            direction,
            length,
            velocity,
        })
    }

    /// Straight path from `a` to `b`.
    pub fn between(a: Point, b: Point, velocity: f64) -> Result<Self> {
        let length = a.distance(b);
        if length == 0.0 {
            return Err(Error::invalid("length", "endpoints coincide"));
        }
        let dir = Point::new((b.x - a.x) / length, (b.y - a.y) / length);
        Trajectory::new(a, dir, length, velocity)
    }

    /// Path of `length` starting at `origin` with heading `angle` (radians).
    pub fn with_heading(origin: Point, angle: f64, length: f64, velocity: f64) -> Result<Self> {
        Trajectory::new(origin, Point::new(angle.cos(), angle.sin()), length, velocity)
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn direction(&self) -> Point {
        self.direction
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn with_velocity(mut self, velocity: f64) -> Result<Self> {
        if !(velocity >= 0.0 && velocity.is_finite()) {
            return Err(Error::invalid("velocity", "must be non-negative"));
        }
        self.velocity = velocity;
        Ok(self)
    }

    pub fn end(&self) -> Point {
        self.at(self.length)
    }

    #[inline]
    pub(crate) fn at(&self, s: f64) -> Point {
        self.origin.offset(s * self.direction.x, s * self.direction.y)
    }

    /// Position at arc-length `s`.
    pub fn point_at(&self, s: f64) -> Result<Point> {
        if !(0.0..=self.length).contains(&s) {
            return Err(Error::ArcLengthOutOfRange { s, length: self.length });
        }
        Ok(self.at(s))
    }

    pub fn is_inside(&self, region: &Rect) -> bool {
        region.contains(self.origin) && region.contains(self.end())
    }
}

/// One stay inside a single cell, in arc-length coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellVisit {
    pub bs_id: usize,
    pub s_entry: f64,
    pub s_exit: f64,
}

impl CellVisit {
    pub fn dwell(&self) -> f64 {
        self.s_exit - self.s_entry
    }
}

/// Contiguous visits covering `[0, length]`; consecutive visits differ in station.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisitSequence {
    pub visits: Vec<CellVisit>,
    pub trajectory: Trajectory,
    /// Crossings closer than the refinement tolerance that were folded away.
    pub merged: usize,
}

impl VisitSequence {
    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    /// Handovers under always-best-connected association.
    pub fn crossings(&self) -> usize {
        self.visits.len().saturating_sub(1)
    }

    /// Index of the visit containing arc-length `s` (right-continuous).
    pub fn visit_at(&self, s: f64) -> usize {
        let k = self.visits.partition_point(|v| v.s_entry <= s);
        k.saturating_sub(1)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bs_id,s_entry,s_exit")?;
        for v in &self.visits {
            writeln!(out, "{},{},{}", v.bs_id, v.s_entry, v.s_exit)?;
        }
        Ok(())
    }

    /// Checks contiguity, coverage and distinctness.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentSkips(m));
        let Some(first) = self.visits.first() else {
            return bad("empty visit sequence".into());
        };
        if first.s_entry != 0.0 || self.visits.last().map(|v| v.s_exit) != Some(self.trajectory.length()) {
            return bad("visits do not cover [0, length]".into());
        }
        for w in self.visits.windows(2) {
            if w[0].s_exit != w[1].s_entry || w[0].bs_id == w[1].bs_id {
                return bad(format!("visits {:?} and {:?} are not contiguous and distinct", w[0], w[1]));
            }
        }
        if self.visits.iter().any(|v| !(v.s_entry < v.s_exit)) {
            return bad("empty visit".into());
        }
        Ok(())
    }
}

/// Walk parameters for [`extract_visits`], both in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub step: f64,
    pub tol: f64,
}

impl WalkParams {
    /// `step = 0.1 / sqrt(lambda)`, `tol = 1e-4 / sqrt(lambda)`.
    pub fn for_intensity(lambda: f64) -> Self {
        let r = 1.0 / lambda.sqrt();
        WalkParams {
            step: 0.1 * r,
            tol: 1e-4 * r,
        }
    }
}

struct Walker<'a> {
    traj: &'a Trajectory,
    dep: &'a Deployment,
    tol: f64,
}

impl Walker<'_> {
    fn id_at(&self, s: f64) -> usize {
        // deployment non-emptiness is checked up front
        serving_station(self.traj.at(s), self.dep).map(|b| b.id).unwrap_or(usize::MAX)
    }

    /// Crossings inside `(a, b)` where the server changes from `ida` to `idb`.
    fn refine(&self, a: f64, ida: usize, b: f64, idb: usize, out: &mut Vec<(f64, usize)>) {
        if b - a <= self.tol {
            out.push((0.5 * (a + b), idb));
            return;
        }
        let m = 0.5 * (a + b);
        let idm = self.id_at(m);
        if idm == ida {
            self.refine(m, ida, b, idb, out);
        } else if idm == idb {
            self.refine(a, ida, m, idb, out);
        } else {
            self.refine(a, ida, m, idm, out);
            self.refine(m, idm, b, idb, out);
        }
    }
}

/// Cells visited along `trajectory`, with boundaries located to within `tol`.
///
/// The path is probed every `step` km; a change of server triggers a
/// bisection on that interval. Cells entered and left between two probes
/// with the same server at both ends are not seen, and dwell shorter than
/// `tol` is merged into its neighbour (counted in `merged`).
pub fn extract_visits(
    trajectory: &Trajectory,
    deployment: &Deployment,
    step: f64,
    tol: f64,
) -> Result<VisitSequence> {
    if deployment.is_empty() {
        return Err(Error::EmptyDeployment);
    }
    if !(tol > 0.0 && step > 0.0 && step >= tol && step.is_finite()) {
        return Err(Error::invalid("step", format!("need step >= tol > 0, got step={step}, tol={tol}")));
    }
    let inner = deployment.window().inner();
    if !trajectory.is_inside(&inner) {
        return Err(Error::TrajectoryOutside(format!(
            "{:?} -> {:?} not within inner region {:?}",
            trajectory.origin(),
            trajectory.end(),
            inner
        )));
    }

    let walker = Walker {
        traj: trajectory,
        dep: deployment,
        tol,
    };
    let length = trajectory.length();
    let n_steps = (length / step).ceil().max(1.0) as usize;
    let first = walker.id_at(0.0);
    let mut crossings: Vec<(f64, usize)> = Vec::new();
    let mut prev_s = 0.0;
    let mut prev_id = first;
    for i in 1..=n_steps {
        let s = if i == n_steps { length } else { i as f64 * step };
        let id = walker.id_at(s);
        if id != prev_id {
            walker.refine(prev_s, prev_id, s, id, &mut crossings);
        }
        prev_s = s;
        prev_id = id;
    }

    let mut visits: Vec<CellVisit> = Vec::with_capacity(crossings.len() + 1);
    let mut merged = 0;
    let mut cur_id = first;
    let mut cur_start = 0.0;
    for (s, id) in crossings {
        if id == cur_id {
            merged += 1;
            continue;
        }
        if s - cur_start < tol {
            // sliver: fold it into a neighbour
            merged += 1;
            match visits.last() {
                Some(prev) if prev.bs_id == id => {
                    cur_start = prev.s_entry;
                    visits.pop();
                }
                _ => {}
            }
            cur_id = id;
            continue;
        }
        visits.push(CellVisit {
            bs_id: cur_id,
            s_entry: cur_start,
            s_exit: s,
        });
        cur_id = id;
        cur_start = s;
    }
    match visits.last_mut() {
        Some(last) if length - cur_start < tol => {
            merged += 1;
            last.s_exit = length;
        }
        _ => visits.push(CellVisit {
            bs_id: cur_id,
            s_entry: cur_start,
            s_exit: length,
        }),
    }

    let seq = VisitSequence {
        visits,
        trajectory: *trajectory,
        merged,
    };
    debug_assert!(seq.validate().is_ok(), "{:?}", seq.validate());
    Ok(seq)
}

/// Shortest distance between `bs` and the part of the path inside `visit`.
pub fn min_distance_in_visit(trajectory: &Trajectory, visit: &CellVisit, bs: &BaseStation) -> f64 {
    let o = trajectory.origin();
    let d = trajectory.direction();
    let along = (bs.position.x - o.x) * d.x + (bs.position.y - o.y) * d.y;
    let s = along.clamp(visit.s_entry, visit.s_exit);
    trajectory.at(s).distance(bs.position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ModelTag, Tier, Window};
    use approx::assert_relative_eq;

    fn station(id: usize, x: f64, y: f64) -> BaseStation {
        BaseStation {
            id,
            position: Point::new(x, y),
            tier: Tier::Macro,
            power: 1.0,
            path_loss_exp: 4.0,
        }
    }

    fn deployment(stations: Vec<BaseStation>) -> Deployment {
        let w = Window::new(-10.0, 10.0, -10.0, 10.0, 2.0).unwrap();
        Deployment::new(stations, w, ModelTag::Custom, 0).unwrap()
    }

    #[test]
    fn point_at_endpoints_and_midpoint() {
        let t = Trajectory::between(Point::new(1.0, 2.0), Point::new(4.0, 6.0), 50.0).unwrap();
        assert_eq!(t.point_at(0.0).unwrap(), Point::new(1.0, 2.0));
        let e = t.point_at(t.length()).unwrap();
        assert_relative_eq!(e.x, 4.0, epsilon = 1e-12);
        assert_relative_eq!(e.y, 6.0, epsilon = 1e-12);
        let m = t.point_at(2.5).unwrap();
        assert_relative_eq!(m.distance(t.origin()), 2.5, epsilon = 1e-12);
        assert!(matches!(t.point_at(5.1), Err(Error::ArcLengthOutOfRange { .. })));
        assert!(t.point_at(-0.1).is_err());
    }

    #[test]
    fn rejects_non_unit_direction() {
        assert!(Trajectory::new(Point::default(), Point::new(1.0, 1.0), 1.0, 0.0).is_err());
        assert!(Trajectory::new(Point::default(), Point::new(1.0, 0.0), 0.0, 0.0).is_err());
        assert!(Trajectory::new(Point::default(), Point::new(1.0, 0.0), 1.0, -1.0).is_err());
    }

    #[test]
    fn symmetric_pair_gives_one_crossing_at_midpoint() {
        let d = deployment(vec![station(0, -1.0, 0.0), station(1, 1.0, 0.0)]);
        let t = Trajectory::between(Point::new(-2.0, 0.0), Point::new(2.0, 0.0), 60.0).unwrap();
        let tol = 1e-6;
        let v = extract_visits(&t, &d, 0.05, tol).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.crossings(), 1);
        assert!((v.visits[0].s_exit - 2.0).abs() <= tol);
        assert_eq!(v.visits[0].bs_id, 0);
        assert_eq!(v.visits[1].bs_id, 1);
        v.validate().unwrap();
    }

    #[test]
    fn trajectory_inside_one_cell_has_no_handover() {
        let d = deployment(vec![station(0, 0.0, 0.0), station(1, 5.0, 0.0)]);
        let t = Trajectory::between(Point::new(-1.0, 0.0), Point::new(1.0, 0.5), 10.0).unwrap();
        let v = extract_visits(&t, &d, 0.01, 1e-5).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.crossings(), 0);
        assert_eq!(v.visits[0].s_entry, 0.0);
        assert_eq!(v.visits[0].s_exit, t.length());
    }

    #[test]
    fn walk_detects_cell_between_probes() {
        // middle cell is narrower than the step, so bisection must find it
        let d = deployment(vec![station(0, -1.0, 0.0), station(1, 0.0, 0.3), station(2, 1.0, 0.0)]);
        let t = Trajectory::between(Point::new(-2.0, 0.0), Point::new(2.0, 0.0), 0.0).unwrap();
        let v = extract_visits(&t, &d, 4.0, 1e-7).unwrap();
        let ids: Vec<usize> = v.visits.iter().map(|x| x.bs_id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_walk_parameters() {
        let d = deployment(vec![station(0, 0.0, 0.0)]);
        let t = Trajectory::between(Point::new(-1.0, 0.0), Point::new(1.0, 0.0), 0.0).unwrap();
        assert!(extract_visits(&t, &d, 0.0, 0.0).is_err());
        assert!(extract_visits(&t, &d, 1e-4, 1e-3).is_err());
        let empty = deployment(vec![]);
        assert!(matches!(extract_visits(&t, &empty, 0.1, 0.01), Err(Error::EmptyDeployment)));
        let outside = Trajectory::between(Point::new(0.0, 0.0), Point::new(9.0, 0.0), 0.0).unwrap();
        assert!(matches!(extract_visits(&outside, &d, 0.1, 0.01), Err(Error::TrajectoryOutside(_))));
    }

    #[test]
    fn min_distance_cases() {
        let t = Trajectory::between(Point::new(-1.0, 0.0), Point::new(4.0, 0.0), 0.0).unwrap();
        let whole = CellVisit {
            bs_id: 0,
            s_entry: 0.0,
            s_exit: 2.0,
        };
        // perpendicular foot inside the interval
        assert_relative_eq!(min_distance_in_visit(&t, &whole, &station(0, 0.0, 1.0)), 1.0);
        // clamped to the visit end at (1, 0)
        assert_relative_eq!(
            min_distance_in_visit(&t, &whole, &station(0, 5.0, 5.0)),
            41f64.sqrt(),
            max_relative = 1e-12
        );
        assert_eq!(min_distance_in_visit(&t, &whole, &station(0, 0.5, 0.0)), 0.0);
    }

    #[test]
    fn visit_lookup() {
        let d = deployment(vec![station(0, -1.0, 0.0), station(1, 1.0, 0.0)]);
        let t = Trajectory::between(Point::new(-2.0, 0.0), Point::new(2.0, 0.0), 60.0).unwrap();
        let v = extract_visits(&t, &d, 0.05, 1e-6).unwrap();
        assert_eq!(v.visit_at(0.0), 0);
        assert_eq!(v.visit_at(1.0), 0);
        assert_eq!(v.visit_at(3.0), 1);
        assert_eq!(v.visit_at(4.0), 1);
    }
}
