//! Base-station deployments: PPP and Matérn cluster sampling inside a
//! rectangular window, max-RSS association, and Monte Carlo cell areas.

mod index;

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{domain, StreamKey};

pub(crate) use index::rss_from_sq;
use index::GridIndex;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Axis-aligned rectangle, used for the inner (measured) region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }
}

/// Simulation window in km. Stations live anywhere inside it; measurements
/// are confined to the inner region `guard` km away from every edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub guard: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, guard: f64) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max, guard].iter().all(|v| v.is_finite());
        if !all_finite || x_max <= x_min || y_max <= y_min {
            return Err(Error::invalid("window", "degenerate or non-finite extent"));
        }
        let half = 0.5 * (x_max - x_min).min(y_max - y_min);
        if !(0.0..half).contains(&guard) {
            return Err(Error::invalid(
                "guard",
                format!("must satisfy 0 <= guard < {half} (half the shorter side), got {guard}"),
            ));
        }
        Ok(Window {
            x_min,
            x_max,
            y_min,
            y_max,
            guard,
        })
    }

    /// Window whose inner region is the square `[0, inner_side]^2`.
    pub fn around_square(inner_side: f64, guard: f64) -> Result<Self> {
        Window::new(-guard, inner_side + guard, -guard, inner_side + guard, guard)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn inner(&self) -> Rect {
        Rect {
            x_min: self.x_min + self.guard,
            x_max: self.x_max - self.guard,
            y_min: self.y_min + self.guard,
            y_max: self.y_max - self.guard,
        }
    }

    fn dilated(&self, r: f64) -> Rect {
        Rect {
            x_min: self.x_min - r,
            x_max: self.x_max + r,
            y_min: self.y_min - r,
            y_max: self.y_max + r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Macro,
    Small,
}

impl Tier {
    pub fn number(self) -> u8 {
        match self {
            Tier::Macro => 1,
            Tier::Small => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Tier> {
        match n {
            1 => Some(Tier::Macro),
            2 => Some(Tier::Small),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    pub position: Point,
    pub tier: Tier,
    /// Transmit power in watt.
    pub power: f64,
    pub path_loss_exp: f64,
}

impl BaseStation {
    /// Average (fading-free) received power at `p`.
    #[inline]
    pub fn rss_at(&self, p: Point) -> f64 {
        rss_from_sq(self.power, 0.5 * self.path_loss_exp, self.position.distance_sq(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelTag {
    Ppp,
    MaternPcp,
    Custom,
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::Ppp => "ppp",
            ModelTag::MaternPcp => "matern_pcp",
            ModelTag::Custom => "custom",
        })
    }
}

/// Parameters of the two-tier Matérn cluster deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcpParams {
    /// Parent (macro) intensity, BS/km².
    pub lambda_p: f64,
    /// Mean number of daughters per cluster.
    pub lambda_c: f64,
    /// Cluster disk radius, km.
    pub radius: f64,
    pub p1: f64,
    pub p2: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl PcpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_p > 0.0 && self.lambda_p.is_finite()) {
            return Err(Error::invalid("lambda_p", "must be positive"));
        }
        if !(self.lambda_c >= 0.0 && self.lambda_c.is_finite()) {
            return Err(Error::invalid("lambda_c", "must be non-negative"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("radius", "must be positive"));
        }
        check_station_params(self.p1, self.eta1)?;
        check_station_params(self.p2, self.eta2)
    }

    /// Total intensity `lambda_p * lambda_c + lambda_p`.
    pub fn total_intensity(&self) -> f64 {
        self.lambda_p * self.lambda_c + self.lambda_p
    }
}

fn check_station_params(power: f64, eta: f64) -> Result<()> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::invalid("power", "must be positive"));
    }
    if !(eta > 2.0 && eta.is_finite()) {
        return Err(Error::invalid("path_loss_exp", "must exceed 2"));
    }
    Ok(())
}

/// An immutable set of base stations plus its spatial index.
#[derive(Debug, Clone)]
pub struct Deployment {
    stations: Vec<BaseStation>,
    window: Window,
    model: ModelTag,
    seed: u64,
    intensity: f64,
    index: GridIndex,
}

impl Deployment {
    /// Wraps an explicit station list. Ids must equal positions in the list.
    pub fn new(stations: Vec<BaseStation>, window: Window, model: ModelTag, seed: u64) -> Result<Self> {
        let intensity = stations.len() as f64 / window.area();
        Self::with_intensity(stations, window, model, seed, intensity)
    }

    fn with_intensity(
        stations: Vec<BaseStation>,
        window: Window,
        model: ModelTag,
        seed: u64,
        intensity: f64,
    ) -> Result<Self> {
        for (i, bs) in stations.iter().enumerate() {
            if bs.id != i {
                return Err(Error::invalid("id", format!("station at index {i} has id {}", bs.id)));
            }
            if !window.contains(bs.position) {
                return Err(Error::invalid(
                    "position",
                    format!("station {} at ({}, {}) lies outside the window", bs.id, bs.position.x, bs.position.y),
                ));
            }
            check_station_params(bs.power, bs.path_loss_exp)?;
        }
        let index = GridIndex::build(&stations, window.x_min, window.y_min, window.width(), window.height());
        Ok(Deployment {
            stations,
            window,
            model,
            seed,
            intensity,
            index,
        })
    }

    pub fn stations(&self) -> &[BaseStation] {
        &self.stations
    }

    pub fn station(&self, id: usize) -> Result<&BaseStation> {
        self.stations.get(id).ok_or(Error::UnknownStation(id))
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Nominal station intensity (BS/km²): the sampling intensity for
    /// generated deployments, the empirical one for explicit lists.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn inner_count(&self) -> usize {
        let inner = self.window.inner();
        self.stations.iter().filter(|b| inner.contains(b.position)).count()
    }

    /// Writes `id,x,y,tier,power,eta` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "id,x,y,tier,power,eta")?;
        for bs in &self.stations {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                bs.id,
                bs.position.x,
                bs.position.y,
                bs.tier.number(),
                bs.power,
                bs.path_loss_exp
            )?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Deployment::write_csv`].
    pub fn read_csv<R: BufRead>(input: R, window: Window) -> Result<Self> {
        let mut stations = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if n == 0 || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            let bad = || Error::invalid("csv", format!("malformed row {}: `{line}`", n + 1));
            if f.len() != 6 {
                return Err(bad());
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            stations.push(BaseStation {
                id: f[0].trim().parse().map_err(|_| bad())?,
                position: Point::new(num(f[1])?, num(f[2])?),
                tier: f[3].trim().parse().ok().and_then(Tier::from_number).ok_or_else(bad)?,
                power: num(f[4])?,
                path_loss_exp: num(f[5])?,
            });
        }
        Deployment::new(stations, window, ModelTag::Custom, 0)
    }
}

fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::invalid("intensity", e.to_string()))?;
    Ok(dist.sample(rng) as usize)
}

fn uniform_in<R: Rng>(rect: &Rect, rng: &mut R) -> Point {
    Point::new(
        rect.x_min + rng.random::<f64>() * rect.width(),
        rect.y_min + rng.random::<f64>() * rect.height(),
    )
}

/// Homogeneous PPP of intensity `lambda` (BS/km²) with unit power and `eta = 4`.
pub fn sample_ppp(lambda: f64, window: Window, seed: u64) -> Result<Deployment> {
    sample_ppp_with(lambda, 1.0, 4.0, window, seed)
}

/// Homogeneous PPP with explicit transmit power and path-loss exponent.
pub fn sample_ppp_with(lambda: f64, power: f64, eta: f64, window: Window, seed: u64) -> Result<Deployment> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", "must be positive and finite"));
    }
    check_station_params(power, eta)?;
    let mut rng = StreamKey::new(seed).child(domain::DEPLOYMENT).rng();
    let all = Rect {
        x_min: window.x_min,
        x_max: window.x_max,
        y_min: window.y_min,
        y_max: window.y_max,
    };
    let n = poisson_count(lambda * window.area(), &mut rng)?;
    let stations = (0..n)
        .map(|id| BaseStation {
            id,
            position: uniform_in(&all, &mut rng),
            tier: Tier::Macro,
            power,
            path_loss_exp: eta,
        })
        .collect();
    Deployment::with_intensity(stations, window, ModelTag::Ppp, seed, lambda)
}

/// Two-tier Matérn cluster deployment. Parents are drawn in the window
/// dilated by the cluster radius so daughter intensity is uniform inside the
/// window; parents and daughters outside the window are dropped.
pub fn sample_matern_pcp(params: &PcpParams, window: Window, seed: u64) -> Result<Deployment> {
    params.validate()?;
    let key = StreamKey::new(seed);
    let mut rng = key.child(domain::DEPLOYMENT).rng();
    let dilated = window.dilated(params.radius);
    let n_parents = poisson_count(params.lambda_p * dilated.area(), &mut rng)?;
    let parents: Vec<Point> = (0..n_parents).map(|_| uniform_in(&dilated, &mut rng)).collect();

    let mut stations = Vec::new();
    for &p in &parents {
        if window.contains(p) {
            stations.push(BaseStation {
                id: stations.len(),
                position: p,
                tier: Tier::Macro,
                power: params.p1,
                path_loss_exp: params.eta1,
            });
        }
    }
    for (k, &p) in parents.iter().enumerate() {
        let mut drng = key.child(domain::DAUGHTERS).rng_at(k as u64);
        let n = poisson_count(params.lambda_c, &mut drng)?;
        for _ in 0..n {
            let rho = params.radius * drng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * drng.random::<f64>();
            let q = p.offset(rho * theta.cos(), rho * theta.sin());
            if window.contains(q) {
                stations.push(BaseStation {
                    id: stations.len(),
                    position: q,
                    tier: Tier::Small,
                    power: params.p2,
                    path_loss_exp: params.eta2,
                });
            }
        }
    }
    Deployment::with_intensity(stations, window, ModelTag::MaternPcp, seed, params.total_intensity())
}

/// The station with the highest average RSS `P_i * |x - pos_i|^-eta_i`
/// at `point`. Ties resolve to the lowest id.
pub fn serving_station(point: Point, deployment: &Deployment) -> Result<&BaseStation> {
    let id = deployment.index.strongest(point).ok_or(Error::EmptyDeployment)?;
    Ok(&deployment.stations[id])
}

/// Brute-force reference for [`serving_station`].
pub fn serving_station_linear(point: Point, deployment: &Deployment) -> Result<&BaseStation> {
    let mut best: Option<(f64, &BaseStation)> = None;
    for bs in &deployment.stations {
        let rss = bs.rss_at(point);
        if best.is_none_or(|(r, _)| rss > r) {
            best = Some((rss, bs));
        }
    }
    best.map(|(_, b)| b).ok_or(Error::EmptyDeployment)
}

/// Monte Carlo estimate of a cell's service area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellArea {
    pub area: f64,
    pub rel_std_err: f64,
    /// Side of the square probe box, km.
    pub box_side: f64,
    /// The cell still touched the box boundary at the size cap.
    pub unbounded: bool,
}

const RING_PROBES_PER_SIDE: usize = 64;

fn ring_is_foreign(bs: &BaseStation, deployment: &Deployment, side: f64) -> bool {
    let c = bs.position;
    let h = 0.5 * side;
    (0..RING_PROBES_PER_SIDE).all(|i| {
        let t = -h + side * (i as f64 + 0.5) / RING_PROBES_PER_SIDE as f64;
        [
            c.offset(t, -h),
            c.offset(t, h),
            c.offset(-h, t),
            c.offset(h, t),
        ]
        .into_iter()
        .all(|p| deployment.index.strongest(p) != Some(bs.id))
    })
}

/// Estimates the area of `bs`'s (weighted) Voronoi cell from `n_probe`
/// uniform probes in a square box around it.
///
/// The box starts at side `4 / sqrt(intensity)` and doubles until every probe
/// on its boundary ring is served by another station, capped at twice the
/// larger window side. Probes are keyed by the deployment seed and station id.
pub fn cell_area(bs: &BaseStation, deployment: &Deployment, n_probe: usize) -> Result<CellArea> {
    if n_probe == 0 {
        return Err(Error::invalid("n_probe", "probe budget must be positive"));
    }
    let stored = deployment.station(bs.id)?;
    if stored.position != bs.position {
        return Err(Error::UnknownStation(bs.id));
    }
    let w = deployment.window();
    let cap = 2.0 * w.width().max(w.height());
    let mut side = (4.0 / deployment.intensity().sqrt()).min(cap);
    let mut unbounded = false;
    while !ring_is_foreign(bs, deployment, side) {
        if side >= cap {
            unbounded = true;
            break;
        }
        side = (2.0 * side).min(cap);
    }

    let mut rng = StreamKey::new(deployment.seed())
        .child(domain::CELL_PROBE)
        .rng_at(bs.id as u64);
    let h = 0.5 * side;
    let mut hits = 0usize;
    for _ in 0..n_probe {
        let p = bs
            .position
            .offset(-h + side * rng.random::<f64>(), -h + side * rng.random::<f64>());
        if deployment.index.strongest(p) == Some(bs.id) {
            hits += 1;
        }
    }
    let frac = hits as f64 / n_probe as f64;
    let rel_std_err = if hits == 0 {
        f64::INFINITY
    } else {
        ((1.0 - frac) / (frac * n_probe as f64)).sqrt()
    };
    Ok(CellArea {
        area: frac * side * side,
        rel_std_err,
        box_side: side,
        unbounded,
    })
}

/// Memoizes [`cell_area`] per station for one deployment.
#[derive(Debug, Clone)]
pub struct CellAreaCache {
    n_probe: usize,
    areas: HashMap<usize, CellArea>,
}

impl CellAreaCache {
    pub fn new(n_probe: usize) -> Self {
        CellAreaCache {
            n_probe,
            areas: HashMap::new(),
        }
    }

    pub fn n_probe(&self) -> usize {
        self.n_probe
    }

    pub fn get(&mut self, bs: &BaseStation, deployment: &Deployment) -> Result<CellArea> {
        if let Some(a) = self.areas.get(&bs.id) {
            return Ok(*a);
        }
        let a = cell_area(bs, deployment, self.n_probe)?;
        self.areas.insert(bs.id, a);
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_tier_pair() -> Deployment {
        let w = Window::new(-5.0, 5.0, -5.0, 5.0, 1.0).unwrap();
        let stations = vec![
            BaseStation {
                id: 0,
                position: Point::new(-1.0, 0.0),
                tier: Tier::Macro,
                power: 1.0,
                path_loss_exp: 4.0,
            },
            BaseStation {
                id: 1,
                position: Point::new(0.85, 0.0),
                tier: Tier::Small,
                power: 0.5,
                path_loss_exp: 4.0,
            },
        ];
        Deployment::new(stations, w, ModelTag::Custom, 0).unwrap()
    }

    #[test]
    fn window_rejects_degenerate_extent_and_guard() {
        assert!(Window::new(0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(Window::new(0.0, 1.0, 0.0, 1.0, 0.5).is_err());
        assert!(Window::new(0.0, 1.0, 0.0, 1.0, -0.1).is_err());
        let w = Window::new(0.0, 4.0, 0.0, 2.0, 0.5).unwrap();
        assert_relative_eq!(w.inner().area(), 3.0);
    }

    #[test]
    fn ppp_rejects_bad_intensity() {
        let w = Window::around_square(1.0, 0.1).unwrap();
        assert!(matches!(sample_ppp(0.0, w, 1), Err(Error::InvalidParameter { .. })));
        assert!(matches!(sample_ppp(-3.0, w, 1), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn ppp_is_deterministic_per_seed() {
        let w = Window::around_square(2.0, 0.5).unwrap();
        let a = sample_ppp(50.0, w, 9).unwrap();
        let b = sample_ppp(50.0, w, 9).unwrap();
        let c = sample_ppp(50.0, w, 10).unwrap();
        assert_eq!(a.stations(), b.stations());
        assert_ne!(a.stations(), c.stations());
        assert!(a.stations().iter().all(|s| w.contains(s.position)));
    }

    #[test]
    fn weighted_association_prefers_macro_in_hand_example() {
        // 1 * 1.0^-4 = 1.0 against 0.5 * 0.85^-4 ~= 0.958
        let d = two_tier_pair();
        let p = Point::new(0.0, 0.0);
        assert_eq!(serving_station(p, &d).unwrap().id, 0);
        let rss_small = d.stations()[1].rss_at(p);
        assert_relative_eq!(rss_small, 0.5 / 0.85f64.powi(4), max_relative = 1e-12);
        assert!(rss_small < 1.0);
    }

    #[test]
    fn point_on_station_is_served_by_it() {
        let d = two_tier_pair();
        assert_eq!(serving_station(Point::new(0.85, 0.0), &d).unwrap().id, 1);
    }

    #[test]
    fn equal_rss_tie_goes_to_lower_id() {
        let w = Window::new(-5.0, 5.0, -5.0, 5.0, 1.0).unwrap();
        let mk = |id, x| BaseStation {
            id,
            position: Point::new(x, 0.0),
            tier: Tier::Macro,
            power: 1.0,
            path_loss_exp: 4.0,
        };
        let d = Deployment::new(vec![mk(0, 1.0), mk(1, -1.0)], w, ModelTag::Custom, 0).unwrap();
        assert_eq!(serving_station(Point::new(0.0, 0.3), &d).unwrap().id, 0);
    }

    #[test]
    fn empty_deployment_has_no_server() {
        let w = Window::around_square(1.0, 0.1).unwrap();
        let d = Deployment::new(vec![], w, ModelTag::Custom, 0).unwrap();
        assert!(matches!(serving_station(Point::new(0.5, 0.5), &d), Err(Error::EmptyDeployment)));
    }

    #[test]
    fn grid_matches_linear_scan_on_two_tier() {
        let params = PcpParams {
            lambda_p: 4.0,
            lambda_c: 12.0,
            radius: 0.6,
            p1: 1.0,
            p2: 0.1,
            eta1: 4.0,
            eta2: 3.5,
        };
        let w = Window::around_square(2.0, 0.5).unwrap();
        let d = sample_matern_pcp(&params, w, 3).unwrap();
        let mut rng = StreamKey::new(1).rng();
        for _ in 0..5000 {
            let p = Point::new(-1.0 + 5.0 * rng.random::<f64>(), -1.0 + 5.0 * rng.random::<f64>());
            assert_eq!(
                serving_station(p, &d).unwrap().id,
                serving_station_linear(p, &d).unwrap().id
            );
        }
    }

    #[test]
    fn lone_station_cell_is_flagged_unbounded() {
        let w = Window::around_square(2.0, 0.5).unwrap();
        let bs = BaseStation {
            id: 0,
            position: Point::new(1.0, 1.0),
            tier: Tier::Macro,
            power: 1.0,
            path_loss_exp: 4.0,
        };
        let d = Deployment::new(vec![bs], w, ModelTag::Custom, 0).unwrap();
        let a = cell_area(&bs, &d, 10_000).unwrap();
        assert!(a.unbounded);
        assert_relative_eq!(a.area, a.box_side * a.box_side);
        assert!(matches!(cell_area(&bs, &d, 0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn cell_area_is_reproducible() {
        let w = Window::around_square(1.5, 0.5).unwrap();
        let d = sample_ppp(50.0, w, 4).unwrap();
        let bs = *serving_station(Point::new(0.7, 0.7), &d).unwrap();
        let a = cell_area(&bs, &d, 10_000).unwrap();
        let b = cell_area(&bs, &d, 10_000).unwrap();
        assert_eq!(a, b);
        assert!(!a.unbounded);
        assert!(a.rel_std_err < 0.05);
    }

    #[test]
    fn csv_round_trip() {
        let w = Window::around_square(1.0, 0.2).unwrap();
        let d = sample_ppp(20.0, w, 2).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = Deployment::read_csv(buf.as_slice(), w).unwrap();
        assert_eq!(back.stations(), d.stations());
    }
}
