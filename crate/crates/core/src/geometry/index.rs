//! Uniform bucket grid answering max-RSS association queries.
//!
//! Cells are scanned in Chebyshev rings around the query. After ring `k`
//! every unscanned station is at least `k * cell` away, so the search stops
//! once the best RSS any tier could deliver from that distance falls below
//! the current winner.

use super::{BaseStation, Point};

#[derive(Debug, Clone, Copy)]
struct Entry {
    x: f64,
    y: f64,
    power: f64,
    half_eta: f64,
    id: usize,
}

impl Entry {
    #[inline]
    fn rss(&self, p: Point) -> f64 {
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        rss_from_sq(self.power, self.half_eta, dx * dx + dy * dy)
    }
}

/// Average received power `P * d^-eta` from a squared distance.
#[inline]
pub(crate) fn rss_from_sq(power: f64, half_eta: f64, d2: f64) -> f64 {
    if half_eta == 2.0 {
        power / (d2 * d2)
    } else {
        power * d2.powf(-half_eta)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct GridIndex {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: i64,
    ny: i64,
    starts: Vec<u32>,
    entries: Vec<Entry>,
    // distinct (power, half_eta) pairs, used for the stopping bound
    tiers: Vec<(f64, f64)>,
}

impl GridIndex {
    pub(crate) fn build(stations: &[BaseStation], x0: f64, y0: f64, width: f64, height: f64) -> Self {
        let n = stations.len().max(1) as f64;
        // about two stations per cell
        let cell = ((width * height * 2.0) / n).sqrt().max(1e-9);
        let nx = ((width / cell).ceil() as i64).clamp(1, 4096);
        let ny = ((height / cell).ceil() as i64).clamp(1, 4096);
        let cell = (width / nx as f64).max(height / ny as f64);

        let mut tiers: Vec<(f64, f64)> = Vec::new();
        let mut counts = vec![0u32; (nx * ny) as usize + 1];
        let mut slots = Vec::with_capacity(stations.len());
        for bs in stations {
            let cx = (((bs.position.x - x0) / cell).floor() as i64).clamp(0, nx - 1);
            let cy = (((bs.position.y - y0) / cell).floor() as i64).clamp(0, ny - 1);
            let slot = (cy * nx + cx) as usize;
            counts[slot + 1] += 1;
            slots.push(slot);
            let t = (bs.power, bs.path_loss_exp / 2.0);
            if !tiers.contains(&t) {
                tiers.push(t);
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut entries = vec![
            Entry {
                x: 0.0,
                y: 0.0,
                power: 0.0,
                half_eta: 0.0,
                id: 0,
            };
            stations.len()
        ];
        for (bs, slot) in stations.iter().zip(slots) {
            let at = fill[slot] as usize;
            fill[slot] += 1;
            entries[at] = Entry {
                x: bs.position.x,
                y: bs.position.y,
                power: bs.power,
                half_eta: bs.path_loss_exp / 2.0,
                id: bs.id,
            };
        }
        GridIndex {
            x0,
            y0,
            cell,
            nx,
            ny,
            starts,
            entries,
            tiers,
        }
    }

    fn bound_at(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return f64::INFINITY;
        }
        let d2 = d * d;
        self.tiers
            .iter()
            .map(|&(p, h)| rss_from_sq(p, h, d2))
            .fold(0.0, f64::max)
    }

    #[inline]
    fn scan_cell(&self, cx: i64, cy: i64, p: Point, best: &mut Option<(f64, usize)>) {
        let slot = (cy * self.nx + cx) as usize;
        let (a, b) = (self.starts[slot] as usize, self.starts[slot + 1] as usize);
        for e in &self.entries[a..b] {
            let rss = e.rss(p);
            match *best {
                Some((r, id)) if rss < r || (rss == r && e.id > id) => {}
                _ => *best = Some((rss, e.id)),
            }
        }
    }

    /// Station id with the highest average RSS at `p`; ties go to the lower id.
    pub(crate) fn strongest(&self, p: Point) -> Option<usize> {
        if self.entries.is_empty() {
            return None;
        }
        let cx = ((p.x - self.x0) / self.cell).floor() as i64;
        let cy = ((p.y - self.y0) / self.cell).floor() as i64;
        let max_ring = [cx, self.nx - 1 - cx, cy, self.ny - 1 - cy]
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
            + 1;
        let mut best: Option<(f64, usize)> = None;
        for k in 0..=max_ring {
            let y_lo = (cy - k).max(0);
            let y_hi = (cy + k).min(self.ny - 1);
            for y in y_lo..=y_hi {
                if y == cy - k || y == cy + k {
                    let x_lo = (cx - k).max(0);
                    let x_hi = (cx + k).min(self.nx - 1);
                    for x in x_lo..=x_hi {
                        self.scan_cell(x, y, p, &mut best);
                    }
                } else {
                    if cx - k >= 0 && cx - k < self.nx {
                        self.scan_cell(cx - k, y, p, &mut best);
                    }
                    if k > 0 && cx + k >= 0 && cx + k < self.nx {
                        self.scan_cell(cx + k, y, p, &mut best);
                    }
                }
            }
            if let Some((rss, _)) = best {
                if self.bound_at(k as f64 * self.cell) < rss {
                    break;
                }
            }
        }
        best.map(|(_, id)| id)
    }
}
