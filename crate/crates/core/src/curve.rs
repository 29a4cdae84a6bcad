//! Polygonal plane curves: the geometry carrier shared by every module.
//!
//! Discrete curvature at a vertex is the signed turning angle between the two
//! adjacent edges divided by the mean of their lengths; it is positive for
//! left turns, so a counter-clockwise convex loop has positive curvature and
//! `N = i T` points inward.

use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

/// Edge length for local curvature `k`: at most `max_turn` radians of
/// turning and a chord sag `h² |k| / 8` of at most `max_sag` (zero disables
/// the sag cap), clamped to `[lo, hi]`.
pub fn edge_spacing(k: f64, max_turn: f64, max_sag: f64, lo: f64, hi: f64) -> f64 {
    let k = k.abs().max(1e-300);
    let mut h = max_turn / k;
    if max_sag > 0.0 {
        h = h.min((8.0 * max_sag / k).sqrt());
    }
    h.clamp(lo, hi)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneCurve {
    points: Vec<Vec2>,
    closed: bool,
    resample_h: f64,
    #[serde(skip)]
    tangents: Vec<Vec2>,
    #[serde(skip)]
    curvature: Vec<f64>,
}

/// Segment index of the edge leaving vertex `i`.
#[inline]
fn next(i: usize, n: usize) -> usize {
    if i + 1 == n {
        0
    } else {
        i + 1
    }
}

impl PlaneCurve {
    pub fn new(points: Vec<Vec2>, closed: bool, resample_h: f64) -> Self {
        let mut c = Self {
            points,
            closed,
            resample_h,
            tangents: Vec::new(),
            curvature: Vec::new(),
        };
        c.refresh();
        c
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn resample_h(&self) -> f64 {
        self.resample_h
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tangents(&self) -> &[Vec2] {
        &self.tangents
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn normal(&self, i: usize) -> Vec2 {
        self.tangents[i].perp()
    }

    pub fn num_edges(&self) -> usize {
        let n = self.points.len();
        if self.closed {
            n
        } else {
            n.saturating_sub(1)
        }
    }

    /// Endpoints of edge `e`.
    #[inline]
    pub fn edge(&self, e: usize) -> (Vec2, Vec2) {
        let n = self.points.len();
        (self.points[e], self.points[next(e, n)])
    }

    pub fn edge_len(&self, e: usize) -> f64 {
        let (a, b) = self.edge(e);
        a.dist(b)
    }

    pub fn length(&self) -> f64 {
        (0..self.num_edges()).map(|e| self.edge_len(e)).sum()
    }

    /// Shoelace area; positive for counter-clockwise loops. Open curves are
    /// closed by their chord.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut a = 0.0;
        for i in 0..n {
            a += self.points[i].cross(self.points[next(i, n)]);
        }
        0.5 * a
    }

    pub fn spacing_range(&self) -> (f64, f64) {
        (0..self.num_edges())
            .map(|e| self.edge_len(e))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| (lo.min(l), hi.max(l)))
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }

    pub fn set_points(&mut self, points: Vec<Vec2>) {
        self.points = points;
        self.refresh();
    }

    pub fn map_points<F: Fn(Vec2) -> Vec2>(&self, f: F) -> PlaneCurve {
        PlaneCurve::new(self.points.iter().map(|&p| f(p)).collect(), self.closed, self.resample_h)
    }

    /// Recompute tangents and curvature after the vertices changed.
    pub fn refresh(&mut self) {
        let n = self.points.len();
        self.tangents.clear();
        self.curvature.clear();
        if n < 2 {
            self.tangents.resize(n, Vec2::new(1.0, 0.0));
            self.curvature.resize(n, 0.0);
            return;
        }
        for i in 0..n {
            let interior = self.closed || (i > 0 && i + 1 < n);
            if !interior {
                let e = if i == 0 {
                    self.points[1] - self.points[0]
                } else {
                    self.points[n - 1] - self.points[n - 2]
                };
                self.tangents.push(e.normalized());
                self.curvature.push(0.0);
                continue;
            }
            let prev = self.points[if i == 0 { n - 1 } else { i - 1 }];
            let nxt = self.points[next(i, n)];
            let e0 = self.points[i] - prev;
            let e1 = nxt - self.points[i];
            let (l0, l1) = (e0.norm(), e1.norm());
            let turn = e0.cross(e1).atan2(e0.dot(e1));
            self.curvature.push(turn / (0.5 * (l0 + l1)));
            self.tangents.push((e0 / l0 + e1 / l1).normalized());
        }
        if !self.closed && n >= 3 {
            self.curvature[0] = self.curvature[1];
            self.curvature[n - 1] = self.curvature[n - 2];
        }
    }

    /// Number of curvature sign changes, ignoring values whose magnitude is
    /// below `theta_h * max|curvature|` (hysteresis). Closed curves are counted
    /// cyclically.
    pub fn inflection_count(&self, theta_h: f64) -> usize {
        self.inflection_indices(theta_h).len()
    }

    /// Vertex indices at which the filtered curvature sign flips.
    pub fn inflection_indices(&self, theta_h: f64) -> Vec<usize> {
        let thr = theta_h * self.max_abs_curvature();
        let n = self.curvature.len();
        let Some(start) = (0..n).find(|&i| self.curvature[i].abs() > thr) else {
            return Vec::new();
        };
        let mut sign = self.curvature[start].signum();
        let mut out = Vec::new();
        let span = if self.closed { n } else { n - start };
        for k in 1..=span {
            let i = (start + k) % n;
            if !self.closed && start + k >= n {
                break;
            }
            let c = self.curvature[i];
            if c.abs() > thr && c.signum() != sign {
                sign = c.signum();
                out.push(i);
            }
        }
        out
    }

    /// Position on edge `e` at fraction `u` using a cubic Hermite segment with
    /// second-order tangents estimated from the neighbouring vertices.
    pub fn interpolate(&self, e: usize, u: f64) -> Vec2 {
        let n = self.points.len();
        let i0 = e;
        let i1 = next(e, n);
        let p0 = self.points[i0];
        let p1 = self.points[i1];
        let l = p0.dist(p1);
        let m0 = self.vertex_derivative(i0);
        let m1 = self.vertex_derivative(i1);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        p0 * h00 + m0 * (h10 * l) + p1 * h01 + m1 * (h11 * l)
    }

    /// Unit-speed derivative estimate at a vertex (three-point, non-uniform).
    fn vertex_derivative(&self, i: usize) -> Vec2 {
        let n = self.points.len();
        let has_prev = self.closed || i > 0;
        let has_next = self.closed || i + 1 < n;
        let p = self.points[i];
        match (has_prev, has_next) {
            (true, true) => {
                let a = self.points[if i == 0 { n - 1 } else { i - 1 }];
                let b = self.points[next(i, n)];
                let (l0, l1) = (p.dist(a), p.dist(b));
                let d0 = (p - a) / l0;
                let d1 = (b - p) / l1;
                (d1 * l0 + d0 * l1) / (l0 + l1)
            }
            (false, true) => (self.points[1] - p).normalized(),
            (true, false) => (p - self.points[n - 2]).normalized(),
            (false, false) => Vec2::new(1.0, 0.0),
        }
    }

    /// Global redistribution to (nearly) uniform spacing `h` by cubic
    /// interpolation along the polygon.
    pub fn resample_uniform(&self, h: f64) -> PlaneCurve {
        let ne = self.num_edges();
        let lens: Vec<f64> = (0..ne).map(|e| self.edge_len(e)).collect();
        let total: f64 = lens.iter().sum();
        let segs = ((total / h).round() as usize).max(if self.closed { 3 } else { 1 });
        let step = total / segs as f64;
        let count = if self.closed { segs } else { segs + 1 };
        let mut out = Vec::with_capacity(count);
        let mut e = 0usize;
        let mut acc = 0.0;
        for k in 0..count {
            let target = k as f64 * step;
            while e + 1 < ne && acc + lens[e] < target {
                acc += lens[e];
                e += 1;
            }
            let u = if lens[e] > 0.0 {
                ((target - acc) / lens[e]).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out.push(self.interpolate(e, u));
        }
        if !self.closed {
            *out.last_mut().unwrap() = *self.points.last().unwrap();
        }
        PlaneCurve::new(out, self.closed, h)
    }

    /// Limit a per-vertex spacing field so it grows by at most `grading` per
    /// unit arclength (two sweeps in each direction, cyclic when closed).
    pub fn grade_spacing(&self, target: &mut [f64], grading: f64) {
        let n = self.points.len();
        let ne = self.num_edges();
        let sweeps = if self.closed { 2 } else { 1 };
        for _ in 0..sweeps {
            for e in 0..ne {
                let j = next(e, n);
                target[j] = target[j].min(target[e] + grading * self.edge_len(e));
            }
            for e in (0..ne).rev() {
                let j = next(e, n);
                target[e] = target[e].min(target[j] + grading * self.edge_len(e));
            }
        }
    }

    /// Resample so the local spacing follows `target` (one value per vertex,
    /// linear in between). Point counts come from `∫ dl / target`, so the
    /// result is deterministic and matches the field up to rounding.
    pub fn resample_graded(&self, target: &[f64]) -> PlaneCurve {
        let n = self.points.len();
        let ne = self.num_edges();
        let mut tau = Vec::with_capacity(ne + 1);
        tau.push(0.0);
        for e in 0..ne {
            let l = self.edge_len(e);
            let (a, b) = (target[e], target[next(e, n)]);
            tau.push(tau[e] + 0.5 * l * (1.0 / a + 1.0 / b));
        }
        let total = tau[ne];
        let count = (total.round() as usize).max(if self.closed { 3 } else { 1 });
        let dt = total / count as f64;
        let m = if self.closed { count } else { count + 1 };
        let mut out = Vec::with_capacity(m);
        let mut e = 0usize;
        let mut h_lo = f64::INFINITY;
        for k in 0..m {
            let t = k as f64 * dt;
            while e + 1 < ne && tau[e + 1] < t {
                e += 1;
            }
            let span = tau[e + 1] - tau[e];
            let u = if span > 0.0 { ((t - tau[e]) / span).clamp(0.0, 1.0) } else { 0.0 };
            out.push(self.interpolate(e, u));
            h_lo = h_lo.min(target[e]);
        }
        if !self.closed {
            *out.last_mut().unwrap() = *self.points.last().unwrap();
        }
        PlaneCurve::new(out, self.closed, h_lo)
    }

    /// Local remeshing against a per-vertex target spacing: edges longer than
    /// `split * target` are bisected (cubic midpoint), vertices whose two
    /// adjacent edges sum to less than `merge * target` are removed. Endpoints
    /// of open curves are never removed. Returns (inserted, removed).
    pub fn remesh_local(&mut self, target: &[f64], split: f64, merge: f64) -> (usize, usize) {
        debug_assert_eq!(target.len(), self.points.len());
        let n = self.points.len();
        // Removal pass: greedy, never two neighbours in one sweep.
        let mut keep = vec![true; n];
        let mut removed = 0;
        let mut last_removed = usize::MAX - 1;
        for i in 0..n {
            if !self.closed && (i == 0 || i + 1 == n) {
                continue;
            }
            if i == last_removed + 1 || (self.closed && i + 1 == n && !keep[0]) {
                continue;
            }
            let prev = if i == 0 { n - 1 } else { i - 1 };
            let a = self.points[prev];
            let b = self.points[next(i, n)];
            let p = self.points[i];
            let t = target[i];
            if a.dist(p) + p.dist(b) < merge * t && a.dist(b) < split * t.min(target[prev]) {
                keep[i] = false;
                removed += 1;
                last_removed = i;
            }
        }
        if removed > 0 && n - removed >= 4 {
            let mut pts = Vec::with_capacity(n - removed);
            let mut tg = Vec::with_capacity(n - removed);
            for i in 0..n {
                if keep[i] {
                    pts.push(self.points[i]);
                    tg.push(target[i]);
                }
            }
            self.points = pts;
            self.refresh();
            return (self.split_long(&tg, split), removed);
        }
        (self.split_long(target, split), 0)
    }

    fn split_long(&mut self, target: &[f64], split: f64) -> usize {
        let n = self.points.len();
        let ne = self.num_edges();
        let mut inserts: Vec<(usize, Vec2)> = Vec::new();
        for e in 0..ne {
            let t = target[e].min(target[next(e, n)]);
            if self.edge_len(e) > split * t {
                inserts.push((e, self.interpolate(e, 0.5)));
            }
        }
        if inserts.is_empty() {
            return 0;
        }
        let mut pts = Vec::with_capacity(n + inserts.len());
        let mut k = 0;
        for i in 0..n {
            pts.push(self.points[i]);
            if k < inserts.len() && inserts[k].0 == i {
                pts.push(inserts[k].1);
                k += 1;
            }
        }
        let count = inserts.len();
        self.points = pts;
        self.refresh();
        count
    }

    /// Bounding box `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn segment_grid(&self) -> SegmentGrid {
        SegmentGrid::build(self)
    }

    /// True if no two non-adjacent edges intersect.
    pub fn is_embedded(&self) -> bool {
        self.segment_grid().first_crossing(self).is_none()
    }

    /// Winding number of a closed curve about `p` (0 outside).
    pub fn winding_number(&self, p: Vec2) -> i32 {
        winding_number(&self.points, p)
    }

    /// Minimum distance from `p` to the polygon (brute force).
    pub fn distance_to(&self, p: Vec2) -> f64 {
        (0..self.num_edges())
            .map(|e| {
                let (a, b) = self.edge(e);
                point_segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sq();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Winding number of the closed polygon `pts` about `p` (Sunday's crossing rule).
pub fn winding_number(pts: &[Vec2], p: Vec2) -> i32 {
    let n = pts.len();
    let mut wn = 0;
    for i in 0..n {
        wn += crossing_contribution(pts[i], pts[next(i, n)], p);
    }
    wn
}

#[inline]
fn crossing_contribution(a: Vec2, b: Vec2, p: Vec2) -> i32 {
    if a.y <= p.y {
        if b.y > p.y && (b - a).cross(p - a) > 0.0 {
            return 1;
        }
    } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
        return -1;
    }
    0
}

/// Proper or touching intersection of segments `ab` and `cd`.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

/// Uniform bucket grid over the edges of a polygon, used for intersection
/// sweeps, near-distance queries and ray-cast winding numbers.
pub struct SegmentGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentGrid {
    pub fn build(curve: &PlaneCurve) -> Self {
        let (lo, hi) = curve.bounds();
        let ne = curve.num_edges().max(1);
        let mut lens: Vec<f64> = (0..curve.num_edges()).map(|e| curve.edge_len(e)).collect();
        lens.sort_by(|a, b| a.total_cmp(b));
        let median = lens.get(lens.len() / 2).copied().unwrap_or(1.0);
        let diag = (hi - lo).norm().max(1e-12);
        let max_cells = 2048.0;
        let cell = (2.0 * median).max(diag / max_cells).max(1e-12);
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for e in 0..curve.num_edges() {
            let (a, b) = curve.edge(e);
            let (ix0, iy0) = grid.cell_of(Vec2::new(a.x.min(b.x), a.y.min(b.y)));
            let (ix1, iy1) = grid.cell_of(Vec2::new(a.x.max(b.x), a.y.max(b.y)));
            for iy in iy0..=iy1 {
                for ix in ix0..=ix1 {
                    grid.buckets[iy * nx + ix].push(e as u32);
                }
            }
        }
        let _ = ne;
        grid
    }

    #[inline]
    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let ix = ((p.x - self.origin.x) / self.cell).floor();
        let iy = ((p.y - self.origin.y) / self.cell).floor();
        (
            (ix.max(0.0) as usize).min(self.nx - 1),
            (iy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    /// First pair of non-adjacent intersecting edges, if any.
    pub fn first_crossing(&self, curve: &PlaneCurve) -> Option<(usize, usize)> {
        let ne = curve.num_edges();
        let adjacent = |i: usize, j: usize| {
            let d = i.abs_diff(j);
            d <= 1 || (curve.closed() && d == ne - 1)
        };
        for bucket in &self.buckets {
            for (k, &i) in bucket.iter().enumerate() {
                for &j in &bucket[k + 1..] {
                    let (i, j) = (i as usize, j as usize);
                    if adjacent(i, j) {
                        continue;
                    }
                    let (a, b) = curve.edge(i);
                    let (c, d) = curve.edge(j);
                    if segments_intersect(a, b, c, d) {
                        return Some((i.min(j), i.max(j)));
                    }
                }
            }
        }
        None
    }

    /// Distance from `p` to the nearest edge, searching only cells within
    /// `radius`; returns `None` when nothing lies that close.
    pub fn distance_within(&self, curve: &PlaneCurve, p: Vec2, radius: f64) -> Option<f64> {
        let (ix0, iy0) = self.cell_of(p - Vec2::new(radius, radius));
        let (ix1, iy1) = self.cell_of(p + Vec2::new(radius, radius));
        let mut best = f64::INFINITY;
        for iy in iy0..=iy1 {
            for ix in ix0..=ix1 {
                for &e in &self.buckets[iy * self.nx + ix] {
                    let (a, b) = curve.edge(e as usize);
                    best = best.min(point_segment_distance(p, a, b));
                }
            }
        }
        (best <= radius).then_some(best)
    }

    /// Winding number of the closed curve about `p` by casting a ray in the
    /// +x direction through the bucket row containing `p`.
    pub fn winding_number(&self, curve: &PlaneCurve, p: Vec2) -> i32 {
        let (lo, hi) = curve.bounds();
        if p.y < lo.y || p.y > hi.y || p.x > hi.x {
            return 0;
        }
        let (ix0, iy) = self.cell_of(p);
        let mut wn = 0;
        for ix in ix0..self.nx {
            let x_lo = self.origin.x + ix as f64 * self.cell;
            let x_hi = x_lo + self.cell;
            for &e in &self.buckets[iy * self.nx + ix] {
                let (a, b) = curve.edge(e as usize);
                let c = crossing_contribution(a, b, p);
                if c == 0 {
                    continue;
                }
                // Count each edge once: in the bucket holding its crossing.
                let t = (p.y - a.y) / (b.y - a.y);
                let xc = a.x + t * (b.x - a.x);
                let first = ix == ix0 && xc < x_lo;
                let last = ix + 1 == self.nx && xc >= x_hi;
                if (xc >= x_lo && xc < x_hi) || first || last {
                    wn += c;
                }
            }
        }
        wn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    pub(crate) fn circle(r: f64, n: usize) -> PlaneCurve {
        let pts = (0..n)
            .map(|k| Vec2::from_angle(2.0 * PI * k as f64 / n as f64) * r)
            .collect();
        PlaneCurve::new(pts, true, 2.0 * PI * r / n as f64)
    }

    #[test]
    fn circle_curvature_and_area() {
        let c = circle(2.0, 400);
        for &k in c.curvature() {
            assert!((k - 0.5).abs() < 1e-4);
        }
        assert!((c.signed_area() - PI * 4.0).abs() < 1e-3);
        assert_eq!(c.inflection_count(1e-3), 0);
        assert!(c.is_embedded());
    }

    #[test]
    fn normal_points_inward_on_ccw_loop() {
        let c = circle(1.0, 64);
        let n = c.normal(0);
        assert!(n.dot(-c.points()[0]) > 0.99);
    }

    #[test]
    fn four_lobe_curve_has_eight_inflections() {
        // r = 1 + 0.3 cos(4 phi); analytic curvature changes sign 8 times
        // (brute-force sign count below on a fine grid confirms the oracle).
        let r = |p: f64| 1.0 + 0.3 * (4.0 * p).cos();
        let n = 4000;
        let mut sign_changes = 0;
        let kappa = |p: f64| {
            let rr = r(p);
            let r1 = -1.2 * (4.0 * p).sin();
            let r2 = -4.8 * (4.0 * p).cos();
            (rr * rr + 2.0 * r1 * r1 - rr * r2) / (rr * rr + r1 * r1).powf(1.5)
        };
        let mut prev = kappa(0.0).signum();
        for k in 1..=n {
            let s = kappa(2.0 * PI * k as f64 / n as f64).signum();
            if s != prev {
                sign_changes += 1;
                prev = s;
            }
        }
        assert_eq!(sign_changes, 8);
        let pts = (0..n)
            .map(|k| {
                let p = 2.0 * PI * k as f64 / n as f64;
                Vec2::from_angle(p) * r(p)
            })
            .collect();
        let c = PlaneCurve::new(pts, true, 0.002);
        assert_eq!(c.inflection_count(1e-3), 8);
    }

    #[test]
    fn figure_eight_is_not_embedded() {
        let n = 200;
        let pts = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Vec2::new(t.sin(), (2.0 * t).sin() * 0.5)
            })
            .collect();
        let c = PlaneCurve::new(pts, true, 0.03);
        assert!(!c.is_embedded());
    }

    #[test]
    fn grid_winding_matches_brute_force() {
        let c = circle(1.0, 97);
        let g = c.segment_grid();
        for k in 0..200 {
            let p = Vec2::new(-1.3 + 0.013 * k as f64, 0.2 - 0.004 * k as f64);
            assert_eq!(g.winding_number(&c, p), c.winding_number(p), "p = {p:?}");
        }
    }

    #[test]
    fn uniform_resample_keeps_circle() {
        let c = circle(1.0, 50).resample_uniform(0.01);
        let (lo, hi) = c.spacing_range();
        assert!(hi / lo < 1.01);
        for p in c.points() {
            assert!((p.norm() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn remesh_splits_and_merges() {
        let mut c = circle(1.0, 100);
        let h = c.resample_h();
        let target = vec![h * 0.25; c.len()];
        let (ins, _) = c.remesh_local(&target, 1.5, 0.5);
        assert_eq!(ins, 100);
        let target = vec![h * 4.0; c.len()];
        let (_, rem) = c.remesh_local(&target, 1.5, 0.5);
        assert!(rem > 0);
        assert!(c.is_embedded());
    }
}
