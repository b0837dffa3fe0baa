//! Path-hyperbola coverage around a source point.
//!
//! Membership in `PH(u, v)` is monotone along every ray leaving `u`: moving
//! outwards by `dr` raises `t|ua|` by `t dr` and `t|va|` by at most that much.
//! Covering everything farther than `lambda` from `u` is therefore the same as
//! covering the circle of radius `lambda`, which reduces the lower envelope of
//! hyperbolas to a union of angular intervals.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::geometry::{dist, PointId, PointSet, Rect, StretchFactor};
use crate::graph::DistanceMap;

/// Endpoint shrink applied to every arc.
pub const ARC_EPSILON: f64 = 1e-9;
/// Arcs whose cosine bound lies this close to 1 are tangencies and dropped.
pub const TANGENCY_TOLERANCE: f64 = 1e-12;

/// Angle reduced to `[0, 2pi)`.
#[inline]
fn wrap(a: f64) -> f64 {
    let r = a % TAU;
    if r < 0.0 { r + TAU } else { r }
}

/// `PH(u, v) = { a : delta + t|va| <= t|ua| }` with `delta = δ(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathHyperbola {
    pub origin: PointId,
    pub focus: PointId,
    pub delta: f64,
    pub t: StretchFactor,
}

impl PathHyperbola {
    pub fn contains(&self, points: &PointSet, x: f64, y: f64) -> bool {
        let (u, v) = (points.get(self.origin), points.get(self.focus));
        let t = self.t.get();
        self.delta + t * crate::geometry::dist_xy(v.x, v.y, x, y) <= t * crate::geometry::dist_xy(u.x, u.y, x, y)
    }
}

/// Closed angular interval `[start, end]` in radians, `end - start <= 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Directions `θ` for which the point at distance `lambda` from the origin in
/// direction `θ` lies in the hyperbola. The result is centred on the
/// direction of the focus and always narrower than `π`.
pub fn hyperbola_arc(h: &PathHyperbola, lambda: f64, points: &PointSet) -> Option<Interval> {
    let (u, v) = (points.get(h.origin), points.get(h.focus));
    let ell = dist(u, v);
    if !(lambda > 0.0) || ell == 0.0 {
        return None;
    }
    // |v x(θ)| <= rho with rho = lambda - delta/t. Writing k = delta/t, the law
    // of cosines gives cos(θ - φ) >= (ell² + k(2 lambda - k)) / (2 lambda ell),
    // a sum of non-negative terms, so no cancellation occurs.
    let k = h.delta / h.t.get();
    if k > lambda {
        return None;
    }
    let c = (ell * ell + k * (2.0 * lambda - k)) / (2.0 * lambda * ell);
    if c >= 1.0 - TANGENCY_TOLERANCE {
        return None;
    }
    let half = libm::acos(c);
    let phi = libm::atan2(v.y - u.y, v.x - u.x);
    Some(Interval { start: phi - half, end: phi + half })
}

/// Union of covered directions on the circle of radius `radius` around `center`,
/// stored as sorted, disjoint, non-wrapping pieces of `[0, 2π]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArcSet {
    pub center: PointId,
    pub radius: f64,
    arcs: Vec<Interval>,
}

impl ArcSet {
    pub fn empty(center: PointId, radius: f64) -> Self {
        ArcSet { center, radius, arcs: Vec::new() }
    }

    /// Builds the merged union of arbitrary (possibly wrapping) intervals.
    pub fn from_intervals(center: PointId, radius: f64, intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut pieces: Vec<Interval> = Vec::new();
        for iv in intervals {
            let width = iv.width();
            if !(width >= 0.0) {
                continue;
            }
            if width >= TAU {
                pieces.push(Interval { start: 0.0, end: TAU });
                continue;
            }
            let s = wrap(iv.start);
            let e = s + width;
            if e > TAU {
                pieces.push(Interval { start: s, end: TAU });
                pieces.push(Interval { start: 0.0, end: e - TAU });
            } else {
                pieces.push(Interval { start: s, end: e });
            }
        }
        pieces.sort_unstable_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
        let mut arcs: Vec<Interval> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match arcs.last_mut() {
                Some(last) if p.start <= last.end => last.end = last.end.max(p.end),
                _ => arcs.push(p),
            }
        }
        ArcSet { center, radius, arcs }
    }

    pub fn arcs(&self) -> &[Interval] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(Interval::width).sum()
    }

    /// Whether `[lo, lo + width]` (any real `lo`) is covered.
    pub fn covers_range(&self, lo: f64, width: f64) -> bool {
        if width >= TAU {
            return self.is_full();
        }
        let s = wrap(lo);
        let e = s + width;
        if e > TAU {
            self.covers_piece(s, TAU) && self.covers_piece(0.0, e - TAU)
        } else {
            self.covers_piece(s, e)
        }
    }

    pub fn covers_direction(&self, theta: f64) -> bool {
        self.covers_range(theta, 0.0)
    }

    /// Directions covered by both sets; keeps the centre and radius of `self`.
    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        let mut arcs = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a, b) = (self.arcs[i], other.arcs[j]);
            let start = a.start.max(b.start);
            let end = a.end.min(b.end);
            if start <= end {
                arcs.push(Interval { start, end });
            }
            if a.end < b.end {
                i += 1;
            } else {
                j += 1;
            }
        }
        ArcSet { center: self.center, radius: self.radius, arcs }
    }

    fn covers_piece(&self, s: f64, e: f64) -> bool {
        // Last arc starting at or before `s`.
        let idx = self.arcs.partition_point(|a| a.start <= s);
        idx > 0 && self.arcs[idx - 1].end >= e
    }

    fn is_full(&self) -> bool {
        self.arcs.first().is_some_and(|a| a.start <= 0.0 && a.end >= TAU)
    }
}

/// Union of the hyperbola arcs of every t-path-certified entry of `reached`
/// (a local Dijkstra from `u`), each shrunk by [`ARC_EPSILON`] at both ends.
pub fn build_coverage(u: PointId, reached: &DistanceMap, t: StretchFactor, lambda: f64, points: &PointSet) -> ArcSet {
    let intervals = reached.entries().iter().filter_map(|&(v, delta)| certified_arc(u, v, delta, t, lambda, points));
    ArcSet::from_intervals(u, lambda, intervals)
}

/// The shrunk arc of `PH(u, v)` when `delta` certifies a t-path.
pub(crate) fn certified_arc(
    u: PointId,
    v: PointId,
    delta: f64,
    t: StretchFactor,
    lambda: f64,
    points: &PointSet,
) -> Option<Interval> {
    if v == u || delta > t.get() * dist(points.get(u), points.get(v)) {
        return None;
    }
    let h = PathHyperbola { origin: u, focus: v, delta, t };
    let iv = hyperbola_arc(&h, lambda, points)?;
    let shrunk = Interval { start: iv.start + ARC_EPSILON, end: iv.end - ARC_EPSILON };
    (shrunk.width() >= 0.0).then_some(shrunk)
}

pub fn is_fully_covered(arcs: &ArcSet) -> bool {
    arcs.is_full()
}

/// Directions under which `rect` is seen from `(x, y)`, as `(start, width)`.
/// Requires the point to lie outside the rectangle.
pub(crate) fn angular_extent(rect: &Rect, x: f64, y: f64) -> (f64, f64) {
    let (cx, cy) = rect.center();
    let reference = libm::atan2(cy - y, cx - x);
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    for (px, py) in rect.corners() {
        let mut rel = libm::atan2(py - y, px - x) - reference;
        if rel > PI {
            rel -= TAU;
        } else if rel <= -PI {
            rel += TAU;
        }
        lo = lo.min(rel);
        hi = hi.max(rel);
    }
    (reference + lo, hi - lo)
}

/// `u` is discounted with respect to `rect` when the whole rectangle lies at
/// least `lambda` away and inside the covered directions. Every point of the
/// rectangle then has a t-path from `u`.
pub fn box_discounted(u: PointId, arcs: &ArcSet, rect: &Rect, lambda: f64, points: &PointSet) -> bool {
    if arcs.is_empty() || arcs.center != u {
        return false;
    }
    let p = points.get(u);
    if !(rect.min_dist_to(p.x, p.y) >= lambda) || arcs.radius > lambda {
        return false;
    }
    let (start, width) = angular_extent(rect, p.x, p.y);
    arcs.covers_range(start, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist_xy;
    use crate::graph::{DijkstraScratch, SpannerGraph};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(v: f64) -> StretchFactor {
        StretchFactor::new(v).unwrap()
    }

    fn polar(cx: f64, cy: f64, r: f64, theta: f64) -> (f64, f64) {
        (cx + r * theta.cos(), cy + r * theta.sin())
    }

    /// Largest |θ| in [0, π] whose point at radius lambda satisfies the
    /// membership inequality, by dense sampling around direction 0.
    fn sampled_half_width(ps: &PointSet, h: &PathHyperbola, lambda: f64, samples: usize) -> Option<f64> {
        let u = ps.get(h.origin);
        (0..=samples)
            .map(|i| PI * i as f64 / samples as f64)
            .filter(|&th| {
                let (x, y) = polar(u.x, u.y, lambda, th);
                h.contains(ps, x, y)
            })
            .last()
    }

    #[test]
    fn arc_example_matches_sampling() {
        let ps = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let h = PathHyperbola { origin: 0, focus: 1, delta: 1.0, t: t(2.0) };
        let iv = hyperbola_arc(&h, 5.0, &ps).unwrap();
        assert!((iv.end - 0.958).abs() < 1e-3 && (iv.start + 0.958).abs() < 1e-3);
        assert!((iv.end - 0.575f64.acos()).abs() < 1e-12);
        let sampled = sampled_half_width(&ps, &h, 5.0, 200_000).unwrap();
        assert!((sampled - iv.end).abs() < 1e-4);
    }

    #[test]
    fn too_costly_hyperbola_is_empty() {
        let ps = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let h = PathHyperbola { origin: 0, focus: 1, delta: 2.0 * 5.0 + 1.0, t: t(2.0) };
        assert_eq!(hyperbola_arc(&h, 5.0, &ps), None);
    }

    #[test]
    fn single_arc_stays_below_half_circle() {
        // A focus adjacent to the origin with large t and lambda approaches, but
        // never reaches, a half circle: PH lies on the focus's side of the bisector.
        let ps = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let h = PathHyperbola { origin: 0, focus: 1, delta: 0.1, t: t(1000.0) };
        let iv = hyperbola_arc(&h, 1e4, &ps).unwrap();
        assert!(iv.end < PI / 2.0 && iv.end > PI / 2.0 - 1e-3);
        let sampled = sampled_half_width(&ps, &h, 1e4, 100_000).unwrap();
        assert!((sampled - iv.end).abs() < 1e-4);
    }

    #[test]
    fn merging_and_full_coverage() {
        assert!(is_fully_covered(&ArcSet::from_intervals(0, 1.0, [Interval { start: 0.0, end: TAU }])));
        assert!(!is_fully_covered(&ArcSet::from_intervals(0, 1.0, [Interval { start: 0.0, end: PI }])));
        let two = ArcSet::from_intervals(
            0,
            1.0,
            [Interval { start: 0.0, end: PI + 0.1 }, Interval { start: PI, end: TAU }],
        );
        assert!(is_fully_covered(&two));
        assert_eq!(two.arcs().len(), 1);
        // Wrapping interval is split and still covers across zero.
        let wrap = ArcSet::from_intervals(0, 1.0, [Interval { start: -0.5, end: 0.5 }]);
        assert_eq!(wrap.arcs().len(), 2);
        assert!(wrap.covers_range(-0.4, 0.8));
        assert!(!wrap.covers_range(-0.4, 1.0));
        assert!(wrap.covers_direction(TAU - 0.1));
        assert!(!wrap.covers_direction(PI));
    }

    #[test]
    fn intersection_of_arc_sets() {
        let full = ArcSet::from_intervals(0, 1.0, [Interval { start: 0.0, end: TAU }]);
        let wrap = ArcSet::from_intervals(0, 1.0, [Interval { start: -0.5, end: 0.5 }]);
        assert_eq!(full.intersection(&wrap).arcs(), wrap.arcs());
        assert_eq!(wrap.intersection(&full).arcs(), wrap.arcs());
        let a = ArcSet::from_intervals(0, 1.0, [Interval { start: 0.0, end: 2.0 }, Interval { start: 3.0, end: 5.0 }]);
        let b = ArcSet::from_intervals(0, 1.0, [Interval { start: 1.0, end: 4.0 }]);
        let both = a.intersection(&b);
        assert_eq!(both.arcs(), &[Interval { start: 1.0, end: 2.0 }, Interval { start: 3.0, end: 4.0 }]);
        assert!(a.intersection(&ArcSet::empty(0, 1.0)).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2_000 {
            let th = rng.random::<f64>() * TAU;
            assert_eq!(both.covers_direction(th), a.covers_direction(th) && b.covers_direction(th));
        }
    }

    fn coverage_from(ps: &PointSet, dists: &[(PointId, f64)], tt: f64, lambda: f64) -> ArcSet {
        let mut entries = vec![(0, 0.0)];
        entries.extend_from_slice(dists);
        build_coverage(0, &DistanceMap::from_entries(0, entries), t(tt), lambda, ps)
    }

    #[test]
    fn coverage_examples() {
        let ps = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(coverage_from(&ps, &[], 2.0, 5.0).is_empty());

        let one = coverage_from(&ps, &[(1, 1.0)], 2.0, 5.0);
        assert_eq!(one.arcs().len(), 2);
        let half = 0.575f64.acos() - ARC_EPSILON;
        assert!(one.covers_range(-half, 2.0 * half));
        assert!(!one.covers_range(-half - 1e-8, 2.0 * half));

        let mut coords = vec![(0.0, 0.0)];
        coords.extend((0..8).map(|k| polar(0.0, 0.0, 1.0, k as f64 * PI / 4.0)));
        let ps8 = PointSet::from_slice(&coords).unwrap();
        let dists: Vec<(PointId, f64)> = (1..=8).map(|i| (i, 1.0)).collect();
        let cov = coverage_from(&ps8, &dists, 2.0, 10.0);
        assert!(is_fully_covered(&cov));
        // Dense sampling oracle agrees.
        for i in 0..10_000 {
            let th = TAU * i as f64 / 10_000.0;
            let (x, y) = polar(0.0, 0.0, 10.0, th);
            assert!((1..=8).any(|v| 1.0 + 2.0 * dist_xy(ps8.get(v).x, ps8.get(v).y, x, y) <= 20.0));
        }
    }

    #[test]
    fn uncertified_foci_are_ignored() {
        let ps = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        // delta = 2.5 > t |uv| = 2
        assert!(coverage_from(&ps, &[(1, 2.5)], 2.0, 50.0).is_empty());
    }

    #[test]
    fn box_discount_examples() {
        let ps = PointSet::from_slice(&[(0.0, 0.0)]).unwrap();
        let full = ArcSet::from_intervals(0, 2.0, [Interval { start: 0.0, end: TAU }]);
        let far = Rect::new(5.0, 5.0, 6.0, 7.0);
        assert!(box_discounted(0, &full, &far, 2.0, &ps));
        assert!(!box_discounted(0, &ArcSet::empty(0, 2.0), &far, 2.0, &ps));
        let near = Rect::new(1.0, -1.0, 3.0, 1.0);
        assert!(!box_discounted(0, &full, &near, 2.0, &ps));
        // A box straddling the negative x-axis needs the wrap-around pieces.
        let left = Rect::new(-9.0, -1.0, -8.0, 1.0);
        let around_pi = ArcSet::from_intervals(0, 2.0, [Interval { start: PI - 0.2, end: PI + 0.2 }]);
        assert!(box_discounted(0, &around_pi, &left, 2.0, &ps));
        let right = Rect::new(8.0, -1.0, 9.0, 1.0);
        let around_zero = ArcSet::from_intervals(0, 2.0, [Interval { start: -0.2, end: 0.2 }]);
        assert!(box_discounted(0, &around_zero, &right, 2.0, &ps));
        assert!(!box_discounted(0, &around_pi, &right, 2.0, &ps));
    }

    #[test]
    fn ray_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2_000 {
            let ps = PointSet::from_slice(&[(0.0, 0.0), (rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0)])
                .unwrap();
            let ell = ps.distance(0, 1);
            let h = PathHyperbola { origin: 0, focus: 1, delta: ell * (1.0 + rng.random::<f64>()), t: t(1.0 + rng.random::<f64>() * 3.0) };
            let th = rng.random::<f64>() * TAU;
            let mut inside = false;
            for i in 0..200 {
                let (x, y) = polar(0.0, 0.0, 0.1 * i as f64, th);
                let now = h.contains(&ps, x, y);
                assert!(!inside || now);
                inside |= now;
            }
        }
    }

    #[test]
    fn arcs_are_sound_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 300;
        let side = (n as f64).sqrt();
        let ps = PointSet::new((0..n).map(|_| (rng.random::<f64>() * side, rng.random::<f64>() * side))).unwrap();
        let mut g = SpannerGraph::new(ps.clone());
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if ps.distance(u, v) < 1.6 {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let mut scratch = DijkstraScratch::new(n);
        let (tt, lambda) = (2.0, 4.0);
        for u in 0..20u32 {
            let map = scratch.bounded(&g, u, lambda * tt);
            let cov = build_coverage(u, &map, t(tt), lambda, &ps);
            let pu = *ps.get(u);
            for i in 0..10_000 {
                let th = TAU * i as f64 / 10_000.0;
                if !cov.covers_direction(th) {
                    continue;
                }
                let (x, y) = polar(pu.x, pu.y, lambda, th);
                let ok = map.entries().iter().any(|&(v, d)| {
                    v != u && d <= tt * ps.distance(u, v) && (PathHyperbola { origin: u, focus: v, delta: d, t: t(tt) }).contains(&ps, x, y)
                });
                assert!(ok, "source {u} direction {th}");
            }
        }
    }
}
