//! Euclidean graphs and the three Dijkstra flavours: full, distance-bounded
//! with early exit, and grid-local.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{dist_xy, PointId, PointSet, StretchFactor};
use crate::grid::Grid;

/// Undirected graph on a point set, weighted by Euclidean length.
#[derive(Debug, Clone)]
pub struct SpannerGraph {
    points: PointSet,
    adjacency: Vec<Vec<(PointId, f64)>>,
    edge_count: usize,
}

impl SpannerGraph {
    pub fn new(points: PointSet) -> Self {
        let adjacency = vec![Vec::new(); points.len()];
        SpannerGraph { points, adjacency, edge_count: 0 }
    }

    /// Builds a graph from an undirected edge list; duplicates are ignored.
    pub fn from_edges(points: PointSet, edges: impl IntoIterator<Item = (PointId, PointId)>) -> Result<Self> {
        let mut g = SpannerGraph::new(points);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: PointId) -> &[(PointId, f64)] {
        &self.adjacency[u as usize]
    }

    fn check_id(&self, u: PointId) -> Result<()> {
        if (u as usize) < self.adjacency.len() {
            Ok(())
        } else {
            Err(Error::InvalidPointId(u as usize))
        }
    }

    pub fn contains_edge(&self, u: PointId, v: PointId) -> bool {
        (u as usize) < self.adjacency.len() && self.adjacency[u as usize].iter().any(|&(w, _)| w == v)
    }

    /// Inserts `{u, v}`. Returns `false` when the edge already exists.
    pub fn add_edge(&mut self, u: PointId, v: PointId) -> Result<bool> {
        self.check_id(u)?;
        self.check_id(v)?;
        if u == v {
            return Err(Error::CoincidentArguments);
        }
        if self.contains_edge(u, v) {
            return Ok(false);
        }
        self.push_edge(u, v);
        Ok(true)
    }

    /// Insertion without duplicate checks, for the greedy drivers which never
    /// propose an existing edge.
    pub(crate) fn push_edge(&mut self, u: PointId, v: PointId) {
        let len = self.points.distance(u, v);
        self.adjacency[u as usize].push((v, len));
        self.adjacency[v as usize].push((u, len));
        self.edge_count += 1;
    }

    pub fn remove_edge(&mut self, u: PointId, v: PointId) -> bool {
        if !self.contains_edge(u, v) {
            return false;
        }
        self.adjacency[u as usize].retain(|&(w, _)| w != v);
        self.adjacency[v as usize].retain(|&(w, _)| w != u);
        self.edge_count -= 1;
        true
    }

    /// Edges as `(min id, max id, length)`, sorted by `(min id, max id)`.
    pub fn edges(&self) -> Vec<(PointId, PointId, f64)> {
        let mut out: Vec<_> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| {
                nb.iter().filter(move |&&(v, _)| (u as PointId) < v).map(move |&(v, len)| (u as PointId, v, len))
            })
            .collect();
        out.sort_unstable_by_key(|e| (e.0, e.1));
        out
    }

    pub fn max_edge_length(&self) -> f64 {
        self.adjacency.iter().flatten().map(|&(_, len)| len).fold(0.0, f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.adjacency.iter().flatten().map(|&(_, len)| len).sum::<f64>() * 0.5
    }
}

/// Network distances from one source; only reached vertices are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    source: PointId,
    entries: Vec<(PointId, f64)>,
}

impl DistanceMap {
    /// Wraps precomputed distances; entries are sorted by id.
    pub fn from_entries(source: PointId, mut entries: Vec<(PointId, f64)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        DistanceMap { source, entries }
    }

    pub fn source(&self) -> PointId {
        self.source
    }

    /// `(id, distance)` pairs sorted by id.
    pub fn entries(&self) -> &[(PointId, f64)] {
        &self.entries
    }

    pub fn get(&self, v: PointId) -> Option<f64> {
        self.entries.binary_search_by_key(&v, |e| e.0).ok().map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    dist: f64,
    id: PointId,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    // Reversed so that `BinaryHeap` pops the smallest distance, ties to the smaller id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable Dijkstra state. Arrays are reset lazily with epoch stamps so a
/// bounded search costs time proportional to what it touches, not to `n`.
#[derive(Debug, Clone, Default)]
pub struct DijkstraScratch {
    dist: Vec<f64>,
    seen: Vec<u32>,
    settled: Vec<u32>,
    allowed: Vec<u32>,
    epoch: u32,
    heap: BinaryHeap<QueueEntry>,
    buf: Vec<PointId>,
}

impl DijkstraScratch {
    pub fn new(n: usize) -> Self {
        let mut s = DijkstraScratch::default();
        s.ensure(n);
        s
    }

    fn ensure(&mut self, n: usize) {
        if self.dist.len() < n {
            self.dist.resize(n, f64::INFINITY);
            self.seen.resize(n, 0);
            self.settled.resize(n, 0);
            self.allowed.resize(n, 0);
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.iter_mut().for_each(|x| *x = 0);
            self.settled.iter_mut().for_each(|x| *x = 0);
            self.allowed.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
        self.heap.clear();
        self.epoch
    }

    /// Core search. Vertices are settled in `(distance, id)` order; only
    /// tentative distances `<= bound` enter the queue, and `restricted` limits
    /// the search to vertices marked allowed for this epoch. `on_settle`
    /// returns `false` to stop.
    fn search(
        &mut self,
        g: &SpannerGraph,
        source: PointId,
        bound: f64,
        restricted: bool,
        mut on_settle: impl FnMut(PointId, f64) -> bool,
    ) {
        let epoch = self.epoch;
        let s = source as usize;
        self.dist[s] = 0.0;
        self.seen[s] = epoch;
        self.heap.push(QueueEntry { dist: 0.0, id: source });
        while let Some(QueueEntry { dist: d, id }) = self.heap.pop() {
            let u = id as usize;
            if self.settled[u] == epoch || d > self.dist[u] {
                continue;
            }
            self.settled[u] = epoch;
            if !on_settle(id, d) {
                break;
            }
            for &(v, len) in &g.adjacency[u] {
                let vi = v as usize;
                if restricted && self.allowed[vi] != epoch {
                    continue;
                }
                let nd = d + len;
                if nd > bound {
                    continue;
                }
                if self.seen[vi] != epoch || nd < self.dist[vi] {
                    self.seen[vi] = epoch;
                    self.dist[vi] = nd;
                    self.heap.push(QueueEntry { dist: nd, id: v });
                }
            }
        }
    }

    /// `δ(source, target)` if it is at most `bound`. Goal-directed: the
    /// queue is ordered by `g + |x target|`, which never overestimates in a
    /// Euclidean graph, and vertices that cannot lie on a path within the
    /// bound are never queued.
    pub fn distance_within(&mut self, g: &SpannerGraph, source: PointId, target: PointId, bound: f64) -> Option<f64> {
        self.ensure(g.len());
        let epoch = self.next_epoch();
        let goal = *g.points.get(target);
        let h = |v: PointId| {
            let p = g.points.get(v);
            dist_xy(p.x, p.y, goal.x, goal.y)
        };
        // Pruning slack absorbs rounding in the heuristic; the answer itself is checked exactly.
        let prune = bound + bound.abs() * 1e-12;
        let s = source as usize;
        self.dist[s] = 0.0;
        self.seen[s] = epoch;
        self.heap.push(QueueEntry { dist: h(source), id: source });
        while let Some(QueueEntry { id, .. }) = self.heap.pop() {
            let u = id as usize;
            if self.settled[u] == epoch {
                continue;
            }
            self.settled[u] = epoch;
            let d = self.dist[u];
            if id == target {
                return (d <= bound).then_some(d);
            }
            for &(v, len) in &g.adjacency[u] {
                let vi = v as usize;
                if self.settled[vi] == epoch {
                    continue;
                }
                let nd = d + len;
                if nd > bound || (self.seen[vi] == epoch && nd >= self.dist[vi]) {
                    continue;
                }
                let f = nd + h(v);
                if f > prune {
                    continue;
                }
                self.seen[vi] = epoch;
                self.dist[vi] = nd;
                self.heap.push(QueueEntry { dist: f, id: v });
            }
        }
        None
    }

    /// Whether `{u, v}` has a t-path. The search always starts at the smaller
    /// id so that every caller sums the same path in the same order.
    pub fn has_t_path(&mut self, g: &SpannerGraph, u: PointId, v: PointId, t: f64) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.t_path_from(g, a, b, t)
    }

    /// Whether `δ(source, target) <= t |source target|`, searching from `source`.
    pub(crate) fn t_path_from(&mut self, g: &SpannerGraph, source: PointId, target: PointId, t: f64) -> bool {
        let bound = t * g.points.distance(source, target);
        self.distance_within(g, source, target, bound).is_some()
    }

    /// All vertices with `δ(source, ·) <= bound`.
    pub fn bounded(&mut self, g: &SpannerGraph, source: PointId, bound: f64) -> DistanceMap {
        self.ensure(g.len());
        self.next_epoch();
        let mut entries = Vec::new();
        self.search(g, source, bound, false, |v, d| {
            entries.push((v, d));
            true
        });
        entries.sort_unstable_by_key(|e| e.0);
        DistanceMap { source, entries }
    }

    /// Settles vertices with `δ(source, ·) <= bound` in `(distance, id)`
    /// order until `visit` returns `false`.
    pub(crate) fn bounded_visit(
        &mut self,
        g: &SpannerGraph,
        source: PointId,
        bound: f64,
        visit: impl FnMut(PointId, f64) -> bool,
    ) {
        self.ensure(g.len());
        self.next_epoch();
        self.search(g, source, bound, false, visit);
    }

    /// Settles vertices until every id in `targets` is settled or the bound is
    /// exhausted, calling `visit` for each settled target.
    pub(crate) fn settle_targets(
        &mut self,
        g: &SpannerGraph,
        source: PointId,
        bound: f64,
        targets: &[PointId],
        mut visit: impl FnMut(PointId, f64),
    ) {
        self.ensure(g.len());
        let epoch = self.next_epoch();
        // `allowed` doubles as the target marker here; the search is unrestricted.
        for &b in targets {
            self.allowed[b as usize] = epoch;
        }
        let mut remaining = targets.len();
        let allowed = core::mem::take(&mut self.allowed);
        self.search(g, source, bound, false, |v, d| {
            if allowed[v as usize] == epoch {
                visit(v, d);
                remaining -= 1;
            }
            remaining > 0
        });
        self.allowed = allowed;
    }

    /// Dijkstra restricted to the points within `lambda * t` of `source`
    /// (found through `grid`), settling everything up to network distance `lambda * t`.
    pub fn local(&mut self, g: &SpannerGraph, grid: &Grid, source: PointId, lambda: f64, t: f64) -> DistanceMap {
        self.ensure(g.len());
        let epoch = self.next_epoch();
        let radius = lambda * t;
        let p = *g.points.get(source);
        let mut buf = core::mem::take(&mut self.buf);
        grid.points_within_into(p.x, p.y, radius, &mut buf).expect("radius is non-negative");
        for &v in &buf {
            self.allowed[v as usize] = epoch;
        }
        self.buf = buf;
        self.allowed[source as usize] = epoch;
        let mut entries = Vec::new();
        self.search(g, source, radius, true, |v, d| {
            entries.push((v, d));
            true
        });
        entries.sort_unstable_by_key(|e| e.0);
        DistanceMap { source, entries }
    }
}

fn check_source(g: &SpannerGraph, s: PointId) -> Result<()> {
    if (s as usize) < g.len() {
        Ok(())
    } else {
        Err(Error::InvalidPointId(s as usize))
    }
}

/// Exact single-source shortest paths; unreachable vertices are absent.
pub fn dijkstra(g: &SpannerGraph, s: PointId) -> Result<DistanceMap> {
    check_source(g, s)?;
    Ok(DijkstraScratch::new(g.len()).bounded(g, s, f64::INFINITY))
}

/// Dijkstra over the points within `lambda * t` of `s`. Every `v` with
/// `|sv| <= lambda` that has a t-path to `s` receives its exact network distance.
pub fn local_dijkstra(g: &SpannerGraph, grid: &Grid, s: PointId, lambda: f64, t: StretchFactor) -> Result<DistanceMap> {
    check_source(g, s)?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    if grid.len() != g.len() {
        return Err(Error::PointSetMismatch { expected: g.len(), found: grid.len() });
    }
    Ok(DijkstraScratch::new(g.len()).local(g, grid, s, lambda, t.get()))
}

/// `δ(u, v) <= t |uv|`, via Dijkstra that stops once the frontier passes `t |uv|`.
pub fn has_t_path(g: &SpannerGraph, u: PointId, v: PointId, t: StretchFactor) -> Result<bool> {
    check_source(g, u)?;
    check_source(g, v)?;
    if u == v {
        return Err(Error::CoincidentArguments);
    }
    Ok(DijkstraScratch::new(g.len()).has_t_path(g, u, v, t.get()))
}
