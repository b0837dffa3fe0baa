use alloc::vec::Vec;

use super::driver::{sweep_short, Aborted, Driver, Slot, Window};
use super::{sort_slots, GreedyConfig, PhaseReport};
use crate::error::{Error, Result};
use crate::geometry::{dist, PointId, PointSet, Rect, StretchFactor};
use crate::graph::{DijkstraScratch, DistanceMap, SpannerGraph};
use crate::grid::Grid;
use crate::hyperbola::{angular_extent, box_discounted, certified_arc, is_fully_covered, ArcSet, Interval};
use crate::wspd::{build_split_tree, for_each_pair, NodeId, SplitTree, WspdPair};

/// Output of [`greedy_short_edges`].
#[derive(Debug, Clone)]
pub struct ShortEdges {
    /// Every greedy edge of length at most `lambda`.
    pub graph: SpannerGraph,
    /// Pairs that may still hold a longer greedy edge.
    pub skipped: Vec<WspdPair>,
    /// Local Dijkstra (radius `lambda * t`) from every point on `graph`.
    pub distance_maps: Vec<DistanceMap>,
}

/// Result of [`discount_pairs`].
#[derive(Debug, Clone, Default)]
pub struct DiscountOutcome {
    pub pairs_considered: usize,
    pub pairs_discounted: usize,
    /// Pairs that must still be processed, with their discounted points (sorted).
    pub undiscounted: Vec<(WspdPair, Vec<PointId>)>,
    /// Total size of both sides over the undiscounted pairs.
    pub points_in_undiscounted: usize,
    pub points_discounted: usize,
}

impl DiscountOutcome {
    pub fn points_discounted_fraction(&self) -> f64 {
        if self.points_in_undiscounted == 0 {
            1.0
        } else {
            self.points_discounted as f64 / self.points_in_undiscounted as f64
        }
    }
}

struct Clock {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Clock {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn ms(&self) -> f64 {
        #[cfg(feature = "std")]
        {
            self.start.elapsed().as_secs_f64() * 1e3
        }
        #[cfg(not(feature = "std"))]
        {
            0.0
        }
    }
}

fn pair_of(slot: &Slot) -> WspdPair {
    WspdPair {
        left: slot.left,
        right: slot.right,
        separation_ok: true,
        bbox_min_dist: slot.min_dist,
        bbox_max_dist: slot.max_dist,
    }
}

struct PhaseOne {
    graph: SpannerGraph,
    slots: Vec<Slot>,
    received_edge: Vec<bool>,
    pairs_total: usize,
    drop_on_edge: bool,
}

impl PhaseOne {
    /// Pairs of the short phase that may still contain a longer greedy edge.
    fn handed_over(&self, lambda: f64) -> impl Iterator<Item = &Slot> + '_ {
        self.slots
            .iter()
            .zip(&self.received_edge)
            .filter(move |(s, &got)| !(got && self.drop_on_edge) && s.max_dist > lambda)
            .map(|(s, _)| s)
    }
}

fn phase_one(
    points: &PointSet,
    tree: &SplitTree,
    labels: &[PointId],
    t: StretchFactor,
    sigma: f64,
    lambda: f64,
) -> Result<PhaseOne> {
    let mut slots = Vec::new();
    let mut pairs_total = 0usize;
    for_each_pair(tree, sigma, |p| {
        pairs_total += 1;
        if p.bbox_min_dist <= lambda {
            slots.push(Slot::from(&p));
        }
    })?;
    sort_slots(&mut slots);
    let drop_on_edge = sigma >= t.one_edge_separation();
    let mut graph = SpannerGraph::new(points.clone());
    let outcome = sweep_short(tree, points, labels, t.get(), lambda, drop_on_edge, &mut graph, &slots);
    Ok(PhaseOne { graph, slots, received_edge: outcome.received_edge, pairs_total, drop_on_edge })
}

/// Greedy edges of length at most `lambda`, the pairs left for later phases,
/// and local Dijkstra results on the short-edge graph. Uses the separation
/// `4(t+1)/(t-1)`.
pub fn greedy_short_edges(points: &PointSet, t: StretchFactor, lambda: f64, grid: &Grid) -> Result<ShortEdges> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidLambda(lambda));
    }
    if grid.len() != points.len() {
        return Err(Error::PointSetMismatch { expected: points.len(), found: grid.len() });
    }
    if points.len() < 2 {
        let graph = SpannerGraph::new(points.clone());
        let distance_maps = points.iter().map(|p| DistanceMap::from_entries(p.id, alloc::vec![(p.id, 0.0)])).collect();
        return Ok(ShortEdges { graph, skipped: Vec::new(), distance_maps });
    }
    let sigma = t.one_edge_separation();
    let tree = build_split_tree(points)?;
    let labels: Vec<PointId> = (0..points.len() as PointId).collect();
    let one = phase_one(points, &tree, &labels, t, sigma, lambda)?;
    let mut skipped: Vec<WspdPair> = one.handed_over(lambda).map(pair_of).collect();
    for_each_pair(&tree, sigma, |p| {
        if p.bbox_min_dist > lambda {
            skipped.push(p);
        }
    })?;
    let mut scratch = DijkstraScratch::new(points.len());
    let distance_maps = (0..points.len() as PointId).map(|u| scratch.local(&one.graph, grid, u, lambda, t.get())).collect();
    Ok(ShortEdges { graph: one.graph, skipped, distance_maps })
}

/// Same result as [`build_coverage`] on a local Dijkstra of radius
/// `lambda * t`. Any path within that bound stays inside the disc, so a plain
/// bounded search suffices, and it stops as soon as the union is the full circle.
fn coverage_of(scratch: &mut DijkstraScratch, g: &SpannerGraph, u: PointId, t: StretchFactor, lambda: f64) -> ArcSet {
    let points = g.points();
    let mut intervals: Vec<Interval> = Vec::new();
    let mut next_check = 8;
    let mut full = None;
    scratch.bounded_visit(g, u, lambda * t.get(), |v, delta| {
        if let Some(iv) = certified_arc(u, v, delta, t, lambda, points) {
            intervals.push(iv);
            if intervals.len() == next_check {
                next_check *= 2;
                let arcs = ArcSet::from_intervals(u, lambda, intervals.iter().copied());
                if is_fully_covered(&arcs) {
                    full = Some(arcs);
                    return false;
                }
            }
        }
        true
    });
    full.unwrap_or_else(|| ArcSet::from_intervals(u, lambda, intervals))
}

fn coverages(g: &SpannerGraph, t: StretchFactor, lambda: f64) -> Vec<ArcSet> {
    let n = g.len();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n as PointId)
            .into_par_iter()
            .map_init(|| DijkstraScratch::new(n), |s, u| coverage_of(s, g, u, t, lambda))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = DijkstraScratch::new(n);
        (0..n as PointId).map(|u| coverage_of(&mut scratch, g, u, t, lambda)).collect()
    }
}

struct Judge<'a> {
    tree: &'a SplitTree,
    points: &'a PointSet,
    coverages: &'a [ArcSet],
    /// Per tree node, the directions covered for every point of the node.
    common: Vec<ArcSet>,
    lambda: f64,
}

enum Verdict {
    Discounted,
    Open { discounted: Vec<PointId>, size: usize },
}

impl<'a> Judge<'a> {
    fn new(tree: &'a SplitTree, points: &'a PointSet, coverages: &'a [ArcSet], lambda: f64) -> Self {
        let nodes = tree.nodes();
        let mut common = alloc::vec![ArcSet::empty(0, lambda); nodes.len()];
        // Children always come after their parent.
        for id in (0..nodes.len()).rev() {
            common[id] = match nodes[id].children {
                None => coverages[tree.points_of(id as NodeId)[0] as usize].clone(),
                Some((l, r)) => common[l as usize].intersection(&common[r as usize]),
            };
        }
        Judge { tree, points, coverages, common, lambda }
    }

    /// Every point of `other` farther than `lambda` from `u` has a t-path to `u`.
    fn point_discounted(&self, u: PointId, other: NodeId) -> bool {
        let arcs = &self.coverages[u as usize];
        if arcs.is_empty() {
            return false;
        }
        let rect = &self.tree.node(other).bbox;
        let p = self.points.get(u);
        if rect.min_dist_to(p.x, p.y) >= self.lambda {
            return box_discounted(u, arcs, rect, self.lambda, self.points);
        }
        // Straddling pair: the close points were settled by the short phase.
        self.tree.points_of(other).iter().all(|&b| {
            let q = self.points.get(b);
            dist(p, q) <= self.lambda || arcs.covers_direction(libm::atan2(q.y - p.y, q.x - p.x))
        })
    }

    fn side_discounted(&self, side: NodeId, other: NodeId) -> bool {
        let (a, b) = (&self.tree.node(side).bbox, &self.tree.node(other).bbox);
        if a.min_dist(b) >= self.lambda {
            // Every direction from a point of `a` to a point of `b` is a
            // direction of the difference box `b - a`.
            let diff = Rect::new(b.min_x - a.max_x, b.min_y - a.max_y, b.max_x - a.min_x, b.max_y - a.min_y);
            let (start, width) = angular_extent(&diff, 0.0, 0.0);
            if self.common[side as usize].covers_range(start, width) {
                return true;
            }
        }
        self.tree.points_of(side).iter().all(|&u| self.point_discounted(u, other))
    }

    fn judge(&self, slot: &Slot) -> Verdict {
        let (l, r) = (slot.left, slot.right);
        let (small, large) =
            if self.tree.node(l).len() <= self.tree.node(r).len() { (l, r) } else { (r, l) };
        if self.side_discounted(small, large) || self.side_discounted(large, small) {
            return Verdict::Discounted;
        }
        let mut discounted: Vec<PointId> = Vec::new();
        for (side, other) in [(l, r), (r, l)] {
            discounted.extend(self.tree.points_of(side).iter().copied().filter(|&u| self.point_discounted(u, other)));
        }
        discounted.sort_unstable();
        Verdict::Open { discounted, size: self.tree.node(l).len() + self.tree.node(r).len() }
    }
}

/// Splits `skipped` into pairs that cannot hold a greedy edge longer than
/// `lambda` and pairs that must still be processed. `coverages[u]` must be the
/// arc coverage of `u` at radius `lambda` on the short-edge graph.
pub fn discount_pairs(
    skipped: &[WspdPair],
    coverages: &[ArcSet],
    lambda: f64,
    tree: &SplitTree,
    points: &PointSet,
) -> Result<DiscountOutcome> {
    if coverages.len() != points.len() {
        return Err(Error::PointSetMismatch { expected: points.len(), found: coverages.len() });
    }
    if tree.point_count() != points.len() {
        return Err(Error::PointSetMismatch { expected: points.len(), found: tree.point_count() });
    }
    let judge = Judge::new(tree, points, coverages, lambda);
    let mut out = DiscountOutcome::default();
    for p in skipped {
        out.pairs_considered += 1;
        match judge.judge(&Slot::from(p)) {
            Verdict::Discounted => out.pairs_discounted += 1,
            Verdict::Open { discounted, size } => {
                out.points_in_undiscounted += size;
                out.points_discounted += discounted.len();
                out.undiscounted.push((*p, discounted));
            }
        }
    }
    Ok(out)
}

/// Three-phase greedy spanner: short edges with local searches, coverage
/// based discounting of the remaining pairs, then the decomposition driver on
/// what is left. Returns exactly the greedy spanner.
pub fn greedy_bucketing(points: &PointSet, cfg: &GreedyConfig) -> Result<(SpannerGraph, PhaseReport)> {
    cfg.validate()?;
    let t = cfg.t;
    if points.len() < 2 {
        return Ok((SpannerGraph::new(points.clone()), PhaseReport::default()));
    }
    let lambda = cfg.effective_lambda(points)?;
    let original = points;
    let mut report = PhaseReport { lambda, ..PhaseReport::default() };

    let clock = Clock::start();
    // Work on ids in tree order so that nearby points sit close in memory.
    let (points, tree, labels) = build_split_tree(points)?.relabelled(points);
    let points = &points;
    let one = phase_one(points, &tree, &labels, t, cfg.sigma, lambda)?;
    report.pairs_total = one.pairs_total;
    report.short_edges = one.graph.edge_count();
    report.phase1_ms = clock.ms();

    let clock = Clock::start();
    let covs = coverages(&one.graph, t, lambda);
    let judge = Judge::new(&tree, points, &covs, lambda);
    let mut open_slots: Vec<Slot> = Vec::new();
    let mut open_discounted: Vec<Vec<PointId>> = Vec::new();
    let (mut points_in_open, mut points_discounted) = (0usize, 0usize);
    let mut consider = |slot: Slot, report: &mut PhaseReport| {
        report.pairs_skipped_phase1 += 1;
        match judge.judge(&slot) {
            Verdict::Discounted => report.pairs_discounted += 1,
            Verdict::Open { discounted, size } => {
                points_in_open += size;
                points_discounted += discounted.len();
                open_slots.push(slot);
                open_discounted.push(discounted);
            }
        }
    };
    for slot in one.handed_over(lambda) {
        consider(*slot, &mut report);
    }
    for_each_pair(&tree, cfg.sigma, |p| {
        if p.bbox_min_dist > lambda {
            consider(Slot::from(&p), &mut report);
        }
    })?;
    report.points_discounted_fraction =
        if points_in_open == 0 { 1.0 } else { points_discounted as f64 / points_in_open as f64 };
    report.phase2_ms = clock.ms();

    let clock = Clock::start();
    let mut order: Vec<usize> = (0..open_slots.len()).collect();
    order.sort_by(|&a, &b| open_slots[a].min_dist.total_cmp(&open_slots[b].min_dist));
    let slots: Vec<Slot> = order.iter().map(|&i| open_slots[i]).collect();
    let discounted: Vec<Vec<PointId>> = order.iter().map(|&i| core::mem::take(&mut open_discounted[i])).collect();
    let mut graph = one.graph;
    let driver = Driver {
        tree: &tree,
        points,
        labels: &labels,
        t: t.get(),
        window: Window { above: lambda, up_to: f64::INFINITY },
        drop_on_edge: one.drop_on_edge,
    };
    let outcome = match driver.run(&mut graph, &slots, Some(&discounted), &mut || false) {
        Ok(o) => o,
        Err(Aborted) => unreachable!("never aborted"),
    };
    report.phase3_pairs = slots.len();
    report.phase3_edges = outcome.stats.edges_added;
    let edges = graph.edges().into_iter().map(|(a, b, _)| (labels[a as usize], labels[b as usize]));
    let graph = SpannerGraph::from_edges(original.clone(), edges)?;
    report.phase3_ms = clock.ms();
    Ok((graph, report))
}

#[cfg(test)]
mod tests {
    use super::super::{greedy_original, wspd_greedy};
    use crate::hyperbola::build_coverage;
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(v: f64) -> StretchFactor {
        StretchFactor::new(v).unwrap()
    }

    fn edge_ids(g: &SpannerGraph) -> Vec<(PointId, PointId)> {
        g.edges().into_iter().map(|(u, v, _)| (u, v)).collect()
    }

    fn far_clusters() -> PointSet {
        PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0), (100.0, 0.0), (101.0, 0.0)]).unwrap()
    }

    fn uniform(n: usize, side: f64, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointSet::new((0..n).map(|_| (rng.random::<f64>() * side, rng.random::<f64>() * side))).unwrap()
    }

    #[test]
    fn short_edges_on_a_line() {
        let ps = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        let grid = Grid::build(&ps, 1.5).unwrap();
        let out = greedy_short_edges(&ps, t(2.0), 1.5, &grid).unwrap();
        assert_eq!(edge_ids(&out.graph), vec![(0, 1), (1, 2)]);
        assert_eq!(out.distance_maps.len(), 3);
        let tree = build_split_tree(&ps).unwrap();
        assert!(out.skipped.iter().any(|p| {
            let (a, b) = (tree.points_of(p.left), tree.points_of(p.right));
            (a.contains(&0) && b.contains(&2)) || (a.contains(&2) && b.contains(&0))
        }));
    }

    #[test]
    fn short_edges_with_large_lambda_is_complete() {
        let ps = uniform(120, 10.0, 5);
        let grid = Grid::build(&ps, 50.0).unwrap();
        let out = greedy_short_edges(&ps, t(1.5), 50.0, &grid).unwrap();
        assert!(out.skipped.is_empty());
        assert_eq!(edge_ids(&out.graph), edge_ids(&wspd_greedy(&ps, t(1.5), t(1.5).one_edge_separation()).unwrap()));
    }

    #[test]
    fn far_clusters_short_phase() {
        let ps = far_clusters();
        let grid = Grid::build(&ps, 5.0).unwrap();
        let out = greedy_short_edges(&ps, t(2.0), 5.0, &grid).unwrap();
        assert_eq!(edge_ids(&out.graph), vec![(0, 1), (2, 3)]);
        assert_eq!(out.skipped.len(), 1);
        let cov: Vec<ArcSet> = (0..4)
            .map(|u| build_coverage(u, &out.distance_maps[u as usize], t(2.0), 5.0, &ps))
            .collect();
        let tree = build_split_tree(&ps).unwrap();
        let d = discount_pairs(&out.skipped, &cov, 5.0, &tree, &ps).unwrap();
        assert_eq!(d.pairs_discounted, 0);
        assert_eq!(d.undiscounted.len(), 1);
    }

    #[test]
    fn far_clusters_full_run() {
        let ps = far_clusters();
        let (g, report) = greedy_bucketing(&ps, &GreedyConfig::new(t(2.0)).with_lambda(5.0)).unwrap();
        assert_eq!(edge_ids(&g), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(report.short_edges, 2);
        assert_eq!(report.phase3_edges, 1);
        assert_eq!(edge_ids(&g), edge_ids(&greedy_original(&ps, t(2.0))));
    }

    #[test]
    fn discount_trivial_cases() {
        let ps = far_clusters();
        let tree = build_split_tree(&ps).unwrap();
        let grid = Grid::build(&ps, 5.0).unwrap();
        let out = greedy_short_edges(&ps, t(2.0), 5.0, &grid).unwrap();
        let empty: Vec<ArcSet> = (0..4).map(|u| ArcSet::empty(u, 5.0)).collect();
        assert_eq!(discount_pairs(&out.skipped, &empty, 5.0, &tree, &ps).unwrap().pairs_discounted, 0);
        let full: Vec<ArcSet> = (0..4)
            .map(|u| {
                ArcSet::from_intervals(u, 5.0, [crate::hyperbola::Interval { start: 0.0, end: core::f64::consts::TAU }])
            })
            .collect();
        let d = discount_pairs(&out.skipped, &full, 5.0, &tree, &ps).unwrap();
        assert_eq!(d.pairs_discounted, d.pairs_considered);
    }

    #[test]
    fn matches_oracle_on_examples() {
        for pts in [
            vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
            vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
            vec![(7.0, 7.0)],
            vec![],
            vec![(0.0, 0.0), (3.0, 4.0)],
        ] {
            let ps = PointSet::from_slice(&pts).unwrap();
            for tt in [1.1, 2.0] {
                let (g, r) = greedy_bucketing(&ps, &GreedyConfig::new(t(tt))).unwrap();
                assert_eq!(edge_ids(&g), edge_ids(&greedy_original(&ps, t(tt))));
                assert_eq!(r.total_edges(), g.edge_count());
            }
        }
    }

    #[test]
    fn matches_oracle_on_random_inputs() {
        for seed in 0..6 {
            for tt in [1.1, 1.5, 2.0, 3.0] {
                let ps = uniform(200, 14.0, seed);
                let (g, r) = greedy_bucketing(&ps, &GreedyConfig::new(t(tt))).unwrap();
                assert_eq!(edge_ids(&g), edge_ids(&greedy_original(&ps, t(tt))), "seed {seed} t {tt}");
                assert_eq!(r.total_edges(), g.edge_count());
                assert!(r.pairs_discounted <= r.pairs_skipped_phase1);
            }
        }
    }

    #[test]
    fn tiny_lambda_still_exact() {
        let ps = uniform(150, 10.0, 9);
        let (g, r) = greedy_bucketing(&ps, &GreedyConfig::new(t(1.5)).with_lambda(0.05)).unwrap();
        assert_eq!(edge_ids(&g), edge_ids(&greedy_original(&ps, t(1.5))));
        assert!(r.phase3_edges > 0);
    }

    #[test]
    fn rejects_bad_config() {
        let ps = far_clusters();
        let grid = Grid::build(&ps, 1.0).unwrap();
        assert!(greedy_short_edges(&ps, t(2.0), 0.0, &grid).is_err());
        assert!(greedy_bucketing(&ps, &GreedyConfig::new(t(2.0)).with_lambda_factor(-1.0)).is_err());
    }
}
