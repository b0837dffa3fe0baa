//! Deciding whether a graph is a t-spanner.
//!
//! [`test_spanner`] runs one local search per point. Pairs within `lambda` are
//! checked directly; farther points are certified by the source's path-hyperbola
//! coverage when it is the full circle, and by a complete Dijkstra otherwise.
//! Certification is sound: a shortest violating pair `(s, b)` with `|sb| > lambda`
//! and `s` certified would put `b` in some `PH(s, v)` with `|vb| < |sb|`, whose
//! t-path combines with the one from `s` to `v`.

use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{bridges_unchecked, dist, ellipse_contains_unchecked, PointId, PointSet, StretchFactor};
use crate::graph::{DijkstraScratch, SpannerGraph};
use crate::grid::Grid;
use crate::hyperbola::{build_coverage, is_fully_covered};

/// A pair without a t-path. `delta` is infinite when `v` is unreachable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub u: PointId,
    pub v: PointId,
    pub delta: f64,
    /// `t |uv|`.
    pub required: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestVerdict {
    pub is_spanner: bool,
    pub witness: Option<Witness>,
    /// Sources whose far pairs were certified by coverage.
    pub certified_points: usize,
    /// Sources that needed a complete Dijkstra.
    pub fallback_points: usize,
}

impl TestVerdict {
    fn spanner(certified_points: usize, fallback_points: usize) -> Self {
        TestVerdict { is_spanner: true, witness: None, certified_points, fallback_points }
    }

    fn violated(w: Witness, certified_points: usize, fallback_points: usize) -> Self {
        TestVerdict { is_spanner: false, witness: Some(w), certified_points, fallback_points }
    }
}

impl fmt::Display for TestVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.is_spanner { "spanner" } else { "not_spanner" };
        write!(f, "status={status}")?;
        match self.witness {
            Some(w) => write!(f, " u={} v={} delta={} required={}", w.u, w.v, w.delta, w.required)?,
            None => write!(f, " u=- v=- delta=- required=-")?,
        }
        write!(f, " certified={} fallback={}", self.certified_points, self.fallback_points)
    }
}

fn check_points(points: &PointSet, g: &SpannerGraph) -> Result<()> {
    if points.len() != g.len() {
        return Err(Error::PointSetMismatch { expected: points.len(), found: g.len() });
    }
    if points.points() != g.points().points() {
        return Err(Error::PointSetMismatch { expected: points.len(), found: g.len() });
    }
    Ok(())
}

fn witness(scratch: &mut DijkstraScratch, g: &SpannerGraph, u: PointId, v: PointId, t: f64) -> Witness {
    let delta = scratch.distance_within(g, u, v, f64::INFINITY).unwrap_or(f64::INFINITY);
    Witness { u, v, delta, required: t * g.points().distance(u, v) }
}

enum SourceOutcome {
    Certified,
    Fallback,
    Violation(Witness),
}

fn test_source(
    scratch: &mut DijkstraScratch,
    near: &mut Vec<PointId>,
    g: &SpannerGraph,
    grid: &Grid,
    s: PointId,
    t: StretchFactor,
    lambda: f64,
) -> SourceOutcome {
    let points = g.points();
    let tt = t.get();
    let ps = points.get(s);
    let reached = scratch.local(g, grid, s, lambda, tt);
    grid.points_within_into(ps.x, ps.y, lambda, near).expect("lambda is positive");
    for &v in near.iter() {
        if v == s {
            continue;
        }
        let ok = reached.get(v).is_some_and(|d| d <= tt * dist(ps, points.get(v)));
        if !ok {
            return SourceOutcome::Violation(witness(scratch, g, s, v, tt));
        }
    }
    if is_fully_covered(&build_coverage(s, &reached, t, lambda, points)) {
        return SourceOutcome::Certified;
    }
    let all = scratch.bounded(g, s, f64::INFINITY);
    let mut entries = all.entries().iter().peekable();
    for v in 0..points.len() as PointId {
        let d = match entries.peek() {
            Some(&&(w, d)) if w == v => {
                entries.next();
                d
            }
            _ => f64::INFINITY,
        };
        if v != s && !(d <= tt * dist(ps, points.get(v))) {
            return SourceOutcome::Violation(Witness { u: s, v, delta: d, required: tt * dist(ps, points.get(v)) });
        }
    }
    SourceOutcome::Fallback
}

/// Near-linear t-spanner test on well-spread inputs. The witness, if any, is
/// the first violation found in source id order.
pub fn test_spanner(points: &PointSet, g: &SpannerGraph, t: StretchFactor, lambda: f64) -> Result<TestVerdict> {
    check_points(points, g)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidLambda(lambda));
    }
    let n = points.len();
    if n < 2 {
        return Ok(TestVerdict::spanner(n, 0));
    }
    let grid = Grid::build(points, lambda)?;
    let (mut certified, mut fallback) = (0, 0);

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let outcomes: Vec<SourceOutcome> = (0..n as PointId)
            .into_par_iter()
            .map_init(
                || (DijkstraScratch::new(n), Vec::new()),
                |(scratch, near), s| test_source(scratch, near, g, &grid, s, t, lambda),
            )
            .collect();
        for o in outcomes {
            match o {
                SourceOutcome::Certified => certified += 1,
                SourceOutcome::Fallback => fallback += 1,
                SourceOutcome::Violation(w) => return Ok(TestVerdict::violated(w, certified, fallback)),
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = DijkstraScratch::new(n);
        let mut near = Vec::new();
        for s in 0..n as PointId {
            match test_source(&mut scratch, &mut near, g, &grid, s, t, lambda) {
                SourceOutcome::Certified => certified += 1,
                SourceOutcome::Fallback => fallback += 1,
                SourceOutcome::Violation(w) => return Ok(TestVerdict::violated(w, certified, fallback)),
            }
        }
    }
    Ok(TestVerdict::spanner(certified, fallback))
}

/// All-pairs check; the witness is the lexicographically first violating
/// pair `(u, v)` with `u < v`.
pub fn brute_force_test(points: &PointSet, g: &SpannerGraph, t: StretchFactor) -> Result<TestVerdict> {
    check_points(points, g)?;
    let n = points.len();
    let tt = t.get();
    let mut scratch = DijkstraScratch::new(n);
    for u in 0..n as PointId {
        let all = scratch.bounded(g, u, f64::INFINITY);
        for v in (u + 1)..n as PointId {
            let d = all.get(v).unwrap_or(f64::INFINITY);
            let required = tt * points.distance(u, v);
            if !(d <= required) {
                return Ok(TestVerdict::violated(Witness { u, v, delta: d, required }, 0, u as usize));
            }
        }
    }
    Ok(TestVerdict::spanner(0, n))
}

/// Every mandatory pair of a point set (pairs whose closed t-ellipse holds no
/// other point), computed once.
#[derive(Debug, Clone)]
pub struct MandatoryPairs {
    points: PointSet,
    t: StretchFactor,
    pairs: HashSet<(PointId, PointId)>,
}

impl MandatoryPairs {
    /// Cubic in the number of points.
    pub fn new(points: &PointSet, t: StretchFactor) -> Self {
        let n = points.len() as PointId;
        let tt = t.get();
        let mut pairs = HashSet::new();
        for p in 0..n {
            for q in (p + 1)..n {
                let (pp, qq) = (points.get(p), points.get(q));
                let empty = points.iter().all(|x| x.id == p || x.id == q || !ellipse_contains_unchecked(pp, qq, tt, x));
                if empty {
                    pairs.insert((p, q));
                }
            }
        }
        MandatoryPairs { points: points.clone(), t, pairs }
    }

    pub fn contains(&self, p: PointId, q: PointId) -> bool {
        self.pairs.contains(&(p.min(q), p.max(q)))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sorted list of the pairs, smaller id first.
    pub fn to_vec(&self) -> Vec<(PointId, PointId)> {
        let mut v: Vec<_> = self.pairs.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Whether every `b` farther than `lambda` from `a` is bridged by a
    /// mandatory pair `(p, q)` with both points within `lambda` of `a`.
    pub fn is_locally_bridged(&self, a: PointId, lambda: f64) -> Result<bool> {
        let points = &self.points;
        let pa = points.try_get(a)?;
        let near: Vec<PointId> =
            points.iter().filter(|x| x.id != a && dist(pa, x) <= lambda).map(|x| x.id).collect();
        let mut bridging: Vec<(PointId, PointId)> = Vec::new();
        for (i, &p) in near.iter().enumerate() {
            for &q in &near[i + 1..] {
                if self.contains(p, q) {
                    bridging.push((p, q));
                    bridging.push((q, p));
                }
            }
        }
        let tt = self.t.get();
        Ok(points.iter().filter(|b| dist(pa, b) > lambda).all(|b| {
            bridging.iter().any(|&(p, q)| {
                p != b.id && q != b.id && bridges_unchecked(pa, b, points.get(p), points.get(q), tt)
            })
        }))
    }
}

/// Brute-force local bridgedness of `a`. Builds the mandatory pairs of the
/// whole input; use [`MandatoryPairs`] directly to query many points.
pub fn is_locally_bridged(points: &PointSet, a: PointId, t: StretchFactor, lambda: f64) -> Result<bool> {
    points.try_get(a)?;
    MandatoryPairs::new(points, t).is_locally_bridged(a, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::greedy_original;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(v: f64) -> StretchFactor {
        StretchFactor::new(v).unwrap()
    }

    fn line() -> PointSet {
        PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()
    }

    fn square() -> PointSet {
        PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    fn uniform(n: usize, side: f64, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointSet::new((0..n).map(|_| (rng.random::<f64>() * side, rng.random::<f64>() * side))).unwrap()
    }

    #[test]
    fn tester_examples() {
        let ps = line();
        let g = SpannerGraph::from_edges(ps.clone(), [(0, 1), (1, 2)]).unwrap();
        assert!(test_spanner(&ps, &g, t(2.0), 3.0).unwrap().is_spanner);

        let g = SpannerGraph::from_edges(ps.clone(), [(0, 1)]).unwrap();
        let v = test_spanner(&ps, &g, t(2.0), 3.0).unwrap();
        assert!(!v.is_spanner);
        let w = v.witness.unwrap();
        assert_eq!((w.u, w.v), (0, 2));
        assert!(w.delta.is_infinite());
        assert_eq!(w.required, 4.0);

        let sq = square();
        let g = SpannerGraph::from_edges(sq.clone(), [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let v = test_spanner(&sq, &g, t(1.3), 3.0).unwrap();
        let w = v.witness.unwrap();
        assert_eq!((w.u, w.v), (0, 2));
        assert_eq!(w.delta, 2.0);
        assert!((w.required - 1.3 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn brute_force_examples() {
        let ps = uniform(30, 5.0, 1);
        let complete: Vec<(PointId, PointId)> =
            (0..30).flat_map(|u| ((u + 1)..30).map(move |v| (u, v))).collect();
        let g = SpannerGraph::from_edges(ps.clone(), complete).unwrap();
        assert!(brute_force_test(&ps, &g, t(1.01)).unwrap().is_spanner);
        let empty = SpannerGraph::new(ps.clone());
        let v = brute_force_test(&ps, &empty, t(3.0)).unwrap();
        assert_eq!(v.witness.map(|w| (w.u, w.v)), Some((0, 1)));
        let ps = uniform(200, 14.0, 2);
        assert!(brute_force_test(&ps, &greedy_original(&ps, t(2.0)), t(2.0)).unwrap().is_spanner);
    }

    #[test]
    fn rejects_mismatched_points() {
        let g = SpannerGraph::new(line());
        assert!(test_spanner(&square(), &g, t(2.0), 1.0).is_err());
        assert!(brute_force_test(&square(), &g, t(2.0)).is_err());
        assert!(test_spanner(&line(), &g, t(2.0), 0.0).is_err());
    }

    #[test]
    fn verdict_line() {
        let ps = line();
        let g = SpannerGraph::from_edges(ps.clone(), [(0, 1), (1, 2)]).unwrap();
        let v = test_spanner(&ps, &g, t(2.0), 3.0).unwrap();
        assert_eq!(v.certified_points + v.fallback_points, 3);
        assert!(v.to_string().starts_with("status=spanner u=- v=-"));
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for case in 0..40 {
            let ps = uniform(120, 11.0, 100 + case);
            let tt = [1.2, 1.5, 2.0][case as usize % 3];
            let mut g = greedy_original(&ps, t(tt));
            if case % 2 == 1 {
                let edges = g.edges();
                let (u, v, _) = edges[rng.random_range(0..edges.len())];
                g.remove_edge(u, v);
            }
            let fast = test_spanner(&ps, &g, t(tt), 3.0).unwrap();
            let slow = brute_force_test(&ps, &g, t(tt)).unwrap();
            assert_eq!(fast.is_spanner, slow.is_spanner, "case {case}");
            assert_eq!(fast.is_spanner, case % 2 == 0, "case {case}");
            if let Some(w) = fast.witness {
                assert!(!(w.delta <= w.required));
            }
        }
    }

    #[test]
    fn mandatory_pairs_match_predicate() {
        let ps = uniform(40, 6.0, 3);
        let mp = MandatoryPairs::new(&ps, t(1.5));
        for p in 0..40 {
            for q in (p + 1)..40 {
                assert_eq!(mp.contains(p, q), crate::geometry::is_mandatory(p, q, &ps, t(1.5)).unwrap());
            }
        }
        assert!(!mp.is_empty());
    }

    #[test]
    fn bridgedness_examples() {
        let ps = uniform(30, 3.0, 4);
        assert!(is_locally_bridged(&ps, 0, t(2.0), 10.0).unwrap());
        let far = PointSet::from_slice(&[(0.0, 0.0), (1.0, 0.0), (100.0, 0.0), (101.0, 0.0)]).unwrap();
        assert!(!is_locally_bridged(&far, 0, t(2.0), 5.0).unwrap());
        assert!(is_locally_bridged(&far, 9, t(2.0), 5.0).is_err());
    }
}
