//! Lazy priority-queue driver over well-separated pairs.
//!
//! Each active pair carries a sorted list of candidate point pairs; its queue
//! key is the first candidate not yet consumed, which is always a lower bound
//! on the pair's closest point pair without a t-path. Candidates are verified
//! when popped, so stale keys only cost a Dijkstra, never correctness. When a
//! pair is popped, every shorter point pair of the whole input has already
//! been decided, which makes each decision identical to the one the plain
//! greedy algorithm takes.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use crate::geometry::{dist, PointId, PointSet};
use crate::graph::{DijkstraScratch, SpannerGraph};
use crate::wspd::{NodeId, SplitTree, WspdPair};

/// Relative margin under which a distance found from a non-canonical source
/// is trusted to exclude a candidate without re-checking.
const EXCLUSION_MARGIN: f64 = 1e-12;

/// Pops between two polls of the abort callback.
const POLL_EVERY: u32 = 256;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Slot {
    pub left: NodeId,
    pub right: NodeId,
    pub min_dist: f64,
    pub max_dist: f64,
}

impl From<&WspdPair> for Slot {
    fn from(p: &WspdPair) -> Self {
        Slot { left: p.left, right: p.right, min_dist: p.bbox_min_dist, max_dist: p.bbox_max_dist }
    }
}

/// A point pair; `u` and `v` are external labels with `u < v`, `a` and `b`
/// the matching internal ids. Order and search direction follow the labels.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    len: f64,
    u: PointId,
    v: PointId,
    a: PointId,
    b: PointId,
}

#[inline]
fn candidate(len: f64, x: PointId, y: PointId, labels: &[PointId]) -> Candidate {
    let (lx, ly) = (labels[x as usize], labels[y as usize]);
    if lx < ly {
        Candidate { len, u: lx, v: ly, a: x, b: y }
    } else {
        Candidate { len, u: ly, v: lx, a: y, b: x }
    }
}

#[derive(Debug, Clone, Copy)]
struct Key {
    len: f64,
    u: PointId,
    v: PointId,
    slot: u32,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl Ord for Key {
    // Min-heap on (length, u, v); the slot index only makes the order total.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .len
            .total_cmp(&self.len)
            .then_with(|| other.u.cmp(&self.u))
            .then_with(|| other.v.cmp(&self.v))
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Window {
    /// Candidates must be strictly longer than this.
    pub above: f64,
    /// Candidates must be at most this long.
    pub up_to: f64,
}

impl Window {
    pub const ALL: Window = Window { above: f64::NEG_INFINITY, up_to: f64::INFINITY };

    #[inline]
    fn contains(&self, len: f64) -> bool {
        len > self.above && len <= self.up_to
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct DriverStats {
    pub edges_added: usize,
    pub pairs_opened: usize,
    pub path_checks: usize,
}

pub(crate) struct Aborted;

pub(crate) struct Driver<'a> {
    pub tree: &'a SplitTree,
    pub points: &'a PointSet,
    /// External label of every internal id.
    pub labels: &'a [PointId],
    pub t: f64,
    pub window: Window,
    /// Stop considering a pair once it received an edge. Sound when the
    /// separation ratio is at least `4(t+1)/(t-1)`.
    pub drop_on_edge: bool,
}

struct Active {
    cands: Vec<Candidate>,
    cursor: usize,
}

/// Result of a driver run: which slots received an edge.
pub(crate) struct DriverOutcome {
    pub stats: DriverStats,
    pub received_edge: Vec<bool>,
}

impl<'a> Driver<'a> {
    /// Runs the greedy sweep over `slots` (which must be sorted by
    /// `min_dist`). `discounted[i]`, when present, lists points of slot `i`
    /// already known to have t-paths to the whole opposite side.
    pub fn run(
        &self,
        g: &mut SpannerGraph,
        slots: &[Slot],
        discounted: Option<&[Vec<PointId>]>,
        abort: &mut dyn FnMut() -> bool,
    ) -> Result<DriverOutcome, Aborted> {
        debug_assert!(slots.windows(2).all(|w| w[0].min_dist <= w[1].min_dist));
        let mut scratch = DijkstraScratch::new(g.len());
        let mut heap: BinaryHeap<Key> = BinaryHeap::new();
        let mut active: HashMap<u32, Active> = HashMap::new();
        let mut received_edge = alloc::vec![false; slots.len()];
        let mut stats = DriverStats::default();
        let mut feed = 0usize;
        let mut ticks = 0u32;

        loop {
            ticks += 1;
            if ticks.is_multiple_of(POLL_EVERY) && abort() {
                return Err(Aborted);
            }
            // Open the next pair first if its lower bound does not exceed the queue head.
            let open_next = feed < slots.len()
                && heap.peek().is_none_or(|top| slots[feed].min_dist.total_cmp(&top.len).is_le());
            if open_next {
                let idx = feed as u32;
                feed += 1;
                let disc = discounted.map_or(&[][..], |d| d[idx as usize].as_slice());
                let cands = self.open(g, &slots[idx as usize], disc, &mut scratch, &mut stats, abort)?;
                stats.pairs_opened += 1;
                if let Some(first) = cands.first() {
                    heap.push(Key { len: first.len, u: first.u, v: first.v, slot: idx });
                    active.insert(idx, Active { cands, cursor: 0 });
                }
                continue;
            }
            let Some(key) = heap.pop() else { break };
            let state = active.get_mut(&key.slot).expect("queued slots are active");
            let cand = state.cands[state.cursor];
            stats.path_checks += 1;
            if !scratch.t_path_from(g, cand.a, cand.b, self.t) {
                g.push_edge(cand.a, cand.b);
                stats.edges_added += 1;
                received_edge[key.slot as usize] = true;
                if self.drop_on_edge {
                    active.remove(&key.slot);
                    continue;
                }
            }
            state.cursor += 1;
            match state.cands.get(state.cursor) {
                Some(next) => heap.push(Key { len: next.len, u: next.u, v: next.v, slot: key.slot }),
                None => {
                    active.remove(&key.slot);
                }
            }
        }
        Ok(DriverOutcome { stats, received_edge })
    }

    /// Candidate list of a pair, sorted by `(length, min id, max id)`.
    /// Point pairs already joined by a t-path (found with one bounded
    /// Dijkstra per point of the smaller side) are left out.
    fn open(
        &self,
        g: &SpannerGraph,
        slot: &Slot,
        discounted: &[PointId],
        scratch: &mut DijkstraScratch,
        stats: &mut DriverStats,
        abort: &mut dyn FnMut() -> bool,
    ) -> Result<Vec<Candidate>, Aborted> {
        let a_side = self.tree.points_of(slot.left);
        let b_side = self.tree.points_of(slot.right);
        let (small, large) = if a_side.len() <= b_side.len() { (a_side, b_side) } else { (b_side, a_side) };
        let is_discounted = |p: PointId| discounted.binary_search(&p).is_ok();
        let mut cands = Vec::new();

        if small.len() * large.len() == 1 {
            let (a, b) = (small[0], large[0]);
            let len = dist(self.points.get(a), self.points.get(b));
            if self.window.contains(len) && !is_discounted(a) && !is_discounted(b) {
                cands.push(candidate(len, a, b, self.labels));
            }
            return Ok(cands);
        }

        let mut targets: Vec<PointId> = Vec::with_capacity(large.len());
        let mut found: HashMap<PointId, f64> = HashMap::new();
        for &a in small {
            if is_discounted(a) {
                continue;
            }
            if abort() {
                return Err(Aborted);
            }
            let pa = self.points.get(a);
            targets.clear();
            let mut bound = 0.0f64;
            for &b in large {
                let len = dist(pa, self.points.get(b));
                if self.window.contains(len) && !is_discounted(b) {
                    targets.push(b);
                    bound = bound.max(self.t * len);
                }
            }
            if targets.is_empty() {
                continue;
            }
            found.clear();
            scratch.settle_targets(g, a, bound, &targets, |b, d| {
                found.insert(b, d);
            });
            stats.path_checks += 1;
            for &b in &targets {
                let len = dist(pa, self.points.get(b));
                let joined = found.get(&b).is_some_and(|&d| d < self.t * len * (1.0 - EXCLUSION_MARGIN));
                if !joined {
                    cands.push(candidate(len, a, b, self.labels));
                }
            }
        }
        cands.sort_unstable_by(|x, y| x.len.total_cmp(&y.len).then(x.u.cmp(&y.u)).then(x.v.cmp(&y.v)));
        Ok(cands)
    }
}

/// Eager variant for short pairs: every point pair of length at most
/// `up_to` across the given slots is collected, sorted once and swept.
/// Equivalent to [`Driver::run`] with the window `(-inf, up_to]`, without a
/// priority queue.
pub(crate) fn sweep_short(
    tree: &SplitTree,
    points: &PointSet,
    labels: &[PointId],
    t: f64,
    up_to: f64,
    drop_on_edge: bool,
    g: &mut SpannerGraph,
    slots: &[Slot],
) -> DriverOutcome {
    let mut cands: Vec<(u64, PointId, PointId, PointId, PointId, u32)> = Vec::new();
    for (i, slot) in slots.iter().enumerate() {
        for &a in tree.points_of(slot.left) {
            let pa = points.get(a);
            for &b in tree.points_of(slot.right) {
                let len = dist(pa, points.get(b));
                if len <= up_to {
                    // Non-negative floats order like their bit patterns.
                    let c = candidate(len, a, b, labels);
                    cands.push((len.to_bits(), c.u, c.v, c.a, c.b, i as u32));
                }
            }
        }
    }
    cands.sort_unstable();
    let mut scratch = DijkstraScratch::new(g.len());
    let mut received_edge = alloc::vec![false; slots.len()];
    let mut stats = DriverStats { pairs_opened: slots.len(), ..DriverStats::default() };
    for (_, _, _, a, b, slot) in cands {
        if drop_on_edge && received_edge[slot as usize] {
            continue;
        }
        stats.path_checks += 1;
        if !scratch.t_path_from(g, a, b, t) {
            g.push_edge(a, b);
            stats.edges_added += 1;
            received_edge[slot as usize] = true;
        }
    }
    DriverOutcome { stats, received_edge }
}
