//! Fair split tree and well-separated pair decomposition.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{dist, dist_xy, PointId, PointSet, Rect, StretchFactor};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Tight bounding box of the node's points.
    pub bbox: Rect,
    start: u32,
    end: u32,
    pub children: Option<(NodeId, NodeId)>,
}

impl Node {
    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Binary tree whose internal nodes split their bounding box at the midpoint
/// of its longest side. Each node owns a contiguous span of a permutation of
/// the point ids; leaves hold a single point.
#[derive(Debug, Clone)]
pub struct SplitTree {
    nodes: Vec<Node>,
    order: Vec<PointId>,
}

impl SplitTree {
    pub const ROOT: NodeId = 0;

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn points_of(&self, id: NodeId) -> &[PointId] {
        let n = self.node(id);
        &self.order[n.start as usize..n.end as usize]
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(Self::ROOT, 0usize)];
        while let Some((id, d)) = stack.pop() {
            best = best.max(d);
            if let Some((l, r)) = self.node(id).children {
                stack.push((l, d + 1));
                stack.push((r, d + 1));
            }
        }
        best
    }

    pub fn point_count(&self) -> usize {
        self.order.len()
    }

    /// The same tree over the points renumbered in tree order, so that every
    /// node covers a contiguous id range. Returns the renumbered points, the
    /// tree, and the original id of every new id.
    pub(crate) fn relabelled(&self, points: &PointSet) -> (PointSet, SplitTree, Vec<PointId>) {
        let renumbered = PointSet::new(self.order.iter().map(|&i| {
            let p = points.get(i);
            (p.x, p.y)
        }))
        .expect("coordinates were validated");
        let tree = SplitTree { nodes: self.nodes.clone(), order: (0..self.order.len() as PointId).collect() };
        (renumbered, tree, self.order.clone())
    }
}

/// Separation ratio under which a well-separated pair holds at most one greedy edge.
pub fn separation_for(t: StretchFactor) -> f64 {
    t.one_edge_separation()
}

fn bbox_of(points: &PointSet, ids: &[PointId]) -> Rect {
    Rect::enclosing(ids.iter().map(|&i| points.get(i))).expect("node spans are non-empty")
}

pub fn build_split_tree(points: &PointSet) -> Result<SplitTree> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = points.len();
    let mut order: Vec<PointId> = (0..n as PointId).collect();
    let mut nodes = vec![Node { bbox: bbox_of(points, &order), start: 0, end: n as u32, children: None }];
    let mut scratch: Vec<PointId> = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    while let Some(idx) = stack.pop() {
        let node = nodes[idx];
        if node.len() < 2 {
            continue;
        }
        let (s, e) = (node.start as usize, node.end as usize);
        let span = &mut order[s..e];
        let split_x = node.bbox.width() >= node.bbox.height();
        let (lo, hi) = if split_x { (node.bbox.min_x, node.bbox.max_x) } else { (node.bbox.min_y, node.bbox.max_y) };
        let mid = 0.5 * (lo + hi);
        let key = |id: PointId| if split_x { points.get(id).x } else { points.get(id).y };

        // Stable partition: coordinates below the midpoint go left.
        scratch.clear();
        scratch.extend(span.iter().copied().filter(|&id| key(id) < mid));
        let left_len = scratch.len();
        scratch.extend(span.iter().copied().filter(|&id| key(id) >= mid));
        let left_len = if left_len == 0 || left_len == span.len() {
            // Degenerate box (duplicates or a rounding-collapsed midpoint).
            span.len() / 2
        } else {
            span.copy_from_slice(&scratch);
            left_len
        };
        let m = s + left_len;
        let left = Node { bbox: bbox_of(points, &order[s..m]), start: s as u32, end: m as u32, children: None };
        let right = Node { bbox: bbox_of(points, &order[m..e]), start: m as u32, end: e as u32, children: None };
        let li = nodes.len();
        nodes.push(left);
        nodes.push(right);
        nodes[idx].children = Some((li as NodeId, li as NodeId + 1));
        stack.push(li + 1);
        stack.push(li);
    }
    Ok(SplitTree { nodes, order })
}

/// One pair `{A, B}` of the decomposition, referring to two tree nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WspdPair {
    pub left: NodeId,
    pub right: NodeId,
    /// Whether the enclosing circles were separated by at least `sigma * r`.
    pub separation_ok: bool,
    /// Minimum distance between the two bounding boxes.
    pub bbox_min_dist: f64,
    pub bbox_max_dist: f64,
}

/// Enclosing circles (circumcircles of the boxes) with common radius
/// `r = max(r_a, r_b)` are at least `sigma * r` apart.
pub fn well_separated(a: &Rect, b: &Rect, sigma: f64) -> bool {
    let r = a.circumradius().max(b.circumradius());
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    dist_xy(ax, ay, bx, by) - 2.0 * r >= sigma * r
}

/// Streams the decomposition of `tree` to `visit`, in a deterministic order.
pub fn for_each_pair(tree: &SplitTree, sigma: f64, mut visit: impl FnMut(WspdPair)) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let mut stack: Vec<(NodeId, NodeId)> = Vec::new();
    for node in &tree.nodes {
        let Some((l, r)) = node.children else { continue };
        stack.push((l, r));
        while let Some((v, w)) = stack.pop() {
            let (nv, nw) = (tree.node(v), tree.node(w));
            if well_separated(&nv.bbox, &nw.bbox, sigma) {
                visit(WspdPair {
                    left: v,
                    right: w,
                    separation_ok: true,
                    bbox_min_dist: nv.bbox.min_dist(&nw.bbox),
                    bbox_max_dist: nv.bbox.max_dist(&nw.bbox),
                });
                continue;
            }
            // Refine the node with the larger enclosing circle. A leaf has
            // radius zero, so the larger one is internal whenever we get here.
            let (big, other) =
                if nv.bbox.circumradius() >= nw.bbox.circumradius() { (v, w) } else { (w, v) };
            let (c1, c2) = tree.node(big).children.expect("non-separated pair has an internal node");
            stack.push((c2, other));
            stack.push((c1, other));
        }
    }
    Ok(())
}

pub fn build_wspd(tree: &SplitTree, sigma: f64) -> Result<Vec<WspdPair>> {
    let mut pairs = Vec::new();
    for_each_pair(tree, sigma, |p| pairs.push(p))?;
    Ok(pairs)
}

/// The closest `(u, v)` with `u` on the pair's left side and `v` on its right
/// that is not excluded; ties go to the smaller `(u id, v id)`.
pub fn closest_pair_candidate(
    tree: &SplitTree,
    pair: &WspdPair,
    points: &PointSet,
    mut exclude: impl FnMut(PointId, PointId) -> bool,
) -> Option<(PointId, PointId, f64)> {
    let mut best: Option<(PointId, PointId, f64)> = None;
    for &u in tree.points_of(pair.left) {
        for &v in tree.points_of(pair.right) {
            let len = dist(points.get(u), points.get(v));
            let better = match best {
                None => true,
                Some((bu, bv, bl)) => len.total_cmp(&bl).then((u, v).cmp(&(bu, bv))).is_lt(),
            };
            if better && !exclude(u, v) {
                best = Some((u, v, len));
            }
        }
    }
    best
}
