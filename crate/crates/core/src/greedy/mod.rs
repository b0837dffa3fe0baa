//! The greedy spanner and three ways of computing it.
//!
//! [`greedy_original`] is the textbook quadratic-space sweep and serves as the
//! reference. [`wspd_greedy`] drives the same sweep through a well-separated
//! pair decomposition. [`greedy_bucketing`] first settles every short pair with
//! local searches, then uses path-hyperbola coverage to discard most long
//! pairs, and finishes the remaining ones with the decomposition driver. All
//! three return the same edge set on every input.

mod bucketing;
mod driver;

use alloc::vec::Vec;

pub use bucketing::{discount_pairs, greedy_bucketing, greedy_short_edges, DiscountOutcome, ShortEdges};

use crate::error::{Error, Result};
use crate::geometry::{dist, PointId, PointSet, StretchFactor};
use crate::graph::{DijkstraScratch, SpannerGraph};
use crate::wspd::{build_split_tree, for_each_pair};
use driver::{Driver, Slot, Window};

/// Parameters of [`greedy_bucketing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    pub t: StretchFactor,
    /// Multiplier on [`empirical_lambda`].
    pub lambda_factor: f64,
    /// Absolute short-edge threshold; replaces the empirical estimate.
    pub lambda_override: Option<f64>,
    /// Separation ratio of the decomposition.
    pub sigma: f64,
}

impl GreedyConfig {
    pub const DEFAULT_LAMBDA_FACTOR: f64 = 1.1;
    pub const PARANOID_LAMBDA_FACTOR: f64 = 1.5;

    pub fn new(t: StretchFactor) -> Self {
        GreedyConfig {
            t,
            lambda_factor: Self::DEFAULT_LAMBDA_FACTOR,
            lambda_override: None,
            sigma: t.one_edge_separation(),
        }
    }

    pub fn with_lambda_factor(mut self, factor: f64) -> Self {
        self.lambda_factor = factor;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda_override = Some(lambda);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_factor > 0.0 && self.lambda_factor.is_finite()) {
            return Err(Error::InvalidLambdaFactor(self.lambda_factor));
        }
        if let Some(l) = self.lambda_override {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidLambda(l));
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidSigma(self.sigma));
        }
        Ok(())
    }

    /// The short-edge threshold used for `points`: the override if set,
    /// otherwise `lambda_factor * empirical_lambda(n, t)` in units of the mean
    /// point spacing `sqrt(area / n)` of the bounding box.
    pub fn effective_lambda(&self, points: &PointSet) -> Result<f64> {
        self.validate()?;
        if let Some(l) = self.lambda_override {
            return Ok(l);
        }
        let n = points.len();
        let bbox = points.bounding_box().ok_or(Error::EmptyPointSet)?;
        let area = bbox.width() * bbox.height();
        let spacing = if area > 0.0 {
            libm::sqrt(area / n as f64)
        } else if bbox.width().max(bbox.height()) > 0.0 {
            bbox.width().max(bbox.height()) / n as f64
        } else {
            1.0
        };
        let lambda = self.lambda_factor * empirical_lambda(n, self.t) * spacing;
        if lambda > 0.0 && lambda.is_finite() {
            Ok(lambda)
        } else {
            Err(Error::InvalidLambda(lambda))
        }
    }
}

/// `ln n / ((t - 1)^(1/4) ln ln n)` for points spread at unit density. The
/// double logarithm is clamped to at least 1 so small inputs stay sensible.
pub fn empirical_lambda(n: usize, t: StretchFactor) -> f64 {
    let ln_n = libm::log((n.max(3)) as f64);
    let ln_ln_n = libm::log(ln_n).max(1.0);
    ln_n / (libm::pow(t.get() - 1.0, 0.25) * ln_ln_n)
}

/// Statistics of one [`greedy_bucketing`] run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseReport {
    pub lambda: f64,
    /// Edges found by the short-edge phase (all of length at most `lambda`).
    pub short_edges: usize,
    /// Pairs in the decomposition.
    pub pairs_total: usize,
    /// Pairs handed from the short-edge phase to discounting.
    pub pairs_skipped_phase1: usize,
    pub pairs_discounted: usize,
    /// Among points of undiscounted pairs, the fraction discounted for their pair.
    pub points_discounted_fraction: f64,
    /// Pairs processed by the last phase.
    pub phase3_pairs: usize,
    pub phase3_edges: usize,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub phase3_ms: f64,
}

impl PhaseReport {
    pub fn total_edges(&self) -> usize {
        self.short_edges + self.phase3_edges
    }

    pub fn total_ms(&self) -> f64 {
        self.phase1_ms + self.phase2_ms + self.phase3_ms
    }
}

/// Reference construction: every pair in `(length, min id, max id)` order,
/// added when the current graph has no t-path. Quadratic memory.
pub fn greedy_original(points: &PointSet, t: StretchFactor) -> SpannerGraph {
    let n = points.len();
    let mut g = SpannerGraph::new(points.clone());
    if n < 2 {
        return g;
    }
    let mut pairs: Vec<(f64, PointId, PointId)> = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n as PointId {
        for v in (u + 1)..n as PointId {
            pairs.push((dist(points.get(u), points.get(v)), u, v));
        }
    }
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut scratch = DijkstraScratch::new(n);
    for (_, u, v) in pairs {
        if !scratch.has_t_path(&g, u, v, t.get()) {
            g.push_edge(u, v);
        }
    }
    g
}

/// Greedy spanner through the decomposition with separation `sigma`.
pub fn wspd_greedy(points: &PointSet, t: StretchFactor, sigma: f64) -> Result<SpannerGraph> {
    Ok(wspd_greedy_with_abort(points, t, sigma, || false)?.expect("never aborted"))
}

/// Like [`wspd_greedy`], polling `abort` regularly; returns `Ok(None)` once it
/// answers `true`.
pub fn wspd_greedy_with_abort(
    points: &PointSet,
    t: StretchFactor,
    sigma: f64,
    mut abort: impl FnMut() -> bool,
) -> Result<Option<SpannerGraph>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let mut g = SpannerGraph::new(points.clone());
    if points.len() < 2 {
        return Ok(Some(g));
    }
    let tree = build_split_tree(points)?;
    let mut slots: Vec<Slot> = Vec::new();
    for_each_pair(&tree, sigma, |p| slots.push(Slot::from(&p)))?;
    sort_slots(&mut slots);
    let labels: Vec<PointId> = (0..points.len() as PointId).collect();
    let driver = Driver {
        tree: &tree,
        points,
        labels: &labels,
        t: t.get(),
        window: Window::ALL,
        drop_on_edge: sigma >= t.one_edge_separation(),
    };
    match driver.run(&mut g, &slots, None, &mut abort) {
        Ok(_) => Ok(Some(g)),
        Err(driver::Aborted) => Ok(None),
    }
}

fn sort_slots(slots: &mut [Slot]) {
    slots.sort_by(|a, b| a.min_dist.total_cmp(&b.min_dist));
}
