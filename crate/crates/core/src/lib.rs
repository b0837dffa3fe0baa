//! Greedy geometric t-spanners on planar point sets.
//!
//! The crate is `no_std` (with `alloc`). It provides the exact geometric
//! predicates, a uniform grid, Dijkstra variants over Euclidean graphs, a fair
//! split tree with its well-separated pair decomposition, path-hyperbola arc
//! coverage, three greedy constructions that produce identical edge sets, and
//! a near-linear t-spanner tester.
//!
//! The `std` feature (default) adds wall-clock timings to [`PhaseReport`];
//! `parallel` runs per-point coverage construction and tester sources on rayon.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod geometry;
pub mod graph;
pub mod greedy;
pub mod grid;
pub mod hyperbola;
pub mod tester;
pub mod wspd;

pub use error::{Error, Result};
pub use geometry::{bridges, dist, ellipse_contains, is_mandatory, Point, PointId, PointSet, Rect, StretchFactor};
pub use graph::{dijkstra, has_t_path, local_dijkstra, DijkstraScratch, DistanceMap, SpannerGraph};
pub use greedy::{
    discount_pairs, empirical_lambda, greedy_bucketing, greedy_original, greedy_short_edges, wspd_greedy,
    wspd_greedy_with_abort, DiscountOutcome, GreedyConfig, PhaseReport, ShortEdges,
};
pub use grid::Grid;
pub use hyperbola::{box_discounted, build_coverage, hyperbola_arc, is_fully_covered, ArcSet, Interval, PathHyperbola};
pub use wspd::{build_split_tree, build_wspd, closest_pair_candidate, separation_for, SplitTree, WspdPair};
pub use tester::{brute_force_test, is_locally_bridged, test_spanner, MandatoryPairs, TestVerdict, Witness};
