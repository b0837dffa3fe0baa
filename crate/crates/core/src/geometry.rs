//! Points, distances and the exact predicates used by every algorithm.
//!
//! All comparisons are closed (`<=`) and evaluated in plain double precision
//! without tolerance, so every algorithm that asks the same question gets the
//! same bit-identical answer.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub type PointId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub id: PointId,
}

impl Point {
    pub const fn new(x: f64, y: f64, id: PointId) -> Self {
        Point { x, y, id }
    }
}

/// Euclidean distance. Every module routes through this function so that
/// lengths computed in different places agree to the last bit.
#[inline]
pub fn dist(u: &Point, v: &Point) -> f64 {
    dist_xy(u.x, u.y, v.x, v.y)
}

#[inline]
pub(crate) fn dist_xy(ux: f64, uy: f64, vx: f64, vy: f64) -> f64 {
    let dx = ux - vx;
    let dy = uy - vy;
    libm::sqrt(dx * dx + dy * dy)
}

/// The intended dilation `t`, always strictly greater than one.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StretchFactor(f64);

impl StretchFactor {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t > 1.0 {
            Ok(StretchFactor(t))
        } else {
            Err(Error::InvalidStretch(t))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `4(t+1)/(t-1)`: the smallest separation for which a well-separated pair
    /// can hold at most one greedy edge.
    pub fn one_edge_separation(self) -> f64 {
        4.0 * (self.0 + 1.0) / (self.0 - 1.0)
    }
}

impl fmt::Display for StretchFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite planar point set. Ids equal insertion positions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(coords: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut points = Vec::new();
        for (i, (x, y)) in coords.into_iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::NonFiniteCoordinate { id: i });
            }
            let id = PointId::try_from(i).map_err(|_| Error::InvalidPointId(i))?;
            points.push(Point::new(x, y, id));
        }
        Ok(PointSet { points })
    }

    pub fn from_slice(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().copied())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn get(&self, id: PointId) -> &Point {
        &self.points[id as usize]
    }

    pub fn try_get(&self, id: PointId) -> Result<&Point> {
        self.points.get(id as usize).ok_or(Error::InvalidPointId(id as usize))
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Point> {
        self.points.iter()
    }

    #[inline]
    pub fn distance(&self, u: PointId, v: PointId) -> f64 {
        dist(self.get(u), self.get(v))
    }

    /// Bounding box, `None` when empty.
    pub fn bounding_box(&self) -> Option<Rect> {
        Rect::enclosing(self.points.iter())
    }

    /// Ids of points whose coordinates repeat an earlier point's, in id order.
    pub fn duplicate_ids(&self) -> Vec<PointId> {
        let mut order: Vec<PointId> = (0..self.points.len() as PointId).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (self.get(a), self.get(b));
            pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y)).then(a.cmp(&b))
        });
        let mut dups: Vec<PointId> = order
            .windows(2)
            .filter(|w| {
                let (pa, pb) = (self.get(w[0]), self.get(w[1]));
                pa.x == pb.x && pa.y == pb.y
            })
            .map(|w| w[1])
            .collect();
        dups.sort_unstable();
        dups
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = core::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Axis-aligned closed rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Rect { min_x, min_y, max_x, max_y }
    }

    pub fn enclosing<'a>(mut pts: impl Iterator<Item = &'a Point>) -> Option<Rect> {
        let first = pts.next()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in pts {
            r.min_x = r.min_x.min(p.x);
            r.min_y = r.min_y.min(p.y);
            r.max_x = r.max_x.max(p.x);
            r.max_y = r.max_y.max(p.y);
        }
        Some(r)
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    #[inline]
    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.min_x + self.max_x), 0.5 * (self.min_y + self.max_y))
    }

    /// Radius of the circle through the four corners.
    #[inline]
    pub fn circumradius(&self) -> f64 {
        0.5 * libm::sqrt(self.width() * self.width() + self.height() * self.height())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.min_x <= x && x <= self.max_x && self.min_y <= y && y <= self.max_y
    }

    /// Distance from `(x, y)` to the nearest point of the rectangle.
    pub fn min_dist_to(&self, x: f64, y: f64) -> f64 {
        let dx = (self.min_x - x).max(0.0).max(x - self.max_x);
        let dy = (self.min_y - y).max(0.0).max(y - self.max_y);
        libm::sqrt(dx * dx + dy * dy)
    }

    /// Distance from `(x, y)` to the farthest corner.
    pub fn max_dist_to(&self, x: f64, y: f64) -> f64 {
        let dx = (x - self.min_x).abs().max((x - self.max_x).abs());
        let dy = (y - self.min_y).abs().max((y - self.max_y).abs());
        libm::sqrt(dx * dx + dy * dy)
    }

    /// Minimum distance between two rectangles (zero when they intersect).
    pub fn min_dist(&self, other: &Rect) -> f64 {
        let dx = (other.min_x - self.max_x).max(self.min_x - other.max_x).max(0.0);
        let dy = (other.min_y - self.max_y).max(self.min_y - other.max_y).max(0.0);
        libm::sqrt(dx * dx + dy * dy)
    }

    /// Maximum distance between a point of `self` and a point of `other`.
    pub fn max_dist(&self, other: &Rect) -> f64 {
        let dx = (other.max_x - self.min_x).max(self.max_x - other.min_x);
        let dy = (other.max_y - self.min_y).max(self.max_y - other.min_y);
        libm::sqrt(dx * dx + dy * dy)
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.min_x, self.min_y),
            (self.max_x, self.min_y),
            (self.max_x, self.max_y),
            (self.min_x, self.max_y),
        ]
    }
}

fn distinct(ids: &[PointId]) -> bool {
    ids.iter().enumerate().all(|(i, a)| ids[i + 1..].iter().all(|b| a != b))
}

/// `(p, q)` bridges `(a, b)`: `t|ap| + |pq| + t|qb| <= t|ab|`.
pub fn bridges(a: &Point, b: &Point, p: &Point, q: &Point, t: StretchFactor) -> Result<bool> {
    if !distinct(&[a.id, b.id, p.id, q.id]) {
        return Err(Error::CoincidentArguments);
    }
    Ok(bridges_unchecked(a, b, p, q, t.get()))
}

#[inline]
pub(crate) fn bridges_unchecked(a: &Point, b: &Point, p: &Point, q: &Point, t: f64) -> bool {
    t * dist(a, p) + dist(p, q) + t * dist(q, b) <= t * dist(a, b)
}

/// Whether `x` lies in the closed ellipse with foci `p`, `q` and eccentricity `1/t`.
pub fn ellipse_contains(p: &Point, q: &Point, t: StretchFactor, x: &Point) -> Result<bool> {
    if p.id == q.id {
        return Err(Error::CoincidentArguments);
    }
    Ok(ellipse_contains_unchecked(p, q, t.get(), x))
}

#[inline]
pub(crate) fn ellipse_contains_unchecked(p: &Point, q: &Point, t: f64, x: &Point) -> bool {
    dist(p, x) + dist(x, q) <= t * dist(p, q)
}

/// A pair is mandatory when its t-ellipse holds no other input point; such a
/// pair is an edge of every t-spanner on `points`.
pub fn is_mandatory(p: PointId, q: PointId, points: &PointSet, t: StretchFactor) -> Result<bool> {
    let pp = points.try_get(p)?;
    let qq = points.try_get(q)?;
    if p == q {
        return Err(Error::CoincidentArguments);
    }
    Ok(points
        .iter()
        .filter(|x| x.id != p && x.id != q)
        .all(|x| !ellipse_contains_unchecked(pp, qq, t.get(), x)))
}
