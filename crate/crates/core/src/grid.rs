//! Uniform bucketing of a point set into square cells.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{dist_xy, Point, PointId, PointSet};

pub type CellKey = (i64, i64);

/// Sparse uniform grid. Cells are keyed by integer coordinates relative to the
/// bounding box's minimum corner; only occupied cells are stored.
#[derive(Debug, Clone)]
pub struct Grid {
    cell_size: f64,
    origin: (f64, f64),
    extent: (i64, i64),
    cells: HashMap<CellKey, Vec<PointId>>,
    coords: Vec<(f64, f64)>,
}

impl Grid {
    /// Buckets every point of `points`. Points on a cell's upper edge fall into
    /// the next cell; the last row and column are clamped into the extent.
    pub fn build(points: &PointSet, cell_size: f64) -> Result<Grid> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::InvalidCellSize(cell_size));
        }
        let bbox = points.bounding_box().ok_or(Error::EmptyPointSet)?;
        let extent_of = |span: f64| -> i64 { (libm::floor(span / cell_size) as i64).saturating_add(1).max(1) };
        let extent = (extent_of(bbox.width()), extent_of(bbox.height()));
        let mut grid = Grid {
            cell_size,
            origin: (bbox.min_x, bbox.min_y),
            extent,
            cells: HashMap::new(),
            coords: points.iter().map(|p| (p.x, p.y)).collect(),
        };
        for p in points {
            let key = grid.cell_of(p.x, p.y);
            grid.cells.entry(key).or_default().push(p.id);
        }
        Ok(grid)
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn extent(&self) -> (i64, i64) {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    /// Cell coordinates for an arbitrary location (clamped into the extent).
    pub fn cell_of(&self, x: f64, y: f64) -> CellKey {
        let cx = libm::floor((x - self.origin.0) / self.cell_size) as i64;
        let cy = libm::floor((y - self.origin.1) / self.cell_size) as i64;
        (cx.clamp(0, self.extent.0 - 1), cy.clamp(0, self.extent.1 - 1))
    }

    /// Unclamped cell coordinate; used for query windows that may extend past the grid.
    fn raw_cell(&self, x: f64, y: f64) -> (i64, i64) {
        (
            libm::floor((x - self.origin.0) / self.cell_size) as i64,
            libm::floor((y - self.origin.1) / self.cell_size) as i64,
        )
    }

    pub fn cell(&self, key: CellKey) -> &[PointId] {
        self.cells.get(&key).map_or(&[], Vec::as_slice)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellKey, &Vec<PointId>)> {
        self.cells.iter()
    }

    /// Ids within `radius` of `center` (inclusive), sorted by id.
    pub fn points_within(&self, center: &Point, radius: f64) -> Result<Vec<PointId>> {
        let mut out = Vec::new();
        self.points_within_into(center.x, center.y, radius, &mut out)?;
        Ok(out)
    }

    /// Like [`Grid::points_within`], writing into a caller-owned buffer.
    pub fn points_within_into(&self, cx: f64, cy: f64, radius: f64, out: &mut Vec<PointId>) -> Result<()> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::NegativeRadius(radius));
        }
        out.clear();
        let (lo_x, lo_y) = self.raw_cell(cx - radius, cy - radius);
        let (hi_x, hi_y) = self.raw_cell(cx + radius, cy + radius);
        let (lo_x, hi_x) = (lo_x.max(0), hi_x.min(self.extent.0 - 1));
        let (lo_y, hi_y) = (lo_y.max(0), hi_y.min(self.extent.1 - 1));
        if lo_x > hi_x || lo_y > hi_y {
            return Ok(());
        }
        let window = ((hi_x - lo_x + 1) as u128) * ((hi_y - lo_y + 1) as u128);
        if window > self.cells.len() as u128 {
            for ids in self.cells.values() {
                self.filter_into(ids, cx, cy, radius, out);
            }
        } else {
            for gx in lo_x..=hi_x {
                for gy in lo_y..=hi_y {
                    if let Some(ids) = self.cells.get(&(gx, gy)) {
                        self.filter_into(ids, cx, cy, radius, out);
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(())
    }

    #[inline]
    fn filter_into(&self, ids: &[PointId], cx: f64, cy: f64, radius: f64, out: &mut Vec<PointId>) {
        for &id in ids {
            let (x, y) = self.coords[id as usize];
            if dist_xy(cx, cy, x, y) <= radius {
                out.push(id);
            }
        }
    }
}
