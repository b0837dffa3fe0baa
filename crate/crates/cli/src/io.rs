//! Plain-text point and edge files.
//!
//! Points: one `x y` pair per line, written with the shortest representation
//! that parses back to the same `f64`. Edges: one `i j` pair of zero-based
//! ids per line, each undirected edge once. Blank lines and lines starting
//! with `#` are ignored on input.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use spanner_core::{PointId, PointSet, SpannerGraph};

use crate::error::{io_err, parse_err, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn two_fields(line: usize, l: &str) -> Result<(&str, &str)> {
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(parse_err(line, format!("expected two fields, got `{l}`"))),
    }
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut coords = Vec::new();
    for (line, l) in content_lines(text) {
        let (a, b) = two_fields(line, l)?;
        let x: f64 = a.parse().map_err(|_| parse_err(line, format!("bad x coordinate `{a}`")))?;
        let y: f64 = b.parse().map_err(|_| parse_err(line, format!("bad y coordinate `{b}`")))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(line, "coordinates must be finite"));
        }
        coords.push((x, y));
    }
    Ok(PointSet::new(coords)?)
}

pub fn format_points(points: &PointSet) -> String {
    let mut s = String::with_capacity(points.len() * 40);
    for p in points.iter() {
        writeln!(s, "{} {}", p.x, p.y).unwrap();
    }
    s
}

pub fn parse_edges(text: &str) -> Result<Vec<(PointId, PointId)>> {
    let mut edges = Vec::new();
    for (line, l) in content_lines(text) {
        let (a, b) = two_fields(line, l)?;
        let i: PointId = a.parse().map_err(|_| parse_err(line, format!("bad point id `{a}`")))?;
        let j: PointId = b.parse().map_err(|_| parse_err(line, format!("bad point id `{b}`")))?;
        edges.push((i, j));
    }
    Ok(edges)
}

pub fn format_edges(g: &SpannerGraph) -> String {
    let mut s = String::with_capacity(g.edge_count() * 16);
    for (u, v, _) in g.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(&read_text(path)?)
}

pub fn write_points(path: &Path, points: &PointSet) -> Result<()> {
    write_text(path, &format_points(points))
}

/// Reads an edge file and attaches it to `points`.
pub fn read_graph(path: &Path, points: &PointSet) -> Result<SpannerGraph> {
    let edges = parse_edges(&read_text(path)?)?;
    Ok(SpannerGraph::from_edges(points.clone(), edges)?)
}

pub fn write_edges(path: &Path, g: &SpannerGraph) -> Result<()> {
    write_text(path, &format_edges(g))
}
