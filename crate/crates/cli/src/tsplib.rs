//! TSPLIB `EUC_2D` instances.

use std::fmt::Write as _;

use spanner_core::PointSet;

use crate::error::{parse_err, CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    pub name: Option<String>,
    pub points: PointSet,
}

fn is_section_keyword(token: &str) -> bool {
    token == "EOF" || token.ends_with("_SECTION")
}

/// Reads the node coordinates of a TSPLIB file in file order; node `k`
/// (1-based) becomes point `k - 1`. Other sections are skipped.
pub fn parse_tsplib(text: &str) -> Result<TspInstance> {
    let mut name = None;
    let mut dimension = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut in_coords = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let first = l.split_whitespace().next().unwrap_or("");
        if in_coords && !is_section_keyword(first.trim_end_matches(':')) {
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(line, format!("expected `id x y`, got `{l}`")));
            }
            let list = coords.as_mut().unwrap();
            let id: usize = fields[0].parse().map_err(|_| parse_err(line, format!("bad node id `{}`", fields[0])))?;
            if id != list.len() + 1 {
                return Err(parse_err(line, format!("expected node {}, got {id}", list.len() + 1)));
            }
            let x: f64 = fields[1].parse().map_err(|_| parse_err(line, format!("bad x coordinate `{}`", fields[1])))?;
            let y: f64 = fields[2].parse().map_err(|_| parse_err(line, format!("bad y coordinate `{}`", fields[2])))?;
            if !x.is_finite() || !y.is_finite() {
                return Err(parse_err(line, "coordinates must be finite"));
            }
            list.push((x, y));
            continue;
        }
        in_coords = false;
        let (key, value) = match l.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (first, ""),
        };
        match key {
            "EOF" => break,
            "NAME" => name = Some(value.to_string()),
            "DIMENSION" => {
                dimension = Some(value.parse::<usize>().map_err(|_| parse_err(line, format!("bad DIMENSION `{value}`")))?)
            }
            "EDGE_WEIGHT_TYPE" if value != "EUC_2D" => return Err(CliError::UnsupportedWeightType(value.to_string())),
            "NODE_COORD_SECTION" => {
                if coords.is_some() {
                    return Err(parse_err(line, "second NODE_COORD_SECTION"));
                }
                coords = Some(Vec::with_capacity(dimension.unwrap_or(0)));
                in_coords = true;
            }
            _ => {}
        }
    }

    let coords = coords.ok_or(CliError::MissingCoordSection)?;
    if let Some(d) = dimension {
        if d != coords.len() {
            return Err(CliError::DimensionMismatch { declared: d, found: coords.len() });
        }
    }
    Ok(TspInstance { name, points: PointSet::new(coords)? })
}

pub fn format_tsplib(name: &str, points: &PointSet) -> String {
    let mut s = String::new();
    writeln!(s, "NAME : {name}").unwrap();
    writeln!(s, "TYPE : TSP").unwrap();
    writeln!(s, "DIMENSION : {}", points.len()).unwrap();
    writeln!(s, "EDGE_WEIGHT_TYPE : EUC_2D").unwrap();
    writeln!(s, "NODE_COORD_SECTION").unwrap();
    for (i, p) in points.iter().enumerate() {
        writeln!(s, "{} {} {}", i + 1, p.x, p.y).unwrap();
    }
    s.push_str("EOF\n");
    s
}
