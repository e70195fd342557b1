//! Instance readers and writers.
//!
//! Two formats are understood: the JSON schema
//! `{"name": string, "points": [[x, y], ...]}` and the `EUC_2D` subset of
//! TSPLIB (header lines plus `NODE_COORD_SECTION`).

use super::{EuclideanInstance, Point};
use crate::error::{Error, Result};

pub fn from_json_str(text: &str) -> Result<EuclideanInstance> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_json_string(inst: &EuclideanInstance) -> String {
    serde_json::to_string_pretty(inst).expect("instances always serialize")
}

pub fn from_tsplib_str(text: &str) -> Result<EuclideanInstance> {
    let mut name = None;
    let mut dimension = None;
    let mut weight_type = None;
    let mut lines = text.lines().enumerate();
    let mut saw_section = false;

    for (idx, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            saw_section = true;
            break;
        }
        if line == "EOF" {
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            if line.ends_with("_SECTION") {
                return Err(Error::UnsupportedFormat(format!(
                    "section {line} is not supported (only NODE_COORD_SECTION)"
                )));
            }
            return Err(parse_err(
                idx,
                1,
                format!("expected `KEY : VALUE`, got {line:?}"),
            ));
        };
        let value = value.trim();
        match key.trim() {
            "NAME" => name = Some(value.to_string()),
            "DIMENSION" => {
                let d = value.parse::<usize>().map_err(|e| {
                    parse_err(
                        idx,
                        raw.find(':').unwrap_or(0) + 2,
                        format!("bad DIMENSION: {e}"),
                    )
                })?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_string()),
            "TYPE" if value != "TSP" => {
                return Err(Error::UnsupportedFormat(format!("problem TYPE {value}")));
            }
            _ => {}
        }
    }

    match weight_type.as_deref() {
        Some("EUC_2D") => {}
        Some(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "EDGE_WEIGHT_TYPE {other}"
            )));
        }
        None => {
            return Err(Error::UnsupportedFormat("missing EDGE_WEIGHT_TYPE".into()));
        }
    }
    if !saw_section {
        return Err(Error::UnsupportedFormat(
            "missing NODE_COORD_SECTION".into(),
        ));
    }

    let mut points = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                idx,
                1,
                format!("expected `id x y`, got {line:?}"),
            ));
        }
        let coord = |k: usize| {
            fields[k].parse::<f64>().map_err(|e| {
                let col = raw.find(fields[k]).unwrap_or(0) + 1;
                parse_err(idx, col, format!("bad coordinate {:?}: {e}", fields[k]))
            })
        };
        points.push(Point::new(coord(1)?, coord(2)?));
    }

    if let Some(d) = dimension {
        if d != points.len() {
            return Err(Error::Parse {
                line: text.lines().count(),
                column: 1,
                message: format!(
                    "DIMENSION is {d} but {} coordinates were read",
                    points.len()
                ),
            });
        }
    }
    EuclideanInstance::new(name, points)
}

fn parse_err(line_idx: usize, column: usize, message: String) -> Error {
    Error::Parse {
        line: line_idx + 1,
        column,
        message,
    }
}
