//! JSON space files.
//!
//! ```json
//! {"name": "...", "points": ["a", "b"],
//!  "metric": {"type": "matrix", "rows": [[0, 1], [1, 0]]},
//!  "measure": [0.5, 0.5], "provenance": "..."}
//! ```
//!
//! `rows` may be the full matrix (checked for symmetry) or its upper triangle
//! with row `i` holding columns `i..n`. A `{"type": "graph", "edges": [[i, j, len]]}`
//! metric is converted to shortest-path distances on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricSpec {
    Matrix { rows: Vec<Vec<f64>> },
    Graph { edges: Vec<(usize, usize, f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub name: String,
    pub points: Vec<String>,
    pub metric: MetricSpec,
    pub measure: Vec<f64>,
    #[serde(default)]
    pub provenance: String,
}

impl SpaceFile {
    pub fn from_space(space: &MetricMeasureSpace) -> Self {
        let n = space.len();
        let rows = (0..n).map(|i| space.row(i).to_vec()).collect();
        Self {
            name: space.name().to_string(),
            points: space.points().to_vec(),
            metric: MetricSpec::Matrix { rows },
            measure: space.measure().to_vec(),
            provenance: space.provenance().to_string(),
        }
    }

    pub fn into_space(self) -> Result<MetricMeasureSpace> {
        let n = self.points.len();
        if self.measure.len() != n {
            return Err(parse_err(
                "measure",
                format!("expected {n} weights (one per point), got {}", self.measure.len()),
            ));
        }
        let dist = match self.metric {
            MetricSpec::Matrix { rows } => matrix_from_rows(&rows, n)?,
            MetricSpec::Graph { edges } => shortest_paths(&edges, n)?,
        };
        MetricMeasureSpace::from_flat(self.name, self.points, dist, self.measure, self.provenance)
    }
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    if rows.len() != n {
        return Err(parse_err(
            "metric.rows",
            format!("expected {n} rows, got {}", rows.len()),
        ));
    }
    let full = rows.iter().all(|r| r.len() == n);
    let upper = rows.iter().enumerate().all(|(i, r)| r.len() == n - i);
    let mut dist = vec![0.0; n * n];
    if full {
        for (i, r) in rows.iter().enumerate() {
            dist[i * n..(i + 1) * n].copy_from_slice(r);
        }
    } else if upper {
        for (i, r) in rows.iter().enumerate() {
            for (k, &v) in r.iter().enumerate() {
                let j = i + k;
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
    } else {
        let (i, r) = rows
            .iter()
            .enumerate()
            .find(|(i, r)| r.len() != n && r.len() != n - i)
            .expect("some row has a bad length");
        return Err(parse_err(
            format!("metric.rows[{i}]"),
            format!(
                "expected {n} entries (full) or {} (upper triangle), got {}",
                n - i,
                r.len()
            ),
        ));
    }
    Ok(dist)
}

/// Floyd–Warshall over an undirected weighted edge list. Unreachable pairs stay
/// infinite and are rejected by validation.
pub fn shortest_paths(edges: &[(usize, usize, f64)], n: usize) -> Result<Vec<f64>> {
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for (k, &(i, j, len)) in edges.iter().enumerate() {
        if i >= n || j >= n {
            return Err(parse_err(
                format!("metric.edges[{k}]"),
                format!("endpoint out of range for {n} points"),
            ));
        }
        if !(len >= 0.0) {
            return Err(parse_err(
                format!("metric.edges[{k}]"),
                format!("edge length must be nonnegative, got {len}"),
            ));
        }
        if len < d[i * n + j] {
            d[i * n + j] = len;
            d[j * n + i] = len;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    Ok(d)
}

pub fn to_json(space: &MetricMeasureSpace) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_space(space)).expect("space serializes")
}

pub fn from_json(text: &str) -> Result<MetricMeasureSpace> {
    let file: SpaceFile = serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    file.into_space()
}

pub fn save(space: &MetricMeasureSpace, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(space))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<MetricMeasureSpace> {
    from_json(&fs::read_to_string(path)?)
}
