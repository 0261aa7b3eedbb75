//! Text formats: rational CSV matrices, edge lists and typed JSON payloads.

use std::fmt::Write as _;

use helly_core::rational::{parse_rational, Display};
use helly_core::{CircleMap, Graph, QiParams, Q};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    At { line: usize, column: usize, message: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Shape(String),
}

/// Rows of rationals, one row per line, comma separated. Blank lines and
/// lines starting with `#` are skipped; columns count from 1.
pub fn parse_csv_matrix(text: &str) -> Result<Vec<Vec<Q>>, ParseError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(j, cell)| {
                parse_rational(cell).map_err(|e| ParseError::At {
                    line: i + 1,
                    column: j + 1,
                    message: format!("{e}, found {:?}", cell.trim()),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::Shape("no rows".into()));
    }
    Ok(rows)
}

pub fn write_csv_matrix(rows: &[Vec<Q>]) -> String {
    let mut out = String::new();
    for row in rows {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", Display(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One `u v` pair per line, 0-indexed. The vertex count is one more than the
/// largest index seen. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::Line {
                line: i + 1,
                message: format!("expected two vertex indices, found {}", fields.len()),
            });
        }
        let mut ends = [0usize; 2];
        for (k, f) in fields.iter().enumerate() {
            ends[k] = f.parse().map_err(|_| ParseError::Line {
                line: i + 1,
                message: format!("not a vertex index: {f:?}"),
            })?;
        }
        if ends[0] == ends[1] {
            return Err(ParseError::Line { line: i + 1, message: format!("self-loop at {}", ends[0]) });
        }
        n = n.max(ends[0] + 1).max(ends[1] + 1);
        edges.push((ends[0], ends[1]));
    }
    if n == 0 {
        return Err(ParseError::Shape("no edges".into()));
    }
    Ok(Graph::from_edges(n, &edges).expect("indices are below n and loops rejected"))
}

/// Rationals travel as canonical strings; integers are also accepted as
/// plain JSON numbers on input.
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&Display(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Q::from_integer(v)),
            Raw::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        }
    }
}

pub mod rational_vec {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Item(#[serde(with = "super::rational")] Q);

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| Item(*q)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Ok(Vec::<Item>::deserialize(d)?.into_iter().map(|i| i.0).collect())
    }
}

pub mod rational_opt {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Item(#[serde(with = "super::rational")] Q);

    pub fn serialize<S: Serializer>(v: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Item).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        Ok(Option::<Item>::deserialize(d)?.map(|i| i.0))
    }
}

pub fn q_str(v: &Q) -> String {
    Display(v).to_string()
}

pub fn q_strs(v: &[Q]) -> Vec<String> {
    v.iter().map(q_str).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetPayload {
    pub set: Vec<usize>,
}

/// A point→value map such as a contraction or a radius function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValuesPayload {
    #[serde(with = "rational_vec")]
    pub values: Vec<Q>,
    #[serde(default, with = "rational_opt", skip_serializing_if = "Option::is_none")]
    pub k: Option<Q>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluePayload {
    #[serde(with = "rational_vec")]
    pub phi1: Vec<Q>,
    #[serde(with = "rational_vec")]
    pub phi2: Vec<Q>,
    pub a: usize,
    pub b: usize,
    #[serde(with = "rational")]
    pub r: Q,
    #[serde(with = "rational")]
    pub s: Q,
    #[serde(with = "rational")]
    pub t: Q,
    #[serde(with = "rational")]
    pub e: Q,
    #[serde(with = "rational")]
    pub k: Q,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentPayload {
    #[serde(with = "rational_vec")]
    pub f: Vec<Q>,
    pub x: usize,
    #[serde(with = "rational")]
    pub delta: Q,
}

/// A family of vertex sets with the closeness radius `r`. Without `y` every
/// starting vertex is tried; without `e` the constant is
/// `max(1, measured four-point δ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyPayload {
    pub family: Vec<Vec<usize>>,
    #[serde(with = "rational")]
    pub r: Q,
    #[serde(default)]
    pub y: Option<usize>,
    #[serde(default, with = "rational_opt")]
    pub e: Option<Q>,
}

/// A circle either as explicit `(arc, target)` samples over `length`, or as
/// `targets` sampled at consecutive integer arcs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirclePayload {
    #[serde(default, with = "rational_opt", skip_serializing_if = "Option::is_none")]
    pub length: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(String, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(with = "rational")]
    pub k: Q,
    #[serde(with = "rational")]
    pub c: Q,
    #[serde(default, with = "rational_opt", skip_serializing_if = "Option::is_none")]
    pub delta: Option<Q>,
}

impl CirclePayload {
    pub fn from_map(cm: &CircleMap) -> Self {
        CirclePayload {
            length: Some(cm.length),
            samples: Some(cm.samples.iter().map(|(a, t)| (q_str(a), *t)).collect()),
            targets: None,
            k: cm.params.k,
            c: cm.params.c,
            delta: None,
        }
    }

    pub fn to_map(&self) -> Result<CircleMap, String> {
        let params = QiParams::new(self.k, self.c).ok_or("need K ≥ 1 and C ≥ 0")?;
        match (&self.targets, &self.samples) {
            (Some(t), None) => {
                if t.is_empty() {
                    return Err("empty circle".into());
                }
                if self.length.is_some_and(|l| l != Q::from_integer(t.len() as i64)) {
                    return Err("length must equal the number of targets".into());
                }
                Ok(CircleMap::integer(t, params))
            }
            (None, Some(s)) => {
                let length = self.length.ok_or("samples need a length")?;
                let samples = s
                    .iter()
                    .map(|(a, t)| parse_rational(a).map(|a| (a, *t)).map_err(|e| format!("arc {a:?}: {e}")))
                    .collect::<Result<Vec<_>, _>>()?;
                let ok = !samples.is_empty()
                    && samples[0].0 >= Q::from_integer(0)
                    && samples.windows(2).all(|w| w[0].0 < w[1].0)
                    && samples.last().unwrap().0 < length;
                if !ok {
                    return Err("arc positions must increase strictly within [0, length)".into());
                }
                Ok(CircleMap { length, samples, params })
            }
            _ => Err("give exactly one of `targets` or `samples`".into()),
        }
    }
}
