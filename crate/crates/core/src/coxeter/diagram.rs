use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::Value;

use super::CoxeterError;

/// Off-diagonal Coxeter label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Finite(u32),
    Infinity,
}

impl Label {
    /// `-cos(pi / m)`, with `-1` for infinity.
    pub fn gram_entry(self) -> f64 {
        match self {
            Label::Finite(m) => -(std::f64::consts::PI / f64::from(m)).cos(),
            Label::Infinity => -1.0,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Label::Finite(m) => Some(m),
            Label::Infinity => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinity => f.write_str("inf"),
        }
    }
}

/// Symmetric Coxeter matrix on generators `P1 … Pn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterDiagram {
    rank: usize,
    m: Vec<Vec<Label>>,
}

impl CoxeterDiagram {
    /// Validate a full matrix; `m[i][i]` must be `Finite(1)`.
    pub fn from_matrix(m: Vec<Vec<Label>>) -> Result<Self, CoxeterError> {
        let rank = m.len();
        for (i, row) in m.iter().enumerate() {
            if row.len() != rank {
                return Err(CoxeterError::parse(
                    format!("m[{i}]"),
                    format!("row has {} entries, expected {rank}", row.len()),
                ));
            }
            for (j, &l) in row.iter().enumerate() {
                let loc = || format!("m[{i}][{j}]");
                if i == j {
                    if l != Label::Finite(1) {
                        return Err(CoxeterError::parse(loc(), "diagonal entry must be 1"));
                    }
                    continue;
                }
                if let Label::Finite(v) = l {
                    if v < 2 {
                        return Err(CoxeterError::parse(
                            loc(),
                            format!("off-diagonal label {v} is below 2"),
                        ));
                    }
                }
                if m[j][i] != l {
                    return Err(CoxeterError::parse(
                        loc(),
                        format!("not symmetric: {l} vs m[{j}][{i}] = {}", m[j][i]),
                    ));
                }
            }
        }
        Ok(CoxeterDiagram { rank, m })
    }

    /// Linear diagram `[m12, m23, …]`; all other pairs commute.
    pub fn linear(labels: &[Label]) -> Result<Self, CoxeterError> {
        let rank = labels.len() + 1;
        let mut m = vec![vec![Label::Finite(2); rank]; rank];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Label::Finite(1);
        }
        for (k, &l) in labels.iter().enumerate() {
            m[k][k + 1] = l;
            m[k + 1][k] = l;
        }
        CoxeterDiagram::from_matrix(m).map_err(|e| match e {
            CoxeterError::Parse { location, message } if location.starts_with("m[") => {
                let pos = labels.len().min(
                    location
                        .trim_start_matches("m[")
                        .split(']')
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .unwrap_or(0),
                );
                CoxeterError::parse(format!("label {}", pos + 1), message)
            }
            other => other,
        })
    }

    /// Accepts the linear shorthand `"[3,4,4]"` or a JSON object
    /// `{"rank":n,"m":[[…]]}` (infinity as `"inf"` or `null`).
    pub fn parse(text: &str) -> Result<Self, CoxeterError> {
        let t = text.trim();
        if t.starts_with('{') {
            return Self::parse_json(t);
        }
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| {
                CoxeterError::parse("input", "expected `[m1,m2,…]` or a JSON Coxeter matrix")
            })?;
        if inner.trim().is_empty() {
            return CoxeterDiagram::linear(&[]);
        }
        let labels = inner
            .split(',')
            .enumerate()
            .map(|(k, tok)| {
                parse_label_token(tok.trim())
                    .map_err(|msg| CoxeterError::parse(format!("label {}", k + 1), msg))
            })
            .collect::<Result<Vec<_>, _>>()?;
        CoxeterDiagram::linear(&labels)
    }

    fn parse_json(text: &str) -> Result<Self, CoxeterError> {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            CoxeterError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        let rows = v
            .get("m")
            .and_then(Value::as_array)
            .ok_or_else(|| CoxeterError::parse("m", "missing matrix field `m`"))?;
        let mut m = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| CoxeterError::parse(format!("m[{i}]"), "row is not an array"))?;
            let mut out = Vec::with_capacity(row.len());
            for (j, x) in row.iter().enumerate() {
                let label = match x {
                    Value::Null => Ok(Label::Infinity),
                    Value::Number(n) => n
                        .as_u64()
                        .and_then(|n| u32::try_from(n).ok())
                        .map(Label::Finite)
                        .ok_or_else(|| format!("`{n}` is not a valid label")),
                    Value::String(s) => parse_label_token(s),
                    other => Err(format!("`{other}` is not a valid label")),
                }
                .map_err(|msg| CoxeterError::parse(format!("m[{i}][{j}]"), msg))?;
                out.push(label);
            }
            m.push(out);
        }
        if let Some(rank) = v.get("rank") {
            if rank.as_u64() != Some(m.len() as u64) {
                return Err(CoxeterError::parse(
                    "rank",
                    format!("rank {rank} does not match {} matrix rows", m.len()),
                ));
            }
        }
        CoxeterDiagram::from_matrix(m)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Label between generators `i` and `j` (0-based).
    pub fn label(&self, i: usize, j: usize) -> Label {
        self.m[i][j]
    }

    pub fn generator_name(i: usize) -> String {
        format!("P{}", i + 1)
    }

    pub fn matrix(&self) -> &[Vec<Label>] {
        &self.m
    }

    /// Linear labels if the diagram is a path `P1 - P2 - … - Pn`.
    pub fn as_linear(&self) -> Option<Vec<Label>> {
        for i in 0..self.rank {
            for j in i + 2..self.rank {
                if self.m[i][j] != Label::Finite(2) {
                    return None;
                }
            }
        }
        Some((0..self.rank.saturating_sub(1)).map(|k| self.m[k][k + 1]).collect())
    }
}

fn parse_label_token(tok: &str) -> Result<Label, String> {
    match tok {
        "inf" | "∞" | "oo" => Ok(Label::Infinity),
        _ => tok
            .parse::<u32>()
            .map(Label::Finite)
            .map_err(|_| format!("`{tok}` is not a label")),
    }
}

impl fmt::Display for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(labels) = self.as_linear() {
            let parts: Vec<String> = labels.iter().map(ToString::to_string).collect();
            return write!(f, "[{}]", parts.join(","));
        }
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl Serialize for CoxeterDiagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let m: Vec<Vec<Value>> = self
            .m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|l| match l {
                        Label::Finite(v) => Value::from(*v),
                        Label::Infinity => Value::from("inf"),
                    })
                    .collect()
            })
            .collect();
        let mut s = serializer.serialize_struct("CoxeterDiagram", 2)?;
        s.serialize_field("rank", &self.rank)?;
        s.serialize_field("m", &m)?;
        s.end()
    }
}
