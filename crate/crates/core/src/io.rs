//! Matrix text and JSON formats.
//!
//! Text: first non-comment line `n`, then n rows of n rationals (`p` or
//! `p/q`). Lines starting with `#` are comments.
//! JSON: `{"n": 4, "b": [["0","2","-1","-1"], ...]}`.

use serde::{Deserialize, Serialize};

use crate::biresidue::BiresidueMatrix;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, QMatrix, Rational};

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    n: usize,
    b: Vec<Vec<String>>,
}

pub fn parse_text(s: &str) -> Result<QMatrix> {
    let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize = head.parse().map_err(|_| Error::Parse(format!("expected matrix size, got {head:?}")))?;
    let mut rows = Vec::with_capacity(n);
    for (r, line) in lines.enumerate() {
        if r == n {
            return Err(Error::Parse(format!("more than {n} rows")));
        }
        let row: Vec<Rational> = line.split_whitespace().map(parse_rational).collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {r} has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("found {} rows, expected {n}", rows.len())));
    }
    QMatrix::from_rows(rows)
}

pub fn to_text(m: &QMatrix) -> String {
    let mut out = format!("{}\n", m.rows());
    for r in m.to_rows() {
        let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_json(s: &str) -> Result<QMatrix> {
    let j: JsonMatrix = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if j.b.len() != j.n || j.b.iter().any(|r| r.len() != j.n) {
        return Err(Error::Parse(format!("\"b\" is not {0}x{0}", j.n)));
    }
    let rows = j.b.iter().map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>());
    QMatrix::from_rows(rows.collect::<Result<_>>()?)
}

pub fn to_json(m: &QMatrix) -> String {
    let j = JsonMatrix { n: m.rows(), b: m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect() };
    serde_json::to_string(&j).expect("plain data serializes")
}

/// Either format, chosen by the first non-blank character.
pub fn parse_matrix(s: &str) -> Result<QMatrix> {
    if s.trim_start().starts_with('{') {
        parse_json(s)
    } else {
        parse_text(s)
    }
}

pub fn parse_biresidue(s: &str) -> Result<BiresidueMatrix> {
    BiresidueMatrix::validate(parse_matrix(s)?)
}
