//! MatrixMarket coordinate files and single-column CSV vectors.

use std::fmt::Write as _;

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Writes `coordinate real general` with 1-based indices and 17 significant
/// digits.
pub fn write_matrix_market(m: &SparseMatrix) -> String {
    let mut s = String::with_capacity(48 * m.nnz() + 64);
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz());
    for (i, j, v) in m.triplets() {
        let _ = writeln!(s, "{} {} {:.16e}", i + 1, j + 1, v);
    }
    s
}

/// Reads `coordinate real|integer general|symmetric` MatrixMarket text.
pub fn read_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(Error::parse(1, "missing %%MatrixMarket matrix header"));
    }
    if h[2] != "coordinate" {
        return Err(Error::parse(1, format!("unsupported format {:?}", h[2])));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(Error::parse(1, format!("unsupported field {:?}", h[3])));
    }
    let symmetric = match h[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::parse(1, format!("unsupported symmetry {other:?}"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = data.next().ok_or_else(|| Error::parse(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(sline + 1, format!("bad size token {t:?}")))
        })
        .collect::<Result<_>>()?;
    let [nr, nc, nnz] = dims[..] else {
        return Err(Error::parse(sline + 1, "size line needs three integers"));
    };
    let mut t = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    for _ in 0..nnz {
        let (ln, l) = data
            .next()
            .ok_or_else(|| Error::parse(text.lines().count(), "fewer entries than declared"))?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 3 {
            return Err(Error::parse(ln + 1, "entry needs row, column and value"));
        }
        let idx = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(Error::parse(ln + 1, format!("bad index {s:?}"))),
            }
        };
        let (i, j) = (idx(tok[0])?, idx(tok[1])?);
        let v: f64 = tok[2]
            .parse()
            .map_err(|_| Error::parse(ln + 1, format!("bad value {:?}", tok[2])))?;
        if i >= nr || j >= nc {
            return Err(Error::parse(
                ln + 1,
                format!("entry ({}, {}) outside {nr}x{nc}", i + 1, j + 1),
            ));
        }
        t.push((i, j, v));
        if symmetric && i != j {
            t.push((j, i, v));
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(Error::parse(ln + 1, "more entries than declared"));
    }
    SparseMatrix::from_triplets(nr, nc, &t)
}

pub fn write_vector_csv(v: &[f64]) -> String {
    let mut s = String::with_capacity(25 * v.len());
    for x in v {
        let _ = writeln!(s, "{x:.16e}");
    }
    s
}

pub fn read_vector_csv(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad value {:?}", l.trim())))
        })
        .collect()
}
