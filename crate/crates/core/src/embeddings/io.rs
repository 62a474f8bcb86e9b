//! Text embedding format: first line `count dim`, then one
//! `term v1 v2 ... vK` line per row, reals in shortest round-trip decimal.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::{EmbeddingMatrix, Side};

pub fn save_embeddings(path: &Path, emb: &EmbeddingMatrix, labels: &[String]) -> Result<()> {
    if labels.len() != emb.len() {
        return Err(Error::DimensionMismatch {
            expected: emb.len(),
            got: labels.len(),
        });
    }
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (i, label) in labels.iter().enumerate() {
        write!(w, "{label}")?;
        for x in emb.vector(i) {
            write!(w, " {x}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_embeddings(path: &Path, side: Side) -> Result<(Vec<String>, EmbeddingMatrix)> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };

    let (count, dim) = loop {
        match lines.next() {
            None => return Err(parse_err(0, "empty embedding file".into())),
            Some((lineno, line)) => {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                let mut parts = t.split_whitespace();
                let count: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(lineno + 1, "expected `count dim` header".into()))?;
                let dim: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(lineno + 1, "expected `count dim` header".into()))?;
                break (count, dim);
            }
        }
    };

    let mut labels = Vec::with_capacity(count);
    let mut mat = Mat::zeros(count, dim);
    let mut row = 0usize;
    for (lineno, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if row >= count {
            return Err(parse_err(lineno + 1, format!("more than {count} rows")));
        }
        let mut parts = t.split_whitespace();
        let label = parts.next().unwrap();
        labels.push(label.to_string());
        let dest = mat.row_mut(row);
        let mut got = 0usize;
        for p in parts {
            if got >= dim {
                return Err(parse_err(lineno + 1, format!("row has more than {dim} values")));
            }
            dest[got] = p
                .parse::<f64>()
                .map_err(|e| parse_err(lineno + 1, format!("bad real `{p}`: {e}")))?;
            got += 1;
        }
        if got != dim {
            return Err(parse_err(lineno + 1, format!("row has {got} values, expected {dim}")));
        }
        row += 1;
    }
    if row != count {
        return Err(parse_err(0, format!("file declares {count} rows but has {row}")));
    }
    Ok((labels, EmbeddingMatrix::new(side, mat)?))
}
