//! Plain-text matrix sequence files.
//!
//! ```text
//! n=2
//! # preset: lazy-walk
//!
//! 0.9 0.1
//! 0.1 0.9
//!
//! 0.5 0.5
//! 0.5 0.5
//! ```
//!
//! The first non-blank, non-comment line is the header `n=<int>`. Matrices
//! follow as blank-line-separated blocks of `n` lines with `n`
//! whitespace-separated decimals each. Lines starting with `#` are comments;
//! those of the form `# key: value` placed before the first matrix are kept
//! as metadata.

use std::fmt;

use crate::error::{Error, Result};
use crate::hypotheses::MatrixSequence;
use crate::stochastic::{StochasticMatrix, Tolerances};

/// Largest dimension accepted by the parser.
pub const MAX_DIMENSION: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceFile {
    pub n: usize,
    /// `(key, value)` labels in file order.
    pub metadata: Vec<(String, String)>,
    /// Row-major `n * n` entries per matrix; parsed but not yet validated.
    pub records: Vec<Vec<f64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<usize> {
    let rest = line
        .strip_prefix('n')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| parse_err(line_no, "expected header `n=<dimension>`"))?;
    let n: usize = rest
        .trim()
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid dimension `{}`", rest.trim())))?;
    if n == 0 || n > MAX_DIMENSION {
        return Err(parse_err(
            line_no,
            format!("dimension {n} outside 1..={MAX_DIMENSION}"),
        ));
    }
    Ok(n)
}

fn parse_metadata(comment: &str) -> Option<(String, String)> {
    let (key, value) = comment.split_once(':')?;
    let key = key.trim();
    if key.is_empty() || key.contains(char::is_whitespace) {
        return None;
    }
    Some((key.to_string(), value.trim().to_string()))
}

fn parse_number(line_no: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid number `{token}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line_no, format!("non-finite number `{token}`")));
    }
    Ok(v)
}

impl SequenceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut metadata = Vec::new();
        let mut records: Vec<Vec<f64>> = Vec::new();
        // rows of the block being read, and the line it started on
        let mut block: Vec<f64> = Vec::new();
        let mut block_rows = 0;
        let mut block_start = 0;

        let finish_block = |block: &mut Vec<f64>,
                                block_rows: &mut usize,
                                block_start: usize,
                                n: usize,
                                records: &mut Vec<Vec<f64>>|
         -> Result<()> {
            if *block_rows == 0 {
                return Ok(());
            }
            if *block_rows != n {
                return Err(parse_err(
                    block_start,
                    format!(
                        "record {} has {} rows, expected {n}",
                        records.len() + 1,
                        block_rows
                    ),
                ));
            }
            records.push(std::mem::take(block));
            *block_rows = 0;
            Ok(())
        };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if records.is_empty() && block_rows == 0 {
                    if let Some(kv) = parse_metadata(comment) {
                        metadata.push(kv);
                    }
                }
                continue;
            }
            let Some(dim) = n else {
                if !line.is_empty() {
                    n = Some(parse_header(line_no, line)?);
                }
                continue;
            };
            if line.is_empty() {
                finish_block(&mut block, &mut block_rows, block_start, dim, &mut records)?;
                continue;
            }
            if block_rows == 0 {
                block_start = line_no;
                block.reserve(dim * dim);
            } else if block_rows == dim {
                return Err(parse_err(
                    line_no,
                    format!("record {} has more than {dim} rows", records.len() + 1),
                ));
            }
            let before = block.len();
            for token in line.split_whitespace() {
                if block.len() - before == dim {
                    return Err(parse_err(line_no, format!("row has more than {dim} entries")));
                }
                block.push(parse_number(line_no, token)?);
            }
            let got = block.len() - before;
            if got != dim {
                return Err(parse_err(
                    line_no,
                    format!("row has {got} entries, expected {dim}"),
                ));
            }
            block_rows += 1;
        }
        let n = n.ok_or_else(|| parse_err(text.lines().count().max(1), "missing header `n=<dimension>`"))?;
        finish_block(&mut block, &mut block_rows, block_start, n, &mut records)?;
        if records.is_empty() {
            return Err(Error::NoMatrices);
        }
        Ok(Self {
            n,
            metadata,
            records,
        })
    }

    pub fn metadata(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Validates every record as a stochastic matrix.
    pub fn to_sequence(&self, tol: &Tolerances) -> Result<MatrixSequence> {
        tol.check()?;
        let items = self
            .records
            .iter()
            .enumerate()
            .map(|(record, data)| {
                StochasticMatrix::from_row_major(self.n, data.clone(), tol.row, tol.neg).map_err(
                    |e| Error::Record {
                        record,
                        source: Box::new(e),
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixSequence::new(items)
    }

    pub fn from_sequence(seq: &MatrixSequence, metadata: Vec<(String, String)>) -> Self {
        Self {
            n: seq.n(),
            metadata,
            records: seq.iter().map(|m| m.as_slice().to_vec()).collect(),
        }
    }
}

impl fmt::Display for SequenceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for (k, v) in &self.metadata {
            writeln!(f, "# {k}: {v}")?;
        }
        for record in &self.records {
            writeln!(f)?;
            for row in record.chunks(self.n) {
                let mut first = true;
                for v in row {
                    if !first {
                        f.write_str(" ")?;
                    }
                    write!(f, "{v}")?;
                    first = false;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Parses a vector given inline (`0,1,0.5`) or as file contents; entries
/// are separated by commas and/or whitespace.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for token in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if !token.is_empty() {
                out.push(parse_number(idx + 1, token)?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Empty("vector"));
    }
    Ok(out)
}
