//! Line-delimited JSON curve files: one `{"id": ..., "points": [[...], ...]}`
//! record per line. Blank lines are ignored.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use annc_core::Curve;
use serde::{Deserialize, Serialize};

#[derive(Debug, Deserialize, Serialize)]
struct Record {
    id: String,
    points: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub enum ReadError {
    Io(io::Error),
    /// A malformed record; `line` is 1-based.
    Parse {
        line: usize,
        message: String,
    },
    Empty,
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadError::Io(e) => write!(f, "{e}"),
            ReadError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ReadError::Empty => f.write_str("curve file holds no records"),
        }
    }
}

impl std::error::Error for ReadError {}

/// One record that failed validation, for readers that skip bad records.
#[derive(Debug)]
pub struct Rejected {
    pub line: usize,
    pub message: String,
}

fn parse_line(line: usize, text: &str) -> Result<Curve, ReadError> {
    let record: Record = serde_json::from_str(text).map_err(|e| ReadError::Parse {
        line,
        message: e.to_string(),
    })?;
    Curve::from_rows(record.id, record.points).map_err(|e| ReadError::Parse {
        line,
        message: e.to_string(),
    })
}

/// Parses every record, failing on the first malformed line or on a
/// dimension change.
pub fn parse(text: &str) -> Result<Vec<Curve>, ReadError> {
    let mut curves: Vec<Curve> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let curve = parse_line(i + 1, raw)?;
        if let Some(first) = curves.first() {
            if first.dim() != curve.dim() {
                return Err(ReadError::Parse {
                    line: i + 1,
                    message: format!(
                        "dimension {} differs from the file's dimension {}",
                        curve.dim(),
                        first.dim()
                    ),
                });
            }
        }
        curves.push(curve);
    }
    if curves.is_empty() {
        return Err(ReadError::Empty);
    }
    Ok(curves)
}

pub fn read(path: &Path) -> Result<Vec<Curve>, ReadError> {
    parse(&fs::read_to_string(path).map_err(ReadError::Io)?)
}

/// Well-formed records with their 1-based line numbers, and the rejected ones.
pub type Lenient = (Vec<(usize, Curve)>, Vec<Rejected>);

/// Parses a query file leniently: malformed records are returned alongside
/// the good ones together with their line numbers.
pub fn read_lenient(path: &Path) -> Result<Lenient, ReadError> {
    let text = fs::read_to_string(path).map_err(ReadError::Io)?;
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        match parse_line(i + 1, raw) {
            Ok(c) => good.push((i + 1, c)),
            Err(ReadError::Parse { line, message }) => bad.push(Rejected { line, message }),
            Err(e) => return Err(e),
        }
    }
    Ok((good, bad))
}

pub fn write_record(w: &mut impl Write, curve: &Curve) -> io::Result<()> {
    let record = Record {
        id: curve.id().to_string(),
        points: curve.points().map(<[f64]>::to_vec).collect(),
    };
    serde_json::to_writer(&mut *w, &record)?;
    writeln!(w)
}

pub fn write(path: &Path, curves: &[Curve]) -> io::Result<()> {
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    for c in curves {
        write_record(&mut w, c)?;
    }
    w.flush()
}
