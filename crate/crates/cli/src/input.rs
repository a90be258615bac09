//! CSV ingestion.
//!
//! Comma separated, UTF-8, decimal point. The first row is a header when
//! none of its cells parse as a number. Rows whose selected cells are not
//! finite numbers are dropped and counted.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use milambda::PairedSample;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSel {
    Name(String),
    Index(usize),
}

impl FromStr for ColumnSel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnSel::Index(i),
            Err(_) => ColumnSel::Name(s.trim().to_string()),
        })
    }
}

/// Parses `"a,b"` into two selectors.
pub fn parse_columns(s: &str) -> Result<[ColumnSel; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] if !a.trim().is_empty() && !b.trim().is_empty() => {
            Ok([a.parse().unwrap(), b.parse().unwrap()])
        }
        _ => Err(CliError::Usage(format!(
            "--columns expects two selectors separated by a comma, got {s:?}"
        ))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub source: String,
    pub columns: [String; 2],
    pub header: bool,
    pub rows_read: u64,
    pub rows_dropped: u64,
}

pub struct LoadedPair {
    pub sample: PairedSample,
    pub summary: InputSummary,
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn read_source(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_end(&mut bytes)
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdin>"),
                source,
            })?;
        return Ok(bytes);
    }
    std::fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::FileNotFound(path.to_path_buf())
        } else {
            CliError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn resolve(sel: &ColumnSel, header: Option<&[String]>) -> Result<(usize, String)> {
    match (sel, header) {
        (ColumnSel::Name(name), Some(h)) => h
            .iter()
            .position(|c| c == name)
            .map(|i| (i, name.clone()))
            .ok_or_else(|| CliError::Usage(format!("no column named {name:?} in header {h:?}"))),
        (ColumnSel::Name(name), None) => Err(CliError::Usage(format!(
            "column {name:?} selected by name but the input has no header"
        ))),
        (ColumnSel::Index(i), Some(h)) => {
            // a header cell spelled like a number never happens: that row
            // would not have been taken as a header
            let label = h.get(*i).cloned().unwrap_or_else(|| i.to_string());
            Ok((*i, label))
        }
        (ColumnSel::Index(i), None) => Ok((*i, i.to_string())),
    }
}

pub fn parse_pair(
    bytes: &[u8],
    source: &str,
    columns: Option<&[ColumnSel; 2]>,
) -> Result<LoadedPair> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse {
            row: i as u64 + 1,
            column: "-".into(),
            message: e.to_string(),
        })?;
        records.push(rec);
    }

    let header: Option<Vec<String>> = records.first().and_then(|first| {
        first
            .iter()
            .all(|c| parse_number(c).is_none())
            .then(|| first.iter().map(str::to_string).collect())
    });
    let default = [ColumnSel::Index(0), ColumnSel::Index(1)];
    let sel = columns.unwrap_or(&default);
    let (ix, x_name) = resolve(&sel[0], header.as_deref())?;
    let (iy, y_name) = resolve(&sel[1], header.as_deref())?;

    let skip = usize::from(header.is_some());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    let mut dropped = 0u64;
    for (offset, rec) in records.iter().enumerate().skip(skip) {
        let row = offset as u64 + 1;
        let cell = |i: usize, name: &str| {
            rec.get(i).ok_or_else(|| CliError::Parse {
                row,
                column: name.to_string(),
                message: format!("row has {} fields, column index {i} is missing", rec.len()),
            })
        };
        let (cx, cy) = (cell(ix, &x_name)?, cell(iy, &y_name)?);
        match (parse_number(cx), parse_number(cy)) {
            (Some(a), Some(b)) => {
                x.push(a);
                y.push(b);
            }
            _ => dropped += 1,
        }
    }
    let rows_read = (records.len() - skip) as u64;
    let sample = PairedSample::new(x, y)?;
    Ok(LoadedPair {
        sample,
        summary: InputSummary {
            source: source.to_string(),
            columns: [x_name, y_name],
            header: header.is_some(),
            rows_read,
            rows_dropped: dropped,
        },
        digest: sha256_hex(bytes),
    })
}

pub fn load_pair(path: &Path, columns: Option<&[ColumnSel; 2]>) -> Result<LoadedPair> {
    let bytes = read_source(path)?;
    parse_pair(&bytes, &path.display().to_string(), columns)
}
