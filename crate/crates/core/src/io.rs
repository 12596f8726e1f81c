//! CSV and svmlight text formats.
//!
//! CSV rows are `label,x1,...,xd`. Svmlight rows are `label idx:val ...`
//! with 1-based sparse indices; absent coordinates are zero. Labels are
//! `+1`, `1` or `-1`. Blank lines and lines starting with `#` are skipped,
//! and `\r\n` endings are accepted.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{label_from_value, Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svmlight,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "svmlight" | "libsvm" | "svm" => Ok(Format::Svmlight),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

impl Format {
    /// Guess from a file extension; anything but `.csv` is read as svmlight.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Svmlight,
        }
    }
}

pub fn parse_dataset(text: &str, format: Format) -> Result<LabeledDataset> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Svmlight => parse_svmlight(text, None),
    }
}

/// Svmlight parsing with a declared dimension; indices above `dim` are errors.
pub fn parse_svmlight_with_dim(text: &str, dim: usize) -> Result<LabeledDataset> {
    parse_svmlight(text, Some(dim))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_label(tok: &str, line: usize) -> Result<Label> {
    let value: f64 = tok.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad label '{tok}'"),
    })?;
    label_from_value(value).map_err(|_| Error::Parse {
        line,
        message: format!("label '{tok}' is not +1 or -1"),
    })
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    match tok.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("bad numeric value '{tok}'"),
        }),
    }
}

fn finish(points: PointSet, labels: Vec<Label>) -> Result<LabeledDataset> {
    LabeledDataset::new(points, labels)
}

fn parse_csv(text: &str) -> Result<LabeledDataset> {
    let mut points: Option<PointSet> = None;
    let mut labels = Vec::new();
    let mut row = Vec::new();
    for (line, content) in content_lines(text) {
        let mut fields = content.split(',');
        let label = parse_label(fields.next().unwrap_or(""), line)?;
        row.clear();
        for f in fields {
            row.push(parse_value(f, line)?);
        }
        let set = points.get_or_insert_with(|| PointSet::new(row.len()));
        if row.len() != set.dim() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} features, found {}", set.dim(), row.len()),
            });
        }
        if row.is_empty() {
            return Err(Error::Parse {
                line,
                message: "row has no features".into(),
            });
        }
        set.push(&row);
        labels.push(label);
    }
    finish(points.unwrap_or_else(|| PointSet::new(0)), labels)
}

fn parse_svmlight(text: &str, declared_dim: Option<usize>) -> Result<LabeledDataset> {
    let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    for (line, content) in content_lines(text) {
        let content = content.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let label = parse_label(tokens.next().unwrap_or(""), line)?;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected index:value, found '{tok}'"),
            })?;
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad feature index '{idx}'"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line,
                    message: "feature indices are 1-based".into(),
                });
            }
            if let Some(d) = declared_dim {
                if idx > d {
                    return Err(Error::Parse {
                        line,
                        message: format!("index {idx} exceeds dimension {d}"),
                    });
                }
            }
            if entries.iter().any(|&(j, _)| j == idx) {
                return Err(Error::Parse {
                    line,
                    message: format!("feature {idx} given twice"),
                });
            }
            entries.push((idx, parse_value(val, line)?));
            max_index = max_index.max(idx);
        }
        sparse.push(entries);
        labels.push(label);
    }
    let dim = declared_dim.unwrap_or(max_index);
    let mut points = PointSet::new(dim);
    let mut row = vec![0.0; dim];
    for entries in &sparse {
        row.iter_mut().for_each(|v| *v = 0.0);
        for &(idx, val) in entries {
            row[idx - 1] = val;
        }
        points.push(&row);
    }
    finish(points, labels)
}

pub fn write_dataset(ds: &LabeledDataset, format: Format) -> String {
    let mut out = String::new();
    for i in 0..ds.len() {
        let label = match ds.label(i) {
            Label::Positive => "+1",
            Label::Negative => "-1",
        };
        out.push_str(label);
        let x = ds.point(i);
        match format {
            Format::Csv => {
                for v in x {
                    write!(out, ",{v:?}").unwrap();
                }
            }
            Format::Svmlight => {
                let last = x.len() - 1;
                for (j, v) in x.iter().enumerate() {
                    // the first row always carries the last index so the
                    // dimension survives a re-parse
                    if *v != 0.0 || (i == 0 && j == last) {
                        write!(out, " {}:{v:?}", j + 1).unwrap();
                    }
                }
            }
        }
        out.push('\n');
    }
    out
}
