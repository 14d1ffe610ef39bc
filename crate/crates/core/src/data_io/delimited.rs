use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_maybe_gzip, RawDataset};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Field separator of a delimited text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Delimiter {
    /// Any run of spaces or tabs.
    Whitespace,
    Char(char),
}

impl TryFrom<String> for Delimiter {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        match s.as_str() {
            "whitespace" | "space" | " " => Ok(Delimiter::Whitespace),
            "comma" => Ok(Delimiter::Char(',')),
            "tab" | "\t" => Ok(Delimiter::Char('\t')),
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(format!("delimiter must be a single character or \"whitespace\", got {s:?}")),
                }
            }
        }
    }
}

impl From<Delimiter> for String {
    fn from(d: Delimiter) -> String {
        match d {
            Delimiter::Whitespace => "whitespace".into(),
            Delimiter::Char(c) => c.to_string(),
        }
    }
}

/// Layout of a delimited feature file: one sample per line, one field holding
/// the integer class label, the rest numeric features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelimitedSchema {
    #[serde(default = "default_delimiter")]
    pub delimiter: Delimiter,
    /// Field index of the label; negative values count from the end (-1 is last).
    #[serde(default)]
    pub label_column: i64,
    /// When set, features are mapped linearly from `[lo, hi]` to `[0, 1]`.
    #[serde(default)]
    pub value_range: Option<[f64; 2]>,
}

fn default_delimiter() -> Delimiter {
    Delimiter::Whitespace
}

impl Default for DelimitedSchema {
    /// Label first, whitespace separated: the layout of the common USPS dumps.
    fn default() -> Self {
        DelimitedSchema {
            delimiter: Delimiter::Whitespace,
            label_column: 0,
            value_range: None,
        }
    }
}

pub fn read_delimited(path: impl AsRef<Path>, schema: &DelimitedSchema) -> Result<RawDataset> {
    let path = path.as_ref();
    let bytes = read_maybe_gzip(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::format("delimited file", format!("{}: {e}", path.display())))?;
    parse_delimited(&text, schema, &format!("delimited:{}", path.display()))
}

/// Parses delimited text. Blank lines are skipped; row numbers in errors are
/// 1-based line numbers, field numbers 1-based positions within the line.
pub fn parse_delimited(text: &str, schema: &DelimitedSchema, source: &str) -> Result<RawDataset> {
    let scale = match schema.value_range {
        Some([lo, hi]) if hi > lo && lo.is_finite() && hi.is_finite() => Some((lo, hi - lo)),
        Some(r) => return Err(Error::InvalidConfig(format!("bad value range {r:?}"))),
        None => None,
    };
    let mut width: Option<usize> = None;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut fields: Vec<&str> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let row = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        fields.clear();
        match schema.delimiter {
            Delimiter::Whitespace => fields.extend(line.split_whitespace()),
            Delimiter::Char(c) => fields.extend(line.split(c).map(str::trim)),
        }
        let w = *width.get_or_insert(fields.len());
        if fields.len() != w {
            return Err(Error::RaggedRow {
                row,
                expected: w,
                found: fields.len(),
            });
        }
        let label_at = if schema.label_column < 0 {
            w as i64 + schema.label_column
        } else {
            schema.label_column
        };
        if label_at < 0 || label_at as usize >= w {
            return Err(Error::InvalidConfig(format!(
                "label column {} out of range for {w} fields",
                schema.label_column
            )));
        }
        let label_at = label_at as usize;
        for (i, f) in fields.iter().enumerate() {
            let bad = || Error::NonNumericField {
                row,
                field: i + 1,
                value: f.to_string(),
            };
            let v: f64 = f.parse().map_err(|_| bad())?;
            if !v.is_finite() {
                return Err(bad());
            }
            if i == label_at {
                if v.fract() != 0.0 {
                    return Err(bad());
                }
                labels.push(v as i64);
            } else {
                data.push(match scale {
                    Some((lo, span)) => (v - lo) / span,
                    None => v,
                });
            }
        }
    }
    let dim = width.map_or(0, |w| w - 1);
    let n = labels.len();
    RawDataset::new(DenseMatrix::new(dim, n, data)?, labels, source.to_string())
}
