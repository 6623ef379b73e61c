//! Paired-column CSV ingestion.

use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::PairedSample;

/// A column addressed by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    /// Parses a command-line column reference: a header name, or a 1-based
    /// column number when no header carries that name.
    pub fn parse_cli(s: &str) -> Self {
        ColumnRef::Name(s.to_string())
    }

    fn resolve(&self, headers: &csv::StringRecord) -> Result<usize> {
        match self {
            ColumnRef::Index(i) if *i < headers.len() => Ok(*i),
            ColumnRef::Index(i) => Err(Error::invalid(format!(
                "column index {i} out of range ({} columns)",
                headers.len()
            ))),
            ColumnRef::Name(name) => {
                if let Some(i) = headers.iter().position(|h| h.trim() == name) {
                    return Ok(i);
                }
                match name.parse::<usize>() {
                    Ok(k) if k >= 1 && k <= headers.len() => Ok(k - 1),
                    _ => Err(Error::invalid(format!("no column named '{name}'"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSelector {
    pub x: ColumnRef,
    pub y: ColumnRef,
}

impl ColumnSelector {
    pub fn new(x: ColumnRef, y: ColumnRef) -> Self {
        Self { x, y }
    }

    pub fn by_name(x: &str, y: &str) -> Self {
        Self::new(ColumnRef::Name(x.into()), ColumnRef::Name(y.into()))
    }
}

/// What to do with a row whose x or y cell is empty (or `NA`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Keep only complete pairs.
    #[default]
    DropPairwise,
    Error,
}

impl FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" | "drop-pairwise" => Ok(MissingPolicy::DropPairwise),
            "error" => Ok(MissingPolicy::Error),
            other => Err(Error::invalid(format!("unknown missing-value policy '{other}'"))),
        }
    }
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na")
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
        row,
        message: format!("column '{column}': '{cell}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            message: format!("column '{column}': non-finite value '{cell}'"),
        });
    }
    Ok(v)
}

pub fn read_paired_csv(
    path: impl AsRef<Path>,
    selector: &ColumnSelector,
    policy: MissingPolicy,
) -> Result<PairedSample> {
    let file = std::fs::File::open(path.as_ref())?;
    read_paired(file, selector, policy)
}

/// [`read_paired_csv`] over any reader. Row numbers in errors are 1-based and
/// exclude the header.
pub fn read_paired<R: Read>(input: R, selector: &ColumnSelector, policy: MissingPolicy) -> Result<PairedSample> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = rdr.headers()?.clone();
    let xi = selector.x.resolve(&headers)?;
    let yi = selector.y.resolve(&headers)?;
    if xi == yi {
        return Err(Error::invalid("x and y select the same column"));
    }
    let (xname, yname) = (headers[xi].trim().to_string(), headers[yi].trim().to_string());

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let x = rec.get(xi).unwrap_or("");
        let y = rec.get(yi).unwrap_or("");
        if is_missing(x) || is_missing(y) {
            match policy {
                MissingPolicy::DropPairwise => continue,
                MissingPolicy::Error => {
                    let col = if is_missing(x) { &xname } else { &yname };
                    return Err(Error::Parse {
                        row,
                        message: format!("missing value in column '{col}'"),
                    });
                }
            }
        }
        xs.push(parse_cell(x, row, &xname)?);
        ys.push(parse_cell(y, row, &yname)?);
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData {
            available: xs.len(),
            required: 2,
        });
    }
    PairedSample::new(xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DATA: &str = "id,age,psa\n1,61,4.2\n2,70,\n3,55,11.0\n4,NA,3.3\n5,66,0.8\n";

    #[test]
    fn drops_incomplete_rows() {
        let s = read_paired(
            DATA.as_bytes(),
            &ColumnSelector::by_name("age", "psa"),
            MissingPolicy::DropPairwise,
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.xs(), &[61.0, 55.0, 66.0]);
        assert_eq!(s.ys(), &[4.2, 11.0, 0.8]);
    }

    #[test]
    fn error_policy_reports_row() {
        let e = read_paired(
            DATA.as_bytes(),
            &ColumnSelector::by_name("age", "psa"),
            MissingPolicy::Error,
        )
        .unwrap_err();
        match e {
            Error::Parse { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("psa"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn numeric_column_refs_are_one_based() {
        let s = read_paired(
            DATA.as_bytes(),
            &ColumnSelector::by_name("2", "3"),
            MissingPolicy::DropPairwise,
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        let sel = ColumnSelector::new(ColumnRef::Index(1), ColumnRef::Index(2));
        assert_eq!(
            read_paired(DATA.as_bytes(), &sel, MissingPolicy::DropPairwise).unwrap(),
            s
        );
    }

    #[test]
    fn bad_cells_and_columns() {
        let bad = "a,b\n1,2\n3,x\n";
        assert!(matches!(
            read_paired(
                bad.as_bytes(),
                &ColumnSelector::by_name("a", "b"),
                MissingPolicy::DropPairwise
            ),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read_paired(
                bad.as_bytes(),
                &ColumnSelector::by_name("a", "c"),
                MissingPolicy::DropPairwise
            ),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            read_paired(
                bad.as_bytes(),
                &ColumnSelector::by_name("a", "a"),
                MissingPolicy::DropPairwise
            ),
            Err(Error::InvalidInput(_))
        ));
        let short = "a,b\n1,2\n,3\n";
        assert!(matches!(
            read_paired(
                short.as_bytes(),
                &ColumnSelector::by_name("a", "b"),
                MissingPolicy::DropPairwise
            ),
            Err(Error::InsufficientData { available: 1, .. })
        ));
        let inf = "a,b\n1,2\n3,inf\n";
        assert!(read_paired(
            inf.as_bytes(),
            &ColumnSelector::by_name("a", "b"),
            MissingPolicy::DropPairwise
        )
        .is_err());
    }
}
