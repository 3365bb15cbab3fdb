//! The pairwise valued relation.
//!
//! A relation over `n` objects is a total table of costs `R(x, y)`: finite,
//! non-negative, with `R(x, x) = 0`. Nothing else is assumed. In particular
//! `R(x, y)` and `R(y, x)` may differ and the triangle inequality may fail.
//! Row `x` holds the costs *from* `x`, and only the order within a row
//! matters downstream.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Square,
    Finite,
    Positive,
    ZeroDiagonal,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Square => "square",
            Rule::Finite => "finite",
            Rule::Positive => "positive",
            Rule::ZeroDiagonal => "zero-diagonal",
        })
    }
}

/// One broken rule. For [`Rule::Square`] `row` and `col` carry the table
/// dimensions and `value` is absent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub row: usize,
    pub col: usize,
    pub value: Option<f64>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{} violated at ({}, {}): {}", self.rule, self.row, self.col, v),
            None => write!(f, "{} violated: {} rows x {} columns", self.rule, self.row, self.col),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Informational only; asymmetry is never a violation.
    pub is_symmetric: bool,
}

/// Checks a raw table against the relation rules.
///
/// Returns [`Error::Shape`] when rows have different lengths; every other
/// problem is listed in the report.
pub fn validate_relation<R: AsRef<[f64]>>(rows: &[R]) -> Result<ValidationReport> {
    let width = rows.first().map_or(0, |r| r.as_ref().len());
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.as_ref().len() != width) {
        return Err(Error::Shape(format!(
            "row {i} has {} values, expected {width}",
            r.as_ref().len()
        )));
    }

    let mut violations = Vec::new();
    if rows.len() != width {
        violations.push(Violation {
            rule: Rule::Square,
            row: rows.len(),
            col: width,
            value: None,
        });
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.as_ref().iter().enumerate() {
            let mut flag = |rule| {
                violations.push(Violation {
                    rule,
                    row: i,
                    col: j,
                    value: Some(v),
                })
            };
            if !v.is_finite() {
                flag(Rule::Finite);
                continue;
            }
            if v < 0.0 {
                flag(Rule::Positive);
            }
            if i == j && v != 0.0 {
                flag(Rule::ZeroDiagonal);
            }
        }
    }

    let is_symmetric =
        rows.len() == width && (0..width).all(|i| (0..i).all(|j| rows[i].as_ref()[j] == rows[j].as_ref()[i]));

    Ok(ValidationReport {
        valid: violations.is_empty(),
        violations,
        is_symmetric,
    })
}

/// A validated relation with one unique label per object.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl RelationMatrix {
    pub fn new<R: AsRef<[f64]>>(labels: Vec<String>, rows: &[R]) -> Result<Self> {
        let report = validate_relation(rows)?;
        if !report.valid {
            return Err(Error::Invalid(report));
        }
        if labels.len() != rows.len() {
            return Err(Error::Shape(format!("{} labels for {} rows", labels.len(), rows.len())));
        }
        check_unique(&labels)?;
        if labels.is_empty() {
            return Err(Error::Shape("relation has no objects".into()));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Ok(Self { labels, values })
    }

    /// Labels default to the 0-based row indices.
    pub fn unlabeled<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(index_labels(rows.len()), rows)
    }

    /// Builds a relation from a cost function, which must itself give zero on
    /// the diagonal.
    pub fn from_fn(labels: Vec<String>, mut cost: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cost(i, j)).collect()).collect();
        Self::new(labels, &rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.values[from * self.len() + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        let n = self.len();
        &self.values[from * n..(from + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.len())
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Applies `f` to every cost. `f` must keep costs valid (`f(0) = 0`,
    /// non-negative).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let rows: Vec<&[f64]> = self.rows().collect();
        let mapped: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| f(v)).collect()).collect();
        Self::new(self.labels.clone(), &mapped)
    }

    /// The relation restricted to (and reordered by) `indices`. Repeated
    /// indices are allowed; copies of the same object are at cost 0.
    pub fn induced(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * indices.len());
        for &i in indices {
            values.extend(indices.iter().map(|&j| self.get(i, j)));
        }
        Self {
            labels: index_labels(indices.len()),
            values,
        }
    }

    /// Writes the relation as CSV, with a header row and label column when
    /// `labeled` is set. Values use the shortest decimal form that parses
    /// back to the same double.
    pub fn write_csv<W: Write>(&self, mut w: W, labeled: bool) -> std::io::Result<()> {
        if labeled {
            write!(w, "label")?;
            for l in &self.labels {
                write!(w, ",{}", quote(l))?;
            }
            writeln!(w)?;
        }
        for (i, row) in self.rows().enumerate() {
            if labeled {
                write!(w, "{},", quote(&self.labels[i]))?;
            }
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path, labeled: bool) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_csv(&mut w, labeled)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// Reads a relation CSV from `path`.
pub fn load_relation(path: &Path, labeled: bool) -> Result<RelationMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_relation(&text, path, labeled)
}

/// A rectangular table read from a relation CSV, not yet validated.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a relation CSV without checking the relation rules.
pub fn load_table(path: &Path, labeled: bool) -> Result<RawTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text, path, labeled)
}

/// Parses CSV text into a rectangular table. Labels default to row indices.
pub fn parse_table(text: &str, origin: &Path, labeled: bool) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(origin, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        records.push((line, rec));
    }

    let mut records = records.into_iter();
    let column_labels: Option<Vec<String>> = if labeled {
        let (_, header) = records
            .next()
            .ok_or_else(|| Error::parse(origin, 1, "missing header row"))?;
        Some(header.iter().skip(1).map(str::to_owned).collect())
    } else {
        None
    };

    let mut row_labels = Vec::new();
    let mut rows = Vec::new();
    for (line, rec) in records {
        let mut cells = rec.iter();
        if labeled {
            row_labels.push(cells.next().unwrap_or_default().to_owned());
        }
        let row = cells
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::parse(origin, line, format!("not a number: {c:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::parse(origin, 1, "relation has no rows"));
    }
    let width = rows[0].len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(Error::Shape(format!(
            "{}: row {i} has {} values, row 0 has {width}",
            origin.display(),
            r.len()
        )));
    }

    let labels = match column_labels {
        Some(cols) => {
            if cols.len() != width {
                return Err(Error::Shape(format!(
                    "{}: header has {} labels for {width} columns",
                    origin.display(),
                    cols.len()
                )));
            }
            check_unique(&cols)?;
            if let Some((i, l)) = row_labels.iter().enumerate().find(|(i, l)| cols.get(*i) != Some(*l)) {
                return Err(Error::parse(
                    origin,
                    i + 2,
                    format!("row label {l:?} does not match column label {:?}", cols.get(i)),
                ));
            }
            cols
        }
        None => index_labels(rows.len()),
    };
    Ok(RawTable { labels, rows })
}

/// Parses relation CSV text; `origin` is only used in error messages.
pub fn parse_relation(text: &str, origin: &Path, labeled: bool) -> Result<RelationMatrix> {
    let table = parse_table(text, origin, labeled)?;
    if table.rows.len() != table.rows[0].len() {
        return Err(Error::Shape(format!(
            "{}: {} rows of {} values",
            origin.display(),
            table.rows.len(),
            table.rows[0].len()
        )));
    }
    RelationMatrix::new(table.labels, &table.rows)
}

pub(crate) fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

pub(crate) fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

pub fn quote(label: &str) -> String {
    if label.contains([',', '"', '\n', '\r']) || label.trim() != label {
        format!("\"{}\"", label.replace('"', "\"\""))
    } else {
        label.to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, labeled: bool) -> Result<RelationMatrix> {
        parse_relation(text, Path::new("test.csv"), labeled)
    }

    #[test]
    fn minimal_symmetric() {
        let r = validate_relation(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(r.valid);
        assert!(r.is_symmetric);
    }

    #[test]
    fn negative_cost() {
        let r = validate_relation(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violations,
            vec![Violation {
                rule: Rule::Positive,
                row: 0,
                col: 1,
                value: Some(-1.0)
            }]
        );
    }

    #[test]
    fn nonzero_diagonal_then_asymmetric() {
        let r = validate_relation(&[[0.0, 2.0], [3.0, 0.5]]).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violations,
            vec![Violation {
                rule: Rule::ZeroDiagonal,
                row: 1,
                col: 1,
                value: Some(0.5)
            }]
        );
        let r = validate_relation(&[[0.0, 2.0], [3.0, 0.0]]).unwrap();
        assert!(r.valid);
        assert!(!r.is_symmetric);
    }

    #[test]
    fn non_finite_and_non_square() {
        let r = validate_relation(&[vec![0.0, f64::NAN, 1.0], vec![f64::INFINITY, 0.0, 1.0]]).unwrap();
        let rules: Vec<Rule> = r.violations.iter().map(|v| v.rule).collect();
        assert_eq!(rules, [Rule::Square, Rule::Finite, Rule::Finite]);
    }

    #[test]
    fn ragged_is_structural() {
        let err = validate_relation(&[vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn load_unlabeled() {
        let m = parse("0,1\n1,0\n", false).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.labels(), ["0", "1"]);
    }

    #[test]
    fn load_labeled() {
        let m = parse("label,a,b\na,0,2\nb,3,0\n", true).unwrap();
        assert_eq!(m.labels(), ["a", "b"]);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn load_rejects_duplicate_labels() {
        let err = parse("label,a,a\na,0,2\na,3,0\n", true).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(l) if l == "a"));
    }

    #[test]
    fn load_rejects_shape_mismatch() {
        let err = parse("0,1,2\n1,0,2\n", false).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn load_rejects_garbage() {
        let err = parse("0,x\n1,0\n", false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn load_delegates_validation() {
        let err = parse("0,-1\n1,0\n", false).unwrap_err();
        assert!(matches!(err, Error::Invalid(r) if r.violations.len() == 1));
    }

    #[test]
    fn induced_duplicates_cost_zero() {
        let m = RelationMatrix::unlabeled(&[[0.0, 4.0], [5.0, 0.0]]).unwrap();
        let sub = m.induced(&[1, 0, 1]);
        assert_eq!(sub.row(0), [0.0, 5.0, 0.0]);
        assert_eq!(sub.row(1), [4.0, 0.0, 4.0]);
    }
}
