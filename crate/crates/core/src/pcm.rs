//! Pairwise comparison matrices with exact rational entries.
//!
//! Only the strict upper triangle is stored. The diagonal is implicitly 1 and
//! the lower triangle is the exact reciprocal of the upper one, so reciprocity
//! holds by construction rather than by tolerance.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub const MIN_ORDER: usize = 3;
pub const MAX_ORDER: usize = 15;

/// Relative tolerance used when checking text-supplied lower-triangle cells.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-4;
const DIAGONAL_TOLERANCE: f64 = 1e-9;

/// The 17 Fundamental Scale values in ascending order: 1/9 .. 1/2, 1, 2 .. 9.
pub fn fundamental_scale() -> [Rational; 17] {
    let mut out = [Rational::one(); 17];
    for k in 2..=9i64 {
        out[(9 - k) as usize] = Rational::new(1, k);
        out[(k + 7) as usize] = Rational::from_integer(k);
    }
    out
}

pub fn is_fundamental(value: &Rational) -> bool {
    let (n, d) = (*value.numer(), *value.denom());
    (n == 1 && (1..=9).contains(&d)) || (d == 1 && (1..=9).contains(&n))
}

pub fn check_order(order: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder {
            order,
            min: MIN_ORDER,
            max: MAX_ORDER,
        })
    }
}

/// Parse one matrix cell: an integer, a decimal, or a `p/q` rational.
/// Decimals are converted exactly (`0.25` becomes `1/4`).
pub fn parse_cell(text: &str) -> Result<Rational> {
    let t = text.trim();
    let malformed = || Error::MalformedCell(text.to_string());
    if t.is_empty() {
        return Err(malformed());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_decimal(p.trim()).ok_or_else(malformed)?;
        let q = parse_decimal(q.trim()).ok_or_else(malformed)?;
        if q.is_zero() {
            return Err(malformed());
        }
        return Ok(p / q);
    }
    parse_decimal(t).ok_or_else(malformed)
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.len() > 15 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Render a rational the way cells are written in files: `k` or `p/q`.
pub fn format_cell(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Best rational approximation of a positive float, used when a computed
/// ratio has to be stored as a matrix entry.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidParameter(format!("cannot store {x} as a positive entry")));
    }
    Rational::approximate_float(x)
        .filter(|r| r.is_positive())
        .ok_or_else(|| Error::InvalidParameter(format!("cannot approximate {x} by a rational")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

/// A positive reciprocal pairwise comparison matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pcm {
    order: usize,
    upper: Vec<Rational>,
    labels: Option<Vec<String>>,
}

impl Pcm {
    /// Build from the row-major strict upper triangle.
    pub fn from_upper(order: usize, upper: Vec<Rational>) -> Result<Self> {
        check_order(order)?;
        let expected = order * (order - 1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "order {order} needs {expected} upper-triangle entries, got {}",
                upper.len()
            )));
        }
        let mut k = 0;
        for i in 0..order {
            for j in i + 1..order {
                if !upper[k].is_positive() {
                    return Err(Error::NonPositive {
                        row: i,
                        col: j,
                        value: format_cell(&upper[k]),
                    });
                }
                k += 1;
            }
        }
        Ok(Pcm {
            order,
            upper,
            labels: None,
        })
    }

    /// Build from a full matrix of exact values. The lower triangle must be
    /// the exact reciprocal of the upper one.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: r,
                    found: row.len(),
                    expected: n,
                });
            }
        }
        check_order(n)?;
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            if !rows[i][i].is_one() {
                return Err(Error::Diagonal {
                    index: i,
                    value: format_cell(&rows[i][i]),
                });
            }
            for j in i + 1..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_positive() || !b.is_positive() {
                    let (row, col, v) = if a.is_positive() { (j, i, b) } else { (i, j, a) };
                    return Err(Error::NonPositive {
                        row,
                        col,
                        value: format_cell(&v),
                    });
                }
                if a * b != Rational::one() {
                    return Err(Error::Reciprocity {
                        row: i,
                        col: j,
                        upper: format_cell(&a),
                        lower: format_cell(&b),
                    });
                }
                upper.push(a);
            }
        }
        Pcm::from_upper(n, upper)
    }

    /// Perfectly consistent matrix `a_ij = w_i / w_j`.
    pub fn from_weights(weights: &[Rational]) -> Result<Self> {
        let n = weights.len();
        check_order(n)?;
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidParameter(format!("weight {} is not positive", format_cell(w))));
        }
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(weights[i] / weights[j]);
            }
        }
        Pcm::from_upper(n, upper)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.order {
            return Err(Error::InvalidParameter(format!(
                "{} labels given for an order-{} matrix",
                labels.len(),
                self.order
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.order);
        i * self.order - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Rational::one(),
            Less => self.upper[self.upper_index(i, j)],
            Greater => self.upper[self.upper_index(j, i)].recip(),
        }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.entry(i, j).to_f64().unwrap_or(f64::NAN)
    }

    /// Replace entry (i, j) for i != j; the transpose follows automatically.
    pub fn set_entry(&mut self, i: usize, j: usize, value: Rational) -> Result<()> {
        if i == j || i >= self.order || j >= self.order {
            return Err(Error::InvalidParameter(format!("cannot set entry ({i},{j})")));
        }
        if !value.is_positive() {
            return Err(Error::NonPositive {
                row: i,
                col: j,
                value: format_cell(&value),
            });
        }
        if i < j {
            let k = self.upper_index(i, j);
            self.upper[k] = value;
        } else {
            let k = self.upper_index(j, i);
            self.upper[k] = value.recip();
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Full matrix as row-major `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        let n = self.order;
        let mut out = vec![1.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.upper[self.upper_index(i, j)];
                out[i * n + j] = v.to_f64().unwrap_or(f64::NAN);
                out[j * n + i] = v.recip().to_f64().unwrap_or(f64::NAN);
            }
        }
        out
    }

    /// Principal submatrix on the given alternatives (in the given order).
    /// Unlike [`Pcm::from_upper`] this allows any size from 2 upwards, since it
    /// is only used internally for triads.
    pub fn submatrix(&self, indices: &[usize]) -> Pcm {
        let m = indices.len();
        let mut upper = Vec::with_capacity(m * (m - 1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                upper.push(self.entry(indices[a], indices[b]));
            }
        }
        Pcm {
            order: m,
            upper,
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Relabel alternatives: new alternative `k` is old alternative `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Pcm> {
        let n = self.order;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        Ok(self.submatrix(perm))
    }

    pub fn is_fundamental_scale(&self) -> bool {
        self.upper.iter().all(is_fundamental)
    }

    /// True iff `a_ij * a_jk == a_ik` for every triple, checked exactly.
    pub fn is_consistent(&self) -> bool {
        let n = self.order;
        (0..n).all(|i| {
            (i + 1..n).all(|j| (j + 1..n).all(|k| self.entry(i, j) * self.entry(j, k) == self.entry(i, k)))
        })
    }

    pub fn parse(text: &str, format: Format) -> Result<Pcm> {
        match format {
            Format::Csv => parse_csv(text),
            Format::Json => parse_json(text),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_document(&self) -> PcmDocument {
        PcmDocument {
            schema: Some(1),
            labels: self.labels.clone(),
            matrix: self
                .rows()
                .iter()
                .map(|row| row.iter().map(|v| Cell::Text(format_cell(v))).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("pcm document serializes")
    }
}

impl fmt::Display for Pcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.rows();
        let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(format_cell).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A matrix cell as it appears in JSON: either a number or a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl Cell {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            Cell::Text(s) => parse_cell(s),
            // Go through the shortest decimal representation so that `0.2`
            // becomes exactly 1/5 rather than the binary expansion.
            Cell::Number(x) => parse_cell(&format!("{x}")),
        }
    }
}

/// JSON wire form of a PCM: `{ "labels": [...]?, "matrix": [[...]] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcmDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub matrix: Vec<Vec<Cell>>,
}

impl PcmDocument {
    pub fn into_pcm(self) -> Result<Pcm> {
        let rows = self
            .matrix
            .iter()
            .map(|row| row.iter().map(Cell::to_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let pcm = from_text_rows(&rows)?;
        match self.labels {
            Some(labels) => pcm.with_labels(labels),
            None => Ok(pcm),
        }
    }
}

fn parse_json(text: &str) -> Result<Pcm> {
    let doc: PcmDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    doc.into_pcm()
}

fn parse_csv(text: &str) -> Result<Pcm> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(parse_cell).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    from_text_rows(&rows)
}

/// Validate a full user-supplied matrix and keep its upper triangle.
/// The lower triangle only has to be reciprocal within
/// [`RECIPROCITY_TOLERANCE`]; exact reciprocals are regenerated.
fn from_text_rows(rows: &[Vec<Rational>]) -> Result<Pcm> {
    let n = rows.len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare {
                row: r,
                found: row.len(),
                expected: n,
            });
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::NonPositive {
                    row: i,
                    col: j,
                    value: format_cell(v),
                });
            }
        }
    }
    check_order(n)?;
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let d = rows[i][i].to_f64().unwrap_or(f64::NAN);
        if !((d - 1.0).abs() <= DIAGONAL_TOLERANCE) {
            return Err(Error::Diagonal {
                index: i,
                value: format_cell(&rows[i][i]),
            });
        }
        for j in i + 1..n {
            let product = (rows[i][j] * rows[j][i]).to_f64().unwrap_or(f64::NAN);
            if !((product - 1.0).abs() <= RECIPROCITY_TOLERANCE) {
                return Err(Error::Reciprocity {
                    row: i,
                    col: j,
                    upper: format_cell(&rows[i][j]),
                    lower: format_cell(&rows[j][i]),
                });
            }
            upper.push(rows[i][j]);
        }
    }
    Pcm::from_upper(n, upper)
}
