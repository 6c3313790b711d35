//! Haplotype panels and query haplotypes, plus their line-oriented text form.
//!
//! One haplotype per line, one ASCII digit per site. LF and CRLF are both
//! accepted on input; output is always LF.

use crate::error::{Error, Result};

/// An `h x l` matrix of small symbols, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaplotypePanel {
    height: usize,
    length: usize,
    sigma: u8,
    symbols: Vec<u8>,
}

impl HaplotypePanel {
    /// Builds a panel from explicit rows. Every row must have the same length
    /// and every symbol must be a value in `0..=9`.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyPanel);
        }
        let length = rows[0].as_ref().len();
        let mut symbols = Vec::with_capacity(rows.len() * length);
        let mut max_symbol = 0u8;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != length {
                return Err(Error::Format {
                    line: i + 1,
                    msg: format!("expected {} symbols, found {}", length, row.len()),
                });
            }
            for &s in row {
                if s > 9 {
                    return Err(Error::Format {
                        line: i + 1,
                        msg: format!("symbol {} exceeds 9", s),
                    });
                }
                max_symbol = max_symbol.max(s);
            }
            symbols.extend_from_slice(row);
        }
        Ok(Self {
            height: rows.len(),
            length,
            sigma: max_symbol + 1,
            symbols,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Alphabet size, inferred as one more than the largest symbol present.
    pub fn sigma(&self) -> u8 {
        self.sigma
    }

    pub fn size(&self) -> usize {
        self.height * self.length
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.symbols[i * self.length..(i + 1) * self.length]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.symbols[row * self.length + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        (0..self.height).map(move |i| self.row(i))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.height * (self.length + 1));
        for row in self.rows() {
            push_digits(&mut out, row);
        }
        out
    }
}

/// Query haplotypes, each as long as the panel they are matched against.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuerySet {
    length: usize,
    queries: Vec<Vec<u8>>,
}

impl QuerySet {
    pub fn new(length: usize, queries: Vec<Vec<u8>>) -> Result<Self> {
        for (i, q) in queries.iter().enumerate() {
            check_query(i + 1, q, length)?;
        }
        Ok(Self { length, queries })
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn get(&self, i: usize) -> &[u8] {
        &self.queries[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.queries.iter().map(Vec::as_slice)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for q in self.iter() {
            push_digits(&mut out, q);
        }
        out
    }
}

fn check_query(line: usize, q: &[u8], length: usize) -> Result<()> {
    if q.len() != length {
        return Err(Error::Format {
            line,
            msg: format!("query has {} symbols, panel length is {}", q.len(), length),
        });
    }
    Ok(())
}

fn push_digits(out: &mut String, row: &[u8]) {
    out.extend(row.iter().map(|&s| char::from(b'0' + s)));
    out.push('\n');
}

/// Splits text into lines, tolerating one trailing newline and CRLF endings.
/// Blank lines anywhere else are rejected.
fn digit_lines(text: &str) -> Result<Vec<Vec<u8>>> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split('\n')
        .enumerate()
        .map(|(i, line)| {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                return Err(Error::Format {
                    line: i + 1,
                    msg: "blank line".into(),
                });
            }
            line.bytes()
                .map(|b| match b {
                    b'0'..=b'9' => Ok(b - b'0'),
                    _ => Err(Error::Format {
                        line: i + 1,
                        msg: format!("unexpected character {:?}", char::from(b)),
                    }),
                })
                .collect()
        })
        .collect()
}

pub fn parse_panel(text: &str) -> Result<HaplotypePanel> {
    let rows = digit_lines(text)?;
    HaplotypePanel::from_rows(&rows)
}

pub fn parse_queries(text: &str, length: usize) -> Result<QuerySet> {
    QuerySet::new(length, digit_lines(text)?)
}
