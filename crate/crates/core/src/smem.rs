//! A reference SMEM finder over the full prefix arrays.
//!
//! It produces, for every set-maximal exact match of every query, the
//! interval of the prefix array right after the match that holds the matching
//! haplotypes, plus the interval's last entry. Records come out sorted by end
//! column, which is the order the batched reporter consumes them in.

use log::info;

use crate::error::{Error, Result};
use crate::index::FullArrays;
use crate::panel::{HaplotypePanel, QuerySet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SmemRecord {
    pub query_id: u32,
    /// Last matched column, inclusive.
    pub end_col: u32,
    /// Inclusive position interval in `a_{end_col + 1}`.
    pub lo: u32,
    pub hi: u32,
    /// `a_{end_col + 1}[hi]`.
    pub last_hap_id: u32,
    pub start_col: Option<u32>,
}

impl SmemRecord {
    /// Number of haplotypes in the interval.
    pub fn width(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }
}

/// Records from a set of queries, sorted by `end_col` then `query_id`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmemBatchInput {
    pub records: Vec<SmemRecord>,
    /// Number of distinct queries with at least one record.
    pub q: u32,
    pub with_starts: bool,
}

impl SmemBatchInput {
    /// Total IDs a flush of this batch reports, counting repeats.
    pub fn total_width(&self) -> u64 {
        self.records.iter().map(|r| r.width() as u64).sum()
    }
}

/// Every SMEM of `query` as `(start, end)` column pairs, sorted by end.
///
/// For each end column, the longest match ending there is found by tracking
/// per-row match lengths; it is set-maximal exactly when it cannot be
/// extended right, i.e. the longest match ending one column later is no
/// longer.
pub fn find_smems_oracle(panel: &HaplotypePanel, query: &[u8]) -> Result<Vec<(usize, usize)>> {
    let l = panel.length();
    if query.len() != l {
        return Err(Error::Format {
            line: 0,
            msg: format!("query has {} symbols, panel length is {}", query.len(), l),
        });
    }
    let mut run = vec![0usize; panel.height()];
    let mut best = vec![0usize; l];
    for (e, &sym) in query.iter().enumerate() {
        for (row, len) in run.iter_mut().enumerate() {
            *len = if panel.get(row, e) == sym {
                *len + 1
            } else {
                0
            };
            best[e] = best[e].max(*len);
        }
    }
    Ok((0..l)
        .filter(|&e| best[e] > 0 && (e + 1 == l || best[e + 1] <= best[e]))
        .map(|e| (e + 1 - best[e], e))
        .collect())
}

/// The block of `a_{e+1}` holding rows that match `query[s..=e]` in place,
/// as `(lo, hi, a_{e+1}[hi])`.
pub fn smem_interval(
    panel: &HaplotypePanel,
    arrays: &FullArrays,
    query: &[u8],
    s: usize,
    e: usize,
) -> Result<(u32, u32, u32)> {
    let order = arrays.prefix.get(e + 1).ok_or(Error::ColumnRange {
        column: e + 1,
        limit: arrays.prefix.len(),
    })?;
    let want = &query[s..=e];
    let hits: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, &row)| &panel.row(row as usize)[s..=e] == want)
        .map(|(p, _)| p)
        .collect();
    let (lo, hi) = match (hits.first(), hits.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::NoMatch { start: s, end: e }),
    };
    if hi - lo + 1 != hits.len() {
        return Err(Error::Corruption(format!(
            "rows matching columns {}..={} are not contiguous in a_{}",
            s,
            e,
            e + 1
        )));
    }
    Ok((lo as u32, hi as u32, order[hi]))
}

/// Finds every SMEM of every query and merges the records by end column.
pub fn collect_records(
    panel: &HaplotypePanel,
    arrays: &FullArrays,
    queries: &QuerySet,
    keep_starts: bool,
) -> Result<SmemBatchInput> {
    let mut records = Vec::new();
    let mut q = 0;
    for (query_id, query) in queries.iter().enumerate() {
        let smems = find_smems_oracle(panel, query)?;
        if smems.is_empty() {
            if !query.is_empty() {
                info!("query {} has no set-maximal exact match", query_id);
            }
            continue;
        }
        q += 1;
        for (s, e) in smems {
            let (lo, hi, last) = smem_interval(panel, arrays, query, s, e)?;
            records.push(SmemRecord {
                query_id: query_id as u32,
                end_col: e as u32,
                lo,
                hi,
                last_hap_id: last,
                start_col: keep_starts.then_some(s as u32),
            });
        }
    }
    records.sort_by_key(|r| (r.end_col, r.query_id));
    Ok(SmemBatchInput {
        records,
        q,
        with_starts: keep_starts,
    })
}
