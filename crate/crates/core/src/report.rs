//! Batched reporting: hold SMEM records until there are enough of them, then
//! answer the whole batch during a single prefix-array sweep.
//!
//! A record is answered right after the list becomes `a_{end_col + 1}`. The
//! record's last entry is a haplotype ID, so its list node is found directly
//! and the interval is read by walking predecessor links, one step per
//! reported ID.

use crate::error::{Error, Result};
use crate::index::{FullArrays, PbwtIndex};
use crate::prefix::PrefixListWorkspace;
use crate::smem::SmemRecord;
use crate::stats::OpCounts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReportEntry {
    pub query_id: u32,
    pub end_col: u32,
    pub haplotype_id: u32,
    pub start_col: Option<u32>,
}

/// An interval given by its first and last haplotype IDs rather than by
/// positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EndpointRequest {
    pub query_id: u32,
    pub end_col: u32,
    pub first_hap_id: u32,
    pub last_hap_id: u32,
    pub start_col: Option<u32>,
}

impl EndpointRequest {
    /// Reads the interval's first ID out of the full prefix arrays.
    pub fn from_record(rec: &SmemRecord, arrays: &FullArrays) -> Self {
        Self {
            query_id: rec.query_id,
            end_col: rec.end_col,
            first_hap_id: arrays.prefix[rec.end_col as usize + 1][rec.lo as usize],
            last_hap_id: rec.last_hap_id,
            start_col: rec.start_col,
        }
    }
}

/// Default batch size `r lg h / lg r`, floored, and at least 1. Degenerate
/// inputs (`r < 2` or `h < 2`) give 1.
pub fn compute_threshold(r: u64, h: u64) -> u64 {
    if r < 2 || h < 2 {
        return 1;
    }
    if r == h {
        return r;
    }
    let b = r as f64 * (h as f64).log2() / (r as f64).log2();
    (b.floor() as u64).max(1)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BatchPolicy {
    /// Explicit batch size; `None` uses [`compute_threshold`].
    pub threshold_override: Option<u64>,
}

impl BatchPolicy {
    pub fn with_threshold(b: u64) -> Self {
        Self {
            threshold_override: Some(b.max(1)),
        }
    }

    pub fn threshold(&self, index: &PbwtIndex) -> u64 {
        self.threshold_override
            .unwrap_or_else(|| compute_threshold(index.runs(), index.height() as u64))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlushOutput {
    pub entries: Vec<ReportEntry>,
    pub counts: OpCounts,
}

fn check_sorted<T>(items: &[T], end: impl Fn(&T) -> u32) -> Result<()> {
    if items.windows(2).any(|w| end(&w[0]) > end(&w[1])) {
        return Err(Error::State("batch is not sorted by end column".into()));
    }
    Ok(())
}

fn check_end(index: &PbwtIndex, end_col: u32) -> Result<()> {
    if end_col as usize >= index.length() {
        return Err(Error::ColumnRange {
            column: end_col as usize,
            limit: index.length(),
        });
    }
    Ok(())
}

/// Sweeps columns `0..=last_end`, calling `answer(j, list)` after each advance.
fn sweep_until<F>(index: &PbwtIndex, last_end: u32, mut answer: F) -> Result<OpCounts>
where
    F: FnMut(u32, &mut PrefixListWorkspace) -> Result<()>,
{
    let mut ws = PrefixListWorkspace::new(index.height())?;
    for (j, col) in index.columns()[..=last_end as usize].iter().enumerate() {
        ws.advance_column(col, j)?;
        answer(j as u32, &mut ws)?;
    }
    Ok(ws.counts())
}

/// Answers every record of an end-sorted batch in one sweep.
///
/// Entries come out grouped per record, records in batch order, and within a
/// record in ascending prefix-array position.
pub fn flush(index: &PbwtIndex, records: &[SmemRecord]) -> Result<FlushOutput> {
    check_sorted(records, |r| r.end_col)?;
    let h = index.height() as u32;
    for rec in records {
        check_end(index, rec.end_col)?;
        if rec.last_hap_id >= h || rec.hi >= h || rec.lo > rec.hi {
            return Err(Error::Corruption(format!(
                "record ({}, {}, {}, {}) does not fit height {}",
                rec.end_col, rec.lo, rec.hi, rec.last_hap_id, h
            )));
        }
    }
    let Some(last) = records.last() else {
        return Ok(FlushOutput::default());
    };

    let mut entries = Vec::with_capacity(records.iter().map(SmemRecord::width).sum());
    let mut ids = Vec::new();
    let mut cursor = 0;
    let counts = sweep_until(index, last.end_col, |j, ws| {
        while let Some(rec) = records.get(cursor).filter(|r| r.end_col == j) {
            ids.clear();
            ws.collect_ending_at(rec.last_hap_id, rec.width(), &mut ids)?;
            entries.extend(ids.iter().map(|&id| ReportEntry {
                query_id: rec.query_id,
                end_col: rec.end_col,
                haplotype_id: id,
                start_col: rec.start_col,
            }));
            cursor += 1;
        }
        Ok(())
    })?;
    Ok(FlushOutput { entries, counts })
}

/// Like [`flush`], but each interval is given by its first and last IDs and
/// read by walking successor links from the first.
pub fn flush_endpoints(index: &PbwtIndex, requests: &[EndpointRequest]) -> Result<FlushOutput> {
    check_sorted(requests, |r| r.end_col)?;
    for req in requests {
        check_end(index, req.end_col)?;
    }
    let Some(last) = requests.last() else {
        return Ok(FlushOutput::default());
    };

    let mut entries = Vec::new();
    let mut ids = Vec::new();
    let mut cursor = 0;
    let counts = sweep_until(index, last.end_col, |j, ws| {
        while let Some(req) = requests.get(cursor).filter(|r| r.end_col == j) {
            ids.clear();
            ws.collect_between(req.first_hap_id, req.last_hap_id, &mut ids)?;
            entries.extend(ids.iter().map(|&id| ReportEntry {
                query_id: req.query_id,
                end_col: req.end_col,
                haplotype_id: id,
                start_col: req.start_col,
            }));
            cursor += 1;
        }
        Ok(())
    })?;
    Ok(FlushOutput { entries, counts })
}

/// Collects records and flushes whenever the pending count reaches the
/// threshold.
pub struct Accumulator<'a> {
    index: &'a PbwtIndex,
    threshold: u64,
    pending: Vec<SmemRecord>,
    flushes: usize,
    counts: OpCounts,
}

impl<'a> Accumulator<'a> {
    pub fn new(index: &'a PbwtIndex, policy: BatchPolicy) -> Self {
        Self {
            index,
            threshold: policy.threshold(index),
            pending: Vec::new(),
            flushes: 0,
            counts: OpCounts::default(),
        }
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    pub fn flushes(&self) -> usize {
        self.flushes
    }

    /// Counters summed over all flushes so far.
    pub fn counts(&self) -> OpCounts {
        self.counts
    }

    pub fn push(&mut self, rec: SmemRecord) -> Result<Option<Vec<ReportEntry>>> {
        self.pending.push(rec);
        if self.pending.len() as u64 >= self.threshold {
            self.drain().map(Some)
        } else {
            Ok(None)
        }
    }

    /// Flushes whatever is pending, regardless of the threshold.
    pub fn finish(&mut self) -> Result<Option<Vec<ReportEntry>>> {
        if self.pending.is_empty() {
            return Ok(None);
        }
        self.drain().map(Some)
    }

    fn drain(&mut self) -> Result<Vec<ReportEntry>> {
        self.pending.sort_by_key(|r| (r.end_col, r.query_id));
        let out = flush(self.index, &self.pending)?;
        self.pending.clear();
        self.flushes += 1;
        self.counts += out.counts;
        Ok(out.entries)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AccumulateOutput {
    pub entries: Vec<ReportEntry>,
    pub flushes: usize,
    pub counts: OpCounts,
}

/// Feeds `records` through an [`Accumulator`] and concatenates all flushes.
pub fn accumulate<I>(index: &PbwtIndex, policy: BatchPolicy, records: I) -> Result<AccumulateOutput>
where
    I: IntoIterator<Item = SmemRecord>,
{
    let mut acc = Accumulator::new(index, policy);
    let mut entries = Vec::new();
    for rec in records {
        if let Some(out) = acc.push(rec)? {
            entries.extend(out);
        }
    }
    if let Some(out) = acc.finish()? {
        entries.extend(out);
    }
    Ok(AccumulateOutput {
        entries,
        flushes: acc.flushes(),
        counts: acc.counts(),
    })
}
