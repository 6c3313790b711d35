//! Rebuilding the prefix arrays `a_0, a_1, ..., a_l` column by column from
//! the run-length compressed PBWT alone.
//!
//! The current prefix array lives in a doubly-linked list over haplotype IDs.
//! Node `v` always stores ID `v`, so the ID-to-node handle table is the
//! identity and never needs to be materialized. Advancing one column cuts the
//! list after the last entry of every run but the final one, stably groups the
//! pieces by run symbol, and splices them back together. Each step costs time
//! proportional to the number of runs in the column.

use crate::error::{Error, Result};
use crate::index::{PbwtIndex, RleColumn};
use crate::stats::OpCounts;

pub(crate) const NIL: u32 = u32::MAX;
const MAX_SIGMA: usize = 10;

/// One maximal piece of the list after cutting, i.e. one run of the column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Piece {
    pub symbol: u8,
    pub length: u32,
    pub first: u32,
    pub last: u32,
    /// Index of the source run within its column.
    pub run: usize,
}

/// Pieces of the column just processed, in their order in the new prefix array.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PieceLayout {
    pub pieces: Vec<Piece>,
    /// `starts[k]` is the position of `pieces[k].first` in the new prefix array.
    pub starts: Vec<u32>,
}

impl PieceLayout {
    /// Whether piece `k` opens a new symbol group in the new arrangement.
    pub fn opens_group(&self, k: usize) -> bool {
        k == 0 || self.pieces[k - 1].symbol != self.pieces[k].symbol
    }
}

#[derive(Clone, Debug)]
pub struct PrefixListWorkspace {
    next: Vec<u32>,
    prev: Vec<u32>,
    head: u32,
    tail: u32,
    columns_processed: usize,
    counts: OpCounts,
}

impl PrefixListWorkspace {
    /// A list holding `a_0 = [0, 1, ..., h - 1]`.
    pub fn new(height: usize) -> Result<Self> {
        if height == 0 {
            return Err(Error::EmptyPanel);
        }
        if height >= NIL as usize {
            return Err(Error::State(format!(
                "height {} exceeds 32-bit IDs",
                height
            )));
        }
        let h = height as u32;
        let next = (1..=h).map(|v| if v == h { NIL } else { v }).collect();
        let prev = (0..h).map(|v| if v == 0 { NIL } else { v - 1 }).collect();
        Ok(Self {
            next,
            prev,
            head: 0,
            tail: h - 1,
            columns_processed: 0,
            counts: OpCounts::default(),
        })
    }

    pub fn height(&self) -> usize {
        self.next.len()
    }

    /// ID at position 0 of the current prefix array.
    pub fn head(&self) -> u32 {
        self.head
    }

    pub fn tail(&self) -> u32 {
        self.tail
    }

    pub fn columns_processed(&self) -> usize {
        self.columns_processed
    }

    pub fn counts(&self) -> OpCounts {
        self.counts
    }

    pub fn next(&self, id: u32) -> Option<u32> {
        let n = self.next[id as usize];
        (n != NIL).then_some(n)
    }

    pub fn prev(&self, id: u32) -> Option<u32> {
        let p = self.prev[id as usize];
        (p != NIL).then_some(p)
    }

    /// Materializes the current prefix array. Θ(h).
    pub fn current_prefix_array(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.height());
        let mut cur = self.head;
        while cur != NIL && out.len() < self.height() {
            out.push(cur);
            cur = self.next[cur as usize];
        }
        out
    }

    /// First ID of every run of `col` in the current arrangement.
    pub(crate) fn run_firsts(&self, col: &RleColumn) -> Result<Vec<u32>> {
        let mut firsts = Vec::with_capacity(col.runs.len());
        let mut first = self.head;
        for (k, run) in col.runs.iter().enumerate() {
            if first == NIL {
                return Err(Error::Corruption(format!(
                    "run {} starts past the end of the list",
                    k
                )));
            }
            firsts.push(first);
            if run.last_pa_entry as usize >= self.height() {
                return Err(Error::Corruption(format!(
                    "run {} last entry {} >= height {}",
                    k,
                    run.last_pa_entry,
                    self.height()
                )));
            }
            first = self.next[run.last_pa_entry as usize];
        }
        if first != NIL {
            return Err(Error::Corruption(
                "last run does not end at the list tail".into(),
            ));
        }
        Ok(firsts)
    }

    fn check_column(&self, col: &RleColumn, j: usize) -> Result<()> {
        if j != self.columns_processed {
            return Err(Error::State(format!(
                "prefix list is at column {}, asked to advance column {}",
                self.columns_processed, j
            )));
        }
        let total: u64 = col.runs.iter().map(|r| u64::from(r.length)).sum();
        if total != self.height() as u64 {
            return Err(Error::Corruption(format!(
                "column {} covers {} rows, list holds {}",
                j,
                total,
                self.height()
            )));
        }
        if let Some(run) = col.runs.iter().find(|r| r.symbol as usize >= MAX_SIGMA) {
            return Err(Error::Corruption(format!(
                "column {} has symbol {}",
                j, run.symbol
            )));
        }
        Ok(())
    }

    /// Turns the list holding `a_j` into `a_{j+1}` using column `j`.
    pub fn advance_column(&mut self, col: &RleColumn, j: usize) -> Result<PieceLayout> {
        self.check_column(col, j)?;
        let firsts = self.run_firsts(col)?;

        // Cut after the last entry of every run except the final one.
        for run in &col.runs[..col.runs.len() - 1] {
            let a = run.last_pa_entry;
            let b = self.next[a as usize];
            self.next[a as usize] = NIL;
            self.prev[b as usize] = NIL;
            self.counts.cuts += 1;
            self.counts.relinks += 2;
        }

        // Stable bucketing of the pieces by symbol.
        let buckets = col
            .runs
            .iter()
            .map(|r| r.symbol as usize)
            .max()
            .unwrap_or(0)
            + 1;
        let mut bucket_first = [NIL; MAX_SIGMA];
        let mut bucket_last = [NIL; MAX_SIGMA];
        let mut bucket_len = [0usize; MAX_SIGMA];
        self.counts.bucket_ops += buckets as u64;
        for (run, &first) in col.runs.iter().zip(&firsts) {
            let c = run.symbol as usize;
            if bucket_first[c] == NIL {
                bucket_first[c] = first;
            } else {
                self.link(bucket_last[c], first);
            }
            bucket_last[c] = run.last_pa_entry;
            bucket_len[c] += 1;
        }

        let mut joined_tail = NIL;
        for c in 0..buckets {
            if bucket_first[c] == NIL {
                continue;
            }
            if joined_tail == NIL {
                self.head = bucket_first[c];
            } else {
                self.link(joined_tail, bucket_first[c]);
            }
            joined_tail = bucket_last[c];
        }
        self.tail = joined_tail;
        self.columns_processed += 1;
        self.counts.columns += 1;

        // Counting-sort the pieces into their new order.
        let mut offset = [0usize; MAX_SIGMA];
        for c in 1..buckets {
            offset[c] = offset[c - 1] + bucket_len[c - 1];
        }
        let mut pieces = vec![
            Piece {
                symbol: 0,
                length: 0,
                first: NIL,
                last: NIL,
                run: 0,
            };
            col.runs.len()
        ];
        for (k, (run, &first)) in col.runs.iter().zip(&firsts).enumerate() {
            let c = run.symbol as usize;
            pieces[offset[c]] = Piece {
                symbol: run.symbol,
                length: run.length,
                first,
                last: run.last_pa_entry,
                run: k,
            };
            offset[c] += 1;
        }
        let mut starts = Vec::with_capacity(pieces.len());
        let mut pos = 0u32;
        for p in &pieces {
            starts.push(pos);
            pos += p.length;
        }
        Ok(PieceLayout { pieces, starts })
    }

    fn link(&mut self, a: u32, b: u32) {
        self.next[a as usize] = b;
        self.prev[b as usize] = a;
        self.counts.relinks += 2;
    }

    /// Collects the `count` IDs ending at `last`, walking predecessor links,
    /// and appends them to `out` in prefix-array order.
    pub fn collect_ending_at(&mut self, last: u32, count: usize, out: &mut Vec<u32>) -> Result<()> {
        if last as usize >= self.height() {
            return Err(Error::Corruption(format!(
                "haplotype {} >= height {}",
                last,
                self.height()
            )));
        }
        let base = out.len();
        let mut cur = last;
        for taken in 0..count {
            if cur == NIL {
                return Err(Error::Corruption(format!(
                    "interval of {} ending at haplotype {} runs past the list head after {} entries",
                    count, last, taken
                )));
            }
            out.push(cur);
            cur = self.prev[cur as usize];
        }
        self.counts.walk_steps += count as u64;
        out[base..].reverse();
        Ok(())
    }

    /// Appends the IDs from `first` through `last` in list order.
    pub fn collect_between(&mut self, first: u32, last: u32, out: &mut Vec<u32>) -> Result<()> {
        let h = self.height();
        if first as usize >= h || last as usize >= h {
            return Err(Error::MalformedRequest(format!(
                "endpoint ({}, {}) outside 0..{}",
                first, last, h
            )));
        }
        let base = out.len();
        let mut cur = first;
        loop {
            if cur == NIL {
                out.truncate(base);
                return Err(Error::MalformedRequest(format!(
                    "haplotype {} does not follow {} in the prefix array",
                    last, first
                )));
            }
            out.push(cur);
            self.counts.walk_steps += 1;
            if cur == last {
                return Ok(());
            }
            cur = self.next[cur as usize];
        }
    }
}

/// Runs the full prefix-array sweep, calling `visit(j, list, layout)` right
/// after the list becomes `a_{j+1}`.
pub fn sweep<F>(index: &PbwtIndex, mut visit: F) -> Result<OpCounts>
where
    F: FnMut(usize, &PrefixListWorkspace, &PieceLayout) -> Result<()>,
{
    let mut ws = PrefixListWorkspace::new(index.height())?;
    for (j, col) in index.columns().iter().enumerate() {
        let layout = ws.advance_column(col, j)?;
        visit(j, &ws, &layout)?;
    }
    Ok(ws.counts())
}

/// Sweeps up to column `j` and returns `a_j`.
pub fn prefix_array_at(index: &PbwtIndex, j: usize) -> Result<Vec<u32>> {
    if j > index.length() {
        return Err(Error::ColumnRange {
            column: j,
            limit: index.length() + 1,
        });
    }
    let mut ws = PrefixListWorkspace::new(index.height())?;
    for (c, col) in index.columns()[..j].iter().enumerate() {
        ws.advance_column(col, c)?;
    }
    Ok(ws.current_prefix_array())
}
