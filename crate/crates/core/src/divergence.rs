//! Rebuilding the absolute divergence arrays `d'_0, ..., d'_l` in lockstep
//! with the prefix-array sweep.
//!
//! `d'_j[i]` is the last column before `j` where the length-`j` prefixes of
//! rows `a_j[i - 1]` and `a_j[i]` differ, or -1 if they agree everywhere.
//! Values travel with their haplotype through the same cuts and splices as
//! the prefix list; only the first element of each piece needs a new value.
//! A piece whose run has an earlier run of the same symbol in the column takes
//! the maximum of the old values strictly after that earlier run's end up to
//! and including its own first element.

use crate::error::{Error, Result};
use crate::index::{PbwtIndex, RleColumn};
use crate::prefix::{PieceLayout, PrefixListWorkspace, NIL};
use crate::stats::OpCounts;
use crate::tree::MaxForest;

const MAX_SIGMA: usize = 10;

#[derive(Clone, Debug)]
pub struct DivergenceWorkspace {
    forest: MaxForest,
    root: u32,
    columns_processed: usize,
}

impl DivergenceWorkspace {
    /// Holds `d'_0`, which is -1 everywhere.
    pub fn new(height: usize) -> Result<Self> {
        if height == 0 {
            return Err(Error::EmptyPanel);
        }
        let (forest, root) = MaxForest::sequence(height, -1);
        Ok(Self {
            forest,
            root,
            columns_processed: 0,
        })
    }

    pub fn height(&self) -> usize {
        self.forest.len()
    }

    pub fn columns_processed(&self) -> usize {
        self.columns_processed
    }

    pub fn forest(&self) -> &MaxForest {
        &self.forest
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    /// Tree operation counts; only `tree_ops` and `max_tree_depth` are set.
    pub fn counts(&self) -> OpCounts {
        OpCounts {
            tree_ops: self.forest.ops(),
            max_tree_depth: self.forest.max_depth(),
            ..OpCounts::default()
        }
    }

    /// Value attached to haplotype `id`, i.e. `d'` at its current position.
    pub fn value_of(&self, id: u32) -> i64 {
        self.forest.value(id)
    }

    /// Maximum of the current values from haplotype `from` through haplotype
    /// `to`, both given by ID, `from` not after `to`.
    pub fn segment_max(&mut self, from: u32, to: u32) -> i64 {
        self.forest.segment_max(from, to)
    }

    pub fn current_divergence(&self) -> Vec<i64> {
        self.forest
            .in_order(self.root)
            .into_iter()
            .map(|x| self.forest.value(x))
            .collect()
    }

    /// Haplotype IDs in tree order; must equal the prefix list's order.
    pub fn current_order(&self) -> Vec<u32> {
        self.forest.in_order(self.root)
    }

    /// Turns `d'_j` into `d'_{j+1}`. Must run before the prefix list
    /// advances past column `j`, because run boundaries are located through
    /// the list's old arrangement.
    pub fn advance_column(
        &mut self,
        list: &PrefixListWorkspace,
        col: &RleColumn,
        j: usize,
    ) -> Result<()> {
        if self.columns_processed != j || list.columns_processed() != j {
            return Err(Error::State(format!(
                "divergence at column {}, prefix list at column {}, asked for column {}",
                self.columns_processed,
                list.columns_processed(),
                j
            )));
        }
        if list.height() != self.height() {
            return Err(Error::State(format!(
                "divergence holds {} rows, prefix list {}",
                self.height(),
                list.height()
            )));
        }
        if col.runs.iter().any(|r| r.symbol as usize >= MAX_SIGMA) {
            return Err(Error::Corruption(format!(
                "column {} has an out-of-range symbol",
                j
            )));
        }
        let firsts = list.run_firsts(col)?;

        // Phase 1: boundary values from the old arrangement.
        let mut last_end = [NIL; MAX_SIGMA];
        let mut carried = Vec::with_capacity(col.runs.len());
        for (run, &first) in col.runs.iter().zip(&firsts) {
            let c = run.symbol as usize;
            let v = if last_end[c] == NIL {
                None
            } else {
                let after = list.next(last_end[c]).ok_or_else(|| {
                    Error::Corruption(format!("column {} run ends at the list tail", j))
                })?;
                Some(self.forest.segment_max(after, first))
            };
            carried.push(v);
            last_end[c] = run.last_pa_entry;
        }

        // Phase 2: cut at the same boundaries as the list, regroup, rejoin.
        let mut pieces = Vec::with_capacity(col.runs.len());
        let mut rest = self.root;
        for &first in &firsts[1..] {
            let (before, from) = self.forest.split_before(first);
            pieces.push(before);
            rest = from;
        }
        pieces.push(rest);

        let mut order: Vec<usize> = (0..col.runs.len()).collect();
        order.sort_by_key(|&k| col.runs[k].symbol);
        let mut root = NIL;
        for &k in &order {
            root = self.forest.join(root, pieces[k]);
        }
        self.root = root;

        let jv = j as i64;
        for (pos, &k) in order.iter().enumerate() {
            let opens_group = pos == 0 || col.runs[order[pos - 1]].symbol != col.runs[k].symbol;
            let v = if opens_group {
                jv
            } else {
                carried[k].expect("a later run of a symbol has an earlier one")
            };
            self.forest.assign(firsts[k], v);
        }
        self.columns_processed += 1;
        Ok(())
    }
}

/// Prefix and divergence sweep in lockstep. `visit(j, list, div, layout)` is
/// called once both hold column `j + 1`.
pub fn sweep_with_divergence<F>(index: &PbwtIndex, mut visit: F) -> Result<OpCounts>
where
    F: FnMut(usize, &PrefixListWorkspace, &DivergenceWorkspace, &PieceLayout) -> Result<()>,
{
    let mut list = PrefixListWorkspace::new(index.height())?;
    let mut div = DivergenceWorkspace::new(index.height())?;
    for (j, col) in index.columns().iter().enumerate() {
        div.advance_column(&list, col, j)?;
        let layout = list.advance_column(col, j)?;
        visit(j, &list, &div, &layout)?;
    }
    let mut counts = list.counts();
    counts += div.counts();
    Ok(counts)
}

/// Sweeps up to column `j` and returns `d'_j`.
pub fn divergence_array_at(index: &PbwtIndex, j: usize) -> Result<Vec<i64>> {
    if j > index.length() {
        return Err(Error::ColumnRange {
            column: j,
            limit: index.length() + 1,
        });
    }
    let mut list = PrefixListWorkspace::new(index.height())?;
    let mut div = DivergenceWorkspace::new(index.height())?;
    for (c, col) in index.columns()[..j].iter().enumerate() {
        div.advance_column(&list, col, c)?;
        list.advance_column(col, c)?;
    }
    Ok(div.current_divergence())
}

/// Converts `d'_j` back to plain divergence lengths `d_j[i] = (j - 1) - d'_j[i]`.
pub fn to_divergence_lengths(absolute: &[i64], j: usize) -> Vec<i64> {
    absolute.iter().map(|&v| j as i64 - 1 - v).collect()
}
