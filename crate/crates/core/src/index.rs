//! Run-length compressed PBWT columns, each run tagged with the prefix-array
//! entry at its last position, and a Durbin-style construction of the full
//! prefix and divergence arrays used as a reference.

use crate::error::{Error, Result};
use crate::panel::HaplotypePanel;

/// A maximal block of equal symbols in one PBWT column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub symbol: u8,
    pub length: u32,
    /// Haplotype ID at the last position of this run in the column's prefix array.
    pub last_pa_entry: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RleColumn {
    pub runs: Vec<Run>,
}

impl RleColumn {
    pub fn decode(&self) -> Vec<u8> {
        self.runs
            .iter()
            .flat_map(|run| std::iter::repeat_n(run.symbol, run.length as usize))
            .collect()
    }

    fn check(&self, j: usize, height: u32, sigma: u8) -> Result<()> {
        if self.runs.is_empty() {
            return Err(Error::Corruption(format!("column {} has no runs", j)));
        }
        let mut total = 0u64;
        for (k, run) in self.runs.iter().enumerate() {
            if run.length == 0 {
                return Err(Error::Corruption(format!(
                    "column {} run {} is empty",
                    j, k
                )));
            }
            if run.symbol >= sigma {
                return Err(Error::Corruption(format!(
                    "column {} run {} symbol {} outside alphabet of size {}",
                    j, k, run.symbol, sigma
                )));
            }
            if run.last_pa_entry >= height {
                return Err(Error::Corruption(format!(
                    "column {} run {} last entry {} >= height {}",
                    j, k, run.last_pa_entry, height
                )));
            }
            if k > 0 && self.runs[k - 1].symbol == run.symbol {
                return Err(Error::Corruption(format!(
                    "column {} runs {} and {} share symbol {}",
                    j,
                    k - 1,
                    k,
                    run.symbol
                )));
            }
            total += u64::from(run.length);
        }
        if total != u64::from(height) {
            return Err(Error::Corruption(format!(
                "column {} run lengths sum to {}, expected {}",
                j, total, height
            )));
        }
        Ok(())
    }
}

/// The PBWT of a panel with every column run-length compressed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwtIndex {
    height: u32,
    length: u32,
    sigma: u8,
    columns: Vec<RleColumn>,
    runs: u64,
}

impl PbwtIndex {
    /// Assembles an index from decoded parts, checking every structural
    /// invariant that can be checked without the panel.
    pub fn from_parts(height: u32, sigma: u8, columns: Vec<RleColumn>) -> Result<Self> {
        if height == 0 {
            return Err(Error::EmptyPanel);
        }
        if sigma == 0 || sigma > 10 {
            return Err(Error::Corruption(format!(
                "alphabet size {} not in 1..=10",
                sigma
            )));
        }
        let length = u32::try_from(columns.len())
            .map_err(|_| Error::Corruption("too many columns".into()))?;
        for (j, col) in columns.iter().enumerate() {
            col.check(j, height, sigma)?;
        }
        let runs = columns.iter().map(|c| c.runs.len() as u64).sum();
        Ok(Self {
            height,
            length,
            sigma,
            columns,
            runs,
        })
    }

    pub fn height(&self) -> usize {
        self.height as usize
    }

    pub fn length(&self) -> usize {
        self.length as usize
    }

    pub fn sigma(&self) -> u8 {
        self.sigma
    }

    /// Total number of runs over all columns.
    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn columns(&self) -> &[RleColumn] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Result<&RleColumn> {
        self.columns.get(j).ok_or(Error::ColumnRange {
            column: j,
            limit: self.columns.len(),
        })
    }

    pub fn decode_column(&self, j: usize) -> Result<Vec<u8>> {
        Ok(self.column(j)?.decode())
    }
}

/// Builds the index with one stable bucket pass per column, carrying the
/// prefix array from column to column. O(h) work per column.
pub fn build_index(panel: &HaplotypePanel) -> PbwtIndex {
    let h = panel.height();
    let sigma = panel.sigma() as usize;
    let mut order: Vec<u32> = (0..h as u32).collect();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::with_capacity(h); sigma];
    let mut columns = Vec::with_capacity(panel.length());

    for j in 0..panel.length() {
        let mut runs: Vec<Run> = Vec::new();
        for &row in &order {
            let symbol = panel.get(row as usize, j);
            match runs.last_mut() {
                Some(run) if run.symbol == symbol => {
                    run.length += 1;
                    run.last_pa_entry = row;
                }
                _ => runs.push(Run {
                    symbol,
                    length: 1,
                    last_pa_entry: row,
                }),
            }
            buckets[symbol as usize].push(row);
        }
        columns.push(RleColumn { runs });

        order.clear();
        for bucket in &mut buckets {
            order.append(bucket);
        }
    }

    PbwtIndex::from_parts(h as u32, panel.sigma(), columns)
        .expect("freshly built index is well formed")
}

/// Every prefix array `a_0..=a_l` and divergence array `d_0..=d_l`.
///
/// `divergence[j][i]` is the length of the longest common suffix of the
/// length-`j` prefixes of rows `prefix[j][i - 1]` and `prefix[j][i]`, with
/// `divergence[j][0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullArrays {
    pub prefix: Vec<Vec<u32>>,
    pub divergence: Vec<Vec<u32>>,
}

impl FullArrays {
    /// `d'_j[i] = (j - 1) - d_j[i]`: the last column before `j` where the two
    /// adjacent prefixes differ, or -1 when they agree entirely.
    pub fn absolute_divergence(&self, j: usize) -> Vec<i64> {
        self.divergence[j]
            .iter()
            .map(|&d| j as i64 - 1 - i64::from(d))
            .collect()
    }
}

/// Durbin's prefix-and-divergence construction, generalized to `sigma`
/// symbols. Divergences are tracked as match start columns internally.
pub fn build_full_arrays(panel: &HaplotypePanel) -> FullArrays {
    let h = panel.height();
    let sigma = panel.sigma() as usize;
    let mut prefix = Vec::with_capacity(panel.length() + 1);
    let mut divergence = Vec::with_capacity(panel.length() + 1);

    let mut a: Vec<u32> = (0..h as u32).collect();
    // Start column of the common suffix with the predecessor; j means empty.
    let mut start: Vec<usize> = vec![0; h];

    for j in 0..panel.length() {
        prefix.push(a.clone());
        divergence.push(start.iter().map(|&s| (j - s) as u32).collect());

        let mut bucket_ids: Vec<Vec<u32>> = vec![Vec::new(); sigma];
        let mut bucket_starts: Vec<Vec<usize>> = vec![Vec::new(); sigma];
        let mut pending = vec![j + 1; sigma];
        for (i, &row) in a.iter().enumerate() {
            let s = if i == 0 { j + 1 } else { start[i] };
            for p in pending.iter_mut() {
                *p = (*p).max(s);
            }
            let c = panel.get(row as usize, j) as usize;
            bucket_ids[c].push(row);
            bucket_starts[c].push(pending[c]);
            pending[c] = 0;
        }
        a = bucket_ids.concat();
        start = bucket_starts.concat();
        start[0] = j + 1;
    }
    let l = panel.length();
    prefix.push(a);
    divergence.push(start.iter().map(|&s| (l - s) as u32).collect());

    FullArrays { prefix, divergence }
}
