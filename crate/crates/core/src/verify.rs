//! Self-checks comparing the sweeps against the Durbin-style arrays, plus
//! random panel generation for them.

use rand::Rng;

use crate::divergence::sweep_with_divergence;
use crate::error::{Error, Result};
use crate::format::{read_index, write_index};
use crate::index::{build_full_arrays, build_index, FullArrays, PbwtIndex};
use crate::panel::{HaplotypePanel, QuerySet};
use crate::report::{
    accumulate, compute_threshold, flush, flush_endpoints, BatchPolicy, EndpointRequest,
};
use crate::smem::{collect_records, SmemBatchInput};
use crate::stats::OpCounts;

/// A panel built as a mosaic of a few founder haplotypes with point
/// mutations, so that columns have long runs and queries long matches.
pub fn random_panel<R: Rng>(
    rng: &mut R,
    height: usize,
    length: usize,
    sigma: u8,
) -> HaplotypePanel {
    let founders: Vec<Vec<u8>> = (0..rng.gen_range(1..=4))
        .map(|_| (0..length).map(|_| rng.gen_range(0..sigma)).collect())
        .collect();
    let rows: Vec<Vec<u8>> = (0..height).map(|_| mosaic(rng, &founders, sigma)).collect();
    HaplotypePanel::from_rows(&rows).expect("generated rows are rectangular")
}

/// Queries drawn the same way from the panel's own rows.
pub fn random_queries<R: Rng>(rng: &mut R, panel: &HaplotypePanel, count: usize) -> QuerySet {
    let rows: Vec<Vec<u8>> = panel.rows().map(<[u8]>::to_vec).collect();
    let sigma = panel.sigma().max(2);
    let queries = (0..count).map(|_| mosaic(rng, &rows, sigma)).collect();
    QuerySet::new(panel.length(), queries).expect("generated queries have panel length")
}

fn mosaic<R: Rng>(rng: &mut R, sources: &[Vec<u8>], sigma: u8) -> Vec<u8> {
    let length = sources[0].len();
    let mut src = rng.gen_range(0..sources.len());
    (0..length)
        .map(|j| {
            if rng.gen_bool(0.1) {
                src = rng.gen_range(0..sources.len());
            }
            if rng.gen_bool(0.05) {
                rng.gen_range(0..sigma)
            } else {
                sources[src][j]
            }
        })
        .collect()
}

/// What one successful panel check measured.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PanelCheck {
    pub runs: u64,
    pub records: u64,
    /// Total IDs reported, counting repeats.
    pub reported: u64,
    pub sweep: OpCounts,
    pub report: OpCounts,
}

fn mismatch(msg: String) -> Error {
    Error::Mismatch(msg)
}

/// Checks the index columns and run tags against the full prefix arrays.
pub fn check_index(panel: &HaplotypePanel, index: &PbwtIndex, arrays: &FullArrays) -> Result<()> {
    if index.height() != panel.height() || index.length() != panel.length() {
        return Err(mismatch("index dimensions differ from the panel".into()));
    }
    for j in 0..panel.length() {
        let col = index.decode_column(j)?;
        let a = &arrays.prefix[j];
        if (0..panel.height()).any(|i| col[i] != panel.get(a[i] as usize, j)) {
            return Err(mismatch(format!(
                "column {} does not decode to the PBWT",
                j
            )));
        }
        let mut end = 0usize;
        for (k, run) in index.columns()[j].runs.iter().enumerate() {
            end += run.length as usize;
            if run.last_pa_entry != a[end - 1] {
                return Err(mismatch(format!(
                    "column {} run {} ends at haplotype {}, expected {}",
                    j,
                    k,
                    run.last_pa_entry,
                    a[end - 1]
                )));
            }
        }
    }
    Ok(())
}

/// Runs the lockstep sweep, comparing every prefix and divergence array
/// with the reference, and checks the operation-count bounds.
pub fn check_sweep(index: &PbwtIndex, arrays: &FullArrays) -> Result<OpCounts> {
    let counts = sweep_with_divergence(index, |j, list, div, _| {
        let a = list.current_prefix_array();
        if a != arrays.prefix[j + 1] {
            return Err(mismatch(format!(
                "a_{}: sweep {:?}, reference {:?}",
                j + 1,
                a,
                arrays.prefix[j + 1]
            )));
        }
        if div.current_order() != a {
            return Err(mismatch(format!(
                "divergence tree misaligned at column {}",
                j + 1
            )));
        }
        let d = div.current_divergence();
        let want = arrays.absolute_divergence(j + 1);
        if d != want {
            return Err(mismatch(format!(
                "d'_{}: sweep {:?}, reference {:?}",
                j + 1,
                d,
                want
            )));
        }
        Ok(())
    })?;
    check_bounds(index, &counts)?;
    Ok(counts)
}

/// Upper bound on tree depth touched by any single tree operation.
pub fn depth_bound(height: usize) -> f64 {
    2.0 * ((height + 2) as f64).log2()
}

/// Cuts are exactly `r - l`; relinks plus bucket work at most `8r + sigma*l`;
/// tree operations at most `4r`, none deeper than `2 log2(h + 2)`.
pub fn check_bounds(index: &PbwtIndex, counts: &OpCounts) -> Result<()> {
    let r = index.runs();
    let l = index.length() as u64;
    let sigma = u64::from(index.sigma());
    if counts.cuts != r - l {
        return Err(mismatch(format!(
            "{} cuts, expected r - l = {}",
            counts.cuts,
            r - l
        )));
    }
    if counts.relinks + counts.bucket_ops > 8 * r + sigma * l {
        return Err(mismatch(format!(
            "{} relinks + {} bucket ops exceed 8r + sigma*l = {}",
            counts.relinks,
            counts.bucket_ops,
            8 * r + sigma * l
        )));
    }
    if counts.tree_ops > 4 * r {
        return Err(mismatch(format!(
            "{} tree ops exceed 4r = {}",
            counts.tree_ops,
            4 * r
        )));
    }
    if f64::from(counts.max_tree_depth) > depth_bound(index.height()) {
        return Err(mismatch(format!(
            "tree operation reached depth {}, bound {:.2}",
            counts.max_tree_depth,
            depth_bound(index.height())
        )));
    }
    Ok(())
}

/// Flushes the batch in both modes and under several batch sizes, comparing
/// each against direct extraction from the reference arrays.
pub fn check_reporting(
    index: &PbwtIndex,
    arrays: &FullArrays,
    batch: &SmemBatchInput,
) -> Result<(u64, OpCounts)> {
    let out = flush(index, &batch.records)?;
    let mut want = Vec::new();
    for rec in &batch.records {
        let a = &arrays.prefix[rec.end_col as usize + 1];
        want.extend(
            a[rec.lo as usize..=rec.hi as usize]
                .iter()
                .map(|&id| (rec.query_id, rec.end_col, id)),
        );
    }
    let got: Vec<_> = out
        .entries
        .iter()
        .map(|e| (e.query_id, e.end_col, e.haplotype_id))
        .collect();
    if got != want {
        return Err(mismatch(
            "flush output differs from direct extraction".into(),
        ));
    }
    let k = batch.total_width();
    if out.counts.walk_steps != k {
        return Err(mismatch(format!(
            "{} walk steps for K = {}",
            out.counts.walk_steps, k
        )));
    }

    let requests: Vec<_> = batch
        .records
        .iter()
        .map(|r| EndpointRequest::from_record(r, arrays))
        .collect();
    if flush_endpoints(index, &requests)?.entries != out.entries {
        return Err(mismatch("endpoints mode differs from interval mode".into()));
    }

    let default_b = compute_threshold(index.runs(), index.height() as u64);
    for b in [1, 2, default_b, u64::MAX] {
        let acc = accumulate(
            index,
            BatchPolicy::with_threshold(b),
            batch.records.iter().copied(),
        )?;
        if acc.entries != out.entries {
            return Err(mismatch(format!("batch size {} changes the output", b)));
        }
    }
    Ok((k, out.counts))
}

/// Every check on one panel and its queries.
pub fn verify_panel(panel: &HaplotypePanel, queries: &QuerySet) -> Result<PanelCheck> {
    let index = build_index(panel);
    let arrays = build_full_arrays(panel);
    check_index(panel, &index, &arrays)?;

    let mut buf = Vec::new();
    write_index(&mut buf, &index)?;
    if read_index(&mut buf.as_slice())? != index {
        return Err(mismatch("index changed across serialization".into()));
    }

    let sweep = check_sweep(&index, &arrays)?;
    let batch = collect_records(panel, &arrays, queries, true)?;
    let (reported, report) = check_reporting(&index, &arrays, &batch)?;
    Ok(PanelCheck {
        runs: index.runs(),
        records: batch.records.len() as u64,
        reported,
        sweep,
        report,
    })
}
