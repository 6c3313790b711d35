use std::fmt;
use std::ops::AddAssign;

/// Operation counters collected by the sweeps and reporting walks.
///
/// These are the machine-independent cost measures: a relink is one
/// predecessor or successor pointer write, a walk step is one ID visited
/// while reporting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub columns: u64,
    pub cuts: u64,
    pub relinks: u64,
    pub bucket_ops: u64,
    pub tree_ops: u64,
    /// Deepest tree level reached by any single tree operation.
    pub max_tree_depth: u32,
    pub walk_steps: u64,
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.columns += rhs.columns;
        self.cuts += rhs.cuts;
        self.relinks += rhs.relinks;
        self.bucket_ops += rhs.bucket_ops;
        self.tree_ops += rhs.tree_ops;
        self.max_tree_depth = self.max_tree_depth.max(rhs.max_tree_depth);
        self.walk_steps += rhs.walk_steps;
    }
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "columns={} cuts={} relinks={} bucket_ops={} tree_ops={} max_tree_depth={} walk_steps={}",
            self.columns,
            self.cuts,
            self.relinks,
            self.bucket_ops,
            self.tree_ops,
            self.max_tree_depth,
            self.walk_steps
        )
    }
}
