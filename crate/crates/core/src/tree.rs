//! A forest of AVL trees over a fixed node set, augmented with subtree
//! maxima and parent links.
//!
//! Nodes are addressed by handle (`u32`, one per haplotype ID) and never move,
//! so a handle stays valid across splits and joins. Each tree represents a
//! sequence by in-order traversal. Join, split, point assignment and segment
//! maximum all run in O(log n).

use crate::prefix::NIL;

const NONE: i64 = i64::MIN;

#[derive(Clone, Debug)]
pub struct MaxForest {
    left: Vec<u32>,
    right: Vec<u32>,
    parent: Vec<u32>,
    height: Vec<u8>,
    value: Vec<i64>,
    max: Vec<i64>,
    ops: u64,
    max_depth: u32,
}

impl MaxForest {
    /// `n` singleton trees, every node holding `init`.
    pub fn new(n: usize, init: i64) -> Self {
        Self {
            left: vec![NIL; n],
            right: vec![NIL; n],
            parent: vec![NIL; n],
            height: vec![1; n],
            value: vec![init; n],
            max: vec![init; n],
            ops: 0,
            max_depth: 0,
        }
    }

    /// A single balanced tree holding `0..n` in order, every value `init`.
    pub fn sequence(n: usize, init: i64) -> (Self, u32) {
        let mut f = Self::new(n, init);
        let root = f.build_balanced(0, n as u32);
        if root != NIL {
            f.parent[root as usize] = NIL;
        }
        (f, root)
    }

    fn build_balanced(&mut self, lo: u32, hi: u32) -> u32 {
        if lo >= hi {
            return NIL;
        }
        let mid = lo + (hi - lo) / 2;
        let l = self.build_balanced(lo, mid);
        let r = self.build_balanced(mid + 1, hi);
        self.attach(mid, l, r);
        mid
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    /// Number of public operations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Deepest level reached by any single operation.
    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn value(&self, x: u32) -> i64 {
        self.value[x as usize]
    }

    pub fn tree_height(&self, root: u32) -> u32 {
        self.h(root)
    }

    /// Maximum value in the tree rooted at `root`; `i64::MIN` when empty.
    pub fn tree_max(&self, root: u32) -> i64 {
        self.m(root)
    }

    pub fn root_of(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != NIL {
            x = self.parent[x as usize];
        }
        x
    }

    fn depth(&self, mut x: u32) -> u32 {
        let mut d = 0;
        while self.parent[x as usize] != NIL {
            x = self.parent[x as usize];
            d += 1;
        }
        d
    }

    fn touch(&mut self, depth: u32) {
        self.ops += 1;
        self.max_depth = self.max_depth.max(depth);
    }

    #[inline]
    fn h(&self, x: u32) -> u32 {
        if x == NIL {
            0
        } else {
            u32::from(self.height[x as usize])
        }
    }

    #[inline]
    fn m(&self, x: u32) -> i64 {
        if x == NIL {
            NONE
        } else {
            self.max[x as usize]
        }
    }

    fn update(&mut self, x: u32) {
        let (l, r) = (self.left[x as usize], self.right[x as usize]);
        self.height[x as usize] = (1 + self.h(l).max(self.h(r))) as u8;
        self.max[x as usize] = self.value[x as usize].max(self.m(l)).max(self.m(r));
    }

    /// Makes `l` and `r` the children of `x` and refreshes `x`.
    fn attach(&mut self, x: u32, l: u32, r: u32) {
        self.left[x as usize] = l;
        self.right[x as usize] = r;
        if l != NIL {
            self.parent[l as usize] = x;
        }
        if r != NIL {
            self.parent[r as usize] = x;
        }
        self.update(x);
    }

    fn rotate_left(&mut self, x: u32) -> u32 {
        let y = self.right[x as usize];
        let (xl, yl, yr) = (
            self.left[x as usize],
            self.left[y as usize],
            self.right[y as usize],
        );
        self.attach(x, xl, yl);
        self.attach(y, x, yr);
        y
    }

    fn rotate_right(&mut self, x: u32) -> u32 {
        let y = self.left[x as usize];
        let (yl, yr, xr) = (
            self.left[y as usize],
            self.right[y as usize],
            self.right[x as usize],
        );
        self.attach(x, yr, xr);
        self.attach(y, yl, x);
        y
    }

    fn join_right(&mut self, tl: u32, k: u32, tr: u32, depth: &mut u32) -> u32 {
        *depth += 1;
        let (l, c) = (self.left[tl as usize], self.right[tl as usize]);
        if self.h(c) <= self.h(tr) + 1 {
            self.attach(k, c, tr);
            if self.h(k) <= self.h(l) + 1 {
                self.attach(tl, l, k);
                tl
            } else {
                let k2 = self.rotate_right(k);
                self.attach(tl, l, k2);
                self.rotate_left(tl)
            }
        } else {
            let t = self.join_right(c, k, tr, depth);
            self.attach(tl, l, t);
            if self.h(t) <= self.h(l) + 1 {
                tl
            } else {
                self.rotate_left(tl)
            }
        }
    }

    fn join_left(&mut self, tl: u32, k: u32, tr: u32, depth: &mut u32) -> u32 {
        *depth += 1;
        let (c, r) = (self.left[tr as usize], self.right[tr as usize]);
        if self.h(c) <= self.h(tl) + 1 {
            self.attach(k, tl, c);
            if self.h(k) <= self.h(r) + 1 {
                self.attach(tr, k, r);
                tr
            } else {
                let k2 = self.rotate_left(k);
                self.attach(tr, k2, r);
                self.rotate_right(tr)
            }
        } else {
            let t = self.join_left(tl, k, c, depth);
            self.attach(tr, t, r);
            if self.h(t) <= self.h(r) + 1 {
                tr
            } else {
                self.rotate_right(tr)
            }
        }
    }

    /// Joins `tl`, the detached singleton `k`, and `tr`. Returns the new root.
    fn join3(&mut self, tl: u32, k: u32, tr: u32, depth: &mut u32) -> u32 {
        let (hl, hr) = (self.h(tl), self.h(tr));
        let mut spine = 0;
        let root = if hl > hr + 1 {
            self.join_right(tl, k, tr, &mut spine)
        } else if hr > hl + 1 {
            self.join_left(tl, k, tr, &mut spine)
        } else {
            self.attach(k, tl, tr);
            k
        };
        self.parent[root as usize] = NIL;
        *depth = (*depth).max(spine);
        root
    }

    /// Removes `x` from its tree, returning the trees of the elements before
    /// and after it. `x` becomes a detached singleton.
    fn split3(&mut self, x: u32, depth: &mut u32) -> (u32, u32) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur as usize] != NIL {
            let p = self.parent[cur as usize];
            let from_left = self.left[p as usize] == cur;
            path.push((p, from_left, self.left[p as usize], self.right[p as usize]));
            cur = p;
        }
        *depth = (*depth).max(path.len() as u32);

        let mut l = self.left[x as usize];
        let mut r = self.right[x as usize];
        if l != NIL {
            self.parent[l as usize] = NIL;
        }
        if r != NIL {
            self.parent[r as usize] = NIL;
        }
        self.attach(x, NIL, NIL);
        self.parent[x as usize] = NIL;

        let mut join_depth = 0;
        for (p, from_left, pl, pr) in path {
            self.parent[p as usize] = NIL;
            if from_left {
                if pr != NIL {
                    self.parent[pr as usize] = NIL;
                }
                r = self.join3(r, p, pr, &mut join_depth);
            } else {
                if pl != NIL {
                    self.parent[pl as usize] = NIL;
                }
                l = self.join3(pl, p, l, &mut join_depth);
            }
        }
        *depth = (*depth).max(join_depth);
        (l, r)
    }

    /// Splits the tree containing `x` just before `x`. Returns the roots of the
    /// part before `x` and the part starting at `x`.
    pub fn split_before(&mut self, x: u32) -> (u32, u32) {
        let mut depth = 0;
        let (l, r) = self.split3(x, &mut depth);
        let mut jd = 0;
        let r = self.join3(NIL, x, r, &mut jd);
        self.touch(depth.max(jd));
        (l, r)
    }

    /// Concatenates the sequences rooted at `a` and `b` (either may be empty).
    pub fn join(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let mut depth = 0;
        let mut last = a;
        while self.right[last as usize] != NIL {
            last = self.right[last as usize];
            depth += 1;
        }
        let (rest, _) = self.split3(last, &mut depth);
        let root = self.join3(rest, last, b, &mut depth);
        self.touch(depth);
        root
    }

    /// Sets the value at `x`, refreshing cached maxima up to the root.
    pub fn assign(&mut self, x: u32, v: i64) {
        self.value[x as usize] = v;
        let mut cur = x;
        let mut depth = 0u32;
        while cur != NIL {
            self.update(cur);
            cur = self.parent[cur as usize];
            depth += 1;
        }
        self.touch(depth.saturating_sub(1));
    }

    /// Maximum value over the in-order segment from `x` through `y`
    /// inclusive. `x` must not come after `y` in the same tree.
    pub fn segment_max(&mut self, x: u32, y: u32) -> i64 {
        if x == y {
            self.touch(0);
            return self.value[x as usize];
        }
        let (dx, dy) = (self.depth(x), self.depth(y));
        self.touch(dx.max(dy));

        // Lowest common ancestor by equalizing depths.
        let (mut a, mut b) = (x, y);
        let (mut da, mut db) = (dx, dy);
        while da > db {
            a = self.parent[a as usize];
            da -= 1;
        }
        while db > da {
            b = self.parent[b as usize];
            db -= 1;
        }
        while a != b {
            a = self.parent[a as usize];
            b = self.parent[b as usize];
        }
        let z = a;

        let mut best = self.value[z as usize];
        if x != z {
            best = best
                .max(self.value[x as usize])
                .max(self.m(self.right[x as usize]));
            let mut cur = x;
            loop {
                let p = self.parent[cur as usize];
                if p == z {
                    break;
                }
                if self.left[p as usize] == cur {
                    best = best
                        .max(self.value[p as usize])
                        .max(self.m(self.right[p as usize]));
                }
                cur = p;
            }
        }
        if y != z {
            best = best
                .max(self.value[y as usize])
                .max(self.m(self.left[y as usize]));
            let mut cur = y;
            loop {
                let p = self.parent[cur as usize];
                if p == z {
                    break;
                }
                if self.right[p as usize] == cur {
                    best = best
                        .max(self.value[p as usize])
                        .max(self.m(self.left[p as usize]));
                }
                cur = p;
            }
        }
        best
    }

    /// Handles of the tree rooted at `root`, in order.
    pub fn in_order(&self, root: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut cur = root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.left[cur as usize];
            }
            let x = stack.pop().expect("stack is nonempty");
            out.push(x);
            cur = self.right[x as usize];
        }
        out
    }

    /// Checks parent links, AVL balance, cached heights and maxima.
    pub fn check(&self, root: u32) -> Result<(), String> {
        if root != NIL && self.parent[root as usize] != NIL {
            return Err(format!("root {} has a parent", root));
        }
        self.check_node(root).map(|_| ())
    }

    fn check_node(&self, x: u32) -> Result<(u32, i64), String> {
        if x == NIL {
            return Ok((0, NONE));
        }
        let (l, r) = (self.left[x as usize], self.right[x as usize]);
        for c in [l, r] {
            if c != NIL && self.parent[c as usize] != x {
                return Err(format!("child {} of {} has wrong parent", c, x));
            }
        }
        let (hl, ml) = self.check_node(l)?;
        let (hr, mr) = self.check_node(r)?;
        if hl.abs_diff(hr) > 1 {
            return Err(format!("node {} unbalanced: {} vs {}", x, hl, hr));
        }
        let h = 1 + hl.max(hr);
        let m = self.value[x as usize].max(ml).max(mr);
        if u32::from(self.height[x as usize]) != h || self.max[x as usize] != m {
            return Err(format!("node {} has stale cache", x));
        }
        Ok((h, m))
    }
}
