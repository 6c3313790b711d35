//! Brute-force references shared by the integration tests. Nothing here goes
//! through the library's sweeps or Durbin-style construction.

#![allow(dead_code)]

use pbwt_batch::HaplotypePanel;
use proptest::prelude::*;

pub const TOY_PANEL: &str =
    "00110100\n01001101\n01011010\n01100110\n10011001\n10101101\n11000111\n11011010\n";

/// The PBWT of the toy panel, one row per line as printed.
pub const TOY_PBWT: [&str; 8] = [
    "00111101", "01000110", "01111111", "01000111", "10011110", "10111000", "11001001", "11000000",
];

/// Rows of the printed prefix-array matrix: `TOY_PREFIX_ROWS[i][j] = a_j[i]`.
pub const TOY_PREFIX_ROWS: [&str; 8] = [
    "000416440",
    "114163202",
    "225250717",
    "331631653",
    "442745324",
    "553024071",
    "666572165",
    "777307536",
];

pub const TOY_QUERIES: &str = "10100111\n11100010\n";

pub fn digits(s: &str) -> Vec<u32> {
    s.bytes().map(|b| u32::from(b - b'0')).collect()
}

/// `a_j` read column-wise out of the printed matrix.
pub fn toy_prefix_array(j: usize) -> Vec<u32> {
    TOY_PREFIX_ROWS.iter().map(|row| digits(row)[j]).collect()
}

/// Stable co-lexicographic sort of the length-`j` row prefixes.
pub fn brute_prefix_array(panel: &HaplotypePanel, j: usize) -> Vec<u32> {
    let mut order: Vec<u32> = (0..panel.height() as u32).collect();
    order.sort_by(|&x, &y| {
        let px = panel.row(x as usize)[..j].iter().rev();
        let py = panel.row(y as usize)[..j].iter().rev();
        px.cmp(py)
    });
    order
}

/// Longest common suffix of the length-`j` prefixes of two rows.
pub fn common_suffix(panel: &HaplotypePanel, x: u32, y: u32, j: usize) -> usize {
    let (rx, ry) = (&panel.row(x as usize)[..j], &panel.row(y as usize)[..j]);
    rx.iter()
        .rev()
        .zip(ry.iter().rev())
        .take_while(|(a, b)| a == b)
        .count()
}

/// `d_j` by direct comparison of neighbouring prefixes in `a_j` order.
pub fn brute_divergence(panel: &HaplotypePanel, j: usize) -> Vec<usize> {
    let a = brute_prefix_array(panel, j);
    (0..a.len())
        .map(|i| {
            if i == 0 {
                0
            } else {
                common_suffix(panel, a[i - 1], a[i], j)
            }
        })
        .collect()
}

/// `d'_j[i] = (j - 1) - d_j[i]`.
pub fn brute_absolute_divergence(panel: &HaplotypePanel, j: usize) -> Vec<i64> {
    brute_divergence(panel, j)
        .into_iter()
        .map(|d| j as i64 - 1 - d as i64)
        .collect()
}

/// All `(s, e)` with a positional match in some row that extends in neither
/// direction, by enumerating every substring of the query.
pub fn brute_smems(panel: &HaplotypePanel, query: &[u8]) -> Vec<(usize, usize)> {
    let l = query.len();
    let occurs = |s: usize, e: usize| panel.rows().any(|row| row[s..=e] == query[s..=e]);
    let mut out = Vec::new();
    for e in 0..l {
        for s in 0..=e {
            if occurs(s, e) && (s == 0 || !occurs(s - 1, e)) && (e + 1 == l || !occurs(s, e + 1)) {
                out.push((s, e));
            }
        }
    }
    out
}

/// Rows matching `query[s..=e]` in place, in ID order.
pub fn brute_matching_rows(panel: &HaplotypePanel, query: &[u8], s: usize, e: usize) -> Vec<u32> {
    (0..panel.height() as u32)
        .filter(|&r| panel.row(r as usize)[s..=e] == query[s..=e])
        .collect()
}

/// Random panels with `h <= max_h`, `l <= max_l`, alphabet 2 or 3. Rows are
/// mutated copies of a few founders so runs and matches are long.
pub fn panel_strategy(max_h: usize, max_l: usize) -> impl Strategy<Value = HaplotypePanel> {
    (1..=max_h, 0..=max_l, 2u8..=3).prop_flat_map(|(h, l, sigma)| {
        let founders = prop::collection::vec(prop::collection::vec(0..sigma, l), 1..=3);
        let picks = prop::collection::vec(
            (
                any::<prop::sample::Index>(),
                prop::collection::vec((0..sigma, 0u8..10), l),
            ),
            h,
        );
        (founders, picks).prop_map(|(founders, picks)| {
            let rows: Vec<Vec<u8>> = picks
                .into_iter()
                .map(|(pick, noise)| {
                    let f = &founders[pick.index(founders.len())];
                    f.iter()
                        .zip(noise)
                        .map(|(&s, (alt, roll))| if roll == 0 { alt } else { s })
                        .collect()
                })
                .collect();
            HaplotypePanel::from_rows(&rows).unwrap()
        })
    })
}

/// A panel together with queries made from its rows with a few mutations.
pub fn panel_with_queries(
    max_h: usize,
    max_l: usize,
    max_q: usize,
) -> impl Strategy<Value = (HaplotypePanel, Vec<Vec<u8>>)> {
    panel_strategy(max_h, max_l).prop_flat_map(move |panel| {
        let h = panel.height();
        let l = panel.length();
        let sigma = panel.sigma().max(2);
        let queries = prop::collection::vec(
            (
                0..h,
                0..h,
                0..=l,
                prop::collection::vec((0..sigma, 0u8..8), l),
            ),
            0..=max_q,
        );
        (Just(panel), queries).prop_map(|(panel, qs)| {
            let queries = qs
                .into_iter()
                .map(|(r1, r2, cut, noise)| {
                    (0..panel.length())
                        .map(|j| {
                            let src = if j < cut { r1 } else { r2 };
                            if noise[j].1 == 0 {
                                noise[j].0
                            } else {
                                panel.get(src, j)
                            }
                        })
                        .collect()
                })
                .collect();
            (panel, queries)
        })
    })
}
