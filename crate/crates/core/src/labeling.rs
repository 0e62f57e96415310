//! Hard clusterings and the contingency statistics between two of them.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A hard clustering: one cluster index per point.
///
/// Indices need not be contiguous. Two labelings describing the same
/// partition under different indices compare equal through
/// [`Labeling::same_partition`]; `==` is exact label equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Labeling {
    labels: Vec<u32>,
}

impl Labeling {
    pub fn new(labels: Vec<u32>) -> Self {
        Self { labels }
    }

    pub fn constant(n: usize) -> Self {
        Self { labels: vec![0; n] }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u32> {
        self.labels
    }

    /// Dense cluster index per point, numbered by first appearance.
    pub fn canonical_indices(&self) -> (Vec<u32>, usize) {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut out = Vec::with_capacity(self.labels.len());
        for &l in &self.labels {
            let next = map.len() as u32;
            out.push(*map.entry(l).or_insert(next));
        }
        (out, map.len())
    }

    /// Number of distinct labels.
    pub fn k(&self) -> usize {
        self.canonical_indices().1
    }

    /// Relabels to `0..k` in order of first appearance.
    pub fn canonicalize(&self) -> Labeling {
        Labeling::new(self.canonical_indices().0)
    }

    pub fn is_canonical(&self) -> bool {
        let mut next = 0u32;
        for &l in &self.labels {
            if l == next {
                next += 1;
            } else if l > next {
                return false;
            }
        }
        true
    }

    pub fn same_partition(&self, other: &Labeling) -> bool {
        self.n() == other.n() && self.canonical_indices().0 == other.canonical_indices().0
    }

    /// Member indices of each cluster, clusters in canonical order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let (idx, k) = self.canonical_indices();
        let mut out = vec![Vec::new(); k];
        for (i, &c) in idx.iter().enumerate() {
            out[c as usize].push(i);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let (idx, k) = self.canonical_indices();
        let mut sizes = vec![0; k];
        for c in idx {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Parses one label per line, or a single comma separated row.
    pub fn parse(text: &str) -> Result<Labeling> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let cells: Vec<(usize, &str)> = match lines.as_slice() {
            [] => return Err(Error::EmptyInput("labeling file has no labels".into())),
            [(line, row)] if row.contains(',') => {
                row.split(',').map(|c| (*line, c.trim())).collect()
            }
            _ => lines,
        };
        let labels = cells
            .into_iter()
            .map(|(line, cell)| {
                cell.parse::<u32>().map_err(|_| Error::Parse {
                    line,
                    message: format!("{cell:?} is not a non-negative integer label"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Labeling::new(labels))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Labeling> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Labeling::parse(&text)
    }

    /// Canonical form, one label per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n() * 3);
        for l in self.canonicalize().labels {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

impl From<Vec<u32>> for Labeling {
    fn from(labels: Vec<u32>) -> Self {
        Labeling::new(labels)
    }
}

/// Cluster overlap counts between two labelings over the same points.
///
/// Rows follow the canonical label order of the first labeling, columns
/// that of the second. Only non-zero cells are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    cells: Vec<(u32, u32, u64)>,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn rows(&self) -> usize {
        self.row_marginals.len()
    }

    pub fn cols(&self) -> usize {
        self.col_marginals.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn row_marginals(&self) -> &[u64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[u64] {
        &self.col_marginals
    }

    /// Non-zero cells as `(row, col, count)`, row-major.
    pub fn nonzero(&self) -> &[(u32, u32, u64)] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.cells
            .binary_search_by(|&(r, c, _)| (r as usize, c as usize).cmp(&(row, col)))
            .map(|i| self.cells[i].2)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0; self.cols()]; self.rows()];
        for &(r, c, v) in &self.cells {
            out[r as usize][c as usize] = v;
        }
        out
    }
}

pub fn contingency(a: &Labeling, b: &Labeling) -> Result<ContingencyTable> {
    if a.n() != b.n() {
        return Err(Error::Dimension {
            expected: a.n(),
            found: b.n(),
        });
    }
    let (ra, ka) = a.canonical_indices();
    let (rb, kb) = b.canonical_indices();
    let mut keys: Vec<u64> = ra
        .iter()
        .zip(&rb)
        .map(|(&r, &c)| (r as u64) << 32 | c as u64)
        .collect();
    keys.sort_unstable();
    let mut cells: Vec<(u32, u32, u64)> = Vec::new();
    for key in keys {
        let (r, c) = ((key >> 32) as u32, key as u32);
        match cells.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += 1,
            _ => cells.push((r, c, 1)),
        }
    }
    let mut row_marginals = vec![0u64; ka];
    let mut col_marginals = vec![0u64; kb];
    for &(r, c, v) in &cells {
        row_marginals[r as usize] += v;
        col_marginals[c as usize] += v;
    }
    Ok(ContingencyTable {
        cells,
        row_marginals,
        col_marginals,
        total: a.n() as u64,
    })
}

/// Point-pair agreement counts between two labelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCounts {
    /// Same cluster in both.
    pub n11: u64,
    /// Different clusters in both.
    pub n00: u64,
    /// Same in the first, different in the second.
    pub n10: u64,
    /// Different in the first, same in the second.
    pub n01: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.n11 + self.n00 + self.n10 + self.n01
    }
}

pub(crate) fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

pub fn pair_counts(a: &Labeling, b: &Labeling) -> Result<PairCounts> {
    let table = contingency(a, b)?;
    pair_counts_from_table(&table)
}

pub fn pair_counts_from_table(table: &ContingencyTable) -> Result<PairCounts> {
    if table.total() < 2 {
        return Err(Error::Degenerate(
            "pair counting needs at least two points".into(),
        ));
    }
    let n11: u64 = table.nonzero().iter().map(|&(_, _, v)| choose2(v)).sum();
    let same_a: u64 = table.row_marginals().iter().map(|&v| choose2(v)).sum();
    let same_b: u64 = table.col_marginals().iter().map(|&v| choose2(v)).sum();
    let n10 = same_a - n11;
    let n01 = same_b - n11;
    let n00 = choose2(table.total()) - n11 - n10 - n01;
    Ok(PairCounts { n11, n00, n10, n01 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(v: &[u32]) -> Labeling {
        Labeling::new(v.to_vec())
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            lab(&[3, 3, 1, 1, 1, 2]).canonicalize(),
            lab(&[0, 0, 1, 1, 1, 2])
        );
        assert_eq!(lab(&[0, 1, 2]).canonicalize(), lab(&[0, 1, 2]));
        let c = lab(&[9, 4, 9, 7]).canonicalize();
        assert_eq!(c.canonicalize(), c);
        assert!(c.is_canonical());
        assert!(!lab(&[1, 0]).is_canonical());
        assert!(lab(&[1, 1, 2, 2, 2, 3]).same_partition(&lab(&[3, 3, 1, 1, 1, 2])));
    }

    #[test]
    fn k_and_clusters() {
        let l = lab(&[5, 5, 2, 7, 2]);
        assert_eq!(l.k(), 3);
        assert_eq!(l.clusters(), vec![vec![0, 1], vec![2, 4], vec![3]]);
        assert_eq!(l.cluster_sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn contingency_examples() {
        let a = lab(&[0, 0, 1, 1]);
        assert_eq!(
            contingency(&a, &a).unwrap().to_dense(),
            vec![vec![2, 0], vec![0, 2]]
        );
        let b = lab(&[0, 1, 0, 1]);
        let t = contingency(&a, &b).unwrap();
        assert_eq!(t.to_dense(), vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(t.row_marginals(), &[2, 2]);
        assert_eq!(t.get(1, 0), 1);
        assert!(matches!(
            contingency(&a, &lab(&[0, 1])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn pair_count_examples() {
        let a = lab(&[0, 0, 1, 1]);
        assert_eq!(
            pair_counts(&a, &a).unwrap(),
            PairCounts {
                n11: 2,
                n00: 4,
                n10: 0,
                n01: 0
            }
        );
        let one = Labeling::constant(3);
        assert_eq!(
            pair_counts(&one, &one).unwrap(),
            PairCounts {
                n11: 3,
                n00: 0,
                n10: 0,
                n01: 0
            }
        );
        assert!(matches!(
            pair_counts(&lab(&[0]), &lab(&[0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn parse_formats() {
        assert_eq!(Labeling::parse("1\n1\n0\n").unwrap(), lab(&[1, 1, 0]));
        assert_eq!(Labeling::parse("2, 0,1\n").unwrap(), lab(&[2, 0, 1]));
        assert_eq!(Labeling::parse("4\n").unwrap(), lab(&[4]));
        assert!(matches!(
            Labeling::parse("1\n-1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(Labeling::parse("\n"), Err(Error::EmptyInput(_))));
        assert_eq!(lab(&[7, 7, 3]).to_text(), "0\n0\n1\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn labels(n: usize, k: u32) -> impl Strategy<Value = Vec<u32>> {
            prop::collection::vec(0..k, n)
        }

        fn permuted(labels: &[u32], seed: u64) -> Vec<u32> {
            // affine bijection on u32 values
            let mult = (seed as u32) | 1;
            labels
                .iter()
                .map(|&l| l.wrapping_mul(mult).wrapping_add(seed as u32 >> 3))
                .collect()
        }

        proptest! {
            #[test]
            fn pair_counts_are_relabel_invariant((a, b) in (1usize..25).prop_flat_map(|n| (labels(n, 5), labels(n, 4))), s1 in any::<u64>(), s2 in any::<u64>()) {
                prop_assume!(a.len() >= 2);
                let (la, lb) = (lab(&a), lab(&b));
                let base = pair_counts(&la, &lb).unwrap();
                let moved = pair_counts(&lab(&permuted(&a, s1)), &lab(&permuted(&b, s2))).unwrap();
                prop_assert_eq!(base, moved);
                let n = a.len() as u64;
                prop_assert_eq!(base.total(), n * (n - 1) / 2);
                let selfc = pair_counts(&la, &la).unwrap();
                prop_assert_eq!((selfc.n10, selfc.n01), (0, 0));
            }

            #[test]
            fn contingency_is_consistent((a, b) in (1usize..40).prop_flat_map(|n| (labels(n, 6), labels(n, 6))), s1 in any::<u64>()) {
                let t = contingency(&lab(&a), &lab(&b)).unwrap();
                let dense = t.to_dense();
                let total: u64 = dense.iter().flatten().sum();
                prop_assert_eq!(total, a.len() as u64);
                for (r, row) in dense.iter().enumerate() {
                    prop_assert_eq!(row.iter().sum::<u64>(), t.row_marginals()[r]);
                }
                // relabeling one side permutes rows; the multiset of rows is unchanged
                let moved = contingency(&lab(&permuted(&a, s1)), &lab(&b)).unwrap().to_dense();
                let mut x = dense.clone();
                let mut y = moved;
                x.sort();
                y.sort();
                prop_assert_eq!(x, y);
            }
        }
    }
}
