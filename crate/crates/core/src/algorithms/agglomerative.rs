use serde::Serialize;

use super::Linkage;
use crate::dataset::DistanceMatrix;
use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// One merge step. Clusters are named by their smallest member index, so
/// `a < b` and the merged cluster keeps the name `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub size: usize,
}

/// Bottom-up merge sequence under a fixed linkage.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Merges until a single cluster remains.
    pub fn build(dist: &DistanceMatrix, linkage: Linkage) -> Dendrogram {
        Self::build_until(dist, linkage, 1)
    }

    /// Merges until `clusters` clusters remain. At every step the closest
    /// pair of clusters is merged; ties go to the lexicographically
    /// smallest `(a, b)`.
    pub fn build_until(dist: &DistanceMatrix, linkage: Linkage, clusters: usize) -> Dendrogram {
        let n = dist.n();
        let target = clusters.max(1);
        let mut w = dist.as_flat().to_vec();
        let mut active = vec![true; n];
        let mut size = vec![1usize; n];
        let mut nearest: Vec<Option<(f64, usize)>> = vec![None; n];

        let row_min = |w: &[f64], active: &[bool], i: usize| -> Option<(f64, usize)> {
            let mut best: Option<(f64, usize)> = None;
            for j in (i + 1)..n {
                if active[j] {
                    let d = w[i * n + j];
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, j));
                    }
                }
            }
            best
        };
        for (i, slot) in nearest.iter_mut().enumerate() {
            *slot = row_min(&w, &active, i);
        }

        let mut merges = Vec::with_capacity(n.saturating_sub(target));
        let mut remaining = n;
        while remaining > target {
            let mut pick: Option<(f64, usize, usize)> = None;
            for i in 0..n {
                if !active[i] {
                    continue;
                }
                if let Some((d, j)) = nearest[i] {
                    if pick.is_none_or(|(pd, _, _)| d < pd) {
                        pick = Some((d, i, j));
                    }
                }
            }
            let (d, a, b) = pick.expect("at least two active clusters");
            let (sa, sb) = (size[a] as f64, size[b] as f64);
            for x in 0..n {
                if !active[x] || x == a || x == b {
                    continue;
                }
                let (dax, dbx) = (w[a * n + x], w[b * n + x]);
                let merged = match linkage {
                    Linkage::Single => dax.min(dbx),
                    Linkage::Complete => dax.max(dbx),
                    Linkage::Average => (sa * dax + sb * dbx) / (sa + sb),
                };
                w[a * n + x] = merged;
                w[x * n + a] = merged;
            }
            active[b] = false;
            size[a] += size[b];
            nearest[b] = None;
            merges.push(Merge {
                a,
                b,
                distance: d,
                size: size[a],
            });
            remaining -= 1;

            nearest[a] = row_min(&w, &active, a);
            for i in 0..b {
                if !active[i] || i == a {
                    continue;
                }
                match nearest[i] {
                    Some((_, j)) if j == a || j == b => nearest[i] = row_min(&w, &active, i),
                    Some((bd, bj)) if i < a => {
                        let d = w[i * n + a];
                        if d < bd || (d == bd && a < bj) {
                            nearest[i] = Some((d, a));
                        }
                    }
                    None if i < a => nearest[i] = Some((w[i * n + a], a)),
                    _ => {}
                }
            }
        }
        Dendrogram { n, merges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Partition after the first `n - k` merges.
    pub fn cut(&self, k: usize) -> Result<Labeling> {
        if k == 0 || k > self.n {
            return Err(Error::Parameter(format!(
                "agglomerative: need 1 <= k <= n, got k={k}, n={}",
                self.n
            )));
        }
        let steps = self.n - k;
        if steps > self.merges.len() {
            return Err(Error::Parameter(format!(
                "dendrogram was built down to {} clusters, cannot cut at {k}",
                self.n - self.merges.len()
            )));
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        for m in &self.merges[..steps] {
            parent[m.b] = m.a;
        }
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let labels = (0..self.n).map(|i| root(&mut parent, i) as u32).collect();
        Ok(Labeling::new(labels).canonicalize())
    }
}

/// Agglomerative clustering of a precomputed dissimilarity matrix down to
/// `k` clusters.
pub fn agglomerative(dist: &DistanceMatrix, k: usize, linkage: Linkage) -> Result<Labeling> {
    let n = dist.n();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "agglomerative: need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    Dendrogram::build_until(dist, linkage, k).cut(k)
}
