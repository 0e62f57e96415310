//! Consensus clustering by reclustering points: count, for every pair of
//! points, the ensemble members that separate them, then run agglomerative
//! clustering on those counts.

use std::io::Write;

use rayon::prelude::*;

use crate::algorithms::{Dendrogram, Linkage};
use crate::dataset::DistanceMatrix;
use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::metrics::anmi;

/// Pairwise Hamming distances between the points' label vectors across the
/// ensemble: entry `(i, j)` counts the members where `i` and `j` differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoAssociationMatrix {
    n: usize,
    m: usize,
    disagreements: Vec<u32>,
    pairs_evaluated: u64,
}

impl CoAssociationMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ensemble size.
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.disagreements[i * self.n + j]
    }

    /// Number of unordered point pairs visited while building the matrix.
    pub fn pairs_evaluated(&self) -> u64 {
        self.pairs_evaluated
    }

    /// Entry-wise sum of two matrices over the same points; equals the
    /// matrix of the concatenated ensembles.
    pub fn combine(&self, other: &CoAssociationMatrix) -> Result<CoAssociationMatrix> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(CoAssociationMatrix {
            n: self.n,
            m: self.m + other.m,
            disagreements: self
                .disagreements
                .iter()
                .zip(&other.disagreements)
                .map(|(a, b)| a + b)
                .collect(),
            pairs_evaluated: self.pairs_evaluated + other.pairs_evaluated,
        })
    }

    /// Raw counts as dissimilarities (not divided by `m`).
    pub fn to_distances(&self) -> DistanceMatrix {
        DistanceMatrix::from_vec_unchecked(
            self.n,
            self.disagreements.iter().map(|&v| v as f64).collect(),
        )
    }

    /// Square CSV without header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = String::new();
        for i in 0..self.n {
            line.clear();
            for j in 0..self.n {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&self.get(i, j).to_string());
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

fn check_ensemble(ensemble: &[Labeling]) -> Result<usize> {
    let Some(first) = ensemble.first() else {
        return Err(Error::Degenerate("empty ensemble".into()));
    };
    let n = first.n();
    if let Some(bad) = ensemble.iter().find(|l| l.n() != n) {
        return Err(Error::Dimension {
            expected: n,
            found: bad.n(),
        });
    }
    Ok(n)
}

pub fn hamming_matrix(ensemble: &[Labeling]) -> Result<CoAssociationMatrix> {
    let n = check_ensemble(ensemble)?;
    let m = ensemble.len();
    // point-major copy so each pair compares two contiguous slices
    let mut by_point = vec![0u32; n * m];
    for (e, l) in ensemble.iter().enumerate() {
        for (i, &label) in l.labels().iter().enumerate() {
            by_point[i * m + e] = label;
        }
    }
    let mut disagreements = vec![0u32; n * n];
    let visited: u64 = disagreements
        .par_chunks_mut(n.max(1))
        .enumerate()
        .map(|(i, row)| {
            let a = &by_point[i * m..(i + 1) * m];
            let mut count = 0u64;
            for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
                let b = &by_point[j * m..(j + 1) * m];
                *slot = a.iter().zip(b).filter(|(x, y)| x != y).count() as u32;
                count += 1;
            }
            count
        })
        .sum();
    for i in 0..n {
        for j in (i + 1)..n {
            disagreements[j * n + i] = disagreements[i * n + j];
        }
    }
    Ok(CoAssociationMatrix {
        n,
        m,
        disagreements,
        pairs_evaluated: visited,
    })
}

/// Full merge sequence of the consensus reclustering, reusable for any
/// number of consensus clusters.
pub fn consensus_dendrogram(ensemble: &[Labeling], linkage: Linkage) -> Result<Dendrogram> {
    let matrix = hamming_matrix(ensemble)?;
    Ok(Dendrogram::build(&matrix.to_distances(), linkage))
}

/// Consensus clustering with exactly `k_star` clusters.
pub fn consensus_clustering(
    ensemble: &[Labeling],
    k_star: usize,
    linkage: Linkage,
) -> Result<Labeling> {
    let matrix = hamming_matrix(ensemble)?;
    crate::algorithms::agglomerative(&matrix.to_distances(), k_star, linkage)
}

/// ANMI of a candidate consensus against the ensemble.
pub fn evaluate_consensus(c_star: &Labeling, ensemble: &[Labeling]) -> Result<f64> {
    anmi(c_star, ensemble)
}
