//! Comparison criteria between two clusterings of the same points.

use crate::error::{Error, Result};
use crate::labeling::{choose2, contingency, pair_counts_from_table, ContingencyTable, Labeling};

/// Normalized mutual information with geometric-mean normalization,
/// natural logarithms, `0·log 0 = 0`. Zero when either side has a single
/// cluster.
pub fn nmi(a: &Labeling, b: &Labeling) -> Result<f64> {
    Ok(nmi_from_table(&contingency(a, b)?))
}

pub fn nmi_from_table(table: &ContingencyTable) -> f64 {
    if table.rows() < 2 || table.cols() < 2 {
        return 0.0;
    }
    let n = table.total() as f64;
    let rows = table.row_marginals();
    let cols = table.col_marginals();
    // Summed in sorted order so that swapping the arguments is exact.
    let mut terms: Vec<f64> = table
        .nonzero()
        .iter()
        .map(|&(r, c, v)| {
            let v = v as f64;
            v * (n * v / (rows[r as usize] as f64 * cols[c as usize] as f64)).ln()
        })
        .collect();
    terms.sort_by(f64::total_cmp);
    let mutual: f64 = terms.iter().sum();
    let entropy = |marg: &[u64]| -> f64 {
        let mut terms: Vec<f64> = marg
            .iter()
            .map(|&m| {
                let m = m as f64;
                m * (m / n).ln()
            })
            .collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    };
    let denom = (entropy(rows) * entropy(cols)).sqrt();
    (mutual / denom).clamp(0.0, 1.0)
}

/// Mean NMI between `c` and each member of `ensemble`.
pub fn anmi(c: &Labeling, ensemble: &[Labeling]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::Degenerate("ANMI against an empty ensemble".into()));
    }
    let mut total = 0.0;
    for member in ensemble {
        total += nmi(c, member)?;
    }
    Ok(total / ensemble.len() as f64)
}

pub fn rand_index(a: &Labeling, b: &Labeling) -> Result<f64> {
    let pc = pair_counts_from_table(&contingency(a, b)?)?;
    Ok((pc.n00 + pc.n11) as f64 / pc.total() as f64)
}

/// `None` when no pair shares a cluster in either labeling.
pub fn jaccard(a: &Labeling, b: &Labeling) -> Result<Option<f64>> {
    let pc = pair_counts_from_table(&contingency(a, b)?)?;
    let denom = pc.n11 + pc.n01 + pc.n10;
    Ok((denom > 0).then(|| pc.n11 as f64 / denom as f64))
}

/// Adjusted Rand index in closed form over the contingency table.
///
/// The formula is 0/0 only when both labelings are all-singletons or both
/// a single cluster; such identical partitions score 1.0, anything else
/// with a zero denominator is `None`.
pub fn ari(a: &Labeling, b: &Labeling) -> Result<Option<f64>> {
    if a.n() < 2 {
        return Err(Error::Degenerate("ARI needs at least two points".into()));
    }
    let table = contingency(a, b)?;
    let index: f64 = table
        .nonzero()
        .iter()
        .map(|&(_, _, v)| choose2(v) as f64)
        .sum();
    let sum_rows: f64 = table
        .row_marginals()
        .iter()
        .map(|&v| choose2(v) as f64)
        .sum();
    let sum_cols: f64 = table
        .col_marginals()
        .iter()
        .map(|&v| choose2(v) as f64)
        .sum();
    let pairs = choose2(table.total()) as f64;
    let expected = sum_rows * sum_cols / pairs;
    let max = 0.5 * (sum_rows + sum_cols);
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(a.same_partition(b).then_some(1.0));
    }
    Ok(Some((index - expected) / denom))
}
