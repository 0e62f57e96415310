//! Internal validity indices computed from the data and one clustering.
//!
//! All of them are undefined (`None`) for a single-cluster labeling.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, DistanceMatrix};
use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// Between-cluster term of the Caliński–Harabasz index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiForm {
    /// Unweighted sum of squared barycenter offsets.
    #[default]
    Unweighted,
    /// Offsets weighted by cluster size (the original definition).
    Weighted,
}

/// Normalization of the within-cluster mean distance `a(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SilhouetteForm {
    /// Divide by `|C|`, self-distance included. Singletons score 1 when
    /// their nearest cluster is at positive distance.
    #[default]
    ClusterSize,
    /// Divide by `|C| - 1`; singletons score 0.
    Rousseeuw,
}

fn check_len(n: usize, c: &Labeling) -> Result<()> {
    if c.n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: c.n(),
        });
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn chi(ds: &Dataset, c: &Labeling) -> Result<Option<f64>> {
    chi_with(ds, c, ChiForm::default())
}

/// Ratio of between- to within-cluster dispersion. Undefined unless
/// `2 <= k <= n - 1`; zero within-cluster dispersion with distinct
/// barycenters gives `+inf`.
pub fn chi_with(ds: &Dataset, c: &Labeling, form: ChiForm) -> Result<Option<f64>> {
    check_len(ds.n(), c)?;
    let (idx, k) = c.canonical_indices();
    let (n, d) = (ds.n(), ds.d());
    if k < 2 || k >= n {
        return Ok(None);
    }
    let mut centers = vec![0.0; k * d];
    let mut sizes = vec![0usize; k];
    let mut global = vec![0.0; d];
    for (p, &ci) in ds.points().zip(&idx) {
        let ci = ci as usize;
        sizes[ci] += 1;
        for j in 0..d {
            centers[ci * d + j] += p[j];
            global[j] += p[j];
        }
    }
    for ci in 0..k {
        for j in 0..d {
            centers[ci * d + j] /= sizes[ci] as f64;
        }
    }
    global.iter_mut().for_each(|g| *g /= n as f64);

    let between: f64 = (0..k)
        .map(|ci| {
            let w = match form {
                ChiForm::Unweighted => 1.0,
                ChiForm::Weighted => sizes[ci] as f64,
            };
            w * sq_dist(&centers[ci * d..(ci + 1) * d], &global)
        })
        .sum::<f64>()
        / (k - 1) as f64;
    let within: f64 = ds
        .points()
        .zip(&idx)
        .map(|(p, &ci)| sq_dist(p, &centers[ci as usize * d..(ci as usize + 1) * d]))
        .sum::<f64>()
        / (n - k) as f64;
    Ok(match (between, within) {
        (b, w) if w > 0.0 => Some(b / w),
        (b, _) if b > 0.0 => Some(f64::INFINITY),
        _ => None,
    })
}

struct Separation {
    k: usize,
    /// Row-major `k × k` minimum distance between clusters.
    gap: Vec<f64>,
    diameter: Vec<f64>,
}

fn separation(dist: &DistanceMatrix, c: &Labeling) -> Result<Separation> {
    check_len(dist.n(), c)?;
    let (idx, k) = c.canonical_indices();
    let mut gap = vec![f64::INFINITY; k * k];
    let mut diameter = vec![0.0f64; k];
    for i in 0..dist.n() {
        let ci = idx[i] as usize;
        for j in (i + 1)..dist.n() {
            let cj = idx[j] as usize;
            let d = dist.get(i, j);
            if ci == cj {
                diameter[ci] = diameter[ci].max(d);
            } else {
                let (lo, hi) = (ci.min(cj), ci.max(cj));
                let slot = &mut gap[lo * k + hi];
                *slot = slot.min(d);
            }
        }
    }
    Ok(Separation { k, gap, diameter })
}

/// Smallest inter-cluster distance over the largest cluster diameter.
pub fn dunn1(dist: &DistanceMatrix, c: &Labeling) -> Result<Option<f64>> {
    let s = separation(dist, c)?;
    if s.k < 2 {
        return Ok(None);
    }
    let mut min_gap = f64::INFINITY;
    for a in 0..s.k {
        for b in (a + 1)..s.k {
            min_gap = min_gap.min(s.gap[a * s.k + b]);
        }
    }
    let max_diam = s.diameter.iter().copied().fold(0.0, f64::max);
    Ok((max_diam > 0.0).then(|| min_gap / max_diam))
}

/// Mean inter-cluster distance over unordered cluster pairs, divided by the
/// mean cluster diameter.
pub fn dunn2(dist: &DistanceMatrix, c: &Labeling) -> Result<Option<f64>> {
    let s = separation(dist, c)?;
    if s.k < 2 {
        return Ok(None);
    }
    let mut gap_sum = 0.0;
    for a in 0..s.k {
        for b in (a + 1)..s.k {
            gap_sum += s.gap[a * s.k + b];
        }
    }
    let pairs = (s.k * (s.k - 1) / 2) as f64;
    let mean_diam = s.diameter.iter().sum::<f64>() / s.k as f64;
    Ok((mean_diam > 0.0).then(|| (gap_sum / pairs) / mean_diam))
}

pub fn silhouette(dist: &DistanceMatrix, c: &Labeling) -> Result<Option<f64>> {
    silhouette_with(dist, c, SilhouetteForm::default())
}

/// Mean over points of `(b - a) / max(a, b)`; a point with `a = b = 0`
/// contributes 0.
pub fn silhouette_with(
    dist: &DistanceMatrix,
    c: &Labeling,
    form: SilhouetteForm,
) -> Result<Option<f64>> {
    check_len(dist.n(), c)?;
    let (idx, k) = c.canonical_indices();
    if k < 2 {
        return Ok(None);
    }
    let mut sizes = vec![0usize; k];
    for &ci in &idx {
        sizes[ci as usize] += 1;
    }
    let n = dist.n();
    let mut sums = vec![0.0; k];
    let mut total = 0.0;
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (j, &d) in dist.row(i).iter().enumerate() {
            sums[idx[j] as usize] += d;
        }
        let own = idx[i] as usize;
        let a = match form {
            SilhouetteForm::ClusterSize => sums[own] / sizes[own] as f64,
            SilhouetteForm::Rousseeuw if sizes[own] == 1 => continue,
            SilhouetteForm::Rousseeuw => sums[own] / (sizes[own] - 1) as f64,
        };
        let b = (0..k)
            .filter(|&ci| ci != own)
            .map(|ci| sums[ci] / sizes[ci] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(Some(total / n as f64))
}
