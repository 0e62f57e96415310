use std::collections::VecDeque;

use crate::dataset::DistanceMatrix;
use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// Density-based clustering over a precomputed distance matrix.
///
/// A point is core when at least `min_points` points, itself included, lie
/// within distance `eps`. Clusters are the connected components of core
/// points under the `eps` relation. A non-core point joins the cluster of its
/// nearest core point within `eps` (exact ties go to the lower index), so the
/// result does not depend on row order. Points reached by no core point share
/// a single noise label, numbered after the regular clusters before
/// canonicalization.
pub fn dbscan(dist: &DistanceMatrix, eps: f64, min_points: usize) -> Result<Labeling> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Parameter(format!(
            "dbscan: eps must be > 0, got {eps}"
        )));
    }
    if min_points == 0 {
        return Err(Error::Parameter("dbscan: min_points must be >= 1".into()));
    }
    let n = dist.n();
    let core: Vec<bool> = (0..n)
        .map(|i| dist.row(i).iter().filter(|&&d| d <= eps).count() >= min_points)
        .collect();

    let mut labels: Vec<Option<u32>> = vec![None; n];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if labels[seed].is_some() || !core[seed] {
            continue;
        }
        labels[seed] = Some(next);
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            for (q, &d) in dist.row(p).iter().enumerate() {
                if core[q] && d <= eps && labels[q].is_none() {
                    labels[q] = Some(next);
                    queue.push_back(q);
                }
            }
        }
        next += 1;
    }
    let noise = next;
    let raw = (0..n)
        .map(|q| {
            if core[q] {
                return labels[q].unwrap_or(noise);
            }
            let mut best: Option<(f64, usize)> = None;
            for (p, &d) in dist.row(q).iter().enumerate() {
                if core[p] && d <= eps && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, p));
                }
            }
            best.and_then(|(_, p)| labels[p]).unwrap_or(noise)
        })
        .collect();
    Ok(Labeling::new(raw).canonicalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{pairwise_distances, synth_blobs, Dataset};

    #[test]
    fn two_blobs_no_noise() {
        let (ds, truth) = synth_blobs(&[vec![0.0, 0.0], vec![10.0, 0.0]], 6, 0.01, 2).unwrap();
        let l = dbscan(&pairwise_distances(&ds), 1.0, 3).unwrap();
        assert!(l.same_partition(&truth));
    }

    #[test]
    fn degenerate_radii() {
        let (ds, _) = synth_blobs(&[vec![0.0, 0.0], vec![10.0, 0.0]], 6, 0.5, 2).unwrap();
        let dm = pairwise_distances(&ds);
        let all_noise = dbscan(&dm, 1e-6, 2).unwrap();
        assert_eq!(all_noise.k(), 1);
        let one = dbscan(&dm, 1e6, 1).unwrap();
        assert_eq!(one.k(), 1);
        // with min_points = 1 every point is core: tiny radius gives singletons
        assert_eq!(dbscan(&dm, 1e-6, 1).unwrap().k(), 12);
    }

    #[test]
    fn noise_shares_one_label() {
        let ds = Dataset::from_rows(&[
            vec![0.0],
            vec![0.1],
            vec![0.2],
            vec![5.0],
            vec![9.0],
            vec![9.1],
            vec![9.2],
            vec![20.0],
        ])
        .unwrap();
        let l = dbscan(&pairwise_distances(&ds), 0.15, 2).unwrap();
        assert_eq!(l.labels(), &[0, 0, 0, 1, 2, 2, 2, 1]);
    }

    #[test]
    fn self_counts_toward_min_points() {
        // two points 1 apart: each has exactly two neighbours including itself
        let ds = Dataset::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let dm = pairwise_distances(&ds);
        assert_eq!(dbscan(&dm, 1.0, 2).unwrap().k(), 1);
        let sep = dbscan(&dm, 1.0, 3).unwrap();
        assert_eq!(sep.labels(), &[0, 0]); // both noise, one shared label
    }
}
