use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::labeling::Labeling;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct Lloyd<'a> {
    ds: &'a Dataset,
    k: usize,
    centroids: Vec<f64>,
}

impl Lloyd<'_> {
    fn centroid(&self, c: usize) -> &[f64] {
        let d = self.ds.d();
        &self.centroids[c * d..(c + 1) * d]
    }

    /// Nearest centroid per point, lowest index on ties, followed by
    /// empty-cluster repair.
    fn assign(&self) -> Vec<usize> {
        let mut assignment: Vec<usize> = self
            .ds
            .points()
            .map(|p| {
                let mut best = (f64::INFINITY, 0);
                for c in 0..self.k {
                    let dist = sq_dist(p, self.centroid(c));
                    if dist < best.0 {
                        best = (dist, c);
                    }
                }
                best.1
            })
            .collect();
        self.repair(&mut assignment);
        assignment
    }

    /// Moves the point farthest from its centroid into each empty cluster.
    fn repair(&self, assignment: &mut [usize]) {
        let mut sizes = vec![0usize; self.k];
        for &c in assignment.iter() {
            sizes[c] += 1;
        }
        for empty in 0..self.k {
            if sizes[empty] > 0 {
                continue;
            }
            let mut far: Option<(f64, usize)> = None;
            for (i, p) in self.ds.points().enumerate() {
                let c = assignment[i];
                if sizes[c] < 2 {
                    continue;
                }
                let dist = sq_dist(p, self.centroid(c));
                if far.is_none_or(|(best, _)| dist > best) {
                    far = Some((dist, i));
                }
            }
            let (_, i) = far.expect("k <= n guarantees a cluster with two members");
            sizes[assignment[i]] -= 1;
            assignment[i] = empty;
            sizes[empty] = 1;
        }
    }

    fn update(&mut self, assignment: &[usize]) {
        let d = self.ds.d();
        let mut sums = vec![0.0; self.k * d];
        let mut counts = vec![0usize; self.k];
        for (p, &c) in self.ds.points().zip(assignment) {
            counts[c] += 1;
            for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..self.k {
            for j in 0..d {
                self.centroids[c * d + j] = sums[c * d + j] / counts[c] as f64;
            }
        }
    }

    fn objective(&self, assignment: &[usize]) -> f64 {
        self.ds
            .points()
            .zip(assignment)
            .map(|(p, &c)| sq_dist(p, self.centroid(c)))
            .sum()
    }
}

fn run(ds: &Dataset, k: usize, seed: u64, max_iter: usize) -> Result<(Labeling, Vec<f64>)> {
    let n = ds.n();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "kmeans: need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut init: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();
    init.sort_unstable();
    let mut state = Lloyd {
        ds,
        k,
        centroids: init
            .iter()
            .flat_map(|&i| ds.point(i).iter().copied())
            .collect(),
    };

    let mut assignment = state.assign();
    state.update(&assignment);
    let mut trace = vec![state.objective(&assignment)];
    for _ in 1..max_iter {
        let next = state.assign();
        if next == assignment {
            break;
        }
        assignment = next;
        state.update(&assignment);
        let obj = state.objective(&assignment);
        debug_assert!(
            obj <= trace[trace.len() - 1] * (1.0 + 1e-12) + 1e-12,
            "kmeans objective increased"
        );
        trace.push(obj);
    }
    let labels = assignment.into_iter().map(|c| c as u32).collect::<Vec<_>>();
    Ok((Labeling::new(labels).canonicalize(), trace))
}

/// Lloyd's algorithm from `k` distinct seeded random points.
///
/// Every returned labeling has exactly `k` non-empty clusters: an empty
/// cluster receives the point farthest from its own centroid.
pub fn kmeans(ds: &Dataset, k: usize, seed: u64, max_iter: usize) -> Result<Labeling> {
    run(ds, k, seed, max_iter).map(|(l, _)| l)
}

/// Sum of squared distances to the assigned centroid after each update.
pub fn kmeans_objective_trace(
    ds: &Dataset,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    run(ds, k, seed, max_iter).map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth_blobs;

    #[test]
    fn recovers_two_blobs() {
        let (ds, truth) = synth_blobs(&[vec![0.0, 0.0], vec![10.0, 10.0]], 5, 0.01, 3).unwrap();
        for seed in 0..10 {
            let l = kmeans(&ds, 2, seed, 100).unwrap();
            assert!(l.same_partition(&truth), "seed {seed}");
        }
    }

    #[test]
    fn trivial_k() {
        let (ds, _) = synth_blobs(&[vec![0.0], vec![5.0]], 4, 1.0, 1).unwrap();
        assert_eq!(kmeans(&ds, 1, 0, 10).unwrap().k(), 1);
        let all = kmeans(&ds, 8, 0, 10).unwrap();
        assert!(all.same_partition(&Labeling::singletons(8)));
        assert!(matches!(kmeans(&ds, 9, 0, 10), Err(Error::Parameter(_))));
    }

    #[test]
    fn exactly_k_clusters_with_duplicates() {
        // many coincident points force empty clusters during iteration
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![(i % 2) as f64, 0.0]).collect();
        let ds = Dataset::from_rows(&rows).unwrap();
        for seed in 0..20 {
            assert_eq!(kmeans(&ds, 4, seed, 50).unwrap().k(), 4);
        }
    }

    #[test]
    fn deterministic_and_monotone() {
        let (ds, _) = synth_blobs(
            &[vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 3.0]],
            30,
            1.2,
            8,
        )
        .unwrap();
        assert_eq!(
            kmeans(&ds, 3, 5, 100).unwrap(),
            kmeans(&ds, 3, 5, 100).unwrap()
        );
        let trace = kmeans_objective_trace(&ds, 5, 2, 100).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{trace:?}");
    }
}
