mod common;

use common::*;
use consensus_hpo::algorithms::{agglomerative, Linkage};
use consensus_hpo::dataset::{pairwise_distances, Dataset, DistanceMatrix};
use consensus_hpo::labeling::{contingency, pair_counts, Labeling};
use consensus_hpo::metrics::{anmi, ari, jaccard, nmi, rand_index};
use rand::Rng;

/// Table rows and columns follow the order in which labels first occur.
fn by_first_appearance(labels: &[u32]) -> Vec<Vec<usize>> {
    let mut gs = groups(labels);
    gs.sort_by_key(|g| g[0]);
    gs
}

#[test]
fn pair_counts_match_enumeration() {
    let mut r = rng(10);
    for _ in 0..300 {
        let n = r.random_range(2..=12);
        let a = random_labels(&mut r, n, 4);
        let b = random_labels(&mut r, n, 4);
        let p = pair_counts(&a, &b).unwrap();
        let want = enumerate_pairs(a.labels(), b.labels());
        assert_eq!(
            (p.n11, p.n00, p.n10, p.n01),
            (
                want.together_both,
                want.apart_both,
                want.only_a,
                want.only_b
            )
        );
        let t = contingency(&a, &b).unwrap();
        for (s, ga) in by_first_appearance(a.labels()).iter().enumerate() {
            for (u, gb) in by_first_appearance(b.labels()).iter().enumerate() {
                let cell = ga.iter().filter(|i| gb.contains(i)).count() as u64;
                assert_eq!(t.get(s, u), cell);
            }
        }
    }
}

#[test]
fn external_metrics_match_enumeration() {
    let mut r = rng(11);
    for _ in 0..300 {
        let n = r.random_range(2..=12);
        let a = random_labels(&mut r, n, 5);
        let b = random_labels(&mut r, n, 3);
        let (la, lb) = (a.labels(), b.labels());
        assert!((nmi(&a, &b).unwrap() - nmi_oracle(la, lb)).abs() < 1e-12);
        assert!((rand_index(&a, &b).unwrap() - rand_oracle(la, lb)).abs() < 1e-12);
        assert!(close(
            jaccard(&a, &b).unwrap(),
            jaccard_oracle(la, lb),
            1e-12
        ));
        assert!(close(ari(&a, &b).unwrap(), ari_oracle(la, lb), 1e-12));
    }
}

#[test]
fn anmi_is_mean_of_oracle_nmi() {
    let mut r = rng(12);
    for _ in 0..50 {
        let c = random_labels(&mut r, 9, 3);
        let ens: Vec<Labeling> = (0..4).map(|_| random_labels(&mut r, 9, 4)).collect();
        let want = ens
            .iter()
            .map(|e| nmi_oracle(c.labels(), e.labels()))
            .sum::<f64>()
            / 4.0;
        assert!((anmi(&c, &ens).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn degenerate_pairs() {
    let one = Labeling::constant(5);
    let all = Labeling::singletons(5);
    assert_eq!(ari(&one, &one).unwrap(), Some(1.0));
    assert_eq!(ari(&all, &all).unwrap(), Some(1.0));
    assert_eq!(
        ari_oracle(one.labels(), all.labels()),
        ari(&one, &all).unwrap()
    );
    assert_eq!(jaccard(&all, &all).unwrap(), None);
    assert_eq!(nmi(&one, &all).unwrap(), 0.0);
}

#[test]
fn pairwise_distances_match_direct_formula() {
    let mut r = rng(13);
    let pts = random_points(&mut r, 17, 4);
    let dm = pairwise_distances(&Dataset::from_rows(&pts).unwrap());
    for i in 0..17 {
        for j in 0..17 {
            assert!((dm.get(i, j) - dist(&pts[i], &pts[j])).abs() < 1e-12);
        }
    }
}

/// Textbook agglomeration: recompute every cluster-to-cluster linkage from
/// the raw distances on each step.
fn naive_agglomerative(dm: &DistanceMatrix, k: usize, linkage: Linkage) -> Labeling {
    let n = dm.n();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let link = |a: &[usize], b: &[usize]| -> f64 {
        let ds = a.iter().flat_map(|&i| b.iter().map(move |&j| dm.get(i, j)));
        match linkage {
            Linkage::Single => ds.fold(f64::INFINITY, f64::min),
            Linkage::Complete => ds.fold(0.0, f64::max),
            Linkage::Average => ds.sum::<f64>() / (a.len() * b.len()) as f64,
        }
    };
    while clusters.len() > k {
        let mut best = (f64::INFINITY, 0, 0);
        for x in 0..clusters.len() {
            for y in (x + 1)..clusters.len() {
                let d = link(&clusters[x], &clusters[y]);
                if d < best.0 {
                    best = (d, x, y);
                }
            }
        }
        let merged = clusters.remove(best.2);
        clusters[best.1].extend(merged);
    }
    let mut labels = vec![0u32; n];
    for (c, members) in clusters.iter().enumerate() {
        for &i in members {
            labels[i] = c as u32;
        }
    }
    Labeling::new(labels)
}

#[test]
fn agglomerative_matches_naive_recomputation() {
    let mut r = rng(14);
    for _ in 0..40 {
        let n = r.random_range(2..=18);
        let pts = random_points(&mut r, n, 2);
        let dm = pairwise_distances(&Dataset::from_rows(&pts).unwrap());
        for linkage in [Linkage::Single, Linkage::Average, Linkage::Complete] {
            for k in 1..=n {
                let got = agglomerative(&dm, k, linkage).unwrap();
                assert!(
                    got.same_partition(&naive_agglomerative(&dm, k, linkage)),
                    "{linkage:?} k={k}"
                );
            }
        }
    }
}
