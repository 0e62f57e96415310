//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here works from point lists and explicit loops, never from the
//! library's contingency tables or distance matrices.
#![allow(dead_code)]

use std::collections::BTreeMap;

use consensus_hpo::labeling::Labeling;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labels drawn uniformly from `0..k_max`, with arbitrary (non-contiguous)
/// label values.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k_max: u32) -> Labeling {
    let offset = rng.random_range(0..5u32) * 7;
    Labeling::new(
        (0..n)
            .map(|_| offset + 3 * rng.random_range(0..k_max))
            .collect(),
    )
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect()
}

pub fn groups(labels: &[u32]) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        map.entry(l).or_default().push(i);
    }
    map.into_values().collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pairs {
    pub together_both: u64,
    pub apart_both: u64,
    pub only_a: u64,
    pub only_b: u64,
}

pub fn enumerate_pairs(a: &[u32], b: &[u32]) -> Pairs {
    let mut p = Pairs {
        together_both: 0,
        apart_both: 0,
        only_a: 0,
        only_b: 0,
    };
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => p.together_both += 1,
                (false, false) => p.apart_both += 1,
                (true, false) => p.only_a += 1,
                (false, true) => p.only_b += 1,
            }
        }
    }
    p
}

pub fn rand_oracle(a: &[u32], b: &[u32]) -> f64 {
    let p = enumerate_pairs(a, b);
    let total = p.together_both + p.apart_both + p.only_a + p.only_b;
    (p.together_both + p.apart_both) as f64 / total as f64
}

pub fn jaccard_oracle(a: &[u32], b: &[u32]) -> Option<f64> {
    let p = enumerate_pairs(a, b);
    let den = p.together_both + p.only_a + p.only_b;
    (den > 0).then(|| p.together_both as f64 / den as f64)
}

pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// Hubert–Arabie ARI written in the pair-count form.
pub fn ari_oracle(a: &[u32], b: &[u32]) -> Option<f64> {
    let p = enumerate_pairs(a, b);
    let (n11, n00, n10, n01) = (
        p.together_both as f64,
        p.apart_both as f64,
        p.only_a as f64,
        p.only_b as f64,
    );
    let den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if den == 0.0 {
        return same_partition(a, b).then_some(1.0);
    }
    Some(2.0 * (n00 * n11 - n01 * n10) / den)
}

fn entropy_of(labels: &[u32]) -> f64 {
    let n = labels.len() as f64;
    groups(labels)
        .iter()
        .map(|g| {
            let p = g.len() as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// NMI by scanning every (cluster of a, cluster of b) cell.
pub fn nmi_oracle(a: &[u32], b: &[u32]) -> f64 {
    let n = a.len() as f64;
    let (ga, gb) = (groups(a), groups(b));
    if ga.len() == 1 || gb.len() == 1 {
        return 0.0;
    }
    let mut mi = 0.0;
    for s in &ga {
        for t in &gb {
            let joint = s.iter().filter(|i| t.contains(i)).count() as f64;
            if joint > 0.0 {
                mi += joint / n * (n * joint / (s.len() as f64 * t.len() as f64)).ln();
            }
        }
    }
    mi / (entropy_of(a) * entropy_of(b)).sqrt()
}

fn centroid(points: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let d = points[0].len();
    let mut c = vec![0.0; d];
    for &i in members {
        for j in 0..d {
            c[j] += points[i][j];
        }
    }
    c.iter().map(|v| v / members.len() as f64).collect()
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    dist(a, b).powi(2)
}

pub fn chi_oracle(points: &[Vec<f64>], labels: &[u32], weighted: bool) -> Option<f64> {
    let gs = groups(labels);
    let (n, k) = (points.len(), gs.len());
    if k < 2 || k >= n {
        return None;
    }
    let all: Vec<usize> = (0..n).collect();
    let global = centroid(points, &all);
    let mut between = 0.0;
    let mut within = 0.0;
    for g in &gs {
        let c = centroid(points, g);
        let w = if weighted { g.len() as f64 } else { 1.0 };
        between += w * sq(&c, &global);
        within += g.iter().map(|&i| sq(&points[i], &c)).sum::<f64>();
    }
    let ratio = (between / (k - 1) as f64) / (within / (n - k) as f64);
    if within == 0.0 {
        return (between > 0.0).then_some(f64::INFINITY);
    }
    Some(ratio)
}

fn diameter(points: &[Vec<f64>], g: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for &i in g {
        for &j in g {
            best = best.max(dist(&points[i], &points[j]));
        }
    }
    best
}

fn gap(points: &[Vec<f64>], g: &[usize], h: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for &i in g {
        for &j in h {
            best = best.min(dist(&points[i], &points[j]));
        }
    }
    best
}

pub fn dunn1_oracle(points: &[Vec<f64>], labels: &[u32]) -> Option<f64> {
    let gs = groups(labels);
    if gs.len() < 2 {
        return None;
    }
    let mut min_gap = f64::INFINITY;
    for x in 0..gs.len() {
        for y in 0..gs.len() {
            if x != y {
                min_gap = min_gap.min(gap(points, &gs[x], &gs[y]));
            }
        }
    }
    let max_diam = gs.iter().map(|g| diameter(points, g)).fold(0.0, f64::max);
    (max_diam > 0.0).then(|| min_gap / max_diam)
}

pub fn dunn2_oracle(points: &[Vec<f64>], labels: &[u32]) -> Option<f64> {
    let gs = groups(labels);
    let k = gs.len();
    if k < 2 {
        return None;
    }
    let mut gaps = Vec::new();
    for x in 0..k {
        for y in (x + 1)..k {
            gaps.push(gap(points, &gs[x], &gs[y]));
        }
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let mean_diam = gs.iter().map(|g| diameter(points, g)).sum::<f64>() / k as f64;
    (mean_diam > 0.0).then(|| mean_gap / mean_diam)
}

/// `rousseeuw = false` divides the own-cluster sum by `|C|`, otherwise by
/// `|C| - 1` with singletons scoring 0.
pub fn silhouette_oracle(points: &[Vec<f64>], labels: &[u32], rousseeuw: bool) -> Option<f64> {
    let gs = groups(labels);
    if gs.len() < 2 {
        return None;
    }
    let mean_to = |i: usize, g: &[usize], den: usize| {
        g.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>() / den as f64
    };
    let mut total = 0.0;
    for (gi, g) in gs.iter().enumerate() {
        for &i in g {
            let a = match (rousseeuw, g.len()) {
                (true, 1) => continue,
                (true, s) => mean_to(i, g, s - 1),
                (false, s) => mean_to(i, g, s),
            };
            let b = gs
                .iter()
                .enumerate()
                .filter(|&(hi, _)| hi != gi)
                .map(|(_, h)| mean_to(i, h, h.len()))
                .fold(f64::INFINITY, f64::min);
            if a.max(b) > 0.0 {
                total += (b - a) / a.max(b);
            }
        }
    }
    Some(total / points.len() as f64)
}

/// Relative closeness for values that may be infinite.
pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) if x.is_infinite() || y.is_infinite() => x == y,
        (Some(x), Some(y)) => (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0),
        _ => false,
    }
}
