use rayon::prelude::*;

use crate::dataset::{euclidean, Dataset};
use crate::error::{Error, Result};
use crate::labeling::Labeling;

const TOLERANCE: f64 = 1e-3;

fn ascend(ds: &Dataset, start: &[f64], bandwidth: f64, max_iter: usize) -> Vec<f64> {
    let d = ds.d();
    let mut x = start.to_vec();
    let mut next = vec![0.0; d];
    for _ in 0..max_iter {
        next.iter_mut().for_each(|v| *v = 0.0);
        let mut count = 0usize;
        for p in ds.points() {
            if euclidean(p, &x) <= bandwidth {
                count += 1;
                for (a, v) in next.iter_mut().zip(p) {
                    *a += v;
                }
            }
        }
        if count == 0 {
            break;
        }
        next.iter_mut().for_each(|v| *v /= count as f64);
        let shift = euclidean(&next, &x);
        std::mem::swap(&mut x, &mut next);
        if shift < TOLERANCE * bandwidth {
            break;
        }
    }
    x
}

/// Flat-kernel mean shift started from every point.
///
/// Each point moves to the mean of the points within `bandwidth` until the
/// step is below `1e-3 * bandwidth` or `max_iter` steps were taken.
/// Converged positions are ranked by how many points their window holds;
/// a position becomes a mode unless it lies within `bandwidth` of a
/// better-ranked mode. Points take the label of the mode nearest to their
/// converged position.
pub fn meanshift(ds: &Dataset, bandwidth: f64, max_iter: usize) -> Result<Labeling> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::Parameter(format!(
            "meanshift: bandwidth must be > 0, got {bandwidth}"
        )));
    }
    let n = ds.n();
    let converged: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| ascend(ds, ds.point(i), bandwidth, max_iter))
        .collect();
    let support: Vec<usize> = converged
        .par_iter()
        .map(|x| ds.points().filter(|p| euclidean(p, x) <= bandwidth).count())
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| support[b].cmp(&support[a]).then(a.cmp(&b)));
    let mut modes: Vec<&[f64]> = Vec::new();
    for i in order {
        let x = converged[i].as_slice();
        if modes.iter().all(|m| euclidean(m, x) >= bandwidth) {
            modes.push(x);
        }
    }

    let labels = converged
        .iter()
        .map(|x| {
            let mut best = (f64::INFINITY, 0u32);
            for (c, m) in modes.iter().enumerate() {
                let dist = euclidean(m, x);
                if dist < best.0 {
                    best = (dist, c as u32);
                }
            }
            best.1
        })
        .collect();
    Ok(Labeling::new(labels).canonicalize())
}
