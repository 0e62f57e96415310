use std::time::Instant;

use serde::Serialize;

use super::{build_ensemble, select_anmi, select_best_match_against, Grid};
use crate::algorithms::{AlgorithmParams, HyperparamConfig, Linkage};
use crate::consensus::hamming_matrix;
use crate::dataset::synth_blobs;
use crate::error::{Error, Result};

/// Timing and operation counts of both strategies for one problem size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub strategy1_seconds: f64,
    pub strategy2_seconds: f64,
    pub nmi_evaluations: u64,
    pub hamming_pairs: u64,
}

/// Times both strategies on k-means ensembles over four Gaussian blobs for
/// every combination of `n_list` and `m_list`.
pub fn complexity_bench(n_list: &[usize], m_list: &[usize], seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        if n < 4 {
            return Err(Error::Parameter(format!(
                "bench sizes need n >= 4, got {n}"
            )));
        }
        let centers = vec![
            vec![0.0, 0.0],
            vec![6.0, 0.0],
            vec![0.0, 6.0],
            vec![6.0, 6.0],
        ];
        let (ds, _) = synth_blobs(&centers, n.div_ceil(4), 1.0, seed)?;
        let ds = crate::dataset::Dataset::from_flat(n, 2, ds.as_flat()[..2 * n].to_vec())?;
        for &m in m_list {
            if m < 2 {
                return Err(Error::Parameter(format!(
                    "bench sizes need m >= 2, got {m}"
                )));
            }
            let configs = (0..m)
                .map(|i| {
                    HyperparamConfig::new(AlgorithmParams::Kmeans {
                        k: 2 + i % 6,
                        seed: seed + i as u64,
                        max_iter: 100,
                    })
                })
                .collect();
            let ens = build_ensemble(&ds, &Grid::from_configs(configs)?)?;

            let t = Instant::now();
            let s1 = select_anmi(&ens)?;
            let strategy1_seconds = t.elapsed().as_secs_f64();

            let t = Instant::now();
            let matrix = hamming_matrix(ens.labelings())?;
            let consensus =
                crate::algorithms::agglomerative(&matrix.to_distances(), 4, Linkage::Average)?;
            select_best_match_against(&ens, consensus, Some(4), Some(Linkage::Average))?;
            let strategy2_seconds = t.elapsed().as_secs_f64();

            rows.push(BenchRow {
                n,
                m,
                strategy1_seconds,
                strategy2_seconds,
                nmi_evaluations: s1.nmi_evaluations,
                hamming_pairs: matrix.pairs_evaluated(),
            });
        }
    }
    Ok(rows)
}

pub fn render_bench(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:>6} {:>4} {:>14} {:>14} {:>10} {:>12}\n",
        "n", "m", "strategy1_s", "strategy2_s", "nmi_evals", "hamming_pairs"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>6} {:>4} {:>14.6} {:>14.6} {:>10} {:>12}\n",
            r.n, r.m, r.strategy1_seconds, r.strategy2_seconds, r.nmi_evaluations, r.hamming_pairs
        ));
    }
    out
}
