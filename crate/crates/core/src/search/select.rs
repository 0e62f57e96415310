use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Ensemble;
use crate::algorithms::{HyperparamConfig, Linkage};
use crate::consensus::consensus_clustering;
use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::metrics::nmi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Leave-one-out ANMI against the rest of the ensemble.
    AnmiMax,
    /// NMI against the consensus clustering.
    BestMatch,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::AnmiMax => "anmi_max",
            Strategy::BestMatch => "best_match",
        })
    }
}

/// Symmetric matrix of NMI between all ensemble members.
#[derive(Debug, Clone, PartialEq)]
pub struct NmiMatrix {
    m: usize,
    values: Vec<f64>,
    evaluations: u64,
}

impl NmiMatrix {
    /// Computes each unordered pair once; the diagonal is not evaluated.
    pub fn compute(labelings: &[Labeling]) -> Result<NmiMatrix> {
        let m = labelings.len();
        let pairs: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .collect();
        let scored: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| nmi(&labelings[i], &labelings[j]))
            .collect::<Result<_>>()?;
        let mut values = vec![0.0; m * m];
        for (&(i, j), &v) in pairs.iter().zip(&scored) {
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
        Ok(NmiMatrix {
            m,
            values,
            evaluations: scored.len() as u64,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    /// Number of NMI evaluations performed.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Mean NMI of member `i` against every other member.
    pub fn leave_one_out_anmi(&self, i: usize) -> f64 {
        let total: f64 = (0..self.m)
            .filter(|&j| j != i)
            .map(|j| self.get(i, j))
            .sum();
        total / (self.m - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreEntry {
    pub index: usize,
    pub config: String,
    pub score: f64,
}

/// Outcome of one selection strategy over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub strategy: Strategy,
    pub chosen_index: usize,
    pub chosen_config: HyperparamConfig,
    pub chosen_labeling: Labeling,
    pub score: f64,
    /// Members whose score equals the maximum, in grid order; the first one
    /// is chosen.
    pub ties: Vec<usize>,
    pub full_scores: Vec<ScoreEntry>,
    pub k_star: Option<usize>,
    pub linkage: Option<Linkage>,
    pub consensus: Option<Labeling>,
    pub nmi_evaluations: u64,
    pub dataset_fingerprint: String,
    pub seeds: Vec<u64>,
}

impl SelectionResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn argmax(scores: &[f64]) -> (usize, Vec<usize>) {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let ties = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == scores[best])
        .map(|(i, _)| i)
        .collect();
    (best, ties)
}

fn finish(
    ens: &Ensemble,
    strategy: Strategy,
    scores: Vec<f64>,
    evaluations: u64,
    consensus: Option<(Labeling, Option<usize>, Option<Linkage>)>,
) -> SelectionResult {
    let (best, ties) = argmax(&scores);
    let full_scores = scores
        .iter()
        .enumerate()
        .map(|(i, &score)| ScoreEntry {
            index: i,
            config: ens.configs()[i].display_name.clone(),
            score,
        })
        .collect();
    let (consensus, k_star, linkage) = match consensus {
        Some((c, k, l)) => (Some(c.canonicalize()), k, l),
        None => (None, None, None),
    };
    SelectionResult {
        strategy,
        chosen_index: best,
        chosen_config: ens.configs()[best].clone(),
        chosen_labeling: ens.labelings()[best].canonicalize(),
        score: scores[best],
        ties,
        full_scores,
        k_star,
        linkage,
        consensus,
        nmi_evaluations: evaluations,
        dataset_fingerprint: ens.dataset_fingerprint().to_owned(),
        seeds: ens.seeds(),
    }
}

/// Picks the member with the highest mean NMI against all other members.
pub fn select_anmi(ens: &Ensemble) -> Result<SelectionResult> {
    if ens.len() < 2 {
        return Err(Error::Degenerate(format!(
            "ANMI selection needs at least 2 ensemble members, got {}",
            ens.len()
        )));
    }
    let matrix = NmiMatrix::compute(ens.labelings())?;
    let scores = (0..ens.len())
        .map(|i| matrix.leave_one_out_anmi(i))
        .collect();
    Ok(finish(
        ens,
        Strategy::AnmiMax,
        scores,
        matrix.evaluations(),
        None,
    ))
}

/// Builds the consensus with `k_star` clusters and picks the member that
/// matches it best by NMI.
pub fn select_best_match(
    ens: &Ensemble,
    k_star: usize,
    linkage: Linkage,
) -> Result<SelectionResult> {
    if ens.is_empty() {
        return Err(Error::Degenerate("empty ensemble".into()));
    }
    let consensus = consensus_clustering(ens.labelings(), k_star, linkage)?;
    select_best_match_against(ens, consensus, Some(k_star), Some(linkage))
}

/// Best-match selection against a consensus computed elsewhere.
pub fn select_best_match_against(
    ens: &Ensemble,
    consensus: Labeling,
    k_star: Option<usize>,
    linkage: Option<Linkage>,
) -> Result<SelectionResult> {
    if ens.is_empty() {
        return Err(Error::Degenerate("empty ensemble".into()));
    }
    let scores: Vec<f64> = ens
        .labelings()
        .par_iter()
        .map(|l| nmi(l, &consensus))
        .collect::<Result<_>>()?;
    let evaluations = scores.len() as u64;
    Ok(finish(
        ens,
        Strategy::BestMatch,
        scores,
        evaluations,
        Some((consensus, k_star, linkage)),
    ))
}
