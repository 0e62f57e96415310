use rayon::prelude::*;
use serde::Serialize;

use super::Grid;
use crate::algorithms::HyperparamConfig;
use crate::dataset::{pairwise_distances, Dataset, DistanceMatrix};
use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// A grid configuration that failed to run and was left out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedConfig {
    pub config: HyperparamConfig,
    pub error: String,
}

/// One labeling per successfully run configuration, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    configs: Vec<HyperparamConfig>,
    labelings: Vec<Labeling>,
    dataset_fingerprint: String,
    skipped: Vec<SkippedConfig>,
}

impl Ensemble {
    pub fn from_parts(
        configs: Vec<HyperparamConfig>,
        labelings: Vec<Labeling>,
        dataset_fingerprint: impl Into<String>,
    ) -> Result<Ensemble> {
        if configs.len() != labelings.len() {
            return Err(Error::Dimension {
                expected: configs.len(),
                found: labelings.len(),
            });
        }
        if let Some(first) = labelings.first() {
            if let Some(bad) = labelings.iter().find(|l| l.n() != first.n()) {
                return Err(Error::Dimension {
                    expected: first.n(),
                    found: bad.n(),
                });
            }
        }
        Ok(Ensemble {
            configs,
            labelings,
            dataset_fingerprint: dataset_fingerprint.into(),
            skipped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.labelings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labelings.is_empty()
    }

    /// Number of points every labeling covers.
    pub fn n(&self) -> usize {
        self.labelings.first().map_or(0, Labeling::n)
    }

    pub fn configs(&self) -> &[HyperparamConfig] {
        &self.configs
    }

    pub fn labelings(&self) -> &[Labeling] {
        &self.labelings
    }

    pub fn entries(&self) -> impl Iterator<Item = (&HyperparamConfig, &Labeling)> {
        self.configs.iter().zip(&self.labelings)
    }

    pub fn dataset_fingerprint(&self) -> &str {
        &self.dataset_fingerprint
    }

    pub fn skipped(&self) -> &[SkippedConfig] {
        &self.skipped
    }

    /// Seeds used by the member configurations, in member order.
    pub fn seeds(&self) -> Vec<u64> {
        self.configs
            .iter()
            .filter_map(|c| c.params.seed())
            .collect()
    }

    /// Long-format CSV: `point` column followed by one column per member.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["point".to_owned()];
        header.extend(self.configs.iter().map(|c| c.display_name.clone()));
        w.write_record(&header)?;
        let canonical: Vec<Labeling> = self.labelings.iter().map(Labeling::canonicalize).collect();
        for i in 0..self.n() {
            let mut row = vec![i.to_string()];
            row.extend(canonical.iter().map(|l| l.labels()[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Runs every grid configuration on `ds`. Configurations that fail are
/// dropped with a warning; an ensemble with no members is an error.
pub fn build_ensemble(ds: &Dataset, grid: &Grid) -> Result<Ensemble> {
    let distances = grid
        .configs()
        .iter()
        .any(|c| c.params.needs_distances())
        .then(|| pairwise_distances(ds));
    build_ensemble_with(ds, distances.as_ref(), grid)
}

pub fn build_ensemble_with(
    ds: &Dataset,
    distances: Option<&DistanceMatrix>,
    grid: &Grid,
) -> Result<Ensemble> {
    if grid.is_empty() {
        return Err(Error::Validation("hyperparameter grid is empty".into()));
    }
    let results: Vec<Result<Labeling>> = grid
        .configs()
        .par_iter()
        .map(|c| c.params.run(ds, distances))
        .collect();
    let mut configs = Vec::new();
    let mut labelings = Vec::new();
    let mut skipped = Vec::new();
    for (config, result) in grid.configs().iter().zip(results) {
        match result {
            Ok(l) => {
                configs.push(config.clone());
                labelings.push(l);
            }
            Err(e) => {
                log::warn!("skipping {config}: {e}");
                skipped.push(SkippedConfig {
                    config: config.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    if labelings.is_empty() {
        return Err(Error::Degenerate(
            "no grid configuration produced a clustering".into(),
        ));
    }
    let mut ens = Ensemble::from_parts(configs, labelings, ds.fingerprint())?;
    ens.skipped = skipped;
    Ok(ens)
}
