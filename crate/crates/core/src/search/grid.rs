use serde::{Deserialize, Serialize};

use crate::algorithms::{AlgorithmParams, HyperparamConfig, Linkage};
use crate::error::{Error, Result};

/// A scalar or a list of values in a grid specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(v: Vec<T>) -> Self {
        OneOrMany::Many(v)
    }
}

fn default_seed() -> OneOrMany<u64> {
    OneOrMany::One(0)
}

fn default_max_iter() -> OneOrMany<usize> {
    OneOrMany::One(300)
}

fn default_linkage() -> OneOrMany<Linkage> {
    OneOrMany::One(Linkage::Average)
}

/// Parameter ranges for one algorithm; expands to their cartesian product.
///
/// Expansion order, outermost first: kmeans `k, seed, max_iter`; dbscan
/// `min_points, eps`; meanshift `bandwidth, max_iter`; agglomerative
/// `k, linkage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase", deny_unknown_fields)]
pub enum GridBlock {
    Kmeans {
        k: OneOrMany<usize>,
        #[serde(default = "default_seed")]
        seed: OneOrMany<u64>,
        #[serde(default = "default_max_iter")]
        max_iter: OneOrMany<usize>,
    },
    Dbscan {
        eps: OneOrMany<f64>,
        min_points: OneOrMany<usize>,
    },
    Meanshift {
        bandwidth: OneOrMany<f64>,
        #[serde(default = "default_max_iter")]
        max_iter: OneOrMany<usize>,
    },
    Agglomerative {
        k: OneOrMany<usize>,
        #[serde(default = "default_linkage")]
        linkage: OneOrMany<Linkage>,
    },
}

impl GridBlock {
    pub fn expand(&self) -> Vec<AlgorithmParams> {
        let mut out = Vec::new();
        match self {
            GridBlock::Kmeans { k, seed, max_iter } => {
                for k in k.values() {
                    for seed in seed.values() {
                        for max_iter in max_iter.values() {
                            out.push(AlgorithmParams::Kmeans { k, seed, max_iter });
                        }
                    }
                }
            }
            GridBlock::Dbscan { eps, min_points } => {
                for min_points in min_points.values() {
                    for eps in eps.values() {
                        out.push(AlgorithmParams::Dbscan { eps, min_points });
                    }
                }
            }
            GridBlock::Meanshift {
                bandwidth,
                max_iter,
            } => {
                for bandwidth in bandwidth.values() {
                    for max_iter in max_iter.values() {
                        out.push(AlgorithmParams::Meanshift {
                            bandwidth,
                            max_iter,
                        });
                    }
                }
            }
            GridBlock::Agglomerative { k, linkage } => {
                for k in k.values() {
                    for linkage in linkage.values() {
                        out.push(AlgorithmParams::Agglomerative { k, linkage });
                    }
                }
            }
        }
        out
    }
}

/// The finite, ordered, duplicate-free set of configurations to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    configs: Vec<HyperparamConfig>,
}

impl Grid {
    pub fn from_blocks(blocks: &[GridBlock]) -> Result<Grid> {
        let configs = blocks
            .iter()
            .flat_map(GridBlock::expand)
            .map(HyperparamConfig::new)
            .collect();
        Grid::from_configs(configs)
    }

    /// Validates every configuration and rejects duplicates.
    pub fn from_configs(configs: Vec<HyperparamConfig>) -> Result<Grid> {
        if configs.is_empty() {
            return Err(Error::Validation("hyperparameter grid is empty".into()));
        }
        for (i, c) in configs.iter().enumerate() {
            c.params
                .validate()
                .map_err(|e| Error::Validation(format!("{}: {e}", c.display_name)))?;
            if let Some(prev) = configs[..i].iter().position(|p| p == c) {
                return Err(Error::Validation(format!(
                    "duplicate configuration {} (entries {prev} and {i})",
                    c.display_name
                )));
            }
        }
        Ok(Grid { configs })
    }

    pub fn configs(&self) -> &[HyperparamConfig] {
        &self.configs
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}
