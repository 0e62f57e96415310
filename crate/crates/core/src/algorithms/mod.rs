//! Base clusterers used to populate an ensemble, plus the agglomerative
//! clusterer that also serves as the consensus reclusterer.

mod agglomerative;
mod dbscan;
mod kmeans;
mod meanshift;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use agglomerative::{agglomerative, Dendrogram, Merge};
pub use dbscan::dbscan;
pub use kmeans::{kmeans, kmeans_objective_trace};
pub use meanshift::meanshift;

use crate::dataset::{Dataset, DistanceMatrix};
use crate::error::{Error, Result};
use crate::labeling::Labeling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    #[default]
    Average,
    Complete,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        })
    }
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::Parameter(format!("unknown linkage {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Kmeans,
    Dbscan,
    Meanshift,
    Agglomerative,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Kmeans => "kmeans",
            Algorithm::Dbscan => "dbscan",
            Algorithm::Meanshift => "meanshift",
            Algorithm::Agglomerative => "agglomerative",
        })
    }
}

/// Algorithm choice together with its parameter assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum AlgorithmParams {
    Kmeans {
        k: usize,
        seed: u64,
        max_iter: usize,
    },
    Dbscan {
        eps: f64,
        min_points: usize,
    },
    Meanshift {
        bandwidth: f64,
        max_iter: usize,
    },
    Agglomerative {
        k: usize,
        linkage: Linkage,
    },
}

impl AlgorithmParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmParams::Kmeans { .. } => Algorithm::Kmeans,
            AlgorithmParams::Dbscan { .. } => Algorithm::Dbscan,
            AlgorithmParams::Meanshift { .. } => Algorithm::Meanshift,
            AlgorithmParams::Agglomerative { .. } => Algorithm::Agglomerative,
        }
    }

    /// Range checks that do not depend on the dataset.
    pub fn validate(&self) -> Result<()> {
        match *self {
            AlgorithmParams::Kmeans { k, max_iter, .. } => {
                check(k >= 1, "kmeans: k must be >= 1")?;
                check(max_iter >= 1, "kmeans: max_iter must be >= 1")
            }
            AlgorithmParams::Dbscan { eps, min_points } => {
                check(eps.is_finite() && eps > 0.0, "dbscan: eps must be > 0")?;
                check(min_points >= 1, "dbscan: min_points must be >= 1")
            }
            AlgorithmParams::Meanshift {
                bandwidth,
                max_iter,
            } => {
                check(
                    bandwidth.is_finite() && bandwidth > 0.0,
                    "meanshift: bandwidth must be > 0",
                )?;
                check(max_iter >= 1, "meanshift: max_iter must be >= 1")
            }
            AlgorithmParams::Agglomerative { k, .. } => {
                check(k >= 1, "agglomerative: k must be >= 1")
            }
        }
    }

    pub fn needs_distances(&self) -> bool {
        matches!(
            self,
            AlgorithmParams::Dbscan { .. } | AlgorithmParams::Agglomerative { .. }
        )
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            AlgorithmParams::Kmeans { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn default_name(&self) -> String {
        match self {
            AlgorithmParams::Kmeans { k, seed, max_iter } => {
                format!("kmeans(k={k}, seed={seed}, max_iter={max_iter})")
            }
            AlgorithmParams::Dbscan { eps, min_points } => {
                format!("dbscan(eps={eps}, min_points={min_points})")
            }
            AlgorithmParams::Meanshift {
                bandwidth,
                max_iter,
            } => {
                format!("meanshift(bandwidth={bandwidth}, max_iter={max_iter})")
            }
            AlgorithmParams::Agglomerative { k, linkage } => {
                format!("agglomerative(k={k}, linkage={linkage})")
            }
        }
    }

    /// Runs the algorithm. `distances` must be the pairwise distances of
    /// `ds` when [`Self::needs_distances`] holds; it is computed on the
    /// fly otherwise.
    pub fn run(&self, ds: &Dataset, distances: Option<&DistanceMatrix>) -> Result<Labeling> {
        self.validate()?;
        let owned;
        let distances = match distances {
            Some(d) => d,
            None if self.needs_distances() => {
                owned = crate::dataset::pairwise_distances(ds);
                &owned
            }
            None => {
                owned = DistanceMatrix::from_vec_unchecked(0, Vec::new());
                &owned
            }
        };
        if self.needs_distances() && distances.n() != ds.n() {
            return Err(Error::Dimension {
                expected: ds.n(),
                found: distances.n(),
            });
        }
        match *self {
            AlgorithmParams::Kmeans { k, seed, max_iter } => kmeans(ds, k, seed, max_iter),
            AlgorithmParams::Dbscan { eps, min_points } => dbscan(distances, eps, min_points),
            AlgorithmParams::Meanshift {
                bandwidth,
                max_iter,
            } => meanshift(ds, bandwidth, max_iter),
            AlgorithmParams::Agglomerative { k, linkage } => agglomerative(distances, k, linkage),
        }
    }
}

fn check(cond: bool, message: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(message.to_owned()))
    }
}

/// One point of the hyperparameter space: algorithm plus parameters.
///
/// Equality ignores `display_name`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperparamConfig {
    #[serde(flatten)]
    pub params: AlgorithmParams,
    pub display_name: String,
}

impl HyperparamConfig {
    pub fn new(params: AlgorithmParams) -> Self {
        let display_name = params.default_name();
        Self {
            params,
            display_name,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.params.algorithm()
    }
}

impl PartialEq for HyperparamConfig {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl fmt::Display for HyperparamConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name)
    }
}
