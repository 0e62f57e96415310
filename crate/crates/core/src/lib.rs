//! Label-free selection of clustering hyperparameters.
//!
//! A grid of configurations is run to form an ensemble of labelings. Each
//! member is then scored either by its average NMI against the other members
//! or by its NMI against a consensus clustering obtained by reclustering the
//! points on their pairwise Hamming disagreements across the ensemble.

pub mod algorithms;
pub mod cli;
pub mod consensus;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod labeling;
pub mod metrics;
pub mod search;

pub use error::{Error, Result};
