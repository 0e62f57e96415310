//! Hyperparameter grids, ensemble generation and the two selection
//! strategies.

mod bench;
mod ensemble;
mod grid;
mod select;

pub use bench::{complexity_bench, render_bench, BenchRow};
pub use ensemble::{build_ensemble, build_ensemble_with, Ensemble, SkippedConfig};
pub use grid::{Grid, GridBlock, OneOrMany};
pub use select::{
    select_anmi, select_best_match, select_best_match_against, NmiMatrix, ScoreEntry,
    SelectionResult, Strategy,
};
