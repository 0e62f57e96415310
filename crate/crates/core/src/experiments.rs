//! End-to-end experiment runs described by a JSON spec.
//!
//! A run builds the ensemble, the consensus clustering, both selections, a
//! consensus-size sweep and the metric tables, and can write them as a
//! bundle of files with fixed names:
//!
//! | file | content |
//! |---|---|
//! | `ensemble.csv` | one column of labels per ensemble member |
//! | `consensus.csv` | consensus labels for the main `k_star` and every sweep value |
//! | `metrics.csv`, `metrics.txt` | every metric for every member |
//! | `metrics_grid.txt` | DBSCAN members as metric × eps tables, when present |
//! | `selection_anmi.json`, `selection_best_match.json` | both selection results |
//! | `k_star_sweep.csv` | best-match winner per consensus size |
//! | `comparison.csv`, `comparison.txt` | consensus against both winners |
//! | `plot.csv` | 2-D coordinates plus every clustering's labels |
//! | `summary.json` | winners, scores and agreement with ground truth |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::Linkage;
use crate::consensus::{consensus_dendrogram, evaluate_consensus};
use crate::dataset::{
    add_uniform_noise, load_csv, load_csv_with, pairwise_distances, spiral_arm_labels, synth_blobs,
    synth_spiral, CsvOptions, Dataset, Delimiter,
};
use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::metrics::{fmt_sig, nmi, ChiForm, MetricReport, MetricRow, SilhouetteForm};
use crate::search::{
    build_ensemble_with, select_anmi, select_best_match_against, Ensemble, Grid, GridBlock,
    SelectionResult,
};

fn default_true() -> bool {
    true
}

/// Where the points come from. Synthetic sources also provide ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default)]
        has_header: bool,
        #[serde(default)]
        delimiter: Delimiter,
        #[serde(default)]
        id_column: bool,
        /// Optional reference labels, used for reporting only.
        #[serde(default)]
        labels: Option<PathBuf>,
    },
    Spiral {
        n_per_arm: usize,
        arms: usize,
        #[serde(default)]
        noise_sd: f64,
        #[serde(default)]
        seed: u64,
    },
    Blobs {
        centers: Vec<Vec<f64>>,
        n_per_center: usize,
        sd: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Gaussian blobs plus uniform background noise; the noise points form
    /// their own ground-truth class.
    Fuzzy {
        centers: Vec<Vec<f64>>,
        n_per_center: usize,
        sd: f64,
        n_noise: usize,
        #[serde(default)]
        margin: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl DatasetSource {
    /// Loads or generates the dataset. Relative paths are taken against
    /// `base`.
    pub fn materialize(&self, base: &Path) -> Result<(Dataset, Option<Labeling>)> {
        match self {
            DatasetSource::Csv {
                path,
                has_header,
                delimiter,
                id_column,
                labels,
            } => {
                let options = CsvOptions {
                    has_header: *has_header,
                    delimiter: *delimiter,
                    id_column: *id_column,
                };
                let ds = load_csv_with(base.join(path), &options)?;
                let truth = labels
                    .as_ref()
                    .map(|p| Labeling::load(base.join(p)))
                    .transpose()?;
                if let Some(t) = &truth {
                    if t.n() != ds.n() {
                        return Err(Error::Dimension {
                            expected: ds.n(),
                            found: t.n(),
                        });
                    }
                }
                Ok((ds, truth))
            }
            DatasetSource::Spiral {
                n_per_arm,
                arms,
                noise_sd,
                seed,
            } => Ok((
                synth_spiral(*n_per_arm, *arms, *noise_sd, *seed)?,
                Some(spiral_arm_labels(*n_per_arm, *arms)),
            )),
            DatasetSource::Blobs {
                centers,
                n_per_center,
                sd,
                seed,
            } => {
                let (ds, truth) = synth_blobs(centers, *n_per_center, *sd, *seed)?;
                Ok((ds, Some(truth)))
            }
            DatasetSource::Fuzzy {
                centers,
                n_per_center,
                sd,
                n_noise,
                margin,
                seed,
            } => {
                let (blobs, truth) = synth_blobs(centers, *n_per_center, *sd, *seed)?;
                let ds = add_uniform_noise(&blobs, *n_noise, *margin, seed.wrapping_add(1))?;
                let mut labels = truth.into_labels();
                labels.extend(std::iter::repeat_n(centers.len() as u32, *n_noise));
                Ok((ds, Some(Labeling::new(labels))))
            }
        }
    }
}

/// Experiment and grid specification; the CLI reads grids from the same
/// document shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub dataset: Option<DatasetSource>,
    pub grid: Vec<GridBlock>,
    #[serde(default)]
    pub k_star: Option<usize>,
    #[serde(default)]
    pub k_star_sweep: Vec<usize>,
    #[serde(default)]
    pub linkage: Linkage,
    /// Precomputed 2-D coordinates for plotting when `d > 2`.
    #[serde(default)]
    pub embedding: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub embedding_has_header: bool,
    #[serde(default)]
    pub chi_form: ChiForm,
    #[serde(default)]
    pub silhouette_form: SilhouetteForm,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Directory relative input paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentSpec {
    /// Accepts either a full spec object or a bare array of grid blocks.
    pub fn parse(text: &str) -> Result<ExperimentSpec> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.is_array() {
            return Ok(ExperimentSpec {
                grid: serde_json::from_value(value)?,
                ..ExperimentSpec::default()
            });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = ExperimentSpec::parse(&text)?;
        spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(spec)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::from_blocks(&self.grid)
    }

    /// The main consensus size followed by the remaining sweep values, in
    /// the order given.
    pub fn consensus_sizes(&self) -> Result<Vec<usize>> {
        let mut sizes = Vec::new();
        if let Some(k) = self.k_star {
            sizes.push(k);
        }
        for &k in &self.k_star_sweep {
            if !sizes.contains(&k) {
                sizes.push(k);
            }
        }
        if sizes.is_empty() {
            return Err(Error::Validation(
                "experiment needs k_star or k_star_sweep".into(),
            ));
        }
        if sizes.contains(&0) {
            return Err(Error::Validation("k_star must be >= 1".into()));
        }
        Ok(sizes)
    }
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: None,
            dataset: None,
            grid: Vec::new(),
            k_star: None,
            k_star_sweep: Vec::new(),
            linkage: Linkage::default(),
            embedding: None,
            embedding_has_header: true,
            chi_form: ChiForm::default(),
            silhouette_form: SilhouetteForm::default(),
            output_dir: None,
            base_dir: PathBuf::new(),
        }
    }
}

/// Best-match winner for one consensus size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub k_star: usize,
    pub chosen_index: usize,
    pub chosen_config: String,
    pub score: f64,
    pub consensus_anmi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinnerSummary {
    pub config: String,
    pub score: f64,
    pub nmi_vs_consensus: f64,
    pub nmi_vs_ground_truth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub name: Option<String>,
    pub n: usize,
    pub d: usize,
    pub dataset_fingerprint: String,
    pub members: usize,
    pub skipped: Vec<String>,
    pub k_star: usize,
    pub linkage: Linkage,
    pub consensus_anmi: f64,
    pub consensus_nmi_vs_ground_truth: Option<f64>,
    pub strategy1: WinnerSummary,
    pub strategy2: WinnerSummary,
    pub sweep_stable: bool,
}

/// Everything one experiment run produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub dataset: Dataset,
    pub ground_truth: Option<Labeling>,
    pub ensemble: Ensemble,
    pub k_star: usize,
    /// Consensus labeling per consensus size, main size first.
    pub consensus: Vec<(usize, Labeling)>,
    pub anmi: SelectionResult,
    pub best_match: SelectionResult,
    pub sweep: Vec<SweepEntry>,
    pub metrics: MetricReport,
    pub comparison: MetricReport,
    pub embedding: Option<Dataset>,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let source = spec
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Validation("experiment spec has no dataset".into()))?;
    let (dataset, ground_truth) = source.materialize(&spec.base_dir)?;
    run_experiment_on(spec, dataset, ground_truth)
}

/// Runs `spec` on an already loaded dataset; `spec.dataset` is ignored.
pub fn run_experiment_on(
    spec: &ExperimentSpec,
    dataset: Dataset,
    ground_truth: Option<Labeling>,
) -> Result<ExperimentOutcome> {
    let grid = spec.grid()?;
    let sizes = spec.consensus_sizes()?;
    let k_star = sizes[0];
    let dist = pairwise_distances(&dataset);
    let ensemble = build_ensemble_with(&dataset, Some(&dist), &grid)?;
    log::info!(
        "ensemble of {} members on n={} d={}",
        ensemble.len(),
        dataset.n(),
        dataset.d()
    );

    let anmi = select_anmi(&ensemble)?;
    let dendrogram = consensus_dendrogram(ensemble.labelings(), spec.linkage)?;
    let mut consensus = Vec::new();
    let mut sweep = Vec::new();
    let mut best_match = None;
    for &k in &sizes {
        let c = dendrogram.cut(k)?;
        let selected =
            select_best_match_against(&ensemble, c.clone(), Some(k), Some(spec.linkage))?;
        sweep.push(SweepEntry {
            k_star: k,
            chosen_index: selected.chosen_index,
            chosen_config: selected.chosen_config.display_name.clone(),
            score: selected.score,
            consensus_anmi: evaluate_consensus(&c, ensemble.labelings())?,
        });
        if best_match.is_none() {
            best_match = Some(selected);
        }
        consensus.push((k, c));
    }
    let best_match = best_match.expect("at least one consensus size");
    let c_star = &consensus[0].1;

    let forms = (spec.chi_form, spec.silhouette_form);
    let rows = ensemble
        .entries()
        .zip(&anmi.full_scores)
        .map(|((config, labeling), score)| {
            MetricRow::compute(
                config.display_name.clone(),
                Some(config.clone()),
                labeling,
                Some(score.score),
                c_star,
                &dataset,
                &dist,
                forms,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let metrics = MetricReport { rows };

    let mut comparison = MetricReport::default();
    comparison.rows.push(MetricRow::compute(
        format!("consensus (k*={k_star})"),
        None,
        c_star,
        Some(sweep[0].consensus_anmi),
        c_star,
        &dataset,
        &dist,
        forms,
    )?);
    for (label, winner) in [("strategy1", &anmi), ("strategy2", &best_match)] {
        let mut row = metrics.rows[winner.chosen_index].clone();
        row.name = format!("{label}: {}", row.name);
        comparison.rows.push(row);
    }

    let embedding = load_embedding(spec, &dataset)?;

    Ok(ExperimentOutcome {
        spec: spec.clone(),
        dataset,
        ground_truth,
        ensemble,
        k_star,
        consensus,
        anmi,
        best_match,
        sweep,
        metrics,
        comparison,
        embedding,
    })
}

fn load_embedding(spec: &ExperimentSpec, ds: &Dataset) -> Result<Option<Dataset>> {
    if ds.d() == 2 {
        return Ok(None);
    }
    let Some(path) = &spec.embedding else {
        log::warn!(
            "dataset has d={} and no embedding was given; plot.csv skipped",
            ds.d()
        );
        return Ok(None);
    };
    let path = spec.base_dir.join(path);
    match load_csv(&path, spec.embedding_has_header) {
        Ok(e) if e.n() == ds.n() && e.d() == 2 => Ok(Some(e)),
        Ok(e) => {
            log::warn!(
                "embedding {} is {}x{}, expected {}x2; plot.csv skipped",
                path.display(),
                e.n(),
                e.d(),
                ds.n()
            );
            Ok(None)
        }
        Err(err) => {
            log::warn!(
                "cannot read embedding {}: {err}; plot.csv skipped",
                path.display()
            );
            Ok(None)
        }
    }
}

impl ExperimentOutcome {
    fn winner(&self, s: &SelectionResult) -> Result<WinnerSummary> {
        let labeling = &self.ensemble.labelings()[s.chosen_index];
        Ok(WinnerSummary {
            config: s.chosen_config.display_name.clone(),
            score: s.score,
            nmi_vs_consensus: nmi(labeling, &self.consensus[0].1)?,
            nmi_vs_ground_truth: self
                .ground_truth
                .as_ref()
                .map(|t| nmi(labeling, t))
                .transpose()?,
        })
    }

    pub fn summary(&self) -> Result<ExperimentSummary> {
        let c_star = &self.consensus[0].1;
        Ok(ExperimentSummary {
            name: self.spec.name.clone(),
            n: self.dataset.n(),
            d: self.dataset.d(),
            dataset_fingerprint: self.dataset.fingerprint(),
            members: self.ensemble.len(),
            skipped: self
                .ensemble
                .skipped()
                .iter()
                .map(|s| format!("{}: {}", s.config, s.error))
                .collect(),
            k_star: self.k_star,
            linkage: self.spec.linkage,
            consensus_anmi: self.sweep[0].consensus_anmi,
            consensus_nmi_vs_ground_truth: self
                .ground_truth
                .as_ref()
                .map(|t| nmi(c_star, t))
                .transpose()?,
            strategy1: self.winner(&self.anmi)?,
            strategy2: self.winner(&self.best_match)?,
            sweep_stable: self
                .sweep
                .iter()
                .all(|e| e.chosen_index == self.sweep[0].chosen_index),
        })
    }

    pub fn sweep_text(&self) -> String {
        let width = self
            .sweep
            .iter()
            .map(|e| e.chosen_config.len())
            .max()
            .unwrap_or(0)
            .max(6);
        let mut out = format!(
            "{:>6}  {:<width$}  {:>10}  {:>14}\n",
            "k_star", "chosen", "nmi", "consensus_anmi"
        );
        for e in &self.sweep {
            out.push_str(&format!(
                "{:>6}  {:<width$}  {:>10}  {:>14}\n",
                e.k_star,
                e.chosen_config,
                fmt_sig(e.score),
                fmt_sig(e.consensus_anmi)
            ));
        }
        out
    }

    /// Writes the bundle into `dir`, creating it if needed. Output is a pure
    /// function of the spec and the input data.
    pub fn write_bundle(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let mut emit = |name: &str, bytes: Vec<u8>| -> Result<()> {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            written.push(path);
            Ok(())
        };

        let mut buf = Vec::new();
        self.ensemble.write_csv(&mut buf)?;
        emit("ensemble.csv", buf)?;

        emit("consensus.csv", self.consensus_csv()?)?;

        let mut buf = Vec::new();
        self.metrics.write_csv(&mut buf)?;
        emit("metrics.csv", buf)?;
        emit("metrics.txt", self.metrics.render_text().into_bytes())?;
        if let Some(grid) = self.metrics.render_dbscan_grid() {
            emit("metrics_grid.txt", grid.into_bytes())?;
        }

        emit("selection_anmi.json", json_bytes(&self.anmi)?)?;
        emit("selection_best_match.json", json_bytes(&self.best_match)?)?;

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "k_star",
            "chosen_index",
            "chosen_config",
            "nmi",
            "consensus_anmi",
        ])?;
        for e in &self.sweep {
            w.write_record([
                e.k_star.to_string(),
                e.chosen_index.to_string(),
                e.chosen_config.clone(),
                e.score.to_string(),
                e.consensus_anmi.to_string(),
            ])?;
        }
        emit("k_star_sweep.csv", csv_bytes(w)?)?;
        emit("k_star_sweep.txt", self.sweep_text().into_bytes())?;

        let mut buf = Vec::new();
        self.comparison.write_csv(&mut buf)?;
        emit("comparison.csv", buf)?;
        emit("comparison.txt", self.comparison.render_text().into_bytes())?;

        if let Some(plot) = self.plot_csv()? {
            emit("plot.csv", plot)?;
        }
        emit("summary.json", json_bytes(&self.summary()?)?)?;
        Ok(written)
    }

    fn consensus_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["point".to_owned()];
        header.extend(self.consensus.iter().map(|(k, _)| format!("k_star={k}")));
        w.write_record(&header)?;
        let canonical: Vec<Labeling> = self
            .consensus
            .iter()
            .map(|(_, c)| c.canonicalize())
            .collect();
        for i in 0..self.dataset.n() {
            let mut row = vec![i.to_string()];
            row.extend(canonical.iter().map(|c| c.labels()[i].to_string()));
            w.write_record(&row)?;
        }
        csv_bytes(w)
    }

    fn plot_csv(&self) -> Result<Option<Vec<u8>>> {
        let coords = match &self.embedding {
            Some(e) => e,
            None if self.dataset.d() == 2 => &self.dataset,
            None => return Ok(None),
        };
        let mut columns: Vec<(String, Labeling)> = Vec::new();
        if let Some(t) = &self.ground_truth {
            columns.push(("ground_truth".into(), t.canonicalize()));
        }
        columns.push(("consensus".into(), self.consensus[0].1.canonicalize()));
        for (config, l) in self.ensemble.entries() {
            columns.push((config.display_name.clone(), l.canonicalize()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["point".to_owned(), "x".to_owned(), "y".to_owned()];
        header.extend(columns.iter().map(|(name, _)| name.clone()));
        w.write_record(&header)?;
        for (i, p) in coords.points().enumerate() {
            let mut row = vec![i.to_string(), p[0].to_string(), p[1].to_string()];
            row.extend(columns.iter().map(|(_, l)| l.labels()[i].to_string()));
            w.write_record(&row)?;
        }
        csv_bytes(w).map(Some)
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn csv_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Internal(format!("csv buffer: {e}")))
        .and_then(|mut v| {
            v.flush().map_err(|e| Error::Internal(e.to_string()))?;
            Ok(v)
        })
}
