//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
//! 3 internal error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algorithms::{AlgorithmParams, HyperparamConfig, Linkage};
use crate::consensus::consensus_clustering;
use crate::dataset::{load_csv_with, pairwise_distances, CsvOptions, Dataset, Delimiter};
use crate::error::{Error, Result};
use crate::experiments::{run_experiment, ExperimentSpec};
use crate::labeling::Labeling;
use crate::metrics::{
    anmi, fmt_sig, ChiForm, InternalScores, MetricReport, MetricRow, SilhouetteForm,
};
use crate::search::{
    build_ensemble_with, complexity_bench, render_bench, select_anmi, select_best_match, Ensemble,
    SelectionResult,
};

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "CONSENSUS_HPO_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "consensus-hpo",
    version,
    about = "Label-free clustering hyperparameter selection"
)]
pub struct Cli {
    /// Worker threads; defaults to $CONSENSUS_HPO_THREADS or all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one clustering algorithm and write its labels.
    Cluster(ClusterArgs),
    /// Run every grid configuration and write the ensemble labels.
    Ensemble(EnsembleArgs),
    /// Build the consensus clustering of an ensemble CSV.
    Consensus(ConsensusArgs),
    /// Pick a configuration by ANMI or by best match with the consensus.
    Select(SelectArgs),
    /// Print internal and external metrics for one labeling.
    Metrics(MetricsArgs),
    /// Run a full experiment spec and write its output bundle.
    Experiment(ExperimentArgs),
    /// Time both selection strategies on synthetic data.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV, one point per row.
    #[arg(long)]
    pub data: PathBuf,
    /// First row is a header.
    #[arg(long)]
    pub has_header: bool,
    #[arg(long, value_enum, default_value_t = DelimiterArg::Comma)]
    pub delimiter: DelimiterArg,
    /// First column holds row identifiers.
    #[arg(long)]
    pub id_column: bool,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        load_csv_with(
            &self.data,
            &CsvOptions {
                has_header: self.has_header,
                delimiter: match self.delimiter {
                    DelimiterArg::Comma => Delimiter::Comma,
                    DelimiterArg::Whitespace => Delimiter::Whitespace,
                },
                id_column: self.id_column,
            },
        )
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DelimiterArg {
    Comma,
    Whitespace,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgoArg {
    Kmeans,
    Dbscan,
    Meanshift,
    Agglomerative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Anmi,
    BestMatch,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LinkageArg {
    Single,
    Average,
    Complete,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Linkage {
        match l {
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Complete => Linkage::Complete,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "min-pts")]
    pub min_pts: Option<usize>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
    pub linkage: LinkageArg,
    /// Output label file, one label per line.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Grid or experiment spec (JSON).
    #[arg(long)]
    pub grid: PathBuf,
    /// Output CSV with one label column per member.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConsensusArgs {
    /// Ensemble CSV as written by the `ensemble` subcommand.
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long)]
    pub k_star: usize,
    #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
    pub linkage: LinkageArg,
    /// Output label file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Input CSV; defaults to the dataset named in the spec.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub has_header: bool,
    #[arg(long, value_enum, default_value_t = DelimiterArg::Comma)]
    pub delimiter: DelimiterArg,
    /// Grid or experiment spec (JSON).
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Consensus size; overrides the spec. Required for best-match unless
    /// the spec sets it.
    #[arg(long)]
    pub k_star: Option<usize>,
    /// Consensus linkage; overrides the spec.
    #[arg(long, value_enum)]
    pub linkage: Option<LinkageArg>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Labeling to score.
    #[arg(long)]
    pub labels: PathBuf,
    /// Reference labeling for the external criteria.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Ensemble CSV for ANMI.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Write the metric row as CSV here instead of printing a table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory; overrides the spec.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![250, 500, 1000])]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20, 40])]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the rows as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Thread count from the flag, else the environment, else `None`.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Validation(format!("{THREADS_ENV}={v} is not a thread count"))),
        _ => Ok(None),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(t) = thread_count(cli.threads)? {
        if t == 0 {
            return Err(Error::Validation("--threads must be >= 1".into()));
        }
        // a pool may already exist when called twice in one process
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            log::debug!("thread pool already configured: {e}");
        }
    }
    match cli.command {
        Command::Cluster(a) => cluster(a),
        Command::Ensemble(a) => ensemble(a),
        Command::Consensus(a) => consensus(a),
        Command::Select(a) => select(a),
        Command::Metrics(a) => metrics(a),
        Command::Experiment(a) => experiment(a),
        Command::Bench(a) => bench(a),
    }
}

fn require<T>(value: Option<T>, flag: &str, algo: &str) -> Result<T> {
    value.ok_or_else(|| Error::Validation(format!("--{flag} is required for {algo}")))
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let params = match a.algo {
        AlgoArg::Kmeans => AlgorithmParams::Kmeans {
            k: require(a.k, "k", "kmeans")?,
            seed: a.seed,
            max_iter: a.max_iter,
        },
        AlgoArg::Dbscan => AlgorithmParams::Dbscan {
            eps: require(a.eps, "eps", "dbscan")?,
            min_points: require(a.min_pts, "min-pts", "dbscan")?,
        },
        AlgoArg::Meanshift => AlgorithmParams::Meanshift {
            bandwidth: require(a.bandwidth, "bandwidth", "meanshift")?,
            max_iter: a.max_iter,
        },
        AlgoArg::Agglomerative => AlgorithmParams::Agglomerative {
            k: require(a.k, "k", "agglomerative")?,
            linkage: a.linkage.into(),
        },
    };
    params.validate()?;
    let ds = a.data.load()?;
    let labels = params.run(&ds, None)?;
    labels.save(&a.out)?;
    println!("{}: {} clusters", HyperparamConfig::new(params), labels.k());
    Ok(())
}

fn ensemble(a: EnsembleArgs) -> Result<()> {
    let grid = ExperimentSpec::load(&a.grid)?.grid()?;
    let ds = a.data.load()?;
    let ens = build_ensemble_with(
        &ds,
        needs_distances(&grid)
            .then(|| pairwise_distances(&ds))
            .as_ref(),
        &grid,
    )?;
    write_file(&a.out, |buf| ens.write_csv(buf))?;
    println!("{} members ({} skipped)", ens.len(), ens.skipped().len());
    Ok(())
}

fn needs_distances(grid: &crate::search::Grid) -> bool {
    grid.configs().iter().any(|c| c.params.needs_distances())
}

/// Reads the label columns of an ensemble CSV: a `point` column followed
/// by one column per member.
pub fn read_ensemble_csv(path: &Path) -> Result<Vec<Labeling>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Validation(format!("{}: {other:?}", path.display())),
    })?;
    let members = r.headers()?.len().saturating_sub(1);
    if members == 0 {
        return Err(Error::EmptyInput(format!(
            "{} has no member columns",
            path.display()
        )));
    }
    let mut columns = vec![Vec::new(); members];
    for (line, record) in r.records().enumerate() {
        let record = record?;
        for (col, cell) in columns.iter_mut().zip(record.iter().skip(1)) {
            col.push(cell.trim().parse::<u32>().map_err(|_| Error::Parse {
                line: line + 2,
                message: format!("label {cell:?} is not a non-negative integer"),
            })?);
        }
    }
    if columns[0].is_empty() {
        return Err(Error::EmptyInput(format!("{} has no rows", path.display())));
    }
    Ok(columns.into_iter().map(Labeling::new).collect())
}

fn consensus(a: ConsensusArgs) -> Result<()> {
    let labelings = read_ensemble_csv(&a.ensemble)?;
    let c = consensus_clustering(&labelings, a.k_star, a.linkage.into())?;
    c.save(&a.out)?;
    println!(
        "consensus with {} clusters, ANMI {}",
        c.k(),
        fmt_sig(anmi(&c, &labelings)?)
    );
    Ok(())
}

fn select(a: SelectArgs) -> Result<()> {
    let spec = ExperimentSpec::load(&a.grid)?;
    let grid = spec.grid()?;
    let k_star = a.k_star.or(spec.k_star);
    let linkage = a.linkage.map(Linkage::from).unwrap_or(spec.linkage);
    if a.strategy == StrategyArg::BestMatch && k_star.is_none() {
        return Err(Error::Validation("best-match needs --k-star".into()));
    }
    let ds = match (&a.data, &spec.dataset) {
        (Some(path), _) => load_csv_with(
            path,
            &CsvOptions {
                has_header: a.has_header,
                delimiter: match a.delimiter {
                    DelimiterArg::Comma => Delimiter::Comma,
                    DelimiterArg::Whitespace => Delimiter::Whitespace,
                },
                id_column: false,
            },
        )?,
        (None, Some(source)) => source.materialize(&spec.base_dir)?.0,
        (None, None) => {
            return Err(Error::Validation(
                "no --data given and the spec names no dataset".into(),
            ))
        }
    };
    let dist = pairwise_distances(&ds);
    let ens = build_ensemble_with(&ds, Some(&dist), &grid)?;
    let result = match a.strategy {
        StrategyArg::Anmi => select_anmi(&ens)?,
        StrategyArg::BestMatch => select_best_match(&ens, k_star.expect("checked above"), linkage)?,
    };
    let consensus = match (&result.consensus, k_star) {
        (Some(c), _) => Some(c.clone()),
        (None, Some(k)) => Some(consensus_clustering(ens.labelings(), k, linkage)?),
        (None, None) => None,
    };
    let report = selection_report(&ds, &dist, &ens, &result, consensus.as_ref(), &spec)?;

    fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let json_path = a
        .out_dir
        .join(format!("selection_{}.json", result.strategy));
    write_file(&json_path, |buf| {
        buf.extend(result.to_json()?.into_bytes());
        buf.push(b'\n');
        Ok(())
    })?;
    write_file(&a.out_dir.join("metrics.csv"), |buf| report.write_csv(buf))?;
    write_file(&a.out_dir.join("metrics.txt"), |buf| {
        buf.extend(report.render_text().into_bytes());
        Ok(())
    })?;
    if let Some(grid_table) = report.render_dbscan_grid() {
        write_file(&a.out_dir.join("metrics_grid.txt"), |buf| {
            buf.extend(grid_table.into_bytes());
            Ok(())
        })?;
    }
    println!("chosen: {}", result.chosen_config);
    println!("score: {}", fmt_sig(result.score));
    if result.ties.len() > 1 {
        println!("ties: {:?}", result.ties);
    }
    Ok(())
}

fn selection_report(
    ds: &Dataset,
    dist: &crate::dataset::DistanceMatrix,
    ens: &Ensemble,
    result: &SelectionResult,
    consensus: Option<&Labeling>,
    spec: &ExperimentSpec,
) -> Result<MetricReport> {
    let forms = (spec.chi_form, spec.silhouette_form);
    let anmi_scores: Option<Vec<f64>> = match result.strategy {
        crate::search::Strategy::AnmiMax => {
            Some(result.full_scores.iter().map(|s| s.score).collect())
        }
        crate::search::Strategy::BestMatch if ens.len() >= 2 => Some(
            select_anmi(ens)?
                .full_scores
                .iter()
                .map(|s| s.score)
                .collect(),
        ),
        crate::search::Strategy::BestMatch => None,
    };
    let rows = ens
        .entries()
        .enumerate()
        .map(|(i, (config, labeling))| {
            let score = anmi_scores.as_ref().map(|s| s[i]);
            match consensus {
                Some(c) => MetricRow::compute(
                    config.display_name.clone(),
                    Some(config.clone()),
                    labeling,
                    score,
                    c,
                    ds,
                    dist,
                    forms,
                ),
                None => internal_only_row(config, labeling, score, ds, dist, forms),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport { rows })
}

fn internal_only_row(
    config: &HyperparamConfig,
    labeling: &Labeling,
    anmi: Option<f64>,
    ds: &Dataset,
    dist: &crate::dataset::DistanceMatrix,
    forms: (ChiForm, SilhouetteForm),
) -> Result<MetricRow> {
    Ok(MetricRow {
        name: config.display_name.clone(),
        config: Some(config.clone()),
        clusters: labeling.k(),
        anmi,
        nmi_vs_consensus: None,
        ari_vs_consensus: None,
        rand: None,
        jaccard: None,
        internal: InternalScores::compute(ds, dist, labeling, forms.0, forms.1)?,
    })
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let ds = a.data.load()?;
    let labels = Labeling::load(&a.labels)?;
    if labels.n() != ds.n() {
        return Err(Error::Dimension {
            expected: ds.n(),
            found: labels.n(),
        });
    }
    let dist = pairwise_distances(&ds);
    let anmi_score = match &a.ensemble {
        Some(path) => Some(anmi(&labels, &read_ensemble_csv(path)?)?),
        None => None,
    };
    let name = a.labels.display().to_string();
    let forms = (ChiForm::default(), SilhouetteForm::default());
    let mut row = match &a.reference {
        Some(path) => {
            let reference = Labeling::load(path)?;
            MetricRow::compute(
                name, None, &labels, anmi_score, &reference, &ds, &dist, forms,
            )?
        }
        None => MetricRow {
            name,
            config: None,
            clusters: labels.k(),
            anmi: anmi_score,
            nmi_vs_consensus: None,
            ari_vs_consensus: None,
            rand: None,
            jaccard: None,
            internal: InternalScores::compute(&ds, &dist, &labels, forms.0, forms.1)?,
        },
    };
    row.config = None;
    let report = MetricReport { rows: vec![row] };
    match &a.out {
        Some(path) => write_file(path, |buf| report.write_csv(buf))?,
        None => print!("{}", report.render_text()),
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let spec = ExperimentSpec::load(&a.spec)?;
    let out_dir = a
        .out_dir
        .or_else(|| spec.output_dir.clone())
        .ok_or_else(|| {
            Error::Validation("no --out-dir given and the spec sets no output_dir".into())
        })?;
    let outcome = run_experiment(&spec)?;
    let files = outcome.write_bundle(&out_dir)?;
    let summary = outcome.summary()?;
    println!(
        "strategy1: {} (ANMI {})",
        summary.strategy1.config,
        fmt_sig(summary.strategy1.score)
    );
    println!(
        "strategy2: {} (NMI {})",
        summary.strategy2.config,
        fmt_sig(summary.strategy2.score)
    );
    print!("{}", outcome.sweep_text());
    println!("wrote {} files to {}", files.len(), out_dir.display());
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let rows = complexity_bench(&a.n, &a.m, a.seed)?;
    print!("{}", render_bench(&rows));
    if let Some(path) = &a.out {
        write_file(path, |buf| {
            buf.extend(serde_json::to_vec_pretty(&rows)?);
            buf.push(b'\n');
            Ok(())
        })?;
    }
    Ok(())
}

fn write_file(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}
