use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{
    ari, chi_with, dunn1, dunn2, jaccard, nmi, rand_index, silhouette_with, ChiForm, SilhouetteForm,
};
use crate::algorithms::{AlgorithmParams, HyperparamConfig};
use crate::dataset::{Dataset, DistanceMatrix};
use crate::error::Result;
use crate::labeling::Labeling;

/// Six significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

/// Undefined values print as `--`.
pub fn fmt_metric(x: Option<f64>) -> String {
    x.map_or_else(|| "--".to_owned(), fmt_sig)
}

fn full_precision(x: Option<f64>) -> String {
    match x {
        None => "--".into(),
        Some(v) if v.is_infinite() => fmt_sig(v),
        Some(v) => v.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct InternalScores {
    pub chi: Option<f64>,
    pub di1: Option<f64>,
    pub di2: Option<f64>,
    pub silhouette: Option<f64>,
}

impl InternalScores {
    pub fn compute(
        ds: &Dataset,
        dist: &DistanceMatrix,
        c: &Labeling,
        chi_form: ChiForm,
        silhouette_form: SilhouetteForm,
    ) -> Result<Self> {
        Ok(Self {
            chi: chi_with(ds, c, chi_form)?,
            di1: dunn1(dist, c)?,
            di2: dunn2(dist, c)?,
            silhouette: silhouette_with(dist, c, silhouette_form)?,
        })
    }
}

/// Every metric for one clustering. External criteria are taken against the
/// consensus clustering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub name: String,
    pub config: Option<HyperparamConfig>,
    pub clusters: usize,
    pub anmi: Option<f64>,
    pub nmi_vs_consensus: Option<f64>,
    pub ari_vs_consensus: Option<f64>,
    pub rand: Option<f64>,
    pub jaccard: Option<f64>,
    #[serde(flatten)]
    pub internal: InternalScores,
}

impl MetricRow {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        name: impl Into<String>,
        config: Option<HyperparamConfig>,
        labeling: &Labeling,
        anmi: Option<f64>,
        consensus: &Labeling,
        ds: &Dataset,
        dist: &DistanceMatrix,
        forms: (ChiForm, SilhouetteForm),
    ) -> Result<Self> {
        let pairs_defined = labeling.n() >= 2;
        Ok(Self {
            name: name.into(),
            config,
            clusters: labeling.k(),
            anmi,
            nmi_vs_consensus: Some(nmi(labeling, consensus)?),
            ari_vs_consensus: if pairs_defined {
                ari(labeling, consensus)?
            } else {
                None
            },
            rand: if pairs_defined {
                Some(rand_index(labeling, consensus)?)
            } else {
                None
            },
            jaccard: if pairs_defined {
                jaccard(labeling, consensus)?
            } else {
                None
            },
            internal: InternalScores::compute(ds, dist, labeling, forms.0, forms.1)?,
        })
    }

    fn values(&self) -> [Option<f64>; 9] {
        [
            self.anmi,
            self.nmi_vs_consensus,
            self.ari_vs_consensus,
            self.rand,
            self.jaccard,
            self.internal.chi,
            self.internal.di1,
            self.internal.di2,
            self.internal.silhouette,
        ]
    }
}

const METRIC_NAMES: [&str; 9] = [
    "anmi",
    "nmi_vs_consensus",
    "ari_vs_consensus",
    "rand",
    "jaccard",
    "chi",
    "di1",
    "di2",
    "silhouette",
];

/// Display order and labels of the grid table.
const GRID_METRICS: [(&str, usize); 9] = [
    ("ANMI", 0),
    ("ARI", 2),
    ("CHI", 5),
    ("DI1", 6),
    ("DI2", 7),
    ("NMI", 1),
    ("Rand", 3),
    ("Jaccard", 4),
    ("Silhouette", 8),
];

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricReport {
    pub rows: Vec<MetricRow>,
}

impl MetricReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["name", "algorithm", "clusters"];
        header.extend(METRIC_NAMES);
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![
                row.name.clone(),
                row.config
                    .as_ref()
                    .map_or_else(|| "--".to_owned(), |c| c.algorithm().to_string()),
                row.clusters.to_string(),
            ];
            record.extend(row.values().iter().map(|&v| full_precision(v)));
            w.write_record(&record)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Aligned table, one row per clustering.
    pub fn render_text(&self) -> String {
        let mut header: Vec<String> = vec!["clustering".into(), "k".into()];
        header.extend(METRIC_NAMES.iter().map(|s| s.to_string()));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.name.clone(), r.clusters.to_string()];
                cells.extend(r.values().iter().map(|&v| fmt_metric(v)));
                cells
            })
            .collect();
        align(&header, &body)
    }

    /// DBSCAN rows laid out as metrics × eps columns, one block per
    /// `min_points`. The grid-wide maximum of each metric is starred and its
    /// label marked `(max.)`. `None` when the report has no DBSCAN rows.
    pub fn render_dbscan_grid(&self) -> Option<String> {
        let cells: Vec<(f64, usize, &MetricRow)> = self
            .rows
            .iter()
            .filter_map(|r| match r.config.as_ref().map(|c| &c.params) {
                Some(AlgorithmParams::Dbscan { eps, min_points }) => Some((*eps, *min_points, r)),
                _ => None,
            })
            .collect();
        if cells.is_empty() {
            return None;
        }
        let mut eps_values: Vec<f64> = cells.iter().map(|c| c.0).collect();
        eps_values.sort_by(f64::total_cmp);
        eps_values.dedup();
        let min_points: BTreeSet<usize> = cells.iter().map(|c| c.1).collect();

        let mut best: [Option<(f64, usize, usize)>; 9] = [None; 9];
        for &(eps, m, row) in &cells {
            let col = eps_values.iter().position(|&e| e == eps).unwrap();
            for (slot, value) in best.iter_mut().zip(row.values()) {
                if let Some(v) = value.filter(|v| v.is_finite()) {
                    if slot.is_none_or(|(b, _, _)| v > b) {
                        *slot = Some((v, m, col));
                    }
                }
            }
        }

        let mut header = vec![String::new()];
        header.extend(eps_values.iter().map(|e| format!("eps={}", fmt_sig(*e))));
        header.push("hyperparameter".into());
        let mut body = Vec::new();
        for &m in &min_points {
            for (i, &(label, idx)) in GRID_METRICS.iter().enumerate() {
                let marked = best[idx].is_some_and(|(_, bm, _)| bm == m);
                let mut line = vec![if marked {
                    format!("{label} (max.)")
                } else {
                    label.to_owned()
                }];
                for (col, &eps) in eps_values.iter().enumerate() {
                    let cell = cells.iter().find(|c| c.0 == eps && c.1 == m);
                    let text = cell.map_or_else(String::new, |c| {
                        let v = c.2.values()[idx];
                        let star = marked && best[idx].is_some_and(|(_, _, bc)| bc == col);
                        format!("{}{}", fmt_metric(v), if star { "*" } else { "" })
                    });
                    line.push(text);
                }
                line.push(if i == GRID_METRICS.len() / 2 {
                    format!("min_points={m}")
                } else {
                    String::new()
                });
                body.push(line);
            }
            body.push(Vec::new());
        }
        body.pop();
        Some(align(&header, &body))
    }
}

fn align(header: &[String], body: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let mut text = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i == 0 {
                let _ = write!(text, "{cell:<w$}", w = widths[0]);
            } else {
                let _ = write!(text, "  {cell:>w$}", w = widths[i]);
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(header);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&rule);
    for row in body {
        if row.is_empty() {
            line(&rule);
        } else {
            line(row);
        }
    }
    out
}
