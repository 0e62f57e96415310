//! Clustering comparison criteria, internal validity indices and the
//! per-configuration metric report.

mod external;
mod internal;
mod report;

pub use external::{anmi, ari, jaccard, nmi, nmi_from_table, rand_index};
pub use internal::{
    chi, chi_with, dunn1, dunn2, silhouette, silhouette_with, ChiForm, SilhouetteForm,
};
pub use report::{fmt_metric, fmt_sig, InternalScores, MetricReport, MetricRow};
