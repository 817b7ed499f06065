//! Audits gene-expression claims against seeded empirical null models.
//!
//! The library reconstructs three falsification pipelines — cross-sample
//! correlation claims, module-regulator claims, and survival-signature
//! claims — and tests each observed statistic against a null distribution
//! built from random gene sets drawn from the same expression matrix.
//! Every randomized step is driven by per-draw seeds derived from a single
//! claim seed, so results are bit-identical across runs and worker counts.
//!
//! Module map:
//!
//! * [`expr`] — immutable expression data model (matrices, gene sets,
//!   annotations, contrasts, fold changes)
//! * [`geo`] — GEO series-matrix / platform-annotation / clinical-table
//!   parsing, probe collapsing, and accession fetching
//! * [`stats`] — ranking, Pearson/Spearman correlation, row variances
//! * [`nulls`] — seeded random gene-set sampling, null distributions,
//!   empirical p-values
//! * [`cluster`] — top-variance gene selection, UPGMA clustering,
//!   repressed/induced module labeling, module response scores
//! * [`survival`] — univariate Cox partial-likelihood fitting (Efron ties)
//!   and Harrell's concordance index
//! * [`config`] — the audit configuration document (datasets, gene sets,
//!   contrasts, claims)
//! * [`audit`] — claim runners and verdict classification
//! * [`report`] — report emission, null-sample CSV export, replay
//!   verification
//! * [`svg`] — plain SVG scatter/histogram figures

pub mod audit;
pub mod cluster;
pub mod config;
pub mod expr;
pub mod geo;
pub mod nulls;
pub mod report;
pub mod stats;
pub mod survival;
pub mod svg;

/// Version string recorded in every report.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
