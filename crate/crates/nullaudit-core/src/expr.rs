//! Immutable core data model: expression matrices, sample annotations, gene
//! sets, contrasts, and fold-change matrices.
//!
//! Everything here is constructed once, validated at the boundary, and then
//! shared read-only; all operations are pure functions of their inputs.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A genes × samples table of log2-scale expression values.
///
/// Rows are genes, columns are samples; both id axes are unique and every
/// cell is finite. Construction fails unless all invariants hold.
#[derive(Debug, Clone)]
pub struct ExpressionMatrix {
    gene_ids: Vec<String>,
    sample_ids: Vec<String>,
    /// Row-major, `gene_ids.len() * sample_ids.len()` values.
    values: Vec<f64>,
    gene_index: HashMap<String, usize>,
    sample_index: HashMap<String, usize>,
}

/// One invariant violation found by [`validate_matrix`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateGeneId { gene: String },
    DuplicateSampleId { sample: String },
    NonFiniteValue { gene: String, sample: String },
    DimensionMismatch { detail: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DuplicateGeneId { gene } => write!(f, "duplicate gene id {gene}"),
            Violation::DuplicateSampleId { sample } => write!(f, "duplicate sample id {sample}"),
            Violation::NonFiniteValue { gene, sample } => {
                write!(f, "non-finite value at gene {gene}, sample {sample}")
            }
            Violation::DimensionMismatch { detail } => write!(f, "dimension mismatch: {detail}"),
        }
    }
}

/// Diagnostic check of matrix invariants over raw parts. Returns every
/// violation found; an empty list means [`ExpressionMatrix::new`] will accept
/// the same input.
pub fn validate_matrix(
    gene_ids: &[String],
    sample_ids: &[String],
    rows: &[Vec<f64>],
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for g in gene_ids {
        if !seen.insert(g) {
            violations.push(Violation::DuplicateGeneId { gene: g.clone() });
        }
    }
    let mut seen = HashSet::new();
    for s in sample_ids {
        if !seen.insert(s) {
            violations.push(Violation::DuplicateSampleId { sample: s.clone() });
        }
    }
    if rows.len() != gene_ids.len() {
        violations.push(Violation::DimensionMismatch {
            detail: format!("{} rows for {} gene ids", rows.len(), gene_ids.len()),
        });
    }
    for (gi, row) in rows.iter().enumerate() {
        if row.len() != sample_ids.len() {
            violations.push(Violation::DimensionMismatch {
                detail: format!(
                    "row {} has {} values for {} sample ids",
                    gi,
                    row.len(),
                    sample_ids.len()
                ),
            });
            continue;
        }
        for (si, v) in row.iter().enumerate() {
            if !v.is_finite() {
                violations.push(Violation::NonFiniteValue {
                    gene: gene_ids.get(gi).cloned().unwrap_or_else(|| format!("row {gi}")),
                    sample: sample_ids[si].clone(),
                });
            }
        }
    }
    violations
}

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("invalid expression matrix: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMatrix(Vec<Violation>),
    #[error("gene {0} not present in matrix")]
    MissingGene(String),
    #[error("sample {0} not present in matrix")]
    MissingSample(String),
    #[error("gene set {0} is empty")]
    EmptyGeneSet(String),
    #[error("gene set {name} has duplicate symbol {symbol}")]
    DuplicateSymbol { name: String, symbol: String },
    #[error("no genes of set {0} survive skipping; nothing to score")]
    NoGenesLeft(String),
    #[error("contrast {contrast}: selector {selector} matches {n} samples in group {group}, expected exactly 1")]
    AmbiguousContrast { contrast: String, group: String, selector: String, n: usize },
    #[error("contrast {contrast} matches no group at all")]
    EmptyContrast { contrast: String },
}

impl ExpressionMatrix {
    /// Builds a matrix after checking all invariants.
    pub fn new(
        gene_ids: Vec<String>,
        sample_ids: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, ExprError> {
        let violations = validate_matrix(&gene_ids, &sample_ids, &rows);
        if !violations.is_empty() {
            return Err(ExprError::InvalidMatrix(violations));
        }
        let mut values = Vec::with_capacity(gene_ids.len() * sample_ids.len());
        for row in &rows {
            values.extend_from_slice(row);
        }
        let gene_index = gene_ids.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let sample_index = sample_ids.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { gene_ids, sample_ids, values, gene_index, sample_index })
    }

    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn gene_index(&self, gene: &str) -> Option<usize> {
        self.gene_index.get(gene).copied()
    }

    pub fn sample_index(&self, sample: &str) -> Option<usize> {
        self.sample_index.get(sample).copied()
    }

    /// Expression row for gene index `g`.
    pub fn row(&self, g: usize) -> &[f64] {
        let w = self.sample_ids.len();
        &self.values[g * w..(g + 1) * w]
    }

    pub fn value(&self, g: usize, s: usize) -> f64 {
        self.values[g * self.sample_ids.len() + s]
    }
}

/// Per-sample metadata: owning group (cell line or subject), radiation dose,
/// timepoint, and free-form covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleAnnotation {
    pub sample_id: String,
    pub group_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dose_gy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_h: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

/// A named, nonempty, duplicate-free collection of gene symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneSet {
    pub name: String,
    pub genes: Vec<String>,
}

impl GeneSet {
    pub fn new(name: impl Into<String>, genes: Vec<String>) -> Result<Self, ExprError> {
        let name = name.into();
        if genes.is_empty() {
            return Err(ExprError::EmptyGeneSet(name));
        }
        let mut seen = HashSet::new();
        for g in &genes {
            if !seen.insert(g.clone()) {
                return Err(ExprError::DuplicateSymbol { name, symbol: g.clone() });
            }
        }
        Ok(Self { name, genes })
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

/// Equality constraints over a [`SampleAnnotation`]; a sample matches when
/// every stated constraint holds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSelector {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dose_gy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_h: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl SampleSelector {
    pub fn matches(&self, ann: &SampleAnnotation) -> bool {
        if let Some(d) = self.dose_gy {
            if ann.dose_gy != Some(d) {
                return false;
            }
        }
        if let Some(t) = self.time_h {
            if ann.time_h != Some(t) {
                return false;
            }
        }
        self.extra.iter().all(|(k, v)| ann.extra.get(k) == Some(v))
    }
}

impl std::fmt::Display for SampleSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if let Some(d) = self.dose_gy {
            parts.push(format!("dose_gy={d}"));
        }
        if let Some(t) = self.time_h {
            parts.push(format!("time_h={t}"));
        }
        for (k, v) in &self.extra {
            parts.push(format!("{k}={v}"));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A treated-vs-control pairing rule. Samples are paired within groups; for
/// every group that has any matching sample, each selector must match
/// exactly one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastSpec {
    #[serde(default)]
    pub name: String,
    pub treated: SampleSelector,
    pub control: SampleSelector,
    /// Annotation field used to pair treated with control. Only `group_id`
    /// pairing is meaningful for the audits reconstructed here.
    #[serde(default = "default_pairing_key")]
    pub pairing_key: String,
}

fn default_pairing_key() -> String {
    "group_id".to_string()
}

/// Genes × groups table of log2 fold changes (treated − control in log2
/// space), group columns sorted by group id.
#[derive(Debug, Clone)]
pub struct FoldChangeMatrix {
    gene_ids: Vec<String>,
    group_ids: Vec<String>,
    values: Vec<f64>,
    gene_index: HashMap<String, usize>,
}

impl FoldChangeMatrix {
    pub fn new(
        group_ids: Vec<String>,
        gene_ids: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, ExprError> {
        let violations = validate_matrix(&gene_ids, &group_ids, &rows);
        if !violations.is_empty() {
            return Err(ExprError::InvalidMatrix(violations));
        }
        let mut values = Vec::with_capacity(gene_ids.len() * group_ids.len());
        for row in &rows {
            values.extend_from_slice(row);
        }
        let gene_index = gene_ids.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Ok(Self { gene_ids, group_ids, values, gene_index })
    }

    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn n_groups(&self) -> usize {
        self.group_ids.len()
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn group_ids(&self) -> &[String] {
        &self.group_ids
    }

    pub fn gene_index(&self, gene: &str) -> Option<usize> {
        self.gene_index.get(gene).copied()
    }

    pub fn row(&self, g: usize) -> &[f64] {
        let w = self.group_ids.len();
        &self.values[g * w..(g + 1) * w]
    }

    pub fn value(&self, g: usize, group: usize) -> f64 {
        self.values[g * self.group_ids.len() + group]
    }
}

/// Result of [`gene_set_score`]: one score per requested sample, plus any
/// set genes that were skipped in missing-gene skip mode.
#[derive(Debug, Clone)]
pub struct GeneSetScores {
    /// sample id → mean expression of the set's genes in that sample.
    pub scores: BTreeMap<String, f64>,
    pub skipped_genes: Vec<String>,
}

/// Mean expression of a gene set's members, per sample.
///
/// With `allow_missing_genes` set, set genes absent from the matrix are
/// skipped and recorded (at least one gene must survive); otherwise a
/// missing gene is an error.
pub fn gene_set_score(
    matrix: &ExpressionMatrix,
    set: &GeneSet,
    samples: &[String],
    allow_missing_genes: bool,
) -> Result<GeneSetScores, ExprError> {
    let mut rows = Vec::with_capacity(set.genes.len());
    let mut skipped = Vec::new();
    for gene in &set.genes {
        match matrix.gene_index(gene) {
            Some(idx) => rows.push(idx),
            None if allow_missing_genes => skipped.push(gene.clone()),
            None => return Err(ExprError::MissingGene(gene.clone())),
        }
    }
    if rows.is_empty() {
        return Err(ExprError::NoGenesLeft(set.name.clone()));
    }
    let mut scores = BTreeMap::new();
    for sample in samples {
        let s = matrix
            .sample_index(sample)
            .ok_or_else(|| ExprError::MissingSample(sample.clone()))?;
        let sum: f64 = rows.iter().map(|&g| matrix.value(g, s)).sum();
        scores.insert(sample.clone(), sum / rows.len() as f64);
    }
    Ok(GeneSetScores { scores, skipped_genes: skipped })
}

/// The treated/control sample pair resolved for one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContrastPair {
    pub group_id: String,
    pub treated_sample: String,
    pub control_sample: String,
}

/// Resolves a contrast against annotations: for every group with at least
/// one matching sample, each selector must match exactly one sample. Groups
/// come back sorted by group id.
pub fn resolve_contrast(
    annotations: &[SampleAnnotation],
    contrast: &ContrastSpec,
) -> Result<Vec<ContrastPair>, ExprError> {
    let mut groups: BTreeMap<&str, Vec<&SampleAnnotation>> = BTreeMap::new();
    for ann in annotations {
        groups.entry(&ann.group_id).or_default().push(ann);
    }
    let mut pairs = Vec::new();
    for (group, anns) in groups {
        let treated: Vec<&str> = anns
            .iter()
            .filter(|a| contrast.treated.matches(a))
            .map(|a| a.sample_id.as_str())
            .collect();
        let control: Vec<&str> = anns
            .iter()
            .filter(|a| contrast.control.matches(a))
            .map(|a| a.sample_id.as_str())
            .collect();
        if treated.is_empty() && control.is_empty() {
            continue; // group not covered by this contrast
        }
        if treated.len() != 1 {
            return Err(ExprError::AmbiguousContrast {
                contrast: contrast.name.clone(),
                group: group.to_string(),
                selector: contrast.treated.to_string(),
                n: treated.len(),
            });
        }
        if control.len() != 1 {
            return Err(ExprError::AmbiguousContrast {
                contrast: contrast.name.clone(),
                group: group.to_string(),
                selector: contrast.control.to_string(),
                n: control.len(),
            });
        }
        pairs.push(ContrastPair {
            group_id: group.to_string(),
            treated_sample: treated[0].to_string(),
            control_sample: control[0].to_string(),
        });
    }
    if pairs.is_empty() {
        return Err(ExprError::EmptyContrast { contrast: contrast.name.clone() });
    }
    Ok(pairs)
}

/// Per-gene log2 fold change (treated − control) for every group covered by
/// the contrast.
pub fn fold_changes(
    matrix: &ExpressionMatrix,
    annotations: &[SampleAnnotation],
    contrast: &ContrastSpec,
) -> Result<FoldChangeMatrix, ExprError> {
    let pairs = resolve_contrast(annotations, contrast)?;
    let mut group_ids = Vec::with_capacity(pairs.len());
    let mut cols = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let t = matrix
            .sample_index(&pair.treated_sample)
            .ok_or_else(|| ExprError::MissingSample(pair.treated_sample.clone()))?;
        let c = matrix
            .sample_index(&pair.control_sample)
            .ok_or_else(|| ExprError::MissingSample(pair.control_sample.clone()))?;
        group_ids.push(pair.group_id.clone());
        cols.push((t, c));
    }
    let rows: Vec<Vec<f64>> = (0..matrix.n_genes())
        .map(|g| cols.iter().map(|&(t, c)| matrix.value(g, t) - matrix.value(g, c)).collect())
        .collect();
    FoldChangeMatrix::new(group_ids, matrix.gene_ids().to_vec(), rows)
}
