//! Radiation-response module discovery: top-variance gene selection,
//! agglomerative clustering with correlation distance and unweighted average
//! linkage (UPGMA), module labeling by mean fold change, and per-group
//! module response scores.
//!
//! Clustering is fully deterministic: merge costs are recomputed from the
//! base distance matrix with a fixed summation order, and equal costs are
//! broken by the lexicographically smallest pair of cluster representatives
//! (a cluster is represented by its smallest member index).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::FoldChangeMatrix;
use crate::stats::{self, row_variances};

/// Which labeled module a score refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleLabel {
    Repressed,
    Induced,
}

impl std::fmt::Display for ModuleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModuleLabel::Repressed => write!(f, "repressed"),
            ModuleLabel::Induced => write!(f, "induced"),
        }
    }
}

/// Output of the discovery pipeline over one fold-change matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterModel {
    /// Genes that entered clustering, in selection order (descending
    /// variance, ties by ascending symbol).
    pub selected_genes: Vec<String>,
    /// Cluster index (0-based) per selected gene.
    pub assignments: Vec<usize>,
    pub k: usize,
    /// Mean fold change of each cluster over its genes and all groups.
    pub cluster_means: Vec<f64>,
    /// Cluster with the most negative mean fold change.
    pub repressed: usize,
    /// Cluster with the most positive mean fold change.
    pub induced: usize,
}

impl ClusterModel {
    pub fn cluster_of(&self, label: ModuleLabel) -> usize {
        match label {
            ModuleLabel::Repressed => self.repressed,
            ModuleLabel::Induced => self.induced,
        }
    }

    /// Genes of one cluster, in selection order.
    pub fn members(&self, cluster: usize) -> Vec<&str> {
        self.selected_genes
            .iter()
            .zip(&self.assignments)
            .filter(|(_, &c)| c == cluster)
            .map(|(g, _)| g.as_str())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k = {k} exceeds available gene count {available}")]
    KTooLarge { k: usize, available: usize },
    #[error("k must be positive")]
    KZero,
    #[error("gene {0} not present in the fold-change matrix")]
    UnknownGene(String),
    #[error("gene {0} has zero variance across groups; correlation distance undefined")]
    ZeroVariance(String),
    #[error("cannot label modules: all {k} clusters share mean fold change {mean}")]
    TieBetweenClusters { k: usize, mean: f64 },
}

/// The `k` genes with the largest fold-change row variance, ordered by
/// descending variance with ties broken by ascending gene symbol.
pub fn top_variance_genes(fc: &FoldChangeMatrix, k: usize) -> Result<Vec<String>, ClusterError> {
    if k > fc.n_genes() {
        return Err(ClusterError::KTooLarge { k, available: fc.n_genes() });
    }
    let vars = row_variances(fc);
    let mut order: Vec<usize> = (0..fc.n_genes()).collect();
    order.sort_by(|&a, &b| {
        vars[b]
            .partial_cmp(&vars[a])
            .unwrap()
            .then_with(|| fc.gene_ids()[a].cmp(&fc.gene_ids()[b]))
    });
    Ok(order[..k].iter().map(|&i| fc.gene_ids()[i].clone()).collect())
}

/// Dense symmetric distance table over clustering items.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// Pairwise correlation distance `1 − pearson_r` between the fold-change
/// rows of the selected genes. Every selected row must be non-constant.
pub fn correlation_distance_matrix(
    fc: &FoldChangeMatrix,
    genes: &[String],
) -> Result<DistanceMatrix, ClusterError> {
    let rows: Vec<&[f64]> = genes
        .iter()
        .map(|g| {
            fc.gene_index(g)
                .map(|i| fc.row(i))
                .ok_or_else(|| ClusterError::UnknownGene(g.clone()))
        })
        .collect::<Result<_, _>>()?;
    // zero-variance rows rank last in variance selection, so they cannot
    // reach this point through the pipeline; reject them explicitly anyway
    for (g, row) in genes.iter().zip(&rows) {
        if stats::sample_variance(row) == 0.0 {
            return Err(ClusterError::ZeroVariance(g.clone()));
        }
    }
    let n = genes.len();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = stats::pearson_r(rows[i], rows[j])
                .map_err(|_| ClusterError::ZeroVariance(genes[i].clone()))?
                .r;
            let v = 1.0 - r;
            table[i * n + j] = v;
            table[j * n + i] = v;
        }
    }
    Ok(DistanceMatrix { n, d: table })
}

/// Mean of all base distances between two member sets, summed in ascending
/// member order so the result is a deterministic function of the inputs.
fn mean_linkage(dist: &DistanceMatrix, a: &[usize], b: &[usize]) -> f64 {
    let mut sum = 0.0;
    for &i in a {
        for &j in b {
            sum += dist.at(i, j);
        }
    }
    sum / (a.len() * b.len()) as f64
}

/// Agglomerative UPGMA cut at exactly `k` clusters.
///
/// Returns one cluster index per item; clusters are numbered by ascending
/// smallest member, so the numbering is canonical for a given partition.
pub fn average_linkage_cluster(dist: &DistanceMatrix, k: usize) -> Result<Vec<usize>, ClusterError> {
    let n = dist.len();
    if k == 0 {
        return Err(ClusterError::KZero);
    }
    if k > n {
        return Err(ClusterError::KTooLarge { k, available: n });
    }
    // clusters stay sorted by smallest member (their representative)
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while clusters.len() > k {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let cost = mean_linkage(dist, &clusters[a], &clusters[b]);
                let better = match best {
                    None => true,
                    // representatives are clusters[a][0] < clusters[b][0];
                    // scanning in ascending (a, b) order makes the first
                    // strict improvement the lexicographic winner at ties
                    Some((c, _, _)) => cost < c,
                };
                if better {
                    best = Some((cost, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("more than k clusters implies a mergeable pair");
        let merged_b = clusters.remove(b);
        let target = &mut clusters[a];
        target.extend(merged_b);
        target.sort_unstable();
        clusters.sort_by_key(|c| c[0]);
    }
    let mut assignments = vec![0; n];
    for (idx, cluster) in clusters.iter().enumerate() {
        for &item in cluster {
            assignments[item] = idx;
        }
    }
    Ok(assignments)
}

/// Labels clusters by mean fold change: the minimizing cluster is the
/// repressed module, the maximizing one the induced module. Fails when all
/// clusters share the same mean (labels would be meaningless).
pub fn label_modules(
    fc: &FoldChangeMatrix,
    selected_genes: &[String],
    assignments: &[usize],
) -> Result<ClusterModel, ClusterError> {
    assert_eq!(selected_genes.len(), assignments.len());
    assert!(!assignments.is_empty(), "label_modules over empty assignments");
    let k = assignments.iter().max().unwrap() + 1;
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (gene, &c) in selected_genes.iter().zip(assignments) {
        let row = fc.row(fc.gene_index(gene).expect("selected gene missing from matrix"));
        sums[c] += row.iter().sum::<f64>();
        counts[c] += row.len();
    }
    let cluster_means: Vec<f64> =
        sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    // first extremum wins, so non-degenerate ties resolve deterministically
    let mut repressed = 0;
    let mut induced = 0;
    for c in 1..k {
        if cluster_means[c] < cluster_means[repressed] {
            repressed = c;
        }
        if cluster_means[c] > cluster_means[induced] {
            induced = c;
        }
    }
    if cluster_means[repressed] == cluster_means[induced] {
        return Err(ClusterError::TieBetweenClusters { k, mean: cluster_means[repressed] });
    }
    Ok(ClusterModel {
        selected_genes: selected_genes.to_vec(),
        assignments: assignments.to_vec(),
        k,
        cluster_means,
        repressed,
        induced,
    })
}

/// Mean fold change of the labeled module's genes, per group.
pub fn module_response_scores(
    fc: &FoldChangeMatrix,
    model: &ClusterModel,
    which: ModuleLabel,
) -> BTreeMap<String, f64> {
    let cluster = model.cluster_of(which);
    let rows: Vec<usize> = model
        .selected_genes
        .iter()
        .zip(&model.assignments)
        .filter(|(_, &c)| c == cluster)
        .map(|(g, _)| fc.gene_index(g).expect("selected gene missing from matrix"))
        .collect();
    let mut scores = BTreeMap::new();
    for (gi, group) in fc.group_ids().iter().enumerate() {
        let sum: f64 = rows.iter().map(|&r| fc.value(r, gi)).sum();
        scores.insert(group.clone(), sum / rows.len() as f64);
    }
    scores
}

/// Full discovery pipeline: top-variance selection, correlation-distance
/// UPGMA cut at `k`, then labeling.
pub fn discover_modules(
    fc: &FoldChangeMatrix,
    top_k: usize,
    k: usize,
) -> Result<ClusterModel, ClusterError> {
    let selected = top_variance_genes(fc, top_k)?;
    let dist = correlation_distance_matrix(fc, &selected)?;
    let assignments = average_linkage_cluster(&dist, k)?;
    label_modules(fc, &selected, &assignments)
}

/// Delimited export: gene, 1-based cluster index, label (if any).
pub fn render_cluster_tsv(model: &ClusterModel) -> String {
    let mut out = String::from("gene\tcluster\tlabel\n");
    for (gene, &c) in model.selected_genes.iter().zip(&model.assignments) {
        let label = if c == model.repressed {
            "repressed"
        } else if c == model.induced {
            "induced"
        } else {
            ""
        };
        out.push_str(&format!("{}\t{}\t{}\n", gene, c + 1, label));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FoldChangeMatrix;

    fn fc_from_rows(genes: &[&str], groups: &[&str], rows: Vec<Vec<f64>>) -> FoldChangeMatrix {
        FoldChangeMatrix::new(
            groups.iter().map(|s| s.to_string()).collect(),
            genes.iter().map(|s| s.to_string()).collect(),
            rows,
        )
        .unwrap()
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
    }

    #[test]
    fn top_variance_with_k_equal_gene_count_returns_all() {
        let fc = fc_from_rows(
            &["A", "B"],
            &["g1", "g2"],
            vec![vec![0.0, 1.0], vec![5.0, 9.0]],
        );
        let got = top_variance_genes(&fc, 2).unwrap();
        assert_eq!(got, vec!["B".to_string(), "A".to_string()]);
    }

    #[test]
    fn constant_gene_is_excluded_first() {
        let fc = fc_from_rows(
            &["A", "B", "C"],
            &["g1", "g2"],
            vec![vec![0.0, 1.0], vec![2.0, 2.0], vec![5.0, 9.0]],
        );
        let got = top_variance_genes(&fc, 2).unwrap();
        assert!(!got.contains(&"B".to_string()));
    }

    #[test]
    fn top_variance_matches_exhaustive_sort_oracle() {
        let mut state = 17u64;
        let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..6).map(|_| lcg(&mut state)).collect()).collect();
        let genes: Vec<String> = (0..20).map(|i| format!("G{i:02}")).collect();
        let fc = FoldChangeMatrix::new(
            (0..6).map(|i| format!("grp{i}")).collect(),
            genes.clone(),
            rows.clone(),
        )
        .unwrap();
        // brute force: compute each variance long-hand, full sort
        let mut scored: Vec<(String, f64)> = genes
            .iter()
            .zip(&rows)
            .map(|(g, row)| {
                let m = row.iter().sum::<f64>() / row.len() as f64;
                let v = row.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (row.len() - 1) as f64;
                (g.clone(), v)
            })
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        let want: Vec<String> = scored[..5].iter().map(|(g, _)| g.clone()).collect();
        assert_eq!(top_variance_genes(&fc, 5).unwrap(), want);
    }

    #[test]
    fn distance_of_row_with_itself_is_zero() {
        let fc = fc_from_rows(&["A", "B"], &["g1", "g2", "g3"], vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
        ]);
        let d = correlation_distance_matrix(&fc, &["A".into(), "B".into()]).unwrap();
        assert!(d.at(0, 1).abs() < 1e-12);
        assert_eq!(d.at(0, 0), 0.0);
    }

    #[test]
    fn distance_of_row_with_negation_is_two() {
        let fc = fc_from_rows(&["A", "B"], &["g1", "g2", "g3"], vec![
            vec![1.0, 2.0, 3.0],
            vec![-1.0, -2.0, -3.0],
        ]);
        let d = correlation_distance_matrix(&fc, &["A".into(), "B".into()]).unwrap();
        assert!((d.at(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn distance_invariant_under_positive_affine_transform() {
        let fc = fc_from_rows(&["A", "B"], &["g1", "g2", "g3", "g4"], vec![
            vec![0.5, -1.0, 2.0, 0.0],
            vec![0.5 * 3.0 + 1.0, -1.0 * 3.0 + 1.0, 2.0 * 3.0 + 1.0, 1.0],
        ]);
        let d = correlation_distance_matrix(&fc, &["A".into(), "B".into()]).unwrap();
        assert!(d.at(0, 1).abs() < 1e-12);
    }

    #[test]
    fn constant_row_is_rejected() {
        let fc = fc_from_rows(&["A", "B"], &["g1", "g2"], vec![
            vec![1.0, 1.0],
            vec![0.0, 2.0],
        ]);
        let err = correlation_distance_matrix(&fc, &["A".into(), "B".into()]).unwrap_err();
        assert!(matches!(err, ClusterError::ZeroVariance(g) if g == "A"));
    }

    #[test]
    fn k_equal_item_count_gives_singletons() {
        let d = DistanceMatrix::from_fn(4, |i, j| (i + j) as f64);
        assert_eq!(average_linkage_cluster(&d, 4).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn unique_cheapest_merge_wins() {
        // d(0,1)=0.1, d(0,2)=d(1,2)=1.0 → clusters {0,1},{2}
        let d = DistanceMatrix::from_fn(3, |i, j| if i == 0 && j == 1 { 0.1 } else { 1.0 });
        assert_eq!(average_linkage_cluster(&d, 2).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn k_one_collects_everything() {
        let d = DistanceMatrix::from_fn(5, |i, j| ((i * 7 + j * 3) % 5) as f64 + 0.5);
        assert_eq!(average_linkage_cluster(&d, 1).unwrap(), vec![0; 5]);
    }

    /// Naive UPGMA that recomputes every inter-cluster mean each step from
    /// an assignment vector, fully independent of the implementation above.
    fn naive_upgma(dist: &DistanceMatrix, k: usize) -> Vec<usize> {
        let n = dist.len();
        let mut member_of: Vec<usize> = (0..n).collect();
        loop {
            let mut reps: Vec<usize> = {
                let mut seen = std::collections::BTreeSet::new();
                let mut reps = Vec::new();
                for i in 0..n {
                    if seen.insert(member_of[i]) {
                        reps.push(member_of[i]);
                    }
                }
                reps.sort();
                reps
            };
            if reps.len() <= k {
                break;
            }
            let members = |rep: usize| -> Vec<usize> {
                (0..n).filter(|&i| member_of[i] == rep).collect()
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for ai in 0..reps.len() {
                for bi in (ai + 1)..reps.len() {
                    let (a, b) = (members(reps[ai]), members(reps[bi]));
                    let mut sum = 0.0;
                    for &x in &a {
                        for &y in &b {
                            sum += dist.at(x, y);
                        }
                    }
                    let cost = sum / (a.len() * b.len()) as f64;
                    if best.map_or(true, |(c, _, _)| cost < c) {
                        best = Some((cost, reps[ai], reps[bi]));
                    }
                }
            }
            let (_, ra, rb) = best.unwrap();
            let target = ra.min(rb);
            for i in 0..n {
                if member_of[i] == ra || member_of[i] == rb {
                    member_of[i] = target;
                }
            }
            reps.clear();
        }
        // canonicalize: number clusters by smallest member
        let mut rep_to_idx = std::collections::BTreeMap::new();
        for i in 0..n {
            let next = rep_to_idx.len();
            rep_to_idx.entry(member_of[i]).or_insert(next);
        }
        (0..n).map(|i| rep_to_idx[&member_of[i]]).collect()
    }

    #[test]
    fn matches_naive_upgma_oracle_on_random_tables() {
        let mut state = 4242u64;
        for trial in 0..40 {
            let n = 8;
            let d = {
                let mut vals = vec![0.0; n * n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        // coarse grid ⇒ engineered ties occur regularly
                        let v = ((lcg(&mut state).abs() * 8.0).round()) / 4.0 + 0.25;
                        vals[i * n + j] = v;
                        vals[j * n + i] = v;
                    }
                }
                DistanceMatrix { n, d: vals }
            };
            for k in 1..=n {
                let got = average_linkage_cluster(&d, k).unwrap();
                let want = naive_upgma(&d, k);
                assert_eq!(got, want, "trial {trial}, k {k}");
            }
        }
    }

    fn three_module_fc() -> FoldChangeMatrix {
        // three perfectly coherent two-gene modules with cluster means
        // −1.2, 0.0, +0.9; within-module rows are affine images of each
        // other (correlation distance 0)
        let p = [1.0, -0.5, 0.25, 0.75]; // mean 0.375
        let q = [1.0, 1.0, -1.0, -1.0]; // mean 0
        let rows = vec![
            p.iter().map(|v| v - 1.575).collect::<Vec<f64>>(), // MA1, mean −1.2
            p.iter().map(|v| 0.5 * v - 1.3875).collect(),      // MA2, mean −1.2
            q.to_vec(),                                        // MB1, mean 0
            q.iter().map(|v| 2.0 * v).collect(),               // MB2, mean 0
            p.iter().map(|v| -v + 1.275).collect(),            // MC1, mean 0.9
            p.iter().map(|v| -0.5 * v + 1.0875).collect(),     // MC2, mean 0.9
        ];
        FoldChangeMatrix::new(
            vec!["g1".into(), "g2".into(), "g3".into(), "g4".into()],
            vec!["MA1".into(), "MA2".into(), "MB1".into(), "MB2".into(), "MC1".into(), "MC2".into()],
            rows,
        )
        .unwrap()
    }

    #[test]
    fn labels_pick_extreme_mean_clusters() {
        let fc = three_module_fc();
        let genes: Vec<String> = fc.gene_ids().to_vec();
        // two genes per cluster as constructed
        let assignments = vec![0, 0, 1, 1, 2, 2];
        let model = label_modules(&fc, &genes, &assignments).unwrap();
        assert_eq!(model.repressed, 0);
        assert_eq!(model.induced, 2);
        assert!(model.cluster_means[0] < model.cluster_means[1]);
        assert!(model.cluster_means[1] < model.cluster_means[2]);
    }

    #[test]
    fn all_equal_means_is_a_tie() {
        let fc = fc_from_rows(&["A", "B"], &["g1", "g2"], vec![
            vec![-0.5, -0.5],
            vec![-0.5, -0.5],
        ]);
        let err = label_modules(&fc, &["A".into(), "B".into()], &[0, 1]).unwrap_err();
        assert!(matches!(err, ClusterError::TieBetweenClusters { .. }));
    }

    #[test]
    fn single_gene_cluster_score_is_identity() {
        let fc = fc_from_rows(&["A", "B"], &["g1", "g2"], vec![
            vec![-1.5, 2.0],
            vec![4.0, 5.0],
        ]);
        let model = label_modules(&fc, &["A".into(), "B".into()], &[0, 1]).unwrap();
        let scores = module_response_scores(&fc, &model, ModuleLabel::Repressed);
        assert_eq!(scores["g1"], -1.5);
        assert_eq!(scores["g2"], 2.0);
    }

    #[test]
    fn module_score_is_mean_of_member_fold_changes() {
        let fc = fc_from_rows(&["A", "B"], &["g1"], vec![vec![-1.0], vec![-3.0]]);
        let model = ClusterModel {
            selected_genes: vec!["A".into(), "B".into()],
            assignments: vec![0, 0],
            k: 1,
            cluster_means: vec![-2.0],
            repressed: 0,
            induced: 0,
        };
        let scores = module_response_scores(&fc, &model, ModuleLabel::Repressed);
        assert_eq!(scores["g1"], -2.0);
    }

    #[test]
    fn sixteen_group_scores_match_submatrix_mean_oracle() {
        let mut state = 77u64;
        let genes: Vec<String> = (0..10).map(|i| format!("G{i}")).collect();
        let groups: Vec<String> = (0..16).map(|i| format!("L{i:02}")).collect();
        let rows: Vec<Vec<f64>> =
            (0..10).map(|_| (0..16).map(|_| lcg(&mut state)).collect()).collect();
        let fc = FoldChangeMatrix::new(groups.clone(), genes.clone(), rows.clone()).unwrap();
        let assignments = vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2];
        let model = label_modules(&fc, &genes, &assignments).unwrap();
        let scores = module_response_scores(&fc, &model, ModuleLabel::Induced);
        let members: Vec<usize> = (0..10).filter(|&g| assignments[g] == model.induced).collect();
        for (gi, group) in groups.iter().enumerate() {
            let want: f64 =
                members.iter().map(|&g| rows[g][gi]).sum::<f64>() / members.len() as f64;
            assert!((scores[group] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pipeline_is_deterministic_and_order_invariant() {
        let fc = three_module_fc();
        let a = discover_modules(&fc, 6, 3).unwrap();
        let b = discover_modules(&fc, 6, 3).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.repressed, b.repressed);

        // permute gene rows; the partition over gene names must not change
        let perm = [3usize, 0, 5, 1, 4, 2];
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| fc.row(i).to_vec()).collect();
        let genes: Vec<String> = perm.iter().map(|&i| fc.gene_ids()[i].clone()).collect();
        let permuted =
            FoldChangeMatrix::new(fc.group_ids().to_vec(), genes, rows).unwrap();
        let c = discover_modules(&permuted, 6, 3).unwrap();
        let partition = |m: &ClusterModel| -> Vec<Vec<String>> {
            let mut by_cluster: Vec<Vec<String>> = vec![Vec::new(); m.k];
            for (g, &cl) in m.selected_genes.iter().zip(&m.assignments) {
                by_cluster[cl].push(g.clone());
            }
            for v in &mut by_cluster {
                v.sort();
            }
            by_cluster.sort();
            by_cluster
        };
        assert_eq!(partition(&a), partition(&c));
    }

    #[test]
    fn cluster_tsv_lists_gene_cluster_label() {
        let fc = three_module_fc();
        let model = discover_modules(&fc, 6, 3).unwrap();
        let tsv = render_cluster_tsv(&model);
        assert!(tsv.starts_with("gene\tcluster\tlabel\n"));
        assert_eq!(tsv.lines().count(), 7);
        assert!(tsv.contains("repressed"));
        assert!(tsv.contains("induced"));
    }
}
