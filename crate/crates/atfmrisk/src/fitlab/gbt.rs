//! Gradient boosted regression trees under squared loss.
//!
//! Features are the average delay plus one-hot reason dummies. Trees are
//! grown by exhaustive greedy search for the split with the largest
//! squared-error reduction; ties go to the lowest feature index, then the
//! lowest threshold, so training is deterministic for a given input order.

use std::collections::BTreeMap;

use super::{FitError, RegulationSample};
use crate::ingest::ReasonCode;

/// Boosting hyperparameters. The defaults are conventional values for
/// tabular regression; none of them is data-derived.
#[derive(Debug, Clone)]
pub struct GbtParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Carried for interface stability; the exhaustive split search draws
    /// no random numbers, so fitting is deterministic regardless.
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_leaf: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

/// One regression tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn predict(&self, features: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if features[*feature] < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    fn is_stump(&self) -> bool {
        self.nodes.len() == 1
    }
}

/// Fitted boosting ensemble.
#[derive(Debug, Clone)]
pub struct GbtModel {
    pub trees: Vec<RegressionTree>,
    pub learning_rate: f64,
    /// Training-set mean of the target, the additive starting point.
    pub init_value: f64,
    /// Feature 0 is avg_delay; the rest are dummies for `dummy_reasons`
    /// in order.
    pub dummy_reasons: Vec<ReasonCode>,
    /// Training MSE after each tree, for loss-curve inspection.
    pub training_mse: Vec<f64>,
}

impl GbtModel {
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = vec!["avg_delay".to_string()];
        names.extend(self.dummy_reasons.iter().map(|r| format!("D_{r}")));
        names
    }

    fn features_of(&self, sample: &RegulationSample) -> Vec<f64> {
        let mut row = vec![0.0; 1 + self.dummy_reasons.len()];
        row[0] = sample.avg_delay;
        if let Some(reason) = sample.reason {
            if let Some(pos) = self.dummy_reasons.iter().position(|r| *r == reason) {
                row[1 + pos] = 1.0;
            }
        }
        row
    }
}

/// Relative importances: total squared-error reduction per feature,
/// normalized to sum to one. Empty when no tree split at all.
#[derive(Debug, Clone, Default)]
pub struct ImportanceReport {
    pub per_feature: BTreeMap<String, f64>,
    /// Combined importance of all reason dummies.
    pub reason_aggregate: f64,
}

/// Fits a squared-loss boosting ensemble to the samples.
///
/// Every sample must carry a reason (the dummy features need it).
pub fn fit_gbt(samples: &[RegulationSample], params: &GbtParams) -> Result<GbtModel, FitError> {
    if samples.is_empty() {
        return Err(FitError::TooFewSamples { needed: 1, got: 0 });
    }
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(FitError::InvalidParams(format!(
            "learning_rate must be in (0, 1], got {}",
            params.learning_rate
        )));
    }
    let mut reasons: Vec<ReasonCode> = Vec::new();
    for (index, s) in samples.iter().enumerate() {
        match s.reason {
            Some(r) => {
                if !reasons.contains(&r) {
                    reasons.push(r);
                }
            }
            None => return Err(FitError::MissingReason { index }),
        }
    }
    reasons.sort();

    let n = samples.len();
    let d = 1 + reasons.len();
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let mut row = vec![0.0; d];
            row[0] = s.avg_delay;
            let pos = reasons
                .iter()
                .position(|r| Some(*r) == s.reason)
                .expect("checked");
            row[1 + pos] = 1.0;
            row
        })
        .collect();
    let y: Vec<f64> = samples.iter().map(|s| s.avg_cost).collect();

    let init_value = y.iter().sum::<f64>() / n as f64;
    let mut predictions = vec![init_value; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut training_mse = Vec::with_capacity(params.n_trees);

    for _ in 0..params.n_trees {
        let residuals: Vec<f64> = y.iter().zip(&predictions).map(|(t, p)| t - p).collect();
        let tree = grow_tree(&rows, &residuals, params);
        for (i, row) in rows.iter().enumerate() {
            predictions[i] += params.learning_rate * tree.predict(row);
        }
        let mse = y
            .iter()
            .zip(&predictions)
            .map(|(t, p)| (t - p) * (t - p))
            .sum::<f64>()
            / n as f64;
        training_mse.push(mse);
        trees.push(tree);
    }

    Ok(GbtModel {
        trees,
        learning_rate: params.learning_rate,
        init_value,
        dummy_reasons: reasons,
        training_mse,
    })
}

/// Ensemble prediction for one sample.
pub fn gbt_predict(model: &GbtModel, sample: &RegulationSample) -> f64 {
    let features = model.features_of(sample);
    model.init_value
        + model.learning_rate
            * model
                .trees
                .iter()
                .map(|t| t.predict(&features))
                .sum::<f64>()
}

/// Split-gain importances aggregated over the ensemble.
pub fn gbt_importance(model: &GbtModel) -> ImportanceReport {
    let names = model.feature_names();
    let mut gains = vec![0.0; names.len()];
    for tree in &model.trees {
        for node in &tree.nodes {
            if let TreeNode::Split { feature, gain, .. } = node {
                gains[*feature] += gain;
            }
        }
    }
    let total: f64 = gains.iter().sum();
    if total <= 0.0 || model.trees.iter().all(RegressionTree::is_stump) {
        return ImportanceReport::default();
    }
    let per_feature: BTreeMap<String, f64> = names
        .iter()
        .cloned()
        .zip(gains.iter().map(|g| g / total))
        .collect();
    let reason_aggregate = per_feature
        .iter()
        .filter(|(k, _)| k.starts_with("D_"))
        .map(|(_, v)| v)
        .sum();
    ImportanceReport {
        per_feature,
        reason_aggregate,
    }
}

fn grow_tree(rows: &[Vec<f64>], targets: &[f64], params: &GbtParams) -> RegressionTree {
    let mut nodes = Vec::new();
    let indices: Vec<usize> = (0..rows.len()).collect();
    build_node(rows, targets, &indices, 0, params, &mut nodes);
    RegressionTree { nodes }
}

/// Recursively grows the subtree for `indices`, returning its node id.
fn build_node(
    rows: &[Vec<f64>],
    targets: &[f64],
    indices: &[usize],
    depth: usize,
    params: &GbtParams,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let mean = indices.iter().map(|&i| targets[i]).sum::<f64>() / indices.len() as f64;
    if depth >= params.max_depth || indices.len() < 2 * params.min_samples_leaf {
        nodes.push(TreeNode::Leaf { value: mean });
        return nodes.len() - 1;
    }

    let Some(split) = best_split(rows, targets, indices, params.min_samples_leaf) else {
        nodes.push(TreeNode::Leaf { value: mean });
        return nodes.len() - 1;
    };

    let (mut left_idx, mut right_idx) = (Vec::new(), Vec::new());
    for &i in indices {
        if rows[i][split.feature] < split.threshold {
            left_idx.push(i);
        } else {
            right_idx.push(i);
        }
    }

    let id = nodes.len();
    nodes.push(TreeNode::Leaf { value: mean }); // placeholder until children exist
    let left = build_node(rows, targets, &left_idx, depth + 1, params, nodes);
    let right = build_node(rows, targets, &right_idx, depth + 1, params, nodes);
    nodes[id] = TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        gain: split.gain,
        left,
        right,
    };
    id
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Exhaustive search for the largest squared-error reduction. Candidates are
/// midpoints between consecutive distinct feature values with at least
/// `min_leaf` samples on each side. Strictly-greater comparison plus
/// ascending iteration order enforces the lowest-feature, lowest-threshold
/// tie-break.
fn best_split(
    rows: &[Vec<f64>],
    targets: &[f64],
    indices: &[usize],
    min_leaf: usize,
) -> Option<Split> {
    let m = indices.len();
    let total_sum: f64 = indices.iter().map(|&i| targets[i]).sum();
    let parent_score = total_sum * total_sum / m as f64;

    let mut best: Option<Split> = None;
    for feature in 0..rows[0].len() {
        let mut sorted: Vec<(f64, f64)> = indices
            .iter()
            .map(|&i| (rows[i][feature], targets[i]))
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left_sum = 0.0;
        for pos in 1..m {
            left_sum += sorted[pos - 1].1;
            if pos < min_leaf || m - pos < min_leaf {
                continue;
            }
            let (v_prev, v_next) = (sorted[pos - 1].0, sorted[pos].0);
            if v_prev == v_next {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let gain = left_sum * left_sum / pos as f64 + right_sum * right_sum / (m - pos) as f64
                - parent_score;
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Split {
                    feature,
                    threshold: (v_prev + v_next) / 2.0,
                    gain,
                });
            }
        }
    }
    best.filter(|s| s.gain > 0.0)
}
