use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{speakers_in_order, LabeledUtterance, Split};
use super::eval::evaluate;
use super::registry::Registry;
use super::stats::mean_sd;
use crate::error::{Error, Result};
use crate::supra::PipelineConfig;

/// Fraction of each speaker's utterances in a subset used for enrollment.
pub const TRAIN_FRACTION: f64 = 1.0 / 3.0;

/// Seeded random partition of `0..n` into `k` subsets of `n / k` indices;
/// the last subset also takes the remainder.
pub fn partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::param("cross-validation needs at least two subsets"));
    }
    if n < k {
        return Err(Error::param(format!("{n} items cannot fill {k} subsets")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let size = n / k;
    Ok((0..k)
        .map(|f| {
            let end = if f + 1 == k { n } else { (f + 1) * size };
            order[f * size..end].to_vec()
        })
        .collect())
}

/// Outcome of one subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train: usize,
    pub test: usize,
    /// `(condition, accuracy %)` in condition-name order; empty when
    /// the fold is invalid.
    pub accuracy: Vec<(String, f64)>,
    /// Why the fold could not be evaluated.
    pub invalid: Option<String>,
}

/// Mean and sample standard deviation of fold accuracies for a condition
/// over the valid folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub folds: usize,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: Vec<FoldResult>,
    pub summary: Vec<ConditionSummary>,
}

impl CrossValidation {
    pub fn condition(&self, name: &str) -> Option<&ConditionSummary> {
        self.summary.iter().find(|s| s.condition == name)
    }
}

/// Splits one subset: for every speaker, the first `ceil(count / 3)` of its
/// neutral-condition utterances enroll and everything else is tested.
fn split_subset(
    items: &[LabeledUtterance],
    subset: &[usize],
    speakers: &[String],
    neutral: &str,
) -> std::result::Result<(Vec<LabeledUtterance>, Vec<LabeledUtterance>), String> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for id in speakers {
        let own: Vec<usize> = subset.iter().copied().filter(|&i| &items[i].speaker == id).collect();
        let quota = (own.len() as f64 * TRAIN_FRACTION).ceil() as usize;
        let mut taken = 0;
        for i in own {
            let mut item = items[i].clone();
            if taken < quota && item.condition == neutral {
                item.split = Split::Train;
                taken += 1;
                train.push(item);
            } else {
                item.split = Split::Test;
                test.push(item);
            }
        }
        if taken == 0 {
            return Err(format!("speaker `{id}` has no enrollment utterance in this subset"));
        }
    }
    if test.is_empty() {
        return Err("no test utterances in this subset".into());
    }
    Ok((train, test))
}

/// Partitions the dataset into `k` random subsets and, within each,
/// enrolls on a third of every speaker's utterances (neutral condition
/// only) and tests on the rest. Folds run in parallel; a fold where a
/// speaker has nothing to enroll with is reported invalid.
pub fn cross_validate(
    items: &[LabeledUtterance],
    k: usize,
    config: &PipelineConfig,
    alpha: f64,
    neutral: &str,
    seed: u64,
) -> Result<CrossValidation> {
    config.validate()?;
    let subsets = partition(items.len(), k, seed)?;
    let speakers = speakers_in_order(items);
    let folds = subsets
        .par_iter()
        .enumerate()
        .map(|(fold, subset)| match split_subset(items, subset, &speakers, neutral) {
            Err(reason) => Ok(FoldResult {
                fold,
                train: 0,
                test: 0,
                accuracy: Vec::new(),
                invalid: Some(reason),
            }),
            Ok((train, test)) => {
                let registry = Registry::enroll(&train, config)?;
                let result = evaluate(&registry, &test, alpha)?;
                let accuracy = result
                    .rows
                    .iter()
                    .filter(|r| r.gender == super::eval::ALL_GENDERS)
                    .map(|r| (r.condition.clone(), r.accuracy))
                    .collect();
                Ok(FoldResult {
                    fold,
                    train: train.len(),
                    test: test.len(),
                    accuracy,
                    invalid: None,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut conditions: Vec<String> = Vec::new();
    for f in &folds {
        for (c, _) in &f.accuracy {
            if !conditions.contains(c) {
                conditions.push(c.clone());
            }
        }
    }
    let summary = conditions
        .into_iter()
        .map(|condition| {
            let values: Vec<f64> = folds
                .iter()
                .filter_map(|f| f.accuracy.iter().find(|(c, _)| *c == condition).map(|(_, a)| *a))
                .collect();
            let (mean, sd) = mean_sd(&values);
            ConditionSummary {
                condition,
                folds: values.len(),
                mean,
                sd,
            }
        })
        .collect();
    Ok(CrossValidation { folds, summary })
}
