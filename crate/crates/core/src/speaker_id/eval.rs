use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledUtterance;
use super::registry::{rank, Registry};
use crate::error::{Error, Result};
use crate::io_util::write_atomic;
use crate::supra::{fused_score, ClipScore};

/// Label used in the gender column for rows pooled over all genders.
pub const ALL_GENDERS: &str = "all";

/// One test utterance scored against every enrolled speaker.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    /// Index of the true speaker in enrollment order.
    pub label: usize,
    pub condition: String,
    pub gender: Option<String>,
    pub scores: Vec<ClipScore>,
}

/// Scores of a test set under a registry, computed once and reusable for
/// any fusion weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredTrials {
    pub model: String,
    pub speakers: Vec<String>,
    pub trials: Vec<Trial>,
}

/// One row of an accuracy table: a model, a fusion weight and a
/// condition/gender cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub model: String,
    pub alpha: f64,
    pub condition: String,
    pub gender: String,
    pub trials: usize,
    pub correct: usize,
    /// Percent correct.
    pub accuracy: f64,
}

/// Identification outcome at one fusion weight.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub model: String,
    pub alpha: f64,
    pub speakers: Vec<String>,
    /// Accuracy per condition in name order (pooled over genders, then per
    /// gender tag).
    pub rows: Vec<AccuracyRow>,
    /// `confusion[true][predicted]` trial counts.
    pub confusion: Vec<Vec<usize>>,
    /// Predicted speaker index per trial.
    pub predictions: Vec<usize>,
    /// Fused score of every speaker, per trial.
    pub fused: Vec<Vec<f64>>,
}

impl EvalResult {
    /// Pooled accuracy (%) of a condition, if it was tested.
    pub fn accuracy(&self, condition: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.condition == condition && r.gender == ALL_GENDERS)
            .map(|r| r.accuracy)
    }

    /// Pooled accuracy (%) over every trial.
    pub fn overall_accuracy(&self) -> f64 {
        let total: usize = self.confusion.iter().flatten().sum();
        let diag: usize = (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum();
        100.0 * diag as f64 / total as f64
    }

    pub fn table(&self) -> EvalTable {
        EvalTable {
            rows: self.rows.clone(),
        }
    }
}

impl ScoredTrials {
    /// Scores every utterance (in parallel) against every speaker.
    pub fn score(registry: &Registry, items: &[LabeledUtterance]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::param("empty test set"));
        }
        let trials = items
            .par_iter()
            .map(|item| {
                let label = registry
                    .position(&item.speaker)
                    .ok_or_else(|| Error::UnknownSpeaker(item.speaker.clone()))?;
                Ok(Trial {
                    label,
                    condition: item.condition.clone(),
                    gender: item.gender.clone(),
                    scores: registry.score_all(&item.utterance)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: registry.config().family(),
            speakers: registry.ids().into_iter().map(String::from).collect(),
            trials,
        })
    }

    pub fn evaluate(&self, alpha: f64) -> Result<EvalResult> {
        let n = self.speakers.len();
        let mut confusion = vec![vec![0usize; n]; n];
        let mut predictions = Vec::with_capacity(self.trials.len());
        let mut fused_all = Vec::with_capacity(self.trials.len());
        for trial in &self.trials {
            let fused = trial
                .scores
                .iter()
                .map(|s| fused_score(s.acoustic, s.supra, alpha))
                .collect::<Result<Vec<_>>>()?;
            let top = rank(&fused)[0];
            confusion[trial.label][top] += 1;
            predictions.push(top);
            fused_all.push(fused);
        }

        let mut conditions: Vec<&str> = self.trials.iter().map(|t| t.condition.as_str()).collect();
        conditions.sort_unstable();
        conditions.dedup();
        let mut genders: Vec<&str> = self.trials.iter().filter_map(|t| t.gender.as_deref()).collect();
        genders.sort_unstable();
        genders.dedup();

        let mut rows = Vec::new();
        for cond in conditions {
            let cells = std::iter::once(None).chain(genders.iter().map(|g| Some(*g)));
            for gender in cells {
                let selected: Vec<usize> = (0..self.trials.len())
                    .filter(|&i| {
                        let t = &self.trials[i];
                        t.condition == cond && gender.is_none_or(|g| t.gender.as_deref() == Some(g))
                    })
                    .collect();
                if selected.is_empty() {
                    continue;
                }
                let correct = selected.iter().filter(|&&i| predictions[i] == self.trials[i].label).count();
                rows.push(AccuracyRow {
                    model: self.model.clone(),
                    alpha,
                    condition: cond.to_string(),
                    gender: gender.unwrap_or(ALL_GENDERS).to_string(),
                    trials: selected.len(),
                    correct,
                    accuracy: 100.0 * correct as f64 / selected.len() as f64,
                });
            }
        }
        Ok(EvalResult {
            model: self.model.clone(),
            alpha,
            speakers: self.speakers.clone(),
            rows,
            confusion,
            predictions,
            fused: fused_all,
        })
    }
}

/// Scores a labeled test set and reports accuracy at one fusion weight.
pub fn evaluate(registry: &Registry, items: &[LabeledUtterance], alpha: f64) -> Result<EvalResult> {
    ScoredTrials::score(registry, items)?.evaluate(alpha)
}

/// Accuracy table as CSV with columns
/// `model,alpha,condition,gender,trials,correct,accuracy`; `#` lines carry
/// run configuration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalTable {
    pub rows: Vec<AccuracyRow>,
}

impl EvalTable {
    pub fn to_csv(&self, comments: &[String]) -> Result<String> {
        let mut out = String::new();
        for c in comments {
            for line in c.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["model", "alpha", "condition", "gender", "trials", "correct", "accuracy"])
                .map_err(|e| Error::format("accuracy table", e))?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::format("accuracy table", e))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::format("accuracy table", e))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::format("accuracy table", e))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<AccuracyRow>, _>>()
            .map_err(|e| Error::format("accuracy table", e))?;
        Ok(Self { rows })
    }

    pub fn save(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_atomic(path, self.to_csv(comments)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}
