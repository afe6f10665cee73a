use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract, AudioClip, FeatureFile, Utterance};
use crate::io_util::write_atomic;

/// Whether a clip is used for enrollment or for testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// An utterance with its speaker, condition, split and optional gender tag.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledUtterance {
    pub speaker: String,
    pub condition: String,
    pub split: Split,
    pub gender: Option<String>,
    pub utterance: Utterance,
}

/// Speakers in order of first appearance.
pub fn speakers_in_order(items: &[LabeledUtterance]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for item in items {
        if !out.contains(&item.speaker) {
            out.push(item.speaker.clone());
        }
    }
    out
}

/// One row of a dataset manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    /// Clip or feature file, relative to the manifest's directory unless
    /// absolute.
    pub path: String,
    pub speaker: String,
    pub condition: String,
    pub split: Split,
    /// Empty when untagged.
    #[serde(default)]
    pub gender: String,
}

/// CSV index `path,speaker,condition,split,gender` mapping clip or feature
/// files to labels. Lines starting with `#` are comments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn to_csv(&self, comments: &[String]) -> Result<String> {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["path", "speaker", "condition", "split", "gender"])
                .map_err(|e| Error::format("manifest", e))?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::format("manifest", e))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::format("manifest", e))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::format("manifest", e))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<ManifestRow>, _>>()
            .map_err(|e| Error::format("manifest", e))?;
        for row in &rows {
            if row.speaker.is_empty() || row.path.is_empty() || row.condition.is_empty() {
                return Err(Error::format("manifest", format!("incomplete row {row:?}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn save(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_atomic(path, self.to_csv(comments)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    /// Resolves each row's path against `base`, reads it (WAV files go
    /// through the front end, anything else is a feature file) and attaches
    /// the labels.
    pub fn load_utterances(&self, base: &Path, split: Option<Split>) -> Result<Vec<LabeledUtterance>> {
        self.rows
            .par_iter()
            .filter(|r| split.is_none_or(|s| r.split == s))
            .map(|row| {
                let path = resolve(base, &row.path);
                let utterance = load_utterance(&path)?;
                Ok(LabeledUtterance {
                    speaker: row.speaker.clone(),
                    condition: row.condition.clone(),
                    split: row.split,
                    gender: (!row.gender.is_empty()).then(|| row.gender.clone()),
                    utterance,
                })
            })
            .collect()
    }
}

fn resolve(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn is_wav(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

/// Reads a WAV clip (and extracts features) or a feature file.
pub fn load_utterance(path: &Path) -> Result<Utterance> {
    if is_wav(path) {
        extract(&AudioClip::read_wav(path)?)
    } else {
        FeatureFile::load(path)?.utterance()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let m = Manifest {
            rows: vec![
                ManifestRow {
                    path: "features/a_1.json".into(),
                    speaker: "a".into(),
                    condition: "neutral".into(),
                    split: Split::Train,
                    gender: "female".into(),
                },
                ManifestRow {
                    path: "b.wav".into(),
                    speaker: "b".into(),
                    condition: "shouted".into(),
                    split: Split::Test,
                    gender: String::new(),
                },
            ],
        };
        let text = m.to_csv(&["generated".into()]).unwrap();
        assert!(text.starts_with("# generated\npath,speaker,condition,split,gender\n"));
        assert_eq!(Manifest::from_csv(&text).unwrap(), m);
    }

    #[test]
    fn rejects_bad_split() {
        let text = "path,speaker,condition,split,gender\na.wav,a,neutral,dev,\n";
        assert!(Manifest::from_csv(text).is_err());
    }
}
