use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence of fixed-dimension observation vectors stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ObservationSequence {
    dim: usize,
    data: Vec<f64>,
}

impl ObservationSequence {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("observation dimension must be positive"));
        }
        if data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.len() % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_frames<F: AsRef<[f64]>>(frames: &[F]) -> Result<Self> {
        let dim = frames
            .first()
            .map(|f| f.as_ref().len())
            .ok_or_else(|| Error::param("empty observation sequence"))?;
        let mut data = Vec::with_capacity(dim * frames.len());
        for f in frames {
            let f = f.as_ref();
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: f.len(),
                });
            }
            data.extend_from_slice(f);
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn frames(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.frames().map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for ObservationSequence {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_frames(&rows)
    }
}

impl From<ObservationSequence> for Vec<Vec<f64>> {
    fn from(seq: ObservationSequence) -> Self {
        seq.to_rows()
    }
}
