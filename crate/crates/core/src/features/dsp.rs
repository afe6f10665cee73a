use std::f64::consts::PI;

use super::{HOP, PREEMPHASIS, WINDOW};
use crate::error::{Error, Result};

/// `y[0] = x[0]`, `y[n] = x[n] - 0.95 x[n-1]`.
pub fn preemphasize(samples: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = None;
    for &x in samples {
        out.push(match prev {
            None => x,
            Some(p) => x - PREEMPHASIS * p,
        });
        prev = Some(x);
    }
    out
}

/// Hamming window `0.54 - 0.46 cos(2πn / (L-1))`.
pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// `1 + floor((samples - WINDOW) / HOP)` for clips covering a window.
pub fn frame_count(n_samples: usize) -> Result<usize> {
    if n_samples < WINDOW {
        return Err(Error::ClipTooShort {
            samples: n_samples,
            window: WINDOW,
        });
    }
    Ok(1 + (n_samples - WINDOW) / HOP)
}

/// Raw (unwindowed) analysis frames on the shared frame grid.
pub fn frames(samples: &[f64]) -> Result<impl Iterator<Item = &[f64]>> {
    let count = frame_count(samples.len())?;
    Ok((0..count).map(move |i| &samples[i * HOP..i * HOP + WINDOW]))
}

/// Frames of 480 samples every 80 samples, each multiplied by the Hamming
/// window.
pub fn frame_and_window(samples: &[f64]) -> Result<Vec<Vec<f64>>> {
    let window = hamming(WINDOW);
    Ok(frames(samples)?
        .map(|f| f.iter().zip(&window).map(|(x, w)| x * w).collect())
        .collect())
}
