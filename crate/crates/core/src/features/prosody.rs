use serde::{Deserialize, Serialize};

use super::dsp::frames;
use super::{ENERGY_FLOOR, F0_MAX_HZ, F0_MIN_HZ, VOICING_THRESHOLD};
use crate::error::Result;

/// Per-frame fundamental frequency (0 when unvoiced) and log energy on the
/// acoustic frame grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProsodicTrack {
    pub f0_hz: Vec<f64>,
    pub log_energy: Vec<f64>,
}

impl ProsodicTrack {
    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn voiced_frames(&self) -> usize {
        self.f0_hz.iter().filter(|&&f| f > 0.0).count()
    }
}

/// `Σ x[n] x[n+τ] / sqrt(Σ x[n]² · Σ x[n+τ]²)` over the overlapping part.
fn normalized_autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len() - lag;
    let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (x[i], x[i + lag]);
        xy += a * b;
        xx += a * a;
        yy += b * b;
    }
    let norm = (xx * yy).sqrt();
    if norm > 0.0 {
        xy / norm
    } else {
        0.0
    }
}

/// Autocorrelation pitch estimate of one frame, `0.0` when unvoiced.
///
/// The normalized autocorrelation is searched over lags for 50–500 Hz. The
/// frame is voiced when the best peak reaches the voicing threshold; the
/// chosen lag is the first local maximum within 90% of the best, refined by
/// parabolic interpolation.
pub fn estimate_f0(frame: &[f64], sample_rate: f64) -> f64 {
    let min_lag = (sample_rate / F0_MAX_HZ).floor() as usize;
    let max_lag = ((sample_rate / F0_MIN_HZ).ceil() as usize).min(frame.len().saturating_sub(2));
    if min_lag + 2 > max_lag {
        return 0.0;
    }
    let mean = frame.iter().sum::<f64>() / frame.len() as f64;
    let x: Vec<f64> = frame.iter().map(|v| v - mean).collect();
    let r: Vec<f64> = (min_lag - 1..=max_lag + 1)
        .map(|lag| normalized_autocorrelation(&x, lag))
        .collect();
    // r[i] holds lag min_lag - 1 + i
    let peaks: Vec<usize> = (1..r.len() - 1)
        .filter(|&i| r[i] > r[i - 1] && r[i] >= r[i + 1])
        .collect();
    let Some(best) = peaks.iter().map(|&i| r[i]).reduce(f64::max) else {
        return 0.0;
    };
    if best < VOICING_THRESHOLD {
        return 0.0;
    }
    let i = *peaks.iter().find(|&&i| r[i] >= 0.9 * best).expect("best peak qualifies");
    let (a, b, c) = (r[i - 1], r[i], r[i + 1]);
    let curvature = a - 2.0 * b + c;
    let shift = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    let lag = (min_lag - 1 + i) as f64 + shift.clamp(-0.5, 0.5);
    sample_rate / lag
}

/// Frame log energy `ln(Σ x² + 1e-10)`.
pub fn log_energy(frame: &[f64]) -> f64 {
    (frame.iter().map(|x| x * x).sum::<f64>() + ENERGY_FLOOR).ln()
}

/// Pitch and energy of the raw (not pre-emphasized, unwindowed) samples on
/// the acoustic frame grid.
pub fn prosodic_track(samples: &[f64], sample_rate: f64) -> Result<ProsodicTrack> {
    let (f0_hz, log_energy) = frames(samples)?
        .map(|f| (estimate_f0(f, sample_rate), log_energy(f)))
        .unzip();
    Ok(ProsodicTrack { f0_hz, log_energy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sawtooth(hz: f64, len: usize) -> Vec<f64> {
        (0..len)
            .map(|n| {
                let phase = (n as f64 * hz / 16_000.0).fract();
                0.8 * (2.0 * phase - 1.0)
            })
            .collect()
    }

    #[test]
    fn sawtooth_pitch() {
        for hz in [200.0, 120.0, 310.0] {
            let track = prosodic_track(&sawtooth(hz, 16_000), 16_000.0).unwrap();
            let good = track.f0_hz.iter().filter(|f| (*f - hz).abs() <= 5.0).count();
            assert!(good * 10 >= track.len() * 9, "{hz}: {good}/{}", track.len());
        }
    }

    #[test]
    fn silence_is_unvoiced_at_floor() {
        let track = prosodic_track(&[0.0; 4000], 16_000.0).unwrap();
        assert!(track.f0_hz.iter().all(|&f| f == 0.0));
        assert!(track.log_energy.iter().all(|&e| e == (1e-10f64).ln()));
    }

    #[test]
    fn doubling_amplitude() {
        let x = sawtooth(200.0, 3000);
        let y: Vec<f64> = x.iter().map(|v| v * 2.0).collect();
        let a = prosodic_track(&x, 16_000.0).unwrap();
        let b = prosodic_track(&y, 16_000.0).unwrap();
        assert_eq!(a.f0_hz, b.f0_hz);
        for (ea, eb) in a.log_energy.iter().zip(&b.log_energy) {
            assert!((eb - ea - 4f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn white_noise_is_mostly_unvoiced() {
        let mut state = 12345u64;
        let noise: Vec<f64> = (0..8000)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        let track = prosodic_track(&noise, 16_000.0).unwrap();
        assert!(track.voiced_frames() * 5 < track.len());
    }
}
