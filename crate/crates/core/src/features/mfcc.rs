use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlannerScalar};

use super::{FFT_SIZE, LOG_FLOOR, N_CEPSTRA, N_MELS, WINDOW};
use super::audio::SAMPLE_RATE_HZ;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters equally spaced on the mel scale between 0 Hz and the
/// Nyquist frequency, evaluated on the FFT bin frequencies.
#[derive(Clone, Debug)]
pub struct MelFilterbank {
    /// Filter edge and center frequencies: `n_filters + 2` points.
    pub edges_hz: Vec<f64>,
    /// `(first bin, weights)` for each filter.
    filters: Vec<(usize, Vec<f64>)>,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, fft_size: usize, sample_rate: f64) -> Self {
        let nyquist = sample_rate / 2.0;
        let top = hz_to_mel(nyquist);
        let edges_hz: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
            .collect();
        let bin_hz = sample_rate / fft_size as f64;
        let n_bins = fft_size / 2 + 1;
        let filters = (0..n_filters)
            .map(|j| {
                let (lo, mid, hi) = (edges_hz[j], edges_hz[j + 1], edges_hz[j + 2]);
                let weights: Vec<(usize, f64)> = (0..n_bins)
                    .filter_map(|k| {
                        let f = k as f64 * bin_hz;
                        let w = if f > lo && f <= mid {
                            (f - lo) / (mid - lo)
                        } else if f > mid && f < hi {
                            (hi - f) / (hi - mid)
                        } else {
                            0.0
                        };
                        (w > 0.0).then_some((k, w))
                    })
                    .collect();
                let first = weights.first().map_or(0, |&(k, _)| k);
                (first, weights.into_iter().map(|(_, w)| w).collect())
            })
            .collect();
        Self { edges_hz, filters }
    }

    pub fn n_filters(&self) -> usize {
        self.filters.len()
    }

    /// Index of the filter whose center is closest to `hz`.
    pub fn band_of(&self, hz: f64) -> usize {
        (0..self.n_filters())
            .min_by(|&a, &b| {
                (self.edges_hz[a + 1] - hz)
                    .abs()
                    .total_cmp(&(self.edges_hz[b + 1] - hz).abs())
            })
            .expect("filterbank has filters")
    }

    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.filters
            .iter()
            .map(|(first, w)| w.iter().zip(&power[*first..]).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Orthonormal DCT-II coefficients `1..=n_out` of `x` (the DC term is
/// dropped).
pub fn dct2_without_dc(x: &[f64], n_out: usize) -> Vec<f64> {
    let m = x.len() as f64;
    let scale = (2.0 / m).sqrt();
    (1..=n_out)
        .map(|j| {
            scale
                * x.iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * j as f64 * (i as f64 + 0.5) / m).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// Static cepstral analysis of windowed frames with a reusable FFT plan.
pub struct MfccExtractor {
    fft: Arc<dyn Fft<f64>>,
    filterbank: MelFilterbank,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Default for MfccExtractor {
    fn default() -> Self {
        Self::new()
    }
}

impl MfccExtractor {
    pub fn new() -> Self {
        let fft = FftPlannerScalar::new().plan_fft_forward(FFT_SIZE);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            fft,
            filterbank: MelFilterbank::new(N_MELS, FFT_SIZE, SAMPLE_RATE_HZ as f64),
            buffer: vec![Complex::default(); FFT_SIZE],
            scratch,
        }
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    /// `|X_k|^2` for bins `0..=FFT_SIZE/2` of the zero-padded frame.
    pub fn power_spectrum(&mut self, frame: &[f64]) -> Vec<f64> {
        debug_assert!(frame.len() <= FFT_SIZE);
        for (slot, i) in self.buffer.iter_mut().zip(0..) {
            *slot = Complex::new(frame.get(i).copied().unwrap_or(0.0), 0.0);
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        self.buffer[..=FFT_SIZE / 2].iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn filterbank_energies(&mut self, frame: &[f64]) -> Vec<f64> {
        let power = self.power_spectrum(frame);
        self.filterbank.apply(&power)
    }

    /// Log filterbank energies relative to the frame's total filterbank
    /// energy, floored at `LOG_FLOOR`. The relative form only moves the DC
    /// term, which is discarded, and makes the cepstrum exactly gain
    /// invariant.
    pub fn log_energies(&mut self, frame: &[f64]) -> Vec<f64> {
        let energies = self.filterbank_energies(frame);
        let total: f64 = energies.iter().sum();
        energies
            .iter()
            .map(|&e| {
                let rel = if total > 0.0 { e / total } else { 0.0 };
                rel.max(LOG_FLOOR).ln()
            })
            .collect()
    }

    /// Cepstral coefficients 1..=16 of one windowed 480-sample frame.
    pub fn mfcc(&mut self, frame: &[f64]) -> Vec<f64> {
        debug_assert_eq!(frame.len(), WINDOW);
        dct2_without_dc(&self.log_energies(frame), N_CEPSTRA)
    }
}

/// Cepstral coefficients 1..=16 of one windowed frame.
pub fn mfcc(frame: &[f64]) -> Vec<f64> {
    MfccExtractor::new().mfcc(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::dsp::hamming;

    #[test]
    fn zero_frame_gives_zero_cepstrum() {
        let c = mfcc(&[0.0; WINDOW]);
        assert_eq!(c.len(), 16);
        assert!(c.iter().all(|v| v.abs() < 1e-12), "{c:?}");
    }

    #[test]
    fn doubling_gain_is_bit_exact() {
        let w = hamming(WINDOW);
        let frame: Vec<f64> = (0..WINDOW)
            .map(|n| w[n] * (0.3 * (n as f64 * 0.21).sin() + 0.1 * (n as f64 * 1.3).cos()))
            .collect();
        let doubled: Vec<f64> = frame.iter().map(|x| 2.0 * x).collect();
        assert_eq!(mfcc(&frame), mfcc(&doubled));
    }

    #[test]
    fn sine_peaks_in_its_band() {
        let mut ex = MfccExtractor::new();
        let w = hamming(WINDOW);
        for hz in [300.0, 1000.0, 2500.0, 6000.0] {
            let frame: Vec<f64> = (0..WINDOW)
                .map(|n| w[n] * (2.0 * PI * hz * n as f64 / 16_000.0).sin())
                .collect();
            let e = ex.filterbank_energies(&frame);
            let argmax = (0..e.len()).max_by(|&a, &b| e[a].total_cmp(&e[b])).unwrap();
            let fb = ex.filterbank();
            assert!(fb.edges_hz[argmax] < hz && hz < fb.edges_hz[argmax + 2], "{hz} Hz in filter {argmax}");
            assert!(argmax.abs_diff(fb.band_of(hz)) <= 1);
        }
    }

    #[test]
    fn filterbank_geometry() {
        let fb = MelFilterbank::new(N_MELS, FFT_SIZE, 16_000.0);
        assert_eq!(fb.n_filters(), 26);
        assert_eq!(fb.edges_hz[0], 0.0);
        assert!((fb.edges_hz[27] - 8000.0).abs() < 1e-9);
        let mels: Vec<f64> = fb.edges_hz.iter().map(|&h| hz_to_mel(h)).collect();
        for w in mels.windows(3) {
            assert!(((w[2] - w[1]) - (w[1] - w[0])).abs() < 1e-9);
        }
    }

    #[test]
    fn dct_matches_direct_sum() {
        let x = [1.0, -2.0, 0.5, 3.0];
        let c = dct2_without_dc(&x, 3);
        // orthonormal DCT-II of x computed by hand for j = 1
        let j1: f64 = (0.5f64).sqrt()
            * (1.0 * (PI / 8.0).cos() - 2.0 * (3.0 * PI / 8.0).cos() + 0.5 * (5.0 * PI / 8.0).cos()
                + 3.0 * (7.0 * PI / 8.0).cos());
        assert!((c[0] - j1).abs() < 1e-12);
    }
}
