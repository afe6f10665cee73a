use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io_util::write_atomic;

/// Only supported sample rate.
pub const SAMPLE_RATE_HZ: u32 = 16_000;

/// Mono PCM audio with samples in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz != SAMPLE_RATE_HZ {
            return Err(Error::Audio(format!(
                "sample rate {sample_rate_hz} Hz unsupported (need {SAMPLE_RATE_HZ})"
            )));
        }
        if samples.is_empty() {
            return Err(Error::Audio("empty clip".into()));
        }
        if let Some(x) = samples.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(Error::Audio(format!("sample {x} outside [-1, 1]")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Decodes a 16-bit PCM, mono, 16 kHz RIFF/WAVE stream.
    pub fn from_wav_bytes(bytes: &[u8]) -> Result<Self> {
        let reader = hound::WavReader::new(Cursor::new(bytes)).map_err(|e| Error::Audio(e.to_string()))?;
        let spec = reader.spec();
        if spec.channels != 1 {
            return Err(Error::Audio(format!("{} channels (need mono)", spec.channels)));
        }
        if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
            return Err(Error::Audio(format!(
                "{}-bit {:?} samples (need 16-bit PCM)",
                spec.bits_per_sample, spec.sample_format
            )));
        }
        let samples = reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Audio(e.to_string()))?;
        Self::new(samples, spec.sample_rate)
    }

    pub fn read_wav(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_wav_bytes(&bytes).map_err(|e| match e {
            Error::Audio(msg) => Error::Audio(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Encodes as 16-bit PCM mono WAV, rounding to the nearest code.
    pub fn to_wav_bytes(&self) -> Result<Vec<u8>> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate_hz,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut buf = Cursor::new(Vec::new());
        {
            let mut writer = hound::WavWriter::new(&mut buf, spec).map_err(|e| Error::Audio(e.to_string()))?;
            for &x in &self.samples {
                let code = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                writer.write_sample(code).map_err(|e| Error::Audio(e.to_string()))?;
            }
            writer.finalize().map_err(|e| Error::Audio(e.to_string()))?;
        }
        Ok(buf.into_inner())
    }

    pub fn write_wav(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_wav_bytes()?)
    }
}
