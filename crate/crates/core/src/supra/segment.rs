use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::ProsodicTrack;
use crate::observation::ObservationSequence;

/// Dimension of a segment observation.
pub const SEGMENT_DIM: usize = 6;
/// Names of the segment observation columns, in order.
pub const SEGMENT_FIELDS: [&str; SEGMENT_DIM] = [
    "mean_f0_hz",
    "std_f0_hz",
    "voiced_fraction",
    "mean_log_energy",
    "std_log_energy",
    "duration_frames",
];

/// A maximal run of frames aligned to one suprasegmental state; frames
/// `start..end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub supra_state: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Maps each state `s` of the path to `s / group_size` and cuts the path
/// into maximal runs of equal suprasegmental state.
pub fn segment_by_alignment(path: &[usize], group_size: usize) -> Result<Vec<Segment>> {
    if path.is_empty() {
        return Err(Error::param("empty state path"));
    }
    if group_size == 0 {
        return Err(Error::param("group size must be positive"));
    }
    let mut segments: Vec<Segment> = Vec::new();
    for (t, &s) in path.iter().enumerate() {
        let supra_state = s / group_size;
        match segments.last_mut() {
            Some(seg) if seg.supra_state == supra_state => seg.end = t + 1,
            _ => segments.push(Segment {
                start: t,
                end: t + 1,
                supra_state,
            }),
        }
    }
    Ok(segments)
}

fn mean_and_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// One segment's prosodic summary: pitch mean and spread over voiced frames
/// (0 when none are voiced), voiced fraction, energy mean and spread, and
/// length in frames.
pub fn segment_observation(track: &ProsodicTrack, seg: &Segment) -> [f64; SEGMENT_DIM] {
    let f0 = &track.f0_hz[seg.start..seg.end];
    let energy = &track.log_energy[seg.start..seg.end];
    let voiced = f0.iter().copied().filter(|&f| f > 0.0);
    let n_voiced = voiced.clone().count();
    let (f0_mean, f0_sd) = mean_and_sd(voiced);
    let (e_mean, e_sd) = mean_and_sd(energy.iter().copied());
    [
        f0_mean,
        f0_sd,
        n_voiced as f64 / seg.len() as f64,
        e_mean,
        e_sd,
        seg.len() as f64,
    ]
}

/// Checks that `segments` are nonempty, contiguous and cover `0..len`.
pub fn check_tiling(segments: &[Segment], len: usize) -> Result<()> {
    let mut cursor = 0;
    for seg in segments {
        if seg.start != cursor || seg.end <= seg.start {
            return Err(Error::format(
                "segmentation",
                format!("segment {}..{} does not continue at frame {cursor}", seg.start, seg.end),
            ));
        }
        cursor = seg.end;
    }
    if cursor != len || segments.is_empty() {
        return Err(Error::format(
            "segmentation",
            format!("segments cover {cursor} of {len} frames"),
        ));
    }
    Ok(())
}

/// One 6-dimensional observation per segment.
pub fn supra_observations(track: &ProsodicTrack, segments: &[Segment]) -> Result<ObservationSequence> {
    check_tiling(segments, track.len())?;
    let rows: Vec<[f64; SEGMENT_DIM]> = segments.iter().map(|s| segment_observation(track, s)).collect();
    ObservationSequence::from_frames(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(start: usize, end: usize, supra_state: usize) -> Segment {
        Segment { start, end, supra_state }
    }

    #[test]
    fn segmentation_examples() {
        assert_eq!(
            segment_by_alignment(&[0, 1, 2, 3, 4, 5], 3).unwrap(),
            vec![seg(0, 3, 0), seg(3, 6, 1)]
        );
        assert_eq!(segment_by_alignment(&[0; 7], 3).unwrap(), vec![seg(0, 7, 0)]);
        assert_eq!(
            segment_by_alignment(&[0, 2, 7, 8, 6, 0, 1], 3).unwrap(),
            vec![seg(0, 2, 0), seg(2, 5, 2), seg(5, 7, 0)]
        );
        assert!(segment_by_alignment(&[], 3).is_err());
    }

    #[test]
    fn silence_segment() {
        let track = ProsodicTrack {
            f0_hz: vec![0.0; 12],
            log_energy: vec![(1e-10f64).ln(); 12],
        };
        let obs = supra_observations(&track, &[seg(0, 12, 0)]).unwrap();
        let row = obs.frame(0);
        assert_eq!(row[0], 0.0);
        assert_eq!(row[2], 0.0);
        assert_eq!(row[5], 12.0);
    }

    #[test]
    fn constant_pitch_segment() {
        let track = ProsodicTrack {
            f0_hz: vec![200.0; 10],
            log_energy: vec![-3.0; 10],
        };
        let obs = supra_observations(&track, &[seg(0, 10, 1)]).unwrap();
        assert!((obs.frame(0)[0] - 200.0).abs() < 1e-12);
        assert!(obs.frame(0)[1].abs() < 1e-12);
        assert_eq!(obs.frame(0)[2], 1.0);
        assert_eq!(obs.frame(0)[5], 10.0);
    }

    #[test]
    fn energy_halves_differ_by_ln2() {
        let e = 0.7f64;
        let mut log_energy = vec![e.ln(); 5];
        log_energy.extend(vec![(2.0 * e).ln(); 5]);
        let track = ProsodicTrack {
            f0_hz: vec![0.0; 10],
            log_energy,
        };
        let obs = supra_observations(&track, &[seg(0, 5, 0), seg(5, 10, 1)]).unwrap();
        assert!((obs.frame(1)[3] - obs.frame(0)[3] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_gaps() {
        let track = ProsodicTrack {
            f0_hz: vec![0.0; 10],
            log_energy: vec![0.0; 10],
        };
        assert!(supra_observations(&track, &[seg(0, 4, 0), seg(5, 10, 1)]).is_err());
        assert!(supra_observations(&track, &[seg(0, 9, 0)]).is_err());
    }
}
