use super::DELTA_WINDOW;

/// Regression deltas `d_t = Σ_k k (c_{t+k} - c_{t-k}) / (2 Σ_k k²)` over
/// `k = 1..=2`, repeating the boundary frames at the edges.
pub fn delta(frames: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t_len = frames.len();
    if t_len == 0 {
        return Vec::new();
    }
    let dim = frames[0].len();
    let denom = 2.0 * (1..=DELTA_WINDOW).map(|k| (k * k) as f64).sum::<f64>();
    (0..t_len)
        .map(|t| {
            let mut d = vec![0.0; dim];
            for k in 1..=DELTA_WINDOW {
                let ahead = &frames[(t + k).min(t_len - 1)];
                let behind = &frames[t.saturating_sub(k)];
                for (i, slot) in d.iter_mut().enumerate() {
                    *slot += k as f64 * (ahead[i] - behind[i]);
                }
            }
            d.iter_mut().for_each(|v| *v /= denom);
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gives_zero() {
        let frames = vec![vec![1.5, -2.0]; 7];
        assert!(delta(&frames).iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_ramp_interior_slope() {
        let v = [0.5, -1.25];
        let frames: Vec<Vec<f64>> = (0..10).map(|t| v.iter().map(|x| x * t as f64).collect()).collect();
        let d = delta(&frames);
        for row in &d[2..8] {
            assert!((row[0] - 0.5).abs() < 1e-12 && (row[1] + 1.25).abs() < 1e-12);
        }
    }

    #[test]
    fn single_frame_is_zero() {
        assert_eq!(delta(&[vec![3.0, 4.0]]), vec![vec![0.0, 0.0]]);
    }
}
