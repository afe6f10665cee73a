use crate::error::{Error, Result};
use crate::numeric::{mean, sample_variance};

/// Mean and sample standard deviation (`n - 1` denominator; 0 for one value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let sd = if values.len() < 2 { 0.0 } else { sample_variance(values).sqrt() };
    (mean(values), sd)
}

/// Student's t with pooled standard deviation for two equal-size samples:
/// `(mean_a - mean_b) / sqrt((sd_a² + sd_b²) / 2)`.
///
/// A zero pooled deviation gives `0` for equal means and a signed infinity
/// otherwise.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::param(format!("sample sizes differ ({} vs {})", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::param("t-test needs at least two values per sample"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::param("t-test samples must be finite"));
    }
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let pooled = ((sa * sa + sb * sb) / 2.0).sqrt();
    let diff = ma - mb;
    Ok(if pooled > 0.0 {
        diff / pooled
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    })
}

/// One-sided critical value at the 5% level used to call a difference
/// significant.
pub const T_CRITICAL_05: f64 = 1.645;
