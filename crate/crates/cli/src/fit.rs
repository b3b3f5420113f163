//! Log-log convergence-rate regression.

use serde::{Deserialize, Serialize};

use crate::ExperimentError;

pub const MIN_SAMPLES: usize = 4;

/// Normal-approximation 95% quantile used for the slope's confidence half-width.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% half-width of the slope from the residual variance.
    pub confidence: f64,
    /// Samples used after filtering.
    pub samples: usize,
    /// Nonpositive or non-finite errors dropped as noise floor.
    pub dropped: usize,
}

/// Least squares of `log error` on `log k`.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit, ExperimentError> {
    let kept: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(k, e)| *k > 0.0 && *e > 0.0 && e.is_finite() && k.is_finite())
        .map(|(k, e)| (k.ln(), e.ln()))
        .collect();
    let dropped = samples.len() - kept.len();
    if kept.len() < MIN_SAMPLES {
        return Err(ExperimentError::TooFewSamples {
            have: kept.len(),
            need: MIN_SAMPLES,
        });
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|s| s.0).sum::<f64>() / n;
    let my = kept.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(ExperimentError::TooFewSamples { have: 1, need: MIN_SAMPLES });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = kept.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(RateFit {
        slope,
        intercept,
        confidence: Z95 * stderr,
        samples: kept.len(),
        dropped,
    })
}
