//! Small descriptive statistics shared by the model fitters.

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (x.len() - 1) as f64).sqrt()
}

/// (x − mean) / sd with the sample sd. Zero variance is an error naming the
/// variable, since a standardized constant predictor is meaningless.
pub fn standardize(name: &str, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooFewObservations {
            context: "standardize",
            needed: 2,
            got: x.len(),
        });
    }
    let m = mean(x);
    let sd = sample_sd(x);
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::ZeroVariance {
            name: name.to_string(),
        });
    }
    Ok(x.iter().map(|v| (v - m) / sd).collect())
}
