use serde::Serialize;

use crate::error::RestrictionError;
use crate::norms::NormSample;

pub const MIN_GROUPS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub n_points: usize,
    /// `log value − (intercept + slope·log λ)` per group.
    pub residuals: Vec<f64>,
    /// Group centres `(λ, value)` after geometric averaging.
    pub groups: Vec<(f64, f64)>,
}

/// Ordinary least squares of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let ssr: f64 = res.iter().map(|r| r * r).sum();
    let stderr = if x.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, intercept, stderr, res)
}

/// Sort by `λ`, average consecutive runs of `jitter_group` samples
/// geometrically, then regress `log value` on `log λ`.
pub fn fit_exponent(samples: &[NormSample], jitter_group: usize) -> Result<ExponentFit, RestrictionError> {
    let jg = jitter_group.max(1);
    if let Some(bad) = samples.iter().find(|s| !s.is_valid()) {
        return Err(RestrictionError::Sample(format!("λ = {}, value = {}", bad.lambda, bad.value)));
    }
    let mut sorted: Vec<&NormSample> = samples.iter().collect();
    sorted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let groups: Vec<(f64, f64)> = sorted
        .chunks(jg)
        .filter(|c| c.len() == jg)
        .map(|c| {
            let n = c.len() as f64;
            let ll = c.iter().map(|s| s.lambda.ln()).sum::<f64>() / n;
            let lv = c.iter().map(|s| s.value.ln()).sum::<f64>() / n;
            (ll.exp(), lv.exp())
        })
        .collect();
    if groups.len() < MIN_GROUPS {
        return Err(RestrictionError::Fit { groups: groups.len() });
    }
    let x: Vec<f64> = groups.iter().map(|g| g.0.ln()).collect();
    let y: Vec<f64> = groups.iter().map(|g| g.1.ln()).collect();
    let (slope, intercept, stderr, residuals) = ols(&x, &y);
    Ok(ExponentFit { slope, intercept, stderr, n_points: groups.len(), residuals, groups })
}
