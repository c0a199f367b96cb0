use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialFit {
    /// Slope of `ln(distance)` per step; negative for decaying curves.
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(step, ln value)` over the positive entries of `curve`.
///
/// A perfectly flat curve has no variance to explain and is reported with `r_squared = 1`.
pub fn fit_exponential(curve: &[f64]) -> Result<ExponentialFit> {
    let points: Vec<(f64, f64)> = curve
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > 0.0 && y.is_finite())
        .map(|(t, &y)| (t as f64, y.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::DegenerateCurve(points.len()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let rate = sxy / sxx;
    let intercept = mean_y - rate * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - rate * p.0).powi(2))
        .sum();
    let scale = points.iter().map(|p| p.1 * p.1).sum::<f64>().max(1.0);
    let r_squared = if ss_tot <= 1e-24 * scale { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ExponentialFit {
        rate,
        intercept,
        r_squared,
    })
}

/// Pointwise mean of equally long curves.
pub fn average_curves(curves: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidArgument("no curves to average".into()))?;
    if curves.iter().any(|c| c.len() != first.len()) {
        return Err(Error::InvalidArgument("curves differ in length".into()));
    }
    let n = curves.len() as f64;
    Ok((0..first.len())
        .map(|t| curves.iter().map(|c| c[t]).sum::<f64>() / n)
        .collect())
}
