//! Image quality and localisation metrics.

use crate::error::{IvaError, Result};
use crate::imaging::{ImageRegion, RangeDopplerImage};

/// Range/cross-range box around an expected centroid, resolved to indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CropWindow {
    pub centre_range: f64,
    pub half_range: f64,
    pub half_crossrange: f64,
    pub region: ImageRegion,
}

impl CropWindow {
    /// Rows with `|r - centre| <= half_range` and columns with
    /// `|u| <= half_crossrange`. The image axes must span the whole box.
    pub fn resolve(
        image: &RangeDopplerImage,
        centre_range: f64,
        half_range: f64,
        half_crossrange: f64,
    ) -> Result<Self> {
        let u = image.crossrange_axis.as_ref().ok_or(IvaError::UndefinedCrossRange)?;
        let (r_lo, r_hi) = (centre_range - half_range, centre_range + half_range);
        let ra = &image.range_axis;
        if ra.is_empty() || ra[0] > r_lo || ra[ra.len() - 1] < r_hi {
            return Err(IvaError::Config(format!(
                "crop rows [{r_lo:.2}, {r_hi:.2}] m fall outside the imaged range span"
            )));
        }
        let (u_min, u_max) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if u_min > -half_crossrange || u_max < half_crossrange {
            return Err(IvaError::Config(format!(
                "crop half-width {half_crossrange} m exceeds the cross-range span [{u_min:.2}, {u_max:.2}] m"
            )));
        }
        let rows = index_span(ra.iter().map(|&r| (r - centre_range).abs() <= half_range))?;
        let cols = index_span(u.iter().map(|&x| x.abs() <= half_crossrange))?;
        Ok(Self { centre_range, half_range, half_crossrange, region: ImageRegion { rows, cols } })
    }
}

fn index_span(mask: impl Iterator<Item = bool>) -> Result<std::ops::Range<usize>> {
    let hits: Vec<usize> = mask.enumerate().filter(|(_, m)| *m).map(|(i, _)| i).collect();
    match (hits.first(), hits.last()) {
        (Some(&a), Some(&b)) => Ok(a..b + 1),
        _ => Err(IvaError::Config("crop window contains no pixels".into())),
    }
}

/// `‖P − μ‖_F / (μ √N)` over the window.
pub fn image_contrast(image: &RangeDopplerImage, window: &ImageRegion) -> Result<f64> {
    let view = image.p.slice(ndarray::s![window.rows.clone(), window.cols.clone()]);
    let n = view.len();
    if n == 0 {
        return Err(IvaError::UndefinedContrast);
    }
    let mean = view.sum() / n as f64;
    if !(mean > 0.0) {
        return Err(IvaError::UndefinedContrast);
    }
    let ss: f64 = view.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(ss.sqrt() / (mean * (n as f64).sqrt()))
}

/// Normalise to unit peak and zero every pixel below `ε·(max − min)`.
pub fn threshold_image(image: &RangeDopplerImage, epsilon: f64) -> Result<RangeDopplerImage> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(IvaError::InvalidField { field: "epsilon".into(), reason: format!("{epsilon} not in [0, 1]") });
    }
    let peak = image.max();
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(IvaError::Threshold);
    }
    let norm = image.p.mapv(|v| v / peak);
    let min = norm.iter().cloned().fold(f64::INFINITY, f64::min);
    let delta = epsilon * (1.0 - min);
    Ok(RangeDopplerImage {
        p: norm.mapv(|v| if v >= delta { v } else { 0.0 }),
        ..image.clone()
    })
}

/// Intensity-weighted mean range of a (thresholded) image.
pub fn centroid_range(image: &RangeDopplerImage) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (row, &r) in image.p.rows().into_iter().zip(image.range_axis.iter()) {
        let w = row.sum();
        num += w * r;
        den += w;
    }
    if !(den > 0.0) {
        return Err(IvaError::NoDetection);
    }
    Ok(num / den)
}

/// Per-trial outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub trial: u64,
    pub seed: u64,
    pub rho_f: f64,
    pub speed: f64,
    pub heading_deg: f64,
    pub ic: f64,
    pub centroid_range: f64,
    pub true_range: f64,
}

impl MetricsReport {
    pub fn centroid_error(&self) -> f64 {
        self.centroid_range - self.true_range
    }
}

/// Mean IC and RMS centroid error across trials.
pub fn aggregate(reports: &[MetricsReport]) -> Result<(f64, f64)> {
    if reports.is_empty() {
        return Err(IvaError::InsufficientData { needed: 1, got: 0 });
    }
    let n = reports.len() as f64;
    let ic = reports.iter().map(|r| r.ic).sum::<f64>() / n;
    let mse = reports.iter().map(|r| r.centroid_error().powi(2)).sum::<f64>() / n;
    Ok((ic, mse.sqrt()))
}
