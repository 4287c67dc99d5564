//! Distortion metrics, error maps and spectral band features.

mod probe;

pub use probe::{auc_rank, evaluate_auc, train_probe, ProbeModel, ProbeTraining};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageSlice;
use crate::recon::forward_grid;

/// Cutoff radius (cycles/pixel) of the stored high-frequency energy ratio.
pub const HIGHFREQ_CUTOFF: f64 = 0.25;

pub const PROBE_BANDS: usize = 8;

/// 8-bit absolute-difference image scaled so the largest difference is 255.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
}

impl ErrorMap {
    pub fn max(&self) -> u8 {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

fn check_same_shape(a: &ImageSlice, b: &ImageSlice) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "images are {}x{} and {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

/// `|clean - corrupted|` scaled by `255 / max`, rounded half-up.
pub fn abs_error_map(clean: &ImageSlice, corrupted: &ImageSlice) -> Result<ErrorMap> {
    check_same_shape(clean, corrupted)?;
    let diff: Vec<f64> = clean
        .pixels()
        .iter()
        .zip(corrupted.pixels())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let max = diff.iter().copied().fold(0.0, f64::max);
    let values = if max > 0.0 {
        diff.iter()
            .map(|&d| (255.0 * d / max + 0.5).floor().min(255.0) as u8)
            .collect()
    } else {
        vec![0; diff.len()]
    };
    Ok(ErrorMap {
        width: clean.width(),
        height: clean.height(),
        values,
    })
}

pub fn rmse(clean: &ImageSlice, corrupted: &ImageSlice) -> Result<f64> {
    check_same_shape(clean, corrupted)?;
    let sum: f64 = clean
        .pixels()
        .iter()
        .zip(corrupted.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum / clean.len() as f64).sqrt())
}

/// RMSE divided by the RMS of the clean image.
pub fn nrmse(clean: &ImageSlice, corrupted: &ImageSlice) -> Result<f64> {
    let err = rmse(clean, corrupted)?;
    let reference = clean.rms();
    if reference == 0.0 {
        return Err(Error::Undefined("NRMSE of an all-zero reference image".into()));
    }
    Ok(err / reference)
}

/// Spectral power `|F|^2` on the grid paired with each point's radius `|k|`.
fn radial_power(image: &ImageSlice) -> impl Iterator<Item = (f64, f64)> {
    let (w, h) = (image.width(), image.height());
    let grid = forward_grid(image);
    grid.data.into_iter().enumerate().map(move |(i, v)| {
        let kx = ((i % w) as f64 - (w / 2) as f64) / w as f64;
        let ky = ((i / w) as f64 - (h / 2) as f64) / h as f64;
        (kx.hypot(ky), v.norm_sqr())
    })
}

/// Fraction of spectral energy at `|k| > cutoff`; zero for an all-zero image.
pub fn highfreq_energy_ratio(image: &ImageSlice, cutoff: f64) -> Result<f64> {
    if !(cutoff > 0.0 && cutoff < 0.5) {
        return Err(Error::InvalidParameter(format!("cutoff must lie in (0, 0.5), got {cutoff}")));
    }
    let (mut high, mut total) = (0.0, 0.0);
    for (r, p) in radial_power(image) {
        total += p;
        if r > cutoff {
            high += p;
        }
    }
    Ok(if total > 0.0 { high / total } else { 0.0 })
}

/// Spectral energy in 8 equal-width bands of `|k|` over `[0, 0.5]`, each
/// normalized by the total. Corner energy beyond 0.5 counts in the last band.
pub fn probe_features(image: &ImageSlice) -> Result<[f64; PROBE_BANDS]> {
    let mut bands = [0.0; PROBE_BANDS];
    let mut total = 0.0;
    for (r, p) in radial_power(image) {
        let band = ((r / 0.5 * PROBE_BANDS as f64) as usize).min(PROBE_BANDS - 1);
        bands[band] += p;
        total += p;
    }
    if total == 0.0 {
        return Err(Error::Undefined("band features of an all-zero image".into()));
    }
    bands.iter_mut().for_each(|b| *b /= total);
    Ok(bands)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    /// RMSE over the clean-image RMS.
    pub nrmse: f64,
    /// High-frequency energy fraction of the corrupted image (`|k| > 0.25`).
    pub highfreq_energy_ratio: f64,
    /// L1 distance between the band features of the corrupted and clean images.
    pub artifact_score: f64,
}

impl MetricsReport {
    pub fn compute(clean: &ImageSlice, corrupted: &ImageSlice) -> Result<Self> {
        let nrmse = nrmse(clean, corrupted)?;
        let a = probe_features(corrupted)?;
        let b = probe_features(clean)?;
        Ok(Self {
            rmse: rmse(clean, corrupted)?,
            nrmse,
            highfreq_energy_ratio: highfreq_energy_ratio(corrupted, HIGHFREQ_CUTOFF)?,
            artifact_score: a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum(),
        })
    }

    /// Largest absolute difference between corresponding fields.
    pub fn max_abs_diff(&self, other: &MetricsReport) -> f64 {
        [
            self.rmse - other.rmse,
            self.nrmse - other.nrmse,
            self.highfreq_energy_ratio - other.highfreq_energy_ratio,
            self.artifact_score - other.artifact_score,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}
