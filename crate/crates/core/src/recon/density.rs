//! Sampling density compensation weights.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{ScannerConfig, Scheme};

use super::{GriddingParams, Nufft};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum DensityMethod {
    /// Analytic area weights: `|k|` ramp for radial and spiral trajectories.
    #[default]
    Ramp,
    /// Fixed-point iteration `w <- w / (C * w)` with the gridding kernel `C`.
    Jackson { iterations: usize },
}

/// Per-sample weights, each the k-space area (in grid cells of the image
/// matrix) the sample stands for, so `sum w v exp(...)` approximates the
/// inverse DFT sum over the full grid.
///
/// `coords` are the samples actually gridded: one excitation in plan order,
/// possibly after spoke upsampling. Cartesian data needs no compensation and
/// is rejected.
pub fn density_weights(config: &ScannerConfig, coords: &[[f64; 2]], params: &GriddingParams) -> Result<Vec<f64>> {
    if coords.is_empty() {
        return Err(Error::InvalidParameter("no samples to weight".into()));
    }
    let cells = (config.matrix_pe * config.matrix_fe) as f64;
    match (config.scheme, params.density) {
        (Scheme::Cartesian, _) => Err(Error::NotApplicable(
            "Cartesian samples lie on the grid and need no density compensation".into(),
        )),
        (Scheme::Radial, DensityMethod::Ramp) => {
            let spokes = config.radial_spokes();
            let dr = spokes as f64 / coords.len() as f64;
            Ok(coords
                .iter()
                .map(|k| PI * k[0].hypot(k[1]) * dr / spokes as f64 * cells)
                .collect())
        }
        (Scheme::Spiral, DensityMethod::Ramp) => {
            let interleaves = config.spiral_interleaves();
            let per_shot = coords.len() / interleaves;
            let kmax = config.kmax();
            let total = coords.len() as f64;
            // the origin gets half the weight of the first ring
            let first_ring = kmax / per_shot as f64;
            let center = PI * first_ring * kmax / total * cells;
            Ok(coords
                .iter()
                .map(|k| {
                    let r = k[0].hypot(k[1]);
                    if r == 0.0 {
                        center
                    } else {
                        2.0 * PI * r * kmax / total * cells
                    }
                })
                .collect())
        }
        (_, DensityMethod::Jackson { iterations }) => {
            let nufft = Nufft::new(config.matrix_fe, config.matrix_pe, params.oversampling, params.build_kernel());
            let mut w = vec![1.0; coords.len()];
            for _ in 0..iterations {
                let conv = nufft.convolve_at_samples(coords, &w);
                for (wi, c) in w.iter_mut().zip(&conv) {
                    if *c > 0.0 {
                        *wi /= c;
                    }
                }
            }
            let kmax = coords.iter().map(|k| k[0].hypot(k[1])).fold(0.0, f64::max);
            let scale = PI * kmax * kmax * cells / w.iter().sum::<f64>();
            Ok(w.into_iter().map(|v| v * scale).collect())
        }
    }
}
