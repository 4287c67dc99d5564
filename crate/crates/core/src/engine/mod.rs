//! Motion-corrupted k-space acquisition.
//!
//! Every shot samples the spectrum of the image as transformed by the pose
//! held during that shot. Samples of repeated excitations are averaged.

mod warp;

pub use warp::apply_rigid;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::CenteredFft1;
use crate::image::ImageSlice;
use crate::metrics::{abs_error_map, ErrorMap, MetricsReport};
use crate::motion::{severity_rms, MotionTrajectory, RigidPose, SeverityStats, TrajectoryGenerator};
use crate::recon::{direct_dft_oracle, grid_reconstruct, GriddingParams, Kernel, Nufft};
use crate::sampler::{make_plan, SamplingPlan, ScannerConfig, Scheme, Shot};

/// How off-grid (radial and spiral) samples are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralEvaluation {
    /// Exact for images of at most 64 x 64 pixels, interpolated otherwise.
    #[default]
    Auto,
    /// Direct DFT sum per sample.
    Exact,
    /// Kaiser-Bessel interpolation from a 2x oversampled spectrum.
    Interpolated,
}

const AUTO_EXACT_MAX_PIXELS: usize = 64 * 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcquisitionOptions {
    pub spectral: SpectralEvaluation,
    /// Interpolation kernel width in oversampled cells.
    pub kernel_width: usize,
    pub oversampling: f64,
    /// Drop `tz`, `rx` and `ry` instead of rejecting them.
    pub ignore_through_plane: bool,
}

impl Default for AcquisitionOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralEvaluation::Auto,
            kernel_width: 6,
            oversampling: 2.0,
            ignore_through_plane: false,
        }
    }
}

/// Measured k-space: one complex value per sample of one excitation, in
/// shot-major plan order.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceAcquisition {
    pub plan: SamplingPlan,
    pub pixel_spacing_mm: f64,
    pub values: Vec<Complex64>,
    /// Repeated excitations have been complex-averaged into `values`.
    pub nex_averaged: bool,
}

impl KSpaceAcquisition {
    pub fn config(&self) -> &ScannerConfig {
        &self.plan.config
    }

    pub fn scheme(&self) -> Scheme {
        self.plan.scheme()
    }

    pub fn width(&self) -> usize {
        self.plan.config.matrix_fe
    }

    pub fn height(&self) -> usize {
        self.plan.config.matrix_pe
    }

    pub fn coords(&self) -> Vec<[f64; 2]> {
        self.plan.excitation_coords()
    }
}

pub fn simulate_acquisition(
    image: &ImageSlice,
    plan: &SamplingPlan,
    trajectory: &MotionTrajectory,
    options: &AcquisitionOptions,
) -> Result<KSpaceAcquisition> {
    let cfg = &plan.config;
    if image.width() != cfg.matrix_fe || image.height() != cfg.matrix_pe {
        return Err(Error::DimensionMismatch(format!(
            "image is {}x{} but the scanner matrix is {}x{} (fe x pe)",
            image.width(),
            image.height(),
            cfg.matrix_fe,
            cfg.matrix_pe
        )));
    }
    let violations = crate::sampler::validate_plan(plan);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidConfig(format!("invalid sampling plan: {v}")));
    }
    if trajectory.len() < plan.n_shots_total() {
        return Err(Error::TrajectoryTooShort {
            required: plan.n_shots_total(),
            available: trajectory.len(),
        });
    }
    if !(options.oversampling.is_finite() && options.oversampling >= 1.25) || !(2..=16).contains(&options.kernel_width) {
        return Err(Error::InvalidParameter(format!(
            "interpolation needs oversampling >= 1.25 and kernel width in 2..=16, got {} and {}",
            options.oversampling, options.kernel_width
        )));
    }

    let evaluator = Evaluator::new(image, cfg, options);

    // Runs of consecutive shots sharing one pose share one transformed image.
    let mut runs: Vec<(RigidPose, Vec<&Shot>)> = Vec::new();
    for shot in &plan.shots {
        let pose = *trajectory.poses().get(shot.time_index_tr).ok_or(Error::ShotOutOfRange {
            index: shot.time_index_tr,
            len: trajectory.len(),
        })?;
        match runs.last_mut() {
            Some((p, shots)) if *p == pose => shots.push(shot),
            _ => runs.push((pose, vec![shot])),
        }
    }
    let evaluated: Vec<Vec<(usize, Vec<Complex64>)>> = runs
        .par_iter()
        .map(|(pose, shots)| {
            let moved = apply_rigid(image, pose, options.ignore_through_plane)?;
            let prepared = evaluator.prepare(&moved);
            Ok(shots
                .iter()
                .map(|shot| (shot.index, evaluator.sample(&prepared, &moved, shot)))
                .collect())
        })
        .collect::<Result<_>>()?;

    let per_exc = plan.shots_per_excitation();
    let offsets: Vec<usize> = plan
        .excitation_shots()
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.samples.len();
            Some(o)
        })
        .collect();
    let mut values = vec![Complex64::default(); plan.samples_per_excitation()];
    let inv_nex = 1.0 / cfg.nex as f64;
    for (shot_index, samples) in evaluated.into_iter().flatten() {
        let offset = offsets[shot_index % per_exc];
        for (acc, v) in values[offset..offset + samples.len()].iter_mut().zip(samples) {
            *acc += v * inv_nex;
        }
    }
    Ok(KSpaceAcquisition {
        plan: plan.clone(),
        pixel_spacing_mm: image.pixel_spacing_mm(),
        values,
        nex_averaged: true,
    })
}

enum Evaluator {
    CartesianLines { fft: CenteredFft1 },
    Exact,
    Interpolated(Nufft),
}

enum Prepared {
    None,
    Spectrum(Vec<Complex64>),
}

impl Evaluator {
    fn new(image: &ImageSlice, cfg: &ScannerConfig, options: &AcquisitionOptions) -> Self {
        if cfg.scheme == Scheme::Cartesian {
            return Evaluator::CartesianLines {
                fft: CenteredFft1::new(cfg.matrix_fe),
            };
        }
        let exact = match options.spectral {
            SpectralEvaluation::Exact => true,
            SpectralEvaluation::Interpolated => false,
            SpectralEvaluation::Auto => image.len() <= AUTO_EXACT_MAX_PIXELS,
        };
        if exact {
            Evaluator::Exact
        } else {
            let kernel = Kernel::kaiser_bessel(options.kernel_width, options.oversampling);
            Evaluator::Interpolated(Nufft::new(image.width(), image.height(), options.oversampling, kernel))
        }
    }

    fn prepare(&self, moved: &ImageSlice) -> Prepared {
        match self {
            Evaluator::Interpolated(nufft) => Prepared::Spectrum(nufft.spectrum(moved.pixels())),
            _ => Prepared::None,
        }
    }

    fn sample(&self, prepared: &Prepared, moved: &ImageSlice, shot: &Shot) -> Vec<Complex64> {
        let (w, h) = (moved.width(), moved.height());
        match (self, prepared) {
            (Evaluator::CartesianLines { fft }, _) => match cartesian_line(shot, w, h) {
                Some(ky) => line_spectrum(moved, ky, fft),
                None => direct_dft_oracle(moved.pixels(), w, h, &shot.samples),
            },
            (Evaluator::Interpolated(nufft), Prepared::Spectrum(spectrum)) => nufft.interpolate(spectrum, &shot.samples),
            _ => direct_dft_oracle(moved.pixels(), w, h, &shot.samples),
        }
    }
}

/// `ky` when the shot is a complete grid line in natural `kx` order.
fn cartesian_line(shot: &Shot, w: usize, h: usize) -> Option<f64> {
    let ky = shot.samples.first()?[1];
    let row = ky * h as f64 + (h / 2) as f64;
    let on_grid = (row - row.round()).abs() < 1e-9;
    let full_line = shot.samples.len() == w
        && shot
            .samples
            .iter()
            .enumerate()
            .all(|(j, k)| k[1] == ky && (k[0] - (j as f64 - (w / 2) as f64) / w as f64).abs() < 1e-12);
    (on_grid && full_line).then_some(ky)
}

/// Exact spectrum along one phase-encode line: collapse the rows with the
/// `ky` phase, then a centered FFT along the columns.
fn line_spectrum(image: &ImageSlice, ky: f64, fft: &CenteredFft1) -> Vec<Complex64> {
    let (w, h) = (image.width(), image.height());
    let mut line = vec![Complex64::default(); w];
    for (r, row) in image.pixels().chunks_exact(w).enumerate() {
        let phase = Complex64::cis(-2.0 * std::f64::consts::PI * ky * (r as f64 - (h / 2) as f64));
        for (acc, &v) in line.iter_mut().zip(row) {
            *acc += phase * v;
        }
    }
    fft.forward(&mut line);
    line
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub motion: TrajectoryGenerator,
    pub acquisition: AcquisitionOptions,
    pub gridding: GriddingParams,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            motion: TrajectoryGenerator::in_plane(),
            acquisition: AcquisitionOptions::default(),
            gridding: GriddingParams::default(),
        }
    }
}

/// Motion-free and motion-corrupted reconstructions of one slice.
///
/// Both images are rounded to `f32` precision so that a record written in
/// single-precision form reads back identically; error map and metrics are
/// computed from the rounded images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub id: String,
    pub config: ScannerConfig,
    pub seed: u64,
    pub severity: SeverityStats,
    pub clean: ImageSlice,
    pub corrupted: ImageSlice,
    pub error_map: ErrorMap,
    pub metrics: MetricsReport,
    pub trajectory: MotionTrajectory,
}

impl SimulationRecord {
    pub fn scheme(&self) -> Scheme {
        self.config.scheme
    }

    pub fn is_motion(&self) -> bool {
        !self.trajectory.is_identity()
    }

    /// The record a motion-free trajectory of the same length would give:
    /// the clean reconstruction on both sides.
    pub fn clean_counterpart(&self, id: impl Into<String>) -> Result<SimulationRecord> {
        let trajectory = MotionTrajectory::identity(self.trajectory.len(), self.trajectory.tr_ms())?;
        Ok(SimulationRecord {
            id: id.into(),
            config: self.config.clone(),
            seed: self.seed,
            severity: SeverityStats::NONE,
            clean: self.clean.clone(),
            corrupted: self.clean.clone(),
            error_map: abs_error_map(&self.clean, &self.clean)?,
            metrics: MetricsReport::compute(&self.clean, &self.clean)?,
            trajectory,
        })
    }
}

/// Generates a trajectory of the requested severity from `seed`, acquires
/// `image` with and without it and reconstructs both.
pub fn corrupt_slice(
    image: &ImageSlice,
    scanner: &ScannerConfig,
    severity: SeverityStats,
    seed: u64,
    sim: &SimulationConfig,
) -> Result<SimulationRecord> {
    scanner.validate()?;
    let trajectory = sim.motion.generate(scanner.n_shots_total(), scanner.tr_ms, severity, seed)?;
    corrupt_slice_with_trajectory(image, scanner, &trajectory, seed, sim)
}

/// Like [`corrupt_slice`] with an explicit trajectory; `seed` is only recorded.
pub fn corrupt_slice_with_trajectory(
    image: &ImageSlice,
    scanner: &ScannerConfig,
    trajectory: &MotionTrajectory,
    seed: u64,
    sim: &SimulationConfig,
) -> Result<SimulationRecord> {
    let clean = reconstruct_clean(image, scanner, sim)?;
    corrupt_slice_against(image, &clean, scanner, trajectory, seed, sim)
}

/// Motion-free reconstruction of `image`, rounded to `f32` as stored in
/// records. Depends only on the image and the scanner, so batches reuse it
/// across trials.
pub fn reconstruct_clean(image: &ImageSlice, scanner: &ScannerConfig, sim: &SimulationConfig) -> Result<ImageSlice> {
    let plan = make_plan(scanner)?;
    let still = MotionTrajectory::identity(plan.n_shots_total(), scanner.tr_ms)?;
    let acq = simulate_acquisition(image, &plan, &still, &sim.acquisition)?;
    Ok(grid_reconstruct(&acq, &sim.gridding)?.quantized_f32())
}

/// Like [`corrupt_slice_with_trajectory`] with a motion-free reconstruction
/// already computed by [`reconstruct_clean`].
pub fn corrupt_slice_against(
    image: &ImageSlice,
    clean: &ImageSlice,
    scanner: &ScannerConfig,
    trajectory: &MotionTrajectory,
    seed: u64,
    sim: &SimulationConfig,
) -> Result<SimulationRecord> {
    let plan = make_plan(scanner)?;
    if clean.width() != scanner.matrix_fe || clean.height() != scanner.matrix_pe {
        return Err(Error::DimensionMismatch(format!(
            "clean reconstruction is {}x{}, scanner matrix is {}x{}",
            clean.width(),
            clean.height(),
            scanner.matrix_fe,
            scanner.matrix_pe
        )));
    }
    let corrupted = if trajectory.is_identity() {
        clean.clone()
    } else {
        let moved_acq = simulate_acquisition(image, &plan, trajectory, &sim.acquisition)?;
        grid_reconstruct(&moved_acq, &sim.gridding)?.quantized_f32()
    };
    let error_map = abs_error_map(clean, &corrupted)?;
    let metrics = MetricsReport::compute(clean, &corrupted)?;
    Ok(SimulationRecord {
        id: format!("{}-{seed}", scanner.scheme),
        config: scanner.clone(),
        seed,
        severity: severity_rms(trajectory),
        clean: clean.clone(),
        corrupted,
        error_map,
        metrics,
        trajectory: trajectory.clone(),
    })
}
