//! Retrospective rigid-motion k-space simulation.
//!
//! The crate corrupts a 2-D magnitude image the way an MRI scanner would see
//! it if the subject moved between shots: every shot (a Cartesian line, a
//! radial spoke or a spiral interleave) samples the Fourier transform of the
//! image transformed by the pose the subject held during that shot. The
//! corrupted k-space is reconstructed (directly for Cartesian data, by
//! Kaiser-Bessel gridding otherwise) and compared with the motion-free
//! reconstruction.
//!
//! Module map:
//!
//! * [`motion`]: random rigid trajectories, Savitzky-Golay smoothing, RMS severity
//! * [`sampler`]: Cartesian, radial and spiral sampling plans and scan time
//! * [`engine`]: rigid resampling and motion-corrupted acquisition
//! * [`recon`]: centered FFT pair, direct DFT oracle, density compensation, gridding
//! * [`metrics`]: error maps, RMSE, spectral band features, logistic probe and AUC
//! * [`dataset`]: image/record/manifest formats
//! * [`experiment`]: paired multi-scheme batches and the scheme comparison

pub mod dataset;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod image;
pub mod metrics;
pub mod motion;
pub mod phantom;
pub mod recon;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use image::ImageSlice;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
