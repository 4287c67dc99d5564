//! On-disk formats: images (PGM, float32 raw), simulation records, CSV
//! tables and dataset manifests.

mod image_io;
mod manifest;
mod record;
mod tables;

pub use crate::image::resize_bilinear;
pub use image_io::{load_image, read_pgm, save_image, save_preview_pgm, sidecar_path, write_pgm16, write_pgm8, Pgm, RawSidecar};
pub use manifest::{
    fit_to_matrix, read_manifest, regenerate_entry, verify_entry, write_manifest, DatasetManifest, Label, ManifestEntry,
    MANIFEST_VERSION,
};
pub use record::{read_record, write_record, RecordFiles, METRICS_TOLERANCE};
pub use tables::{
    read_metrics_csv, read_trajectory_csv, trajectory_csv, write_metrics_csv, write_plan_csv, write_trajectory_csv,
    MetricsRow, METRICS_HEADER, PLAN_HEADER, TRAJECTORY_HEADER,
};
