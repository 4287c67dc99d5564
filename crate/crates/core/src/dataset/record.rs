//! One simulation record on disk.
//!
//! A record `<id>` in a directory consists of
//!
//! ```text
//! <id>_clean.raw / .json       motion-free reconstruction (float32 + sidecar)
//! <id>_corrupted.raw / .json   motion-corrupted reconstruction
//! <id>_error.pgm               8-bit absolute error map
//! <id>_trajectory.csv          one pose per shot
//! <id>_metrics.csv             header plus one metrics row
//! <id>_record.json             id, seed, TR and scanner configuration
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::SimulationRecord;
use crate::error::{Error, Result};
use crate::metrics::{abs_error_map, ErrorMap, MetricsReport};
use crate::motion::severity_rms;
use crate::sampler::ScannerConfig;

use super::image_io::{load_image, read_pgm, save_image, write_pgm8};
use super::tables::{read_metrics_csv, read_trajectory_csv, write_metrics_csv, write_trajectory_csv, MetricsRow};

/// Largest tolerated difference between stored and recomputed metrics.
pub const METRICS_TOLERANCE: f64 = 1e-9;

/// File names of one record, relative to its directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFiles {
    pub clean: String,
    pub corrupted: String,
    pub error_map: String,
    pub trajectory: String,
    pub metrics: String,
    pub meta: String,
}

impl RecordFiles {
    pub fn for_id(id: &str) -> Self {
        Self {
            clean: format!("{id}_clean.raw"),
            corrupted: format!("{id}_corrupted.raw"),
            error_map: format!("{id}_error.pgm"),
            trajectory: format!("{id}_trajectory.csv"),
            metrics: format!("{id}_metrics.csv"),
            meta: format!("{id}_record.json"),
        }
    }

    /// Every file name including the image sidecars.
    pub fn all(&self) -> Vec<String> {
        let side = |s: &str| s.trim_end_matches(".raw").to_string() + ".json";
        vec![
            self.clean.clone(),
            side(&self.clean),
            self.corrupted.clone(),
            side(&self.corrupted),
            self.error_map.clone(),
            self.trajectory.clone(),
            self.metrics.clone(),
            self.meta.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RecordMeta {
    id: String,
    seed: u64,
    tr_ms: f64,
    config: ScannerConfig,
}

pub(crate) fn validate_id(id: &str) -> Result<()> {
    let ok = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok && !id.starts_with('.') {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "record id {id:?} must be non-empty and use only ASCII letters, digits, '-', '_' and '.'"
        )))
    }
}

pub fn write_record(record: &SimulationRecord, dir: &Path) -> Result<RecordFiles> {
    validate_id(&record.id)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = RecordFiles::for_id(&record.id);
    save_image(&record.clean, &dir.join(&files.clean))?;
    save_image(&record.corrupted, &dir.join(&files.corrupted))?;
    let map = &record.error_map;
    write_pgm8(&dir.join(&files.error_map), map.width, map.height, &map.values)?;
    write_trajectory_csv(&dir.join(&files.trajectory), &record.trajectory)?;
    write_metrics_csv(&dir.join(&files.metrics), &[MetricsRow::from_record(record)])?;
    let meta = RecordMeta {
        id: record.id.clone(),
        seed: record.seed,
        tr_ms: record.trajectory.tr_ms(),
        config: record.config.clone(),
    };
    let meta_path = dir.join(&files.meta);
    let text = serde_json::to_string_pretty(&meta).expect("record metadata serializes");
    fs::write(&meta_path, text + "\n").map_err(|e| Error::io(&meta_path, e))?;
    Ok(files)
}

/// Reads a record back and checks the stored error map and metrics against
/// values recomputed from the stored images.
pub fn read_record(dir: &Path, id: &str) -> Result<SimulationRecord> {
    validate_id(id)?;
    let files = RecordFiles::for_id(id);
    let meta_path = dir.join(&files.meta);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: RecordMeta = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: meta_path.clone(),
        source: e,
    })?;
    if meta.id != id {
        return Err(Error::malformed("record metadata", &meta_path, format!("holds id {:?}", meta.id)));
    }

    let clean = load_image(&dir.join(&files.clean))?;
    let corrupted = load_image(&dir.join(&files.corrupted))?;
    let trajectory = read_trajectory_csv(&dir.join(&files.trajectory), Some(meta.tr_ms))?;

    let map_path = dir.join(&files.error_map);
    let pgm = read_pgm(&map_path)?;
    if pgm.maxval != 255 {
        return Err(Error::malformed("error map", &map_path, format!("maxval {} (expected 255)", pgm.maxval)));
    }
    let error_map = ErrorMap {
        width: pgm.width,
        height: pgm.height,
        values: pgm.samples.iter().map(|&v| v as u8).collect(),
    };
    if abs_error_map(&clean, &corrupted)? != error_map {
        return Err(Error::MetricsMismatch {
            id: id.to_string(),
            detail: "error map differs from the stored images".into(),
        });
    }

    let metrics_path = dir.join(&files.metrics);
    let rows = read_metrics_csv(&metrics_path)?;
    let [row] = rows.as_slice() else {
        return Err(Error::malformed("metrics CSV", &metrics_path, format!("{} rows, expected 1", rows.len())));
    };
    let stored = MetricsReport {
        rmse: row.rmse,
        nrmse: row.nrmse,
        highfreq_energy_ratio: row.hf_ratio,
        artifact_score: row.score,
    };
    let recomputed = MetricsReport::compute(&clean, &corrupted)?;
    let diff = stored.max_abs_diff(&recomputed);
    if !(diff <= METRICS_TOLERANCE) {
        return Err(Error::MetricsMismatch {
            id: id.to_string(),
            detail: format!("largest difference {diff:e}"),
        });
    }
    let severity = severity_rms(&trajectory);
    if row.id != id || row.seed != meta.seed || row.scheme != meta.config.scheme {
        return Err(Error::malformed("metrics CSV", &metrics_path, "row does not belong to this record"));
    }
    if (row.rms_disp_mm - severity.rms_displacement_mm).abs() > METRICS_TOLERANCE
        || (row.rms_rot_deg - severity.rms_rotation_deg).abs() > METRICS_TOLERANCE
    {
        return Err(Error::MetricsMismatch {
            id: id.to_string(),
            detail: "stored severity differs from the trajectory".into(),
        });
    }

    Ok(SimulationRecord {
        id: meta.id,
        config: meta.config,
        seed: meta.seed,
        severity,
        clean,
        corrupted,
        error_map,
        metrics: stored,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{corrupt_slice, SimulationConfig};
    use crate::motion::SeverityStats;
    use crate::phantom::shepp_logan;
    use crate::sampler::Scheme;

    fn record() -> SimulationRecord {
        let img = shepp_logan(32).unwrap();
        let cfg = ScannerConfig::new(Scheme::Spiral, 32);
        corrupt_slice(&img, &cfg, SeverityStats::new(1.0, 0.6), 9, &SimulationConfig::default()).unwrap()
    }

    #[test]
    fn write_then_read_gives_equal_record() {
        let dir = tempfile::tempdir().unwrap();
        let rec = record();
        let files = write_record(&rec, dir.path()).unwrap();
        for f in files.all() {
            assert!(dir.path().join(f).exists());
        }
        assert_eq!(read_record(dir.path(), &rec.id).unwrap(), rec);
    }

    #[test]
    fn tampered_metrics_are_detected() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = record();
        rec.metrics.nrmse *= 1.01;
        write_record(&rec, dir.path()).unwrap();
        assert!(matches!(read_record(dir.path(), &rec.id), Err(Error::MetricsMismatch { .. })));
    }

    #[test]
    fn bad_ids_are_rejected() {
        assert!(validate_id("cartesian-12_clean").is_ok());
        assert!(validate_id("a,b").is_err());
        assert!(validate_id("../x").is_err());
        assert!(validate_id("").is_err());
    }
}
