//! Dataset manifests: one JSON document listing every record of a batch
//! together with everything needed to regenerate it.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{corrupt_slice, SimulationConfig, SimulationRecord};
use crate::error::{Error, Result};
use crate::image::{resize_bilinear, ImageSlice};
use crate::metrics::MetricsReport;
use crate::motion::SeverityStats;
use crate::sampler::{ScannerConfig, Scheme};

use super::image_io::load_image;
use super::record::{validate_id, RecordFiles};

pub const MANIFEST_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Motion,
    Clean,
}

impl Label {
    pub fn is_motion(self) -> bool {
        self == Label::Motion
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Motion => "motion",
            Label::Clean => "clean",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub label: Label,
    pub scheme: Scheme,
    /// Trajectory seed.
    pub seed: u64,
    pub trial: usize,
    /// Requested severity; zero for clean entries.
    pub target: SeverityStats,
    /// Severity the trajectory actually has.
    pub severity: SeverityStats,
    /// Input image, relative to the manifest directory unless absolute.
    pub source: String,
    pub config: ScannerConfig,
    /// Record directory relative to the manifest directory.
    pub directory: String,
    pub files: RecordFiles,
    pub metrics: MetricsReport,
}

impl ManifestEntry {
    pub fn from_record(
        record: &SimulationRecord,
        label: Label,
        trial: usize,
        target: SeverityStats,
        source: &str,
        directory: &str,
    ) -> Self {
        Self {
            id: record.id.clone(),
            label,
            scheme: record.scheme(),
            seed: record.seed,
            trial,
            target,
            severity: record.severity,
            source: source.to_string(),
            config: record.config.clone(),
            directory: directory.to_string(),
            files: RecordFiles::for_id(&record.id),
            metrics: record.metrics,
        }
    }

    pub fn record_dir(&self, manifest_dir: &Path) -> PathBuf {
        manifest_dir.join(&self.directory)
    }

    pub fn source_path(&self, manifest_dir: &Path) -> PathBuf {
        let source = Path::new(&self.source);
        if source.is_absolute() {
            source.to_path_buf()
        } else {
            manifest_dir.join(source)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: String,
    pub master_seed: u64,
    pub simulation: SimulationConfig,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(master_seed: u64, simulation: SimulationConfig) -> Self {
        Self {
            version: MANIFEST_VERSION.to_string(),
            master_seed,
            simulation,
            entries: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != MANIFEST_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported manifest version {:?} (expected {MANIFEST_VERSION:?})",
                self.version
            )));
        }
        let mut seen = HashSet::new();
        for entry in &self.entries {
            validate_id(&entry.id)?;
            if !seen.insert(entry.id.as_str()) {
                return Err(Error::DuplicateId(entry.id.clone()));
            }
        }
        Ok(())
    }
}

/// Writes `manifest` as pretty JSON after checking ids and that every
/// referenced record file exists next to `path`.
pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    manifest.validate()?;
    let base = manifest_dir(path);
    for entry in &manifest.entries {
        let dir = entry.record_dir(&base);
        for file in entry.files.all() {
            let p = dir.join(file);
            if !p.is_file() {
                return Err(Error::malformed("manifest entry", path, format!("{}: missing {}", entry.id, p.display())));
            }
        }
    }
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    manifest.validate()?;
    Ok(manifest)
}

pub(crate) fn manifest_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Brings an input image to the scanner matrix.
pub fn fit_to_matrix(image: &ImageSlice, config: &ScannerConfig) -> Result<ImageSlice> {
    resize_bilinear(image, config.matrix_fe, config.matrix_pe)
}

/// Recomputes one entry from its source image and seeds.
pub fn regenerate_entry(manifest: &DatasetManifest, entry: &ManifestEntry, manifest_path: &Path) -> Result<SimulationRecord> {
    let source = load_image(&entry.source_path(&manifest_dir(manifest_path)))?;
    let image = fit_to_matrix(&source, &entry.config)?;
    let mut record = corrupt_slice(&image, &entry.config, entry.target, entry.seed, &manifest.simulation)?;
    record.id = entry.id.clone();
    Ok(record)
}

/// Regenerates an entry and checks that its corrupted image matches the
/// stored one bit for bit.
pub fn verify_entry(manifest: &DatasetManifest, entry: &ManifestEntry, manifest_path: &Path) -> Result<()> {
    let regenerated = regenerate_entry(manifest, entry, manifest_path)?;
    let stored_path = entry.record_dir(&manifest_dir(manifest_path)).join(&entry.files.corrupted);
    let stored = load_image(&stored_path)?;
    let same = stored.same_shape(&regenerated.corrupted)
        && stored
            .pixels()
            .iter()
            .zip(regenerated.corrupted.pixels())
            .all(|(a, b)| a.to_bits() == b.to_bits());
    if same {
        Ok(())
    } else {
        Err(Error::MetricsMismatch {
            id: entry.id.clone(),
            detail: "regenerated corrupted image differs from the stored one".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{save_image, write_record};
    use crate::phantom::shepp_logan;

    #[test]
    fn empty_manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let manifest = DatasetManifest::new(5, SimulationConfig::default());
        write_manifest(&manifest, &path).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back, manifest);
        assert!(back.entries.is_empty());
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"version\": \"1\""));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let img = shepp_logan(16).unwrap();
        let cfg = ScannerConfig::new(Scheme::Cartesian, 16);
        let sim = SimulationConfig::default();
        let rec = corrupt_slice(&img, &cfg, SeverityStats::new(1.0, 0.5), 3, &sim).unwrap();
        write_record(&rec, dir.path()).unwrap();
        let entry = ManifestEntry::from_record(&rec, Label::Motion, 0, SeverityStats::new(1.0, 0.5), "x.raw", "");
        let mut manifest = DatasetManifest::new(1, sim);
        manifest.entries = vec![entry.clone(), entry];
        let err = write_manifest(&manifest, &dir.path().join("m.json")).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));
    }

    #[test]
    fn missing_record_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let img = shepp_logan(16).unwrap();
        let cfg = ScannerConfig::new(Scheme::Cartesian, 16);
        let sim = SimulationConfig::default();
        let rec = corrupt_slice(&img, &cfg, SeverityStats::NONE, 3, &sim).unwrap();
        let mut manifest = DatasetManifest::new(1, sim);
        manifest.entries.push(ManifestEntry::from_record(&rec, Label::Clean, 0, SeverityStats::NONE, "x.raw", ""));
        assert!(write_manifest(&manifest, &dir.path().join("m.json")).is_err());
    }

    #[test]
    fn entries_regenerate_bit_identically() {
        let dir = tempfile::tempdir().unwrap();
        save_image(&shepp_logan(24).unwrap(), &dir.path().join("phantom.raw")).unwrap();
        let source = load_image(&dir.path().join("phantom.raw")).unwrap();
        let sim = SimulationConfig::default();
        let mut manifest = DatasetManifest::new(7, sim.clone());
        for scheme in Scheme::ALL {
            let cfg = ScannerConfig::new(scheme, 16);
            let target = SeverityStats::new(1.2, 0.7);
            let image = fit_to_matrix(&source, &cfg).unwrap();
            let mut rec = corrupt_slice(&image, &cfg, target, 40, &sim).unwrap();
            rec.id = format!("{scheme}-t0");
            write_record(&rec, &dir.path().join(scheme.as_str())).unwrap();
            manifest
                .entries
                .push(ManifestEntry::from_record(&rec, Label::Motion, 0, target, "phantom.raw", scheme.as_str()));
        }
        let path = dir.path().join("manifest.json");
        write_manifest(&manifest, &path).unwrap();
        let back = read_manifest(&path).unwrap();
        for entry in &back.entries {
            verify_entry(&back, entry, &path).unwrap();
        }
    }
}
