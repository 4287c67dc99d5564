//! Seeded multi-scheme batches and the scheme comparison.
//!
//! Trial `t` of image `i` uses the same trajectory seed for every scheme, so
//! schemes are compared on paired trials that differ only in the sampling.

mod compare;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use std::path::Path;

use crate::dataset::{load_image, write_manifest, write_record, DatasetManifest, Label, ManifestEntry, RecordFiles};
use crate::engine::{corrupt_slice_against, reconstruct_clean, SimulationConfig, SimulationRecord};
use crate::error::{Error, Result};
use crate::image::ImageSlice;
use crate::metrics::{probe_features, MetricsReport, PROBE_BANDS};
use crate::motion::SeverityStats;
use crate::rng::{normal, rng_from_seed, substream_seed};
use crate::sampler::{ScannerConfig, Scheme};

pub use compare::{compare, CompareOptions, ComparisonReport, ComparisonSample, PairGap, SchemeSummary, Verdict};

/// Random severity targets: independent clamped normals for displacement
/// and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityPolicy {
    pub displacement_mean_mm: f64,
    pub displacement_std_mm: f64,
    /// Keeps every motion record visibly moved.
    pub displacement_min_mm: f64,
    pub rotation_mean_deg: f64,
    pub rotation_std_deg: f64,
    pub rotation_min_deg: f64,
}

impl Default for SeverityPolicy {
    fn default() -> Self {
        Self {
            displacement_mean_mm: 1.0,
            displacement_std_mm: 0.4,
            displacement_min_mm: 0.05,
            rotation_mean_deg: 0.6,
            rotation_std_deg: 0.4,
            rotation_min_deg: 0.0,
        }
    }
}

impl SeverityPolicy {
    pub fn draw(&self, seed: u64) -> SeverityStats {
        let mut rng = rng_from_seed(seed);
        let disp = normal(&mut rng, self.displacement_mean_mm, self.displacement_std_mm);
        let rot = normal(&mut rng, self.rotation_mean_deg, self.rotation_std_deg);
        SeverityStats::new(disp.max(self.displacement_min_mm), rot.max(self.rotation_min_deg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SeverityMode {
    Policy(SeverityPolicy),
    Fixed(SeverityStats),
}

impl Default for SeverityMode {
    fn default() -> Self {
        SeverityMode::Policy(SeverityPolicy::default())
    }
}

/// Seeds of one (image, trial) pair, shared by all schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub trajectory: u64,
    pub severity: u64,
}

pub fn trial_seeds(master_seed: u64, image_index: usize, trial: usize, trials: usize) -> TrialSeeds {
    let pair = (image_index * trials + trial) as u64;
    TrialSeeds {
        trajectory: substream_seed(master_seed, 2 * pair),
        severity: substream_seed(master_seed, 2 * pair + 1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec {
    pub master_seed: u64,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    /// Template; the scheme is replaced per batch scheme.
    pub scanner: ScannerConfig,
    pub severity: SeverityMode,
    /// Also emit the motion-free record of every trial.
    pub include_clean: bool,
}

impl BatchSpec {
    pub fn new(master_seed: u64, trials: usize, schemes: Vec<Scheme>, scanner: ScannerConfig) -> Self {
        Self {
            master_seed,
            trials,
            schemes,
            scanner,
            severity: SeverityMode::default(),
            include_clean: true,
        }
    }

    pub fn target(&self, seeds: TrialSeeds) -> SeverityStats {
        match self.severity {
            SeverityMode::Policy(policy) => policy.draw(seeds.severity),
            SeverityMode::Fixed(stats) => stats,
        }
    }

    fn validate(&self, images: &[ImageSlice]) -> Result<()> {
        if images.is_empty() {
            return Err(Error::InvalidParameter("batch needs at least one image".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("batch needs at least one trial".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParameter("batch needs at least one scheme".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::InvalidParameter(format!("scheme {s} listed twice")));
            }
            self.scanner.with_scheme(*s).validate()?;
        }
        if let SeverityMode::Fixed(stats) = self.severity {
            stats.validate()?;
        }
        Ok(())
    }
}

/// One record produced by [`run_batch`].
#[derive(Debug, Clone)]
pub struct BatchItem {
    pub scheme: Scheme,
    pub image_index: usize,
    pub trial: usize,
    pub label: Label,
    pub target: SeverityStats,
    pub record: SimulationRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub id: String,
    pub scheme: Scheme,
    pub label: Label,
    pub image_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub target: SeverityStats,
    pub severity: SeverityStats,
    pub metrics: MetricsReport,
    /// Band features of the corrupted image.
    pub features: [f64; PROBE_BANDS],
}

impl TrialSummary {
    pub fn to_sample(&self) -> ComparisonSample {
        ComparisonSample {
            pair_key: format!("{}/{}", self.image_index, self.trial),
            seed: self.seed,
            label: self.label,
            nrmse: self.metrics.nrmse,
            features: self.features,
        }
    }
}

pub fn record_id(scheme: Scheme, image_index: usize, trial: usize, label: Label) -> String {
    format!("{scheme}-i{image_index:03}-t{trial:03}-{}", label.as_str())
}

/// Runs every (scheme, image, trial) of `spec` in parallel.
///
/// `images` must already have the scanner matrix size. `sink` sees each
/// record once, possibly from several threads; the returned summaries are in
/// (scheme, image, trial, motion before clean) order whatever the thread
/// count.
pub fn run_batch<F>(images: &[ImageSlice], spec: &BatchSpec, sim: &SimulationConfig, sink: F) -> Result<Vec<TrialSummary>>
where
    F: Fn(&BatchItem) -> Result<()> + Sync,
{
    spec.validate(images)?;
    let scanners: Vec<ScannerConfig> = spec.schemes.iter().map(|s| spec.scanner.with_scheme(*s)).collect();
    let cells: Vec<(usize, usize)> = (0..scanners.len())
        .flat_map(|s| (0..images.len()).map(move |i| (s, i)))
        .collect();
    let cleans: Vec<ImageSlice> = cells
        .par_iter()
        .map(|&(s, i)| reconstruct_clean(&images[i], &scanners[s], sim))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(cell, &(s, _))| (0..spec.trials).map(move |t| (cell, s, t)))
        .collect();
    let per_job: Vec<Vec<TrialSummary>> = jobs
        .par_iter()
        .map(|&(cell, s, trial)| {
            let (_, image_index) = cells[cell];
            let scanner = &scanners[s];
            let seeds = trial_seeds(spec.master_seed, image_index, trial, spec.trials);
            let target = spec.target(seeds);
            let trajectory = sim.motion.generate(scanner.n_shots_total(), scanner.tr_ms, target, seeds.trajectory)?;
            let mut motion =
                corrupt_slice_against(&images[image_index], &cleans[cell], scanner, &trajectory, seeds.trajectory, sim)?;
            motion.id = record_id(scanner.scheme, image_index, trial, Label::Motion);
            let mut out = vec![emit(&sink, scanner.scheme, image_index, trial, Label::Motion, target, motion.clone())?];
            if spec.include_clean {
                let clean = motion.clean_counterpart(record_id(scanner.scheme, image_index, trial, Label::Clean))?;
                out.push(emit(&sink, scanner.scheme, image_index, trial, Label::Clean, SeverityStats::NONE, clean)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

fn emit<F>(
    sink: &F,
    scheme: Scheme,
    image_index: usize,
    trial: usize,
    label: Label,
    target: SeverityStats,
    record: SimulationRecord,
) -> Result<TrialSummary>
where
    F: Fn(&BatchItem) -> Result<()>,
{
    let summary = TrialSummary {
        id: record.id.clone(),
        scheme,
        label,
        image_index,
        trial,
        seed: record.seed,
        target,
        severity: record.severity,
        metrics: record.metrics,
        features: probe_features(&record.corrupted)?,
    };
    sink(&BatchItem {
        scheme,
        image_index,
        trial,
        label,
        target,
        record,
    })?;
    Ok(summary)
}

/// An input image of a batch and how the manifest refers to it.
#[derive(Debug, Clone)]
pub struct BatchSource {
    /// Path as stored in the manifest (relative to the output directory
    /// unless absolute).
    pub source: String,
    /// The image at the scanner matrix size.
    pub image: ImageSlice,
}

/// Runs a batch, writes every record to `<out_dir>/<scheme>/` and the
/// manifest to `<out_dir>/manifest.json`.
pub fn write_batch(sources: &[BatchSource], spec: &BatchSpec, sim: &SimulationConfig, out_dir: &Path) -> Result<DatasetManifest> {
    let images: Vec<ImageSlice> = sources.iter().map(|s| s.image.clone()).collect();
    let summaries = run_batch(&images, spec, sim, |item| {
        write_record(&item.record, &out_dir.join(item.scheme.as_str())).map(|_| ())
    })?;
    let mut manifest = DatasetManifest::new(spec.master_seed, sim.clone());
    for s in &summaries {
        manifest.entries.push(ManifestEntry {
            id: s.id.clone(),
            label: s.label,
            scheme: s.scheme,
            seed: s.seed,
            trial: s.trial,
            target: s.target,
            severity: s.severity,
            source: sources[s.image_index].source.clone(),
            config: spec.scanner.with_scheme(s.scheme),
            directory: s.scheme.as_str().to_string(),
            files: RecordFiles::for_id(&s.id),
            metrics: s.metrics,
        });
    }
    write_manifest(&manifest, &out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Comparison samples of a manifest's entries, grouped by scheme. Band
/// features are recomputed from the stored corrupted images; trials pair up
/// by source image and trial number.
pub fn samples_from_manifest(manifest: &DatasetManifest, manifest_path: &Path) -> Result<Vec<(Scheme, Vec<ComparisonSample>)>> {
    let base = match manifest_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    let samples: Vec<(Scheme, ComparisonSample)> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let corrupted = load_image(&e.record_dir(&base).join(&e.files.corrupted))?;
            Ok((
                e.scheme,
                ComparisonSample {
                    pair_key: format!("{}#{}", e.source, e.trial),
                    seed: e.seed,
                    label: e.label,
                    nrmse: e.metrics.nrmse,
                    features: probe_features(&corrupted)?,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<(Scheme, Vec<ComparisonSample>)> = Vec::new();
    for (scheme, sample) in samples {
        match out.iter_mut().find(|(s, _)| *s == scheme) {
            Some((_, v)) => v.push(sample),
            None => out.push((scheme, vec![sample])),
        }
    }
    Ok(out)
}

/// Groups batch summaries by scheme for [`compare`].
pub fn samples_by_scheme(summaries: &[TrialSummary]) -> Vec<(Scheme, Vec<ComparisonSample>)> {
    let mut out: Vec<(Scheme, Vec<ComparisonSample>)> = Vec::new();
    for s in summaries {
        match out.iter_mut().find(|(scheme, _)| *scheme == s.scheme) {
            Some((_, v)) => v.push(s.to_sample()),
            None => out.push((s.scheme, vec![s.to_sample()])),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::corrupt_slice;
    use crate::phantom::shepp_logan;
    use std::sync::Mutex;
    
    #[test]
    fn policy_draws_are_clamped_and_seeded() {
        let policy = SeverityPolicy::default();
        let draws: Vec<SeverityStats> = (0..2000).map(|s| policy.draw(s)).collect();
        assert!(draws.iter().all(|d| d.rms_displacement_mm >= 0.05 && d.rms_rotation_deg >= 0.0));
        let mean = draws.iter().map(|d| d.rms_displacement_mm).sum::<f64>() / 2000.0;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
        assert_eq!(policy.draw(17), policy.draw(17));
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..4 {
            for t in 0..5 {
                let s = trial_seeds(3, i, t, 5);
                assert!(seen.insert(s.trajectory));
                assert!(seen.insert(s.severity));
            }
        }
    }

    #[test]
    fn batch_counts_order_and_pairing() {
        let images = vec![shepp_logan(16).unwrap(), shepp_logan(16).unwrap().scaled(0.5).unwrap()];
        let spec = BatchSpec::new(11, 3, vec![Scheme::Cartesian, Scheme::Spiral], ScannerConfig::new(Scheme::Cartesian, 16));
        let seen = Mutex::new(Vec::new());
        let out = run_batch(&images, &spec, &SimulationConfig::default(), |item| {
            seen.lock().unwrap().push(item.record.id.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(out.len(), 2 * 2 * 3 * 2);
        assert_eq!(seen.lock().unwrap().len(), out.len());
        assert_eq!(out[0].id, "cartesian-i000-t000-motion");
        assert_eq!(out[1].id, "cartesian-i000-t000-clean");
        let half = out.len() / 2;
        for (a, b) in out[..half].iter().zip(&out[half..]) {
            assert_eq!((a.image_index, a.trial, a.label, a.seed), (b.image_index, b.trial, b.label, b.seed));
        }
        assert!(out.iter().filter(|s| s.label == Label::Clean).all(|s| s.metrics.nrmse == 0.0));
    }

    #[test]
    fn batch_records_match_single_slice_path() {
        let images = vec![shepp_logan(16).unwrap()];
        let spec = BatchSpec::new(5, 2, vec![Scheme::Radial], ScannerConfig::new(Scheme::Radial, 16));
        let sim = SimulationConfig::default();
        let records = Mutex::new(Vec::new());
        run_batch(&images, &spec, &sim, |item| {
            records.lock().unwrap().push(item.clone());
            Ok(())
        })
        .unwrap();
        for item in records.into_inner().unwrap() {
            let seeds = trial_seeds(5, 0, item.trial, 2);
            let mut expected = corrupt_slice(&images[0], &item.record.config, item.target, seeds.trajectory, &sim).unwrap();
            expected.id = item.record.id.clone();
            assert_eq!(item.record, expected);
        }
    }

    #[test]
    fn written_batch_regenerates_and_compares() {
        use crate::dataset::{read_manifest, save_image, verify_entry};
        let dir = tempfile::tempdir().unwrap();
        let source_path = dir.path().join("phantom.raw");
        save_image(&shepp_logan(16).unwrap(), &source_path).unwrap();
        let image = load_image(&source_path).unwrap();
        let sources = vec![BatchSource {
            source: "phantom.raw".into(),
            image,
        }];
        let spec = BatchSpec::new(21, 4, Scheme::ALL.to_vec(), ScannerConfig::new(Scheme::Cartesian, 16));
        let manifest = write_batch(&sources, &spec, &SimulationConfig::default(), dir.path()).unwrap();
        assert_eq!(manifest.entries.len(), 3 * 4 * 2);
        let path = dir.path().join("manifest.json");
        let back = read_manifest(&path).unwrap();
        assert_eq!(back, manifest);
        for entry in &back.entries {
            verify_entry(&back, entry, &path).unwrap();
        }
        let groups = samples_from_manifest(&back, &path).unwrap();
        assert_eq!(groups.len(), 3);
        let report = compare(&groups, &CompareOptions { repetitions: 2, ..CompareOptions::default() }).unwrap();
        assert_eq!(report.schemes.len(), 3);
    }
}
