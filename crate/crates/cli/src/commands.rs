use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use mrsim::dataset::{fit_to_matrix, load_image, read_manifest, save_preview_pgm, write_plan_csv, write_record, write_trajectory_csv};
use mrsim::engine::{corrupt_slice, SimulationConfig};
use mrsim::experiment::{compare as compare_schemes, samples_from_manifest, ComparisonSample, write_batch, BatchSource, BatchSpec, CompareOptions, SeverityMode};
use mrsim::motion::{severity_rms, MotionModel, SeverityStats, TrajectoryGenerator};
use mrsim::sampler::{make_plan, ScannerConfig, Scheme, SpokeOrder};

use crate::{BatchArgs, CompareArgs, ModelArg, ScannerArgs, SimulateArgs, TrajectoryArgs};

pub enum Failure {
    /// Inconsistent flags; exit code 2.
    Usage(String),
    /// Anything that fails while running; exit code 1.
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

// Rounds away the last-bit noise of the rescaling so exact targets print exactly.
fn tidy(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

pub fn trajectory(args: TrajectoryArgs) -> CmdResult {
    let target = SeverityStats::new(args.severity.disp_mm, args.severity.rot_deg);
    target.validate().map_err(|e| usage(e.to_string()))?;
    if args.shots == 0 {
        return Err(usage("--shots must be at least 1"));
    }
    let generator = TrajectoryGenerator {
        model: match args.model {
            ModelArg::InPlane => MotionModel::InPlane,
            ModelArg::Full6dof => MotionModel::Full6Dof,
        },
        ..TrajectoryGenerator::default()
    };
    let traj = generator.generate(args.shots, args.tr_ms, target, args.seed)?;
    write_trajectory_csv(&args.output, &traj)?;
    let s = severity_rms(&traj);
    println!("rms_disp_mm={:?} rms_rot_deg={:?}", tidy(s.rms_displacement_mm), tidy(s.rms_rotation_deg));
    Ok(())
}

fn scanner_config(scheme: Scheme, args: &ScannerArgs) -> Result<ScannerConfig, Failure> {
    let mut cfg = ScannerConfig::new(scheme, args.matrix);
    cfg.tr_ms = args.tr_ms;
    cfg.nex = args.nex;
    if args.golden_angle {
        cfg.spoke_order = SpokeOrder::GoldenAngle;
    }
    cfg.spiral_interleaves = args.spiral_interleaves;
    cfg.spiral_turns = args.spiral_turns;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn check_scheme_flags(schemes: &[Scheme], args: &ScannerArgs) -> Result<(), Failure> {
    if args.golden_angle && !schemes.contains(&Scheme::Radial) {
        return Err(usage("--golden-angle applies only to the radial scheme"));
    }
    if (args.spiral_interleaves.is_some() || args.spiral_turns.is_some()) && !schemes.contains(&Scheme::Spiral) {
        return Err(usage("--spiral-interleaves/--spiral-turns apply only to the spiral scheme"));
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> CmdResult {
    check_scheme_flags(&[args.scheme], &args.scanner)?;
    let cfg = scanner_config(args.scheme, &args.scanner)?;
    let target = SeverityStats::new(args.severity.disp_mm, args.severity.rot_deg);
    target.validate().map_err(|e| usage(e.to_string()))?;

    let source = load_image(&args.input)?;
    let image = fit_to_matrix(&source, &cfg)?;
    let record = corrupt_slice(&image, &cfg, target, args.seed, &SimulationConfig::default())?;
    let files = write_record(&record, &args.output)?;
    if args.emit_plan {
        write_plan_csv(&args.output.join(format!("{}_plan.csv", record.id)), &make_plan(&cfg)?)?;
    }
    if args.emit_previews {
        save_preview_pgm(&record.clean, &args.output.join(format!("{}_clean_preview.pgm", record.id)))?;
        save_preview_pgm(&record.corrupted, &args.output.join(format!("{}_corrupted_preview.pgm", record.id)))?;
    }
    let m = &record.metrics;
    println!(
        "{} rmse={:?} nrmse={:?} hf_ratio={:?} score={:?} -> {}",
        record.id,
        m.rmse,
        m.nrmse,
        m.highfreq_energy_ratio,
        m.artifact_score,
        args.output.join(&files.corrupted).display()
    );
    Ok(())
}

const IMAGE_EXTENSIONS: [&str; 3] = ["pgm", "raw", "f32"];

fn input_images(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading input directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(anyhow!("no images (.pgm, .raw, .f32) in {}", dir.display()));
    }
    Ok(paths)
}

pub fn batch(args: BatchArgs) -> CmdResult {
    let mut schemes = Vec::new();
    for s in &args.schemes {
        if schemes.contains(s) {
            return Err(usage(format!("scheme {s} listed twice")));
        }
        schemes.push(*s);
    }
    check_scheme_flags(&schemes, &args.scanner)?;
    for s in &schemes {
        scanner_config(*s, &args.scanner)?;
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let scanner = scanner_config(schemes[0], &args.scanner)?;
    let mut spec = BatchSpec::new(args.seed, args.trials, schemes, scanner.clone());
    spec.include_clean = !args.no_clean;
    if let (Some(d), Some(r)) = (args.disp_mm, args.rot_deg) {
        let fixed = SeverityStats::new(d, r);
        fixed.validate().map_err(|e| usage(e.to_string()))?;
        spec.severity = SeverityMode::Fixed(fixed);
    }

    let mut sources = Vec::new();
    for path in input_images(&args.input)? {
        let canonical = fs::canonicalize(&path).with_context(|| format!("resolving {}", path.display()))?;
        let image = load_image(&path)?;
        sources.push(BatchSource {
            source: canonical.to_string_lossy().into_owned(),
            image: fit_to_matrix(&image, &scanner)?,
        });
    }
    fs::create_dir_all(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    let manifest = write_batch(&sources, &spec, &SimulationConfig::default(), &args.output)?;
    let motion = manifest.entries.iter().filter(|e| e.label.is_motion()).count();
    println!(
        "{} entries ({} motion, {} clean) -> {}",
        manifest.entries.len(),
        motion,
        manifest.entries.len() - motion,
        args.output.join("manifest.json").display()
    );
    Ok(())
}

pub fn compare(args: CompareArgs) -> CmdResult {
    if args.repetitions == 0 || !(args.test_fraction > 0.0 && args.test_fraction < 1.0) {
        return Err(usage("--repetitions must be >= 1 and --test-fraction in (0, 1)"));
    }
    let mut groups: Vec<(Scheme, Vec<ComparisonSample>)> = Vec::new();
    for path in &args.manifests {
        let manifest = read_manifest(path)?;
        for (scheme, samples) in samples_from_manifest(&manifest, path)? {
            match groups.iter_mut().find(|(s, _)| *s == scheme) {
                Some((_, v)) => v.extend(samples),
                None => groups.push((scheme, samples)),
            }
        }
    }
    let options = CompareOptions {
        repetitions: args.repetitions,
        test_fraction: args.test_fraction,
        seed: args.seed,
    };
    let report = compare_schemes(&groups, &options)?;
    fs::create_dir_all(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    let text = report.to_text();
    fs::write(args.output.join("report.csv"), report.to_csv()).context("writing report.csv")?;
    fs::write(args.output.join("report.txt"), &text).context("writing report.txt")?;
    print!("{text}");
    Ok(())
}
