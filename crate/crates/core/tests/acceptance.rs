//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p mrsim-core --test acceptance`. Each criterion is
//! evaluated with fixed seeds and printed with the measured numbers. The
//! process exits non-zero only if a criterion cannot be evaluated at all (an
//! error or panic); a FAIL line is a measured outcome and is reported as is.
//!
//! Set `MRSIM_ACCEPTANCE_IMAGE` to a PGM or raw image to repeat the scheme
//! ordering check on that image as well.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use mrsim::dataset::{load_image, read_manifest, save_image, verify_entry};
use mrsim::engine::{
    corrupt_slice, corrupt_slice_with_trajectory, simulate_acquisition, AcquisitionOptions, SimulationConfig,
};
use mrsim::experiment::{
    compare, run_batch, samples_by_scheme, write_batch, BatchSource, BatchSpec, CompareOptions, ComparisonReport,
    SeverityMode,
};
use mrsim::fft::CenteredFft2;
use mrsim::image::resize_bilinear;
use mrsim::metrics::{abs_error_map, auc_rank, nrmse, rmse};
use mrsim::motion::{severity_rms, smooth_savitzky_golay, MotionTrajectory, RigidPose, SeverityStats, TrajectoryGenerator};
use mrsim::phantom::{gaussian, random_head_phantom, shepp_logan, smooth_disk};
use mrsim::recon::{direct_dft_oracle, forward_grid, grid_reconstruct, GriddingParams, Kernel, Nufft};
use mrsim::rng::{rng_from_seed, standard_normal, uniform};
use mrsim::sampler::{make_plan, scan_time, ScannerConfig, Scheme};
use mrsim::ImageSlice;
use num_complex::Complex64;

const MASTER_SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn scan_time_reproduction() -> Outcome {
    let mut cfg = ScannerConfig::new(Scheme::Cartesian, 208);
    cfg.tr_ms = 400.0;
    cfg.nex = 2;
    let seconds = scan_time(&cfg);
    outcome(seconds == 166.4, format!("scan_time = {seconds} s (expected 166.4 s)"))
}

fn zero_motion_transparency() -> Outcome {
    let image = shepp_logan(256).unwrap();
    let cfg = ScannerConfig::new(Scheme::Cartesian, 256);
    let plan = make_plan(&cfg).unwrap();
    let still = MotionTrajectory::identity(plan.n_shots_total(), cfg.tr_ms).unwrap();
    let acq = simulate_acquisition(&image, &plan, &still, &AcquisitionOptions::default()).unwrap();
    let spectrum_err = relative_error(&acq.values, &forward_grid(&image).data);
    let recon_rmse = rmse(&image, &grid_reconstruct(&acq, &GriddingParams::default()).unwrap()).unwrap();
    let record = corrupt_slice(&image, &cfg, SeverityStats::NONE, MASTER_SEED, &SimulationConfig::default()).unwrap();
    let pass = spectrum_err <= 1e-9 && recon_rmse <= 1e-9 && record.metrics.rmse <= 1e-9;
    outcome(
        pass,
        format!(
            "k-space rel. error {spectrum_err:.2e}, recon-vs-image RMSE {recon_rmse:.2e}, corrupted-vs-clean RMSE {:.2e} (limit 1e-9)",
            record.metrics.rmse
        ),
    )
}

fn shift_theorem() -> Outcome {
    let image = smooth_disk(32, 9.0, 1.5).unwrap();
    let mut worst: f64 = 0.0;
    for scheme in Scheme::ALL {
        let plan = make_plan(&ScannerConfig::new(scheme, 32)).unwrap();
        for (tx, ty) in [(3.0, 0.0), (0.0, 3.0), (-3.0, 3.0)] {
            let traj = MotionTrajectory::new(vec![RigidPose::translation(tx, ty); plan.n_shots_total()], 400.0).unwrap();
            let acq = simulate_acquisition(&image, &plan, &traj, &AcquisitionOptions::default()).unwrap();
            let coords = acq.coords();
            let expected: Vec<Complex64> = direct_dft_oracle(image.pixels(), 32, 32, &coords)
                .iter()
                .zip(&coords)
                .map(|(v, k)| v * Complex64::from_polar(1.0, -2.0 * PI * (k[0] * tx + k[1] * ty)))
                .collect();
            worst = worst.max(relative_error(&acq.values, &expected));
        }
    }
    outcome(worst <= 1e-6, format!("worst rel. error over 3 schemes x 3 shifts {worst:.2e} (limit 1e-6)"))
}

fn oracle_equivalence() -> Outcome {
    let opts = AcquisitionOptions::default();
    let engine = Nufft::new(16, 16, opts.oversampling, Kernel::kaiser_bessel(opts.kernel_width, opts.oversampling));
    let cubic = Nufft::new(16, 16, 2.0, Kernel::Cubic);
    let (mut worst, mut worst_cubic): (f64, f64) = (0.0, 0.0);
    for trial in 0..10u64 {
        let mut rng = rng_from_seed(1000 + trial);
        let pixels: Vec<f64> = (0..256).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
        let coords: Vec<[f64; 2]> = (0..100).map(|_| [uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, -0.5, 0.5)]).collect();
        let oracle = direct_dft_oracle(&pixels, 16, 16, &coords);
        worst = worst.max(relative_error(&engine.forward(&pixels, &coords), &oracle));
        worst_cubic = worst_cubic.max(relative_error(&cubic.forward(&pixels, &coords), &oracle));
    }
    outcome(
        worst <= 1e-3,
        format!(
            "engine kernel (Kaiser-Bessel width {}, oversampling {}) worst rel. error {worst:.2e} over 10 images x 100 points (limit 1e-3); cubic kernel for reference {worst_cubic:.2e}",
            opts.kernel_width, opts.oversampling
        ),
    )
}

fn center_vs_periphery() -> Outcome {
    let image = shepp_logan(256).unwrap();
    let cfg = ScannerConfig::new(Scheme::Cartesian, 256);
    let sim = SimulationConfig::default();
    let n = cfg.n_shots_total();
    let central: Vec<usize> = (n / 2 - 8..n / 2 + 8).collect();
    let outer: Vec<usize> = (0..8).chain(n - 8..n).collect();
    let mut wins = 0;
    let mut ratio_sum = 0.0;
    for seed in 0..20u64 {
        let angle = uniform(&mut rng_from_seed(seed), 0.0, 2.0 * PI);
        let step = RigidPose::translation(2.0 * angle.cos(), 2.0 * angle.sin());
        let run = |shots: &[usize]| {
            let mut poses = vec![RigidPose::default(); n];
            shots.iter().for_each(|&s| poses[s] = step);
            let traj = MotionTrajectory::new(poses, cfg.tr_ms).unwrap();
            corrupt_slice_with_trajectory(&image, &cfg, &traj, seed, &sim).unwrap().metrics.nrmse
        };
        let (c, p) = (run(&central), run(&outer));
        if c > p {
            wins += 1;
        }
        ratio_sum += c / p;
    }
    outcome(
        wins >= 19,
        format!("central > peripheral in {wins}/20 seeds (need 19), mean NRMSE ratio {:.1}", ratio_sum / 20.0),
    )
}

fn ordering_line(report: &ComparisonReport) -> String {
    let means: Vec<String> = report
        .schemes
        .iter()
        .map(|s| format!("{} {:.4}+/-{:.4}", s.scheme, s.nrmse_mean, s.nrmse_std))
        .collect();
    let gaps: Vec<String> = report
        .nrmse_gaps
        .iter()
        .map(|g| {
            format!(
                "{}-{} gap {:.4} vs SE {:.4} ({})",
                g.higher,
                g.lower,
                g.mean_difference,
                g.standard_error,
                if g.holds { "ok" } else { "short" }
            )
        })
        .collect();
    format!("NRMSE {}; {}", means.join(", "), gaps.join(", "))
}

fn distortion_ordering(image: &ImageSlice, label: &str) -> Outcome {
    let image = resize_bilinear(image, 256, 256).unwrap();
    let mut spec = BatchSpec::new(MASTER_SEED, 50, Scheme::ALL.to_vec(), ScannerConfig::new(Scheme::Cartesian, 256));
    spec.severity = SeverityMode::Fixed(SeverityStats::new(1.0, 0.6));
    spec.include_clean = false;
    let summaries = run_batch(&[image], &spec, &SimulationConfig::default(), |_| Ok(())).unwrap();
    let report = compare(&samples_by_scheme(&summaries), &CompareOptions::default()).unwrap();
    let ordered = report.schemes.windows(2).all(|w| w[0].nrmse_mean > w[1].nrmse_mean);
    outcome(
        report.distortion.holds() && ordered,
        format!("{label}, 50 paired trials at 1.0 mm / 0.6 deg: {}", ordering_line(&report)),
    )
}

fn detectability_ordering() -> Outcome {
    // 20 distinct head phantoms x 10 trials: 200 motion and 200 clean records
    // per scheme.
    let images: Vec<ImageSlice> = (0..20).map(|i| random_head_phantom(128, 500 + i).unwrap()).collect();
    let spec = BatchSpec::new(MASTER_SEED, 10, Scheme::ALL.to_vec(), ScannerConfig::new(Scheme::Cartesian, 128));
    let summaries = run_batch(&images, &spec, &SimulationConfig::default(), |_| Ok(())).unwrap();
    let options = CompareOptions {
        seed: MASTER_SEED,
        ..CompareOptions::default()
    };
    let report = compare(&samples_by_scheme(&summaries), &options).unwrap();
    let aucs: Vec<String> = report
        .schemes
        .iter()
        .map(|s| format!("{} {:.4}+/-{:.4} ({}+{})", s.scheme, s.auc_mean, s.auc_std, s.n_motion, s.n_clean))
        .collect();
    let cartesian = report.schemes.iter().find(|s| s.scheme == Scheme::Cartesian).unwrap().auc_mean;
    outcome(
        report.detectability.holds() && cartesian >= 0.95,
        format!(
            "128x128, 70/30 split x 5 repetitions, AUC {}; verdict: {}",
            aucs.join(", "),
            report.detectability
        ),
    )
}

fn invariant_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };

    // Savitzky-Golay reproduces polynomials up to its order.
    let cubic: Vec<f64> = (0..64).map(|i| {
        let x = i as f64 / 10.0;
        0.5 - x + 0.3 * x * x - 0.02 * x * x * x
    }).collect();
    let smoothed = smooth_savitzky_golay(&cubic, 11, 3).unwrap();
    check("sgolay", smoothed[5..59].iter().zip(&cubic[5..59]).all(|(a, b)| (a - b).abs() < 1e-9));

    // RMS severity is homogeneous of degree one.
    let traj = TrajectoryGenerator::default().generate(120, 400.0, SeverityStats::new(1.0, 0.6), 3).unwrap();
    let scaled = MotionTrajectory::new(
        traj.poses().iter().map(|p| RigidPose::from_array(p.to_array().map(|v| 2.5 * v))).collect(),
        400.0,
    )
    .unwrap();
    let (a, b) = (severity_rms(&traj), severity_rms(&scaled));
    check(
        "rms homogeneity",
        (b.rms_displacement_mm - 2.5 * a.rms_displacement_mm).abs() < 1e-12
            && (b.rms_rotation_deg - 2.5 * a.rms_rotation_deg).abs() < 1e-12,
    );

    // FFT round trip.
    let mut rng = rng_from_seed(77);
    let original: Vec<Complex64> = (0..64 * 48)
        .map(|_| Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
        .collect();
    let fft = CenteredFft2::new(64, 48);
    let mut data = original.clone();
    fft.forward(&mut data);
    fft.inverse(&mut data);
    check("fft round trip", relative_error(&data, &original) <= 1e-12);

    // Gridding phantom accuracy.
    let phantom = gaussian(128, 16.0).unwrap();
    let gridding_err = |scheme| {
        let plan = make_plan(&ScannerConfig::new(scheme, 128)).unwrap();
        let still = MotionTrajectory::identity(plan.n_shots_total(), 400.0).unwrap();
        let acq = simulate_acquisition(&phantom, &plan, &still, &AcquisitionOptions::default()).unwrap();
        nrmse(&phantom, &grid_reconstruct(&acq, &GriddingParams::default()).unwrap()).unwrap()
    };
    let (radial, spiral) = (gridding_err(Scheme::Radial), gridding_err(Scheme::Spiral));
    check("gridding phantom", radial < 0.05 && spiral < 0.07);

    // Rank AUC equals the brute-force pair count.
    let mut rng = rng_from_seed(99);
    let scores: Vec<f64> = (0..300).map(|_| (uniform(&mut rng, 0.0, 20.0)).floor()).collect();
    let labels: Vec<bool> = (0..300).map(|_| uniform(&mut rng, 0.0, 1.0) < 0.4).collect();
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (sp, _) in scores.iter().zip(&labels).filter(|(_, l)| **l) {
        for (sn, _) in scores.iter().zip(&labels).filter(|(_, l)| !**l) {
            pairs += 1.0;
            wins += if sp > sn { 1.0 } else if sp == sn { 0.5 } else { 0.0 };
        }
    }
    check("auc pairs", (auc_rank(&scores, &labels).unwrap() - wins / pairs).abs() < 1e-12);

    // Error maps are normalized to a maximum of 255.
    let clean = shepp_logan(64).unwrap();
    let moved = corrupt_slice(&clean, &ScannerConfig::new(Scheme::Radial, 64), SeverityStats::new(1.0, 0.6), 5, &SimulationConfig::default()).unwrap();
    check("error map max", moved.error_map.max() == 255 && abs_error_map(&clean, &clean).unwrap().max() == 0);

    // A written dataset regenerates bit-identically from its manifest.
    let dir = tempfile::tempdir().unwrap();
    let regen_ok = manifest_regeneration(dir.path());
    check("manifest regeneration", regen_ok);

    outcome(
        failures.is_empty(),
        format!(
            "sgolay, rms homogeneity, fft round trip, gridding phantom (radial {:.2}%, spiral {:.2}%), auc pairs, error map max, manifest regeneration: {}",
            100.0 * radial,
            100.0 * spiral,
            if failures.is_empty() { "all green".to_string() } else { format!("failed {}", failures.join(", ")) }
        ),
    )
}

fn manifest_regeneration(dir: &Path) -> bool {
    let source_path = dir.join("head.raw");
    save_image(&random_head_phantom(64, 3).unwrap(), &source_path).unwrap();
    let sources = vec![BatchSource {
        source: "head.raw".into(),
        image: load_image(&source_path).unwrap(),
    }];
    let spec = BatchSpec::new(MASTER_SEED, 2, Scheme::ALL.to_vec(), ScannerConfig::new(Scheme::Cartesian, 64));
    write_batch(&sources, &spec, &SimulationConfig::default(), dir).unwrap();
    let path = dir.join("manifest.json");
    let manifest = read_manifest(&path).unwrap();
    manifest.entries.len() == 12 && manifest.entries.iter().all(|e| verify_entry(&manifest, e, &path).is_ok())
}

fn main() {
    let mut criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 scan time", Box::new(scan_time_reproduction)),
        ("2 zero-motion transparency", Box::new(zero_motion_transparency)),
        ("3 shift theorem", Box::new(shift_theorem)),
        ("4 oracle equivalence", Box::new(oracle_equivalence)),
        ("5 center vs periphery", Box::new(center_vs_periphery)),
        ("6 scheme distortion ordering", Box::new(|| distortion_ordering(&shepp_logan(256).unwrap(), "Shepp-Logan 256x256"))),
    ];
    if let Ok(path) = std::env::var("MRSIM_ACCEPTANCE_IMAGE") {
        let image = load_image(Path::new(&path)).expect("MRSIM_ACCEPTANCE_IMAGE must name a readable image");
        criteria.push(("6 scheme distortion ordering (user image)", Box::new(move || distortion_ordering(&image, &path))));
    }
    criteria.push(("7 detectability ordering", Box::new(detectability_ordering)));
    criteria.push(("8 invariant suites", Box::new(invariant_suites)));

    let mut passed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let result = run();
        println!(
            "criterion {name}: {} ({:.1} s) {}",
            if result.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
        passed += result.pass as usize;
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
}
