use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mrsim::dataset::{read_manifest, read_record, read_trajectory_csv, write_pgm8, Label};
use mrsim::motion::severity_rms;
use mrsim::phantom::{random_head_phantom, shepp_logan};
use mrsim::ImageSlice;

fn mrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrsim"))
        .args(args)
        .env_remove("MRSIM_SEED")
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_pgm(image: &ImageSlice, path: &Path) {
    let max = image.max();
    let values: Vec<u8> = image.pixels().iter().map(|v| (255.0 * v / max).round() as u8).collect();
    write_pgm8(path, image.width(), image.height(), &values).unwrap();
}

fn image_dir(root: &Path, count: usize) -> PathBuf {
    let dir = root.join("images");
    fs::create_dir_all(&dir).unwrap();
    for i in 0..count {
        write_pgm(&random_head_phantom(24, 40 + i as u64).unwrap(), &dir.join(format!("slice{i}.pgm")));
    }
    dir
}

/// Every file under `dir`, relative path and bytes, sorted.
fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn trajectory_writes_rows_and_prints_severity() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = mrsim(&["trajectory", "--shots", "208", "--tr-ms", "400", "--disp", "1.0", "--rot", "0.6", "--seed", "42", "-o", path_str(&csv)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "rms_disp_mm=1.0 rms_rot_deg=0.6");
    let traj = read_trajectory_csv(&csv, Some(400.0)).unwrap();
    assert_eq!(traj.len(), 208);
    let s = severity_rms(&traj);
    assert!((s.rms_displacement_mm - 1.0).abs() < 1e-9 && (s.rms_rotation_deg - 0.6).abs() < 1e-9);
}

#[test]
fn zero_severity_trajectory_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = mrsim(&["trajectory", "--shots", "16", "--disp", "0", "--rot", "0", "-o", path_str(&csv)]);
    assert!(out.status.success());
    assert!(read_trajectory_csv(&csv, None).unwrap().is_identity());
}

#[test]
fn usage_errors_exit_with_two() {
    let out = mrsim(&["trajectory", "--shots", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = mrsim(&["simulate", "-i", "x.pgm", "--scheme", "rosette", "-o", "out"]);
    assert_eq!(out.status.code(), Some(2));

    let out = mrsim(&["simulate", "-i", "x.pgm", "--scheme", "cartesian", "--golden-angle", "-o", "out"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_units() {
    for cmd in ["trajectory", "simulate", "batch", "compare"] {
        let out = mrsim(&[cmd, "--help"]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("--seed"), "{cmd}");
        if cmd != "compare" {
            assert!(text.contains("[ms]") && text.contains("[mm]") && text.contains("[deg]"), "{cmd}");
        }
    }
}

#[test]
fn simulate_writes_a_consistent_record_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("brain.pgm");
    write_pgm(&shepp_logan(40).unwrap(), &input);
    let run = |out: &Path, disp: &str| {
        mrsim(&[
            "simulate", "-i", path_str(&input), "--scheme", "cartesian", "--matrix", "32", "--tr-ms", "400", "--nex", "1",
            "--disp", disp, "--rot", if disp == "0" { "0" } else { "0.6" }, "--seed", "1", "-o", path_str(out),
        ])
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&a, "1.0").status.success());
    assert!(run(&b, "1.0").status.success());
    assert_eq!(snapshot(&a), snapshot(&b));
    for suffix in ["_corrupted.raw", "_error.pgm", "_metrics.csv"] {
        assert!(a.join(format!("cartesian-1{suffix}")).exists());
    }
    let record = read_record(&a, "cartesian-1").unwrap();
    assert!(record.metrics.nrmse > 0.0);

    let still = dir.path().join("still");
    assert!(run(&still, "0").status.success());
    let record = read_record(&still, "cartesian-1").unwrap();
    assert!(record.error_map.values.iter().all(|&v| v == 0));
}

#[test]
fn simulate_missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mrsim(&["simulate", "-i", path_str(&dir.path().join("nope.pgm")), "--scheme", "spiral", "-o", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn batch_counts_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let images = image_dir(dir.path(), 2);
    let run = |out: &Path, schemes: &str, threads: &str| {
        mrsim(&[
            "--threads", threads, "batch", "-i", path_str(&images), "-o", path_str(out), "--trials", "3", "--schemes", schemes,
            "--matrix", "16", "--seed", "9",
        ])
    };
    let one = dir.path().join("one");
    assert!(run(&one, "spiral", "1").status.success());
    let manifest = read_manifest(&one.join("manifest.json")).unwrap();
    assert_eq!(manifest.entries.len(), 12);
    assert_eq!(manifest.entries.iter().filter(|e| e.label == Label::Motion).count(), 6);

    let again = dir.path().join("again");
    assert!(run(&again, "spiral", "2").status.success());
    assert_eq!(snapshot(&one), snapshot(&again));

    let all = dir.path().join("all");
    assert!(run(&all, "cartesian,radial,spiral", "2").status.success());
    assert_eq!(read_manifest(&all.join("manifest.json")).unwrap().entries.len(), 36);
    for scheme in ["cartesian", "radial", "spiral"] {
        assert!(all.join(scheme).is_dir());
    }
}

#[test]
fn batch_with_empty_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let out = mrsim(&["batch", "-i", path_str(&empty), "-o", path_str(&dir.path().join("ds"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_reports_degenerate_and_rejects_unpaired() {
    let dir = tempfile::tempdir().unwrap();
    let images = image_dir(dir.path(), 2);
    let batch = |out: &Path, scheme: &str, seed: &str, extra: &[&str]| {
        let mut args = vec![
            "batch", "-i", path_str(&images), "-o", path_str(out), "--trials", "5", "--schemes", scheme, "--matrix", "16",
            "--seed", seed,
        ];
        args.extend_from_slice(extra);
        assert!(mrsim(&args).status.success());
        out.join("manifest.json")
    };
    let still = ["--disp", "0", "--rot", "0"];
    let cart = batch(&dir.path().join("c0"), "cartesian", "3", &still);
    let spiral = batch(&dir.path().join("s0"), "spiral", "3", &still);
    let report = dir.path().join("report");
    let out = mrsim(&["compare", "-m", path_str(&cart), "-m", path_str(&spiral), "-o", path_str(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("distortion ordering: no ordering (degenerate)"), "{text}");
    assert!(text.contains("nrmse=0.0000 +/- 0.0000"));
    assert!(report.join("report.csv").exists() && report.join("report.txt").exists());

    let other = batch(&dir.path().join("s1"), "spiral", "4", &[]);
    let out = mrsim(&["compare", "-m", path_str(&cart), "-m", path_str(&other), "-o", path_str(&report)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unpaired"));
}
