//! CSV tables: trajectories, sampling plans and metrics rows.
//!
//! Numbers are written in Rust's shortest round-trip notation, so every value
//! parses back to the identical `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::engine::SimulationRecord;
use crate::error::{Error, Result};
use crate::motion::{MotionTrajectory, RigidPose};
use crate::sampler::{SamplingPlan, Scheme};

pub const TRAJECTORY_HEADER: &str = "shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg";
pub const PLAN_HEADER: &str = "shot,time_index,kx,ky";
pub const METRICS_HEADER: &str = "id,scheme,seed,rms_disp_mm,rms_rot_deg,rmse,nrmse,hf_ratio,score";

pub(crate) fn num(v: f64) -> String {
    format!("{v:?}")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Data rows of a CSV file after checking its header.
fn data_rows(path: &Path, what: &'static str, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => return Err(Error::malformed(what, path, format!("unexpected header {h:?}"))),
        None => return Err(Error::malformed(what, path, "empty file")),
    }
    let width = header.split(',').count();
    lines
        .map(|(i, l)| {
            let cells: Vec<String> = l.split(',').map(|c| c.trim().to_string()).collect();
            if cells.len() != width {
                return Err(Error::malformed(
                    what,
                    path,
                    format!("line {} has {} fields, expected {width}", i + 1, cells.len()),
                ));
            }
            Ok((i + 1, cells))
        })
        .collect()
}

fn parse<T: std::str::FromStr>(cell: &str, line: usize, what: &'static str, path: &Path) -> Result<T> {
    cell.parse()
        .map_err(|_| Error::malformed(what, path, format!("line {line}: cannot parse {cell:?}")))
}

pub fn trajectory_csv(traj: &MotionTrajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (i, p) in traj.poses().iter().enumerate() {
        let _ = write!(out, "{i},{}", num(traj.time_s(i)));
        for v in p.to_array() {
            let _ = write!(out, ",{}", num(v));
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &MotionTrajectory) -> Result<()> {
    write_text(path, &trajectory_csv(traj))
}

/// Reads a trajectory; `tr_ms` defaults to the spacing of the first two
/// timestamps (1000 ms for a single shot).
pub fn read_trajectory_csv(path: &Path, tr_ms: Option<f64>) -> Result<MotionTrajectory> {
    const WHAT: &str = "trajectory CSV";
    let rows = data_rows(path, WHAT, TRAJECTORY_HEADER)?;
    let mut poses = Vec::with_capacity(rows.len());
    let mut times = Vec::with_capacity(rows.len());
    for (expected, (line, cells)) in rows.iter().enumerate() {
        let shot: usize = parse(&cells[0], *line, WHAT, path)?;
        if shot != expected {
            return Err(Error::malformed(WHAT, path, format!("line {line}: shot {shot}, expected {expected}")));
        }
        times.push(parse::<f64>(&cells[1], *line, WHAT, path)?);
        let mut v = [0.0; 6];
        for (slot, cell) in v.iter_mut().zip(&cells[2..]) {
            *slot = parse(cell, *line, WHAT, path)?;
        }
        poses.push(RigidPose::from_array(v));
    }
    let tr_ms = tr_ms.unwrap_or_else(|| if times.len() > 1 { (times[1] - times[0]) * 1000.0 } else { 1000.0 });
    MotionTrajectory::new(poses, tr_ms)
}

pub fn write_plan_csv(path: &Path, plan: &SamplingPlan) -> Result<()> {
    let mut out = String::from(PLAN_HEADER);
    out.push('\n');
    for shot in &plan.shots {
        for k in &shot.samples {
            let _ = writeln!(out, "{},{},{},{}", shot.index, shot.time_index_tr, num(k[0]), num(k[1]));
        }
    }
    write_text(path, &out)
}

/// One metrics table row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub id: String,
    pub scheme: Scheme,
    pub seed: u64,
    pub rms_disp_mm: f64,
    pub rms_rot_deg: f64,
    pub rmse: f64,
    pub nrmse: f64,
    pub hf_ratio: f64,
    pub score: f64,
}

impl MetricsRow {
    pub fn from_record(record: &SimulationRecord) -> Self {
        Self {
            id: record.id.clone(),
            scheme: record.scheme(),
            seed: record.seed,
            rms_disp_mm: record.severity.rms_displacement_mm,
            rms_rot_deg: record.severity.rms_rotation_deg,
            rmse: record.metrics.rmse,
            nrmse: record.metrics.nrmse,
            hf_ratio: record.metrics.highfreq_energy_ratio,
            score: record.metrics.artifact_score,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.id,
            self.scheme,
            self.seed,
            num(self.rms_disp_mm),
            num(self.rms_rot_deg),
            num(self.rmse),
            num(self.nrmse),
            num(self.hf_ratio),
            num(self.score)
        )
    }
}

pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    const WHAT: &str = "metrics CSV";
    data_rows(path, WHAT, METRICS_HEADER)?
        .into_iter()
        .map(|(line, c)| {
            Ok(MetricsRow {
                id: c[0].clone(),
                scheme: c[1]
                    .parse()
                    .map_err(|_| Error::malformed(WHAT, path, format!("line {line}: unknown scheme {:?}", c[1])))?,
                seed: parse(&c[2], line, WHAT, path)?,
                rms_disp_mm: parse(&c[3], line, WHAT, path)?,
                rms_rot_deg: parse(&c[4], line, WHAT, path)?,
                rmse: parse(&c[5], line, WHAT, path)?,
                nrmse: parse(&c[6], line, WHAT, path)?,
                hf_ratio: parse(&c[7], line, WHAT, path)?,
                score: parse(&c[8], line, WHAT, path)?,
            })
        })
        .collect()
}
