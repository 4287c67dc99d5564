//! Rigid-body motion trajectories sampled once per TR shot.
//!
//! Poses are absolute: each one is the transform from the reference frame at
//! t = 0 to the subject position during that shot, and it holds for the whole
//! shot.

mod savgol;

pub use savgol::smooth_savitzky_golay;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, standard_normal};

/// Six-degree-of-freedom rigid pose. Translations in millimeters, rotations
/// in degrees about axes through the image center.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RigidPose {
    pub tx_mm: f64,
    pub ty_mm: f64,
    pub tz_mm: f64,
    pub rx_deg: f64,
    pub ry_deg: f64,
    pub rz_deg: f64,
}

impl RigidPose {
    pub const IDENTITY: RigidPose = RigidPose {
        tx_mm: 0.0,
        ty_mm: 0.0,
        tz_mm: 0.0,
        rx_deg: 0.0,
        ry_deg: 0.0,
        rz_deg: 0.0,
    };

    pub fn translation(tx_mm: f64, ty_mm: f64) -> Self {
        Self {
            tx_mm,
            ty_mm,
            ..Self::IDENTITY
        }
    }

    pub fn in_plane(tx_mm: f64, ty_mm: f64, rz_deg: f64) -> Self {
        Self {
            tx_mm,
            ty_mm,
            rz_deg,
            ..Self::IDENTITY
        }
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            tx_mm: v[0],
            ty_mm: v[1],
            tz_mm: v[2],
            rx_deg: v[3],
            ry_deg: v[4],
            rz_deg: v[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.tx_mm, self.ty_mm, self.tz_mm, self.rx_deg, self.ry_deg, self.rz_deg]
    }

    pub fn is_identity(&self) -> bool {
        self.to_array().iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn has_through_plane(&self) -> bool {
        self.tz_mm != 0.0 || self.rx_deg != 0.0 || self.ry_deg != 0.0
    }

    fn displacement_sq(&self) -> f64 {
        self.tx_mm * self.tx_mm + self.ty_mm * self.ty_mm + self.tz_mm * self.tz_mm
    }

    fn rotation_sq(&self) -> f64 {
        self.rx_deg * self.rx_deg + self.ry_deg * self.ry_deg + self.rz_deg * self.rz_deg
    }
}

/// RMS motion severity of a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SeverityStats {
    pub rms_displacement_mm: f64,
    pub rms_rotation_deg: f64,
}

impl SeverityStats {
    pub const NONE: SeverityStats = SeverityStats {
        rms_displacement_mm: 0.0,
        rms_rotation_deg: 0.0,
    };

    pub fn new(rms_displacement_mm: f64, rms_rotation_deg: f64) -> Self {
        Self {
            rms_displacement_mm,
            rms_rotation_deg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("displacement", self.rms_displacement_mm),
            ("rotation", self.rms_rotation_deg),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "target {name} severity must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionTrajectory {
    poses: Vec<RigidPose>,
    tr_ms: f64,
}

impl MotionTrajectory {
    pub fn new(poses: Vec<RigidPose>, tr_ms: f64) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if !(tr_ms.is_finite() && tr_ms > 0.0) {
            return Err(Error::InvalidParameter(format!("TR must be positive, got {tr_ms} ms")));
        }
        if let Some(i) = poses.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("pose {i} is not finite")));
        }
        Ok(Self { poses, tr_ms })
    }

    pub fn identity(n_shots: usize, tr_ms: f64) -> Result<Self> {
        Self::new(vec![RigidPose::IDENTITY; n_shots], tr_ms)
    }

    pub fn poses(&self) -> &[RigidPose] {
        &self.poses
    }

    pub fn tr_ms(&self) -> f64 {
        self.tr_ms
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Start time of shot `index` in seconds.
    pub fn time_s(&self, index: usize) -> f64 {
        index as f64 * self.tr_ms / 1000.0
    }

    pub fn pose_at_shot(&self, shot_index: usize) -> Result<RigidPose> {
        self.poses.get(shot_index).copied().ok_or(Error::ShotOutOfRange {
            index: shot_index,
            len: self.poses.len(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.poses.iter().all(RigidPose::is_identity)
    }
}

pub fn pose_at_shot(traj: &MotionTrajectory, shot_index: usize) -> Result<RigidPose> {
    traj.pose_at_shot(shot_index)
}

pub fn severity_rms(traj: &MotionTrajectory) -> SeverityStats {
    let n = traj.len() as f64;
    let disp = traj.poses.iter().map(RigidPose::displacement_sq).sum::<f64>() / n;
    let rot = traj.poses.iter().map(RigidPose::rotation_sq).sum::<f64>() / n;
    SeverityStats::new(disp.sqrt(), rot.sqrt())
}

/// Scales translations and rotations independently so the trajectory hits
/// `target` exactly (up to rounding). A zero target zeroes that group.
pub fn rescale_to_target(traj: &MotionTrajectory, target: SeverityStats) -> Result<MotionTrajectory> {
    target.validate()?;
    let current = severity_rms(traj);
    let disp_factor = group_factor("displacement", current.rms_displacement_mm, target.rms_displacement_mm)?;
    let rot_factor = group_factor("rotation", current.rms_rotation_deg, target.rms_rotation_deg)?;
    let poses = traj
        .poses
        .iter()
        .map(|p| RigidPose {
            tx_mm: scale(p.tx_mm, disp_factor),
            ty_mm: scale(p.ty_mm, disp_factor),
            tz_mm: scale(p.tz_mm, disp_factor),
            rx_deg: scale(p.rx_deg, rot_factor),
            ry_deg: scale(p.ry_deg, rot_factor),
            rz_deg: scale(p.rz_deg, rot_factor),
        })
        .collect();
    MotionTrajectory::new(poses, traj.tr_ms)
}

// A zeroed group must be +0.0 everywhere (not -0.0) so it serializes and
// compares exactly like an identity trajectory.
fn scale(value: f64, factor: f64) -> f64 {
    if factor == 0.0 {
        0.0
    } else {
        value * factor
    }
}

fn group_factor(group: &'static str, current: f64, target: f64) -> Result<f64> {
    if target == 0.0 {
        Ok(0.0)
    } else if current == 0.0 {
        Err(Error::Unscalable { group, target })
    } else {
        Ok(target / current)
    }
}

/// Which pose components the random generator animates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MotionModel {
    /// All six degrees of freedom.
    Full6Dof,
    /// Only `tx`, `ty` and `rz`; the severity target then applies entirely
    /// to motion a 2-D slice simulation can represent.
    #[default]
    InPlane,
}

/// Random-walk trajectory generator.
///
/// Each animated axis is an independent walk of unit-variance Gaussian
/// increments, smoothed with a Savitzky-Golay filter and finally rescaled to
/// the requested RMS severity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryGenerator {
    pub smoothing_window: usize,
    pub smoothing_order: usize,
    pub model: MotionModel,
}

impl Default for TrajectoryGenerator {
    fn default() -> Self {
        Self {
            smoothing_window: 11,
            smoothing_order: 3,
            model: MotionModel::Full6Dof,
        }
    }
}

impl TrajectoryGenerator {
    pub fn in_plane() -> Self {
        Self {
            model: MotionModel::InPlane,
            ..Self::default()
        }
    }

    pub fn generate(&self, n_shots: usize, tr_ms: f64, target: SeverityStats, seed: u64) -> Result<MotionTrajectory> {
        if n_shots == 0 {
            return Err(Error::EmptyTrajectory);
        }
        target.validate()?;

        let mut rng = rng_from_seed(seed);
        let mut axes: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(n_shots)).collect();
        let mut position = [0.0; 6];
        for _ in 0..n_shots {
            for (axis, pos) in position.iter_mut().enumerate() {
                *pos += standard_normal(&mut rng);
                axes[axis].push(*pos);
            }
        }
        if self.model == MotionModel::InPlane {
            for axis in [2, 3, 4] {
                axes[axis].iter_mut().for_each(|v| *v = 0.0);
            }
        }

        // Short trajectories get the longest odd window mirror padding allows.
        let window = self.smoothing_window.min(2 * n_shots - 1);
        if window > self.smoothing_order {
            for axis in axes.iter_mut() {
                *axis = smooth_savitzky_golay(axis, window, self.smoothing_order)?;
            }
        }

        let poses = (0..n_shots)
            .map(|i| RigidPose::from_array([axes[0][i], axes[1][i], axes[2][i], axes[3][i], axes[4][i], axes[5][i]]))
            .collect();
        rescale_to_target(&MotionTrajectory::new(poses, tr_ms)?, target)
    }
}

/// Random six-degree-of-freedom trajectory with the default smoothing
/// (window 11, cubic) rescaled to `target`.
pub fn generate_random_trajectory(n_shots: usize, tr_ms: f64, target: SeverityStats, seed: u64) -> Result<MotionTrajectory> {
    TrajectoryGenerator::default().generate(n_shots, tr_ms, target, seed)
}
