//! Timestamped k-space sampling plans.
//!
//! Coordinates are in cycles per pixel, each component in `[-0.5, 0.5)`.
//! One shot is acquired per TR: a phase-encode line (Cartesian), a diameter
//! through the origin (radial) or one Archimedean interleave (spiral). All
//! three schemes acquire `matrix_pe * matrix_fe` samples per excitation.
//! Repeated excitations (NEX) repeat the same shots on a continuing timeline.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Cartesian,
    Radial,
    Spiral,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Cartesian, Scheme::Radial, Scheme::Spiral];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Cartesian => "cartesian",
            Scheme::Radial => "radial",
            Scheme::Spiral => "spiral",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cartesian" => Ok(Scheme::Cartesian),
            "radial" => Ok(Scheme::Radial),
            "spiral" => Ok(Scheme::Spiral),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme {other:?} (expected cartesian, radial or spiral)"
            ))),
        }
    }
}

/// Acquisition order of radial spokes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpokeOrder {
    /// Angles `0, pi/N, 2 pi/N, ...` in time order.
    #[default]
    Sequential,
    /// Successive spokes advance by the golden angle (~111.25 degrees).
    GoldenAngle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScannerConfig {
    pub scheme: Scheme,
    pub tr_ms: f64,
    pub nex: usize,
    pub matrix_pe: usize,
    pub matrix_fe: usize,
    pub fov_mm: f64,
    /// Defaults to `matrix_pe`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_spokes: Option<usize>,
    #[serde(default)]
    pub spoke_order: SpokeOrder,
    /// Defaults to `matrix_pe / 8`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spiral_interleaves: Option<usize>,
    /// Turns per interleave; defaults to `matrix_pe / (2 * interleaves)`,
    /// which spaces neighbouring arms one k-space pixel apart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spiral_turns: Option<f64>,
}

impl ScannerConfig {
    /// Square-matrix configuration with TR 400 ms, NEX 1 and a 256 mm FOV.
    pub fn new(scheme: Scheme, matrix: usize) -> Self {
        Self {
            scheme,
            tr_ms: 400.0,
            nex: 1,
            matrix_pe: matrix,
            matrix_fe: matrix,
            fov_mm: 256.0,
            radial_spokes: None,
            spoke_order: SpokeOrder::Sequential,
            spiral_interleaves: None,
            spiral_turns: None,
        }
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn radial_spokes(&self) -> usize {
        self.radial_spokes.unwrap_or(self.matrix_pe)
    }

    pub fn spiral_interleaves(&self) -> usize {
        self.spiral_interleaves.unwrap_or((self.matrix_pe / 8).max(1))
    }

    pub fn spiral_turns(&self) -> f64 {
        self.spiral_turns
            .unwrap_or(self.matrix_pe as f64 / (2.0 * self.spiral_interleaves() as f64))
    }

    pub fn samples_per_excitation(&self) -> usize {
        self.matrix_pe * self.matrix_fe
    }

    pub fn shots_per_excitation(&self) -> usize {
        match self.scheme {
            Scheme::Cartesian => self.matrix_pe,
            Scheme::Radial => self.radial_spokes(),
            Scheme::Spiral => self.spiral_interleaves(),
        }
    }

    pub fn n_shots_total(&self) -> usize {
        self.shots_per_excitation() * self.nex
    }

    /// Largest sampled radius for radial and spiral plans.
    pub fn kmax(&self) -> f64 {
        let n = self.matrix_pe.min(self.matrix_fe) as f64;
        0.5 * (n - 1.0) / n
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tr_ms.is_finite() && self.tr_ms > 0.0) {
            return fail(format!("tr_ms must be positive, got {}", self.tr_ms));
        }
        if self.nex == 0 {
            return fail("nex must be at least 1".into());
        }
        for (name, d) in [("matrix_pe", self.matrix_pe), ("matrix_fe", self.matrix_fe)] {
            if d < 8 || d % 2 != 0 {
                return fail(format!("{name} must be even and at least 8, got {d}"));
            }
        }
        if !(self.fov_mm.is_finite() && self.fov_mm > 0.0) {
            return fail(format!("fov_mm must be positive, got {}", self.fov_mm));
        }
        match self.scheme {
            Scheme::Cartesian => {
                if self.radial_spokes.is_some() || self.spiral_interleaves.is_some() || self.spiral_turns.is_some() {
                    return fail("radial/spiral parameters given for a cartesian scheme".into());
                }
            }
            Scheme::Radial => {
                if self.spiral_interleaves.is_some() || self.spiral_turns.is_some() {
                    return fail("spiral parameters given for a radial scheme".into());
                }
                let spokes = self.radial_spokes();
                if spokes == 0 {
                    return fail("radial_spokes must be at least 1".into());
                }
                if spokes != self.matrix_pe {
                    return fail(format!(
                        "radial_spokes ({spokes}) must equal matrix_pe ({}) to keep the sample budget at matrix_pe x matrix_fe",
                        self.matrix_pe
                    ));
                }
            }
            Scheme::Spiral => {
                if self.radial_spokes.is_some() {
                    return fail("radial_spokes given for a spiral scheme".into());
                }
                let m = self.spiral_interleaves();
                if m == 0 {
                    return fail("spiral_interleaves must be at least 1".into());
                }
                if self.samples_per_excitation() % m != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "spiral_interleaves ({m}) must divide the sample budget {}",
                        self.samples_per_excitation()
                    )));
                }
                let turns = self.spiral_turns();
                if !(turns.is_finite() && turns > 0.0) {
                    return fail(format!("spiral_turns must be positive, got {turns}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub index: usize,
    /// Acquisition time in whole TRs from the start of the scan.
    pub time_index_tr: usize,
    /// `(kx, ky)` in cycles per pixel.
    pub samples: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub config: ScannerConfig,
    /// All shots of all excitations in time order.
    pub shots: Vec<Shot>,
}

impl SamplingPlan {
    pub fn scheme(&self) -> Scheme {
        self.config.scheme
    }

    pub fn n_shots_total(&self) -> usize {
        self.shots.len()
    }

    pub fn shots_per_excitation(&self) -> usize {
        self.config.shots_per_excitation()
    }

    /// Shots of the first excitation; later excitations repeat them.
    pub fn excitation_shots(&self) -> &[Shot] {
        &self.shots[..self.shots_per_excitation().min(self.shots.len())]
    }

    pub fn samples_per_excitation(&self) -> usize {
        self.excitation_shots().iter().map(|s| s.samples.len()).sum()
    }

    /// Sample coordinates of one excitation, shot-major.
    pub fn excitation_coords(&self) -> Vec<[f64; 2]> {
        self.excitation_shots()
            .iter()
            .flat_map(|s| s.samples.iter().copied())
            .collect()
    }
}

pub fn make_plan(config: &ScannerConfig) -> Result<SamplingPlan> {
    match config.scheme {
        Scheme::Cartesian => cartesian_plan(config),
        Scheme::Radial => radial_plan(config),
        Scheme::Spiral => spiral_plan(config),
    }
}

fn ensure_scheme(config: &ScannerConfig, scheme: Scheme) -> Result<()> {
    if config.scheme != scheme {
        return Err(Error::InvalidConfig(format!(
            "{scheme} plan requested for a {} configuration",
            config.scheme
        )));
    }
    config.validate()
}

fn repeat_excitations(config: &ScannerConfig, per_excitation: Vec<Vec<[f64; 2]>>) -> SamplingPlan {
    let n = per_excitation.len();
    let mut shots = Vec::with_capacity(n * config.nex);
    for e in 0..config.nex {
        for (i, samples) in per_excitation.iter().enumerate() {
            let t = e * n + i;
            shots.push(Shot {
                index: t,
                time_index_tr: t,
                samples: samples.clone(),
            });
        }
    }
    SamplingPlan {
        config: config.clone(),
        shots,
    }
}

/// One phase-encode line per TR, `ky` sweeping from `-0.5` upward.
pub fn cartesian_plan(config: &ScannerConfig) -> Result<SamplingPlan> {
    ensure_scheme(config, Scheme::Cartesian)?;
    let (pe, fe) = (config.matrix_pe, config.matrix_fe);
    let lines = (0..pe)
        .map(|i| {
            let ky = (i as f64 - (pe / 2) as f64) / pe as f64;
            (0..fe)
                .map(|j| [(j as f64 - (fe / 2) as f64) / fe as f64, ky])
                .collect()
        })
        .collect();
    Ok(repeat_excitations(config, lines))
}

const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Spoke angles in acquisition order.
pub fn spoke_angles(spokes: usize, order: SpokeOrder) -> Vec<f64> {
    (0..spokes)
        .map(|s| match order {
            SpokeOrder::Sequential => s as f64 * PI / spokes as f64,
            SpokeOrder::GoldenAngle => (s as f64 * PI * GOLDEN_RATIO_CONJUGATE).rem_euclid(PI),
        })
        .collect()
}

/// Diameters through the origin, `samples_per_spoke` points each, uniformly
/// spaced by `1/samples_per_spoke` and symmetric about the origin.
pub fn radial_spoke_coords(spokes: usize, samples_per_spoke: usize, order: SpokeOrder) -> Vec<Vec<[f64; 2]>> {
    let n = samples_per_spoke as f64;
    spoke_angles(spokes, order)
        .into_iter()
        .map(|theta| {
            let (s, c) = theta.sin_cos();
            (0..samples_per_spoke)
                .map(|j| {
                    let r = (j as f64 - (n - 1.0) / 2.0) / n;
                    [r * c, r * s]
                })
                .collect()
        })
        .collect()
}

pub fn radial_plan(config: &ScannerConfig) -> Result<SamplingPlan> {
    ensure_scheme(config, Scheme::Radial)?;
    let spokes = radial_spoke_coords(config.radial_spokes(), config.matrix_fe, config.spoke_order);
    Ok(repeat_excitations(config, spokes))
}

/// Interleaved Archimedean spiral arms `r = kmax s`,
/// `phi = 2 pi turns s + 2 pi m / interleaves`, `s = j / samples_per_shot`.
pub fn spiral_interleave_coords(interleaves: usize, turns: f64, samples_per_shot: usize, kmax: f64) -> Vec<Vec<[f64; 2]>> {
    (0..interleaves)
        .map(|m| {
            let offset = 2.0 * PI * m as f64 / interleaves as f64;
            (0..samples_per_shot)
                .map(|j| {
                    let s = j as f64 / samples_per_shot as f64;
                    let r = kmax * s;
                    let (sin, cos) = (2.0 * PI * turns * s + offset).sin_cos();
                    [r * cos, r * sin]
                })
                .collect()
        })
        .collect()
}

pub fn spiral_plan(config: &ScannerConfig) -> Result<SamplingPlan> {
    ensure_scheme(config, Scheme::Spiral)?;
    let m = config.spiral_interleaves();
    let arms = spiral_interleave_coords(m, config.spiral_turns(), config.samples_per_excitation() / m, config.kmax());
    Ok(repeat_excitations(config, arms))
}

/// Total acquisition time in seconds.
pub fn scan_time(config: &ScannerConfig) -> f64 {
    (config.shots_per_excitation() * config.nex) as f64 * config.tr_ms / 1000.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanViolation {
    ShotCount { expected: usize, actual: usize },
    TimeIndex { shot: usize, expected: usize, actual: usize },
    EmptyShot { shot: usize },
    OutOfBounds { shot: usize, sample: usize, k: [f64; 2] },
    SampleBudget { excitation: usize, expected: usize, actual: usize },
    CartesianCoverage { excitation: usize, detail: String },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::ShotCount { expected, actual } => {
                write!(f, "plan has {actual} shots, expected {expected}")
            }
            PlanViolation::TimeIndex { shot, expected, actual } => {
                write!(f, "shot {shot} has time index {actual}, expected {expected}")
            }
            PlanViolation::EmptyShot { shot } => write!(f, "shot {shot} has no samples"),
            PlanViolation::OutOfBounds { shot, sample, k } => {
                write!(f, "shot {shot} sample {sample} at ({}, {}) is outside [-0.5, 0.5)", k[0], k[1])
            }
            PlanViolation::SampleBudget { excitation, expected, actual } => write!(
                f,
                "excitation {excitation} has {actual} samples, expected {expected}"
            ),
            PlanViolation::CartesianCoverage { excitation, detail } => {
                write!(f, "excitation {excitation} does not cover the grid: {detail}")
            }
        }
    }
}

/// Checks every plan invariant; an empty list means the plan is valid.
pub fn validate_plan(plan: &SamplingPlan) -> Vec<PlanViolation> {
    let mut out = Vec::new();
    let cfg = &plan.config;
    let expected_shots = cfg.n_shots_total();
    if plan.shots.len() != expected_shots {
        out.push(PlanViolation::ShotCount {
            expected: expected_shots,
            actual: plan.shots.len(),
        });
    }
    for (i, shot) in plan.shots.iter().enumerate() {
        if shot.time_index_tr != i {
            out.push(PlanViolation::TimeIndex {
                shot: i,
                expected: i,
                actual: shot.time_index_tr,
            });
        }
        if shot.samples.is_empty() {
            out.push(PlanViolation::EmptyShot { shot: i });
        }
        for (j, k) in shot.samples.iter().enumerate() {
            if !k.iter().all(|&v| v.is_finite() && (-0.5..0.5).contains(&v)) {
                out.push(PlanViolation::OutOfBounds { shot: i, sample: j, k: *k });
            }
        }
    }

    let per_exc = cfg.shots_per_excitation().max(1);
    let budget = cfg.samples_per_excitation();
    for (e, chunk) in plan.shots.chunks(per_exc).enumerate() {
        let actual: usize = chunk.iter().map(|s| s.samples.len()).sum();
        if actual != budget {
            out.push(PlanViolation::SampleBudget {
                excitation: e,
                expected: budget,
                actual,
            });
        }
        if cfg.scheme == Scheme::Cartesian {
            if let Some(detail) = cartesian_coverage_gap(cfg, chunk) {
                out.push(PlanViolation::CartesianCoverage { excitation: e, detail });
            }
        }
    }
    out
}

fn cartesian_coverage_gap(cfg: &ScannerConfig, shots: &[Shot]) -> Option<String> {
    let (pe, fe) = (cfg.matrix_pe as f64, cfg.matrix_fe as f64);
    let mut seen = HashSet::new();
    for shot in shots {
        for k in &shot.samples {
            let j = k[0] * fe + fe / 2.0;
            let i = k[1] * pe + pe / 2.0;
            if (j - j.round()).abs() > 1e-9 || (i - i.round()).abs() > 1e-9 {
                return Some(format!("sample ({}, {}) is off the grid", k[0], k[1]));
            }
            if !seen.insert((i.round() as i64, j.round() as i64)) {
                return Some(format!("grid point ({}, {}) sampled twice", k[0], k[1]));
            }
        }
    }
    let total = cfg.matrix_pe * cfg.matrix_fe;
    (seen.len() != total).then(|| format!("{} of {total} grid points sampled", seen.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(scheme: Scheme, matrix: usize) -> ScannerConfig {
        ScannerConfig::new(scheme, matrix)
    }

    #[test]
    fn smallest_cartesian_case() {
        let plan = cartesian_plan(&cfg(Scheme::Cartesian, 8)).unwrap();
        let ky: Vec<f64> = plan.shots.iter().map(|s| s.samples[0][1]).collect();
        assert_eq!(ky, vec![-0.5, -0.375, -0.25, -0.125, 0.0, 0.125, 0.25, 0.375]);
        let times: Vec<usize> = plan.shots.iter().map(|s| s.time_index_tr).collect();
        assert_eq!(times, (0..8).collect::<Vec<_>>());
        assert!(validate_plan(&plan).is_empty());
    }

    #[test]
    fn cartesian_208_lines_two_excitations() {
        let mut c = ScannerConfig::new(Scheme::Cartesian, 256);
        c.matrix_pe = 208;
        c.nex = 2;
        let plan = cartesian_plan(&c).unwrap();
        assert_eq!(plan.n_shots_total(), 416);
        assert_eq!(plan.shots.last().unwrap().time_index_tr, 415);
        assert!(validate_plan(&plan).is_empty());
    }

    #[test]
    fn radial_two_spokes_lie_on_axes() {
        let spokes = radial_spoke_coords(2, 4, SpokeOrder::Sequential);
        assert_eq!(spoke_angles(2, SpokeOrder::Sequential), vec![0.0, PI / 2.0]);
        assert!(spokes[0].iter().all(|k| k[1] == 0.0));
        assert!(spokes[1].iter().all(|k| k[0].abs() < 1e-15));
        assert_eq!(spokes[0].iter().map(|k| k[0]).collect::<Vec<_>>(), vec![-0.375, -0.125, 0.125, 0.375]);
    }

    #[test]
    fn every_spoke_passes_near_the_center() {
        let plan = radial_plan(&cfg(Scheme::Radial, 64)).unwrap();
        for shot in &plan.shots {
            let min = shot.samples.iter().map(|k| k[0].hypot(k[1])).fold(f64::MAX, f64::min);
            assert!(min <= 1.0 / (2.0 * 64.0) + 1e-15);
        }
    }

    #[test]
    fn radial_spokes_are_point_symmetric() {
        let plan = radial_plan(&cfg(Scheme::Radial, 32)).unwrap();
        let step = 1.0 / 32.0;
        for shot in &plan.shots {
            for k in &shot.samples {
                let near = shot
                    .samples
                    .iter()
                    .map(|q| (q[0] + k[0]).hypot(q[1] + k[1]))
                    .fold(f64::MAX, f64::min);
                assert!(near <= 0.5 * step + 1e-12);
            }
        }
    }

    #[test]
    fn budgets_match_at_256() {
        let radial = radial_plan(&cfg(Scheme::Radial, 256)).unwrap();
        assert_eq!(radial.shots.len(), 256);
        assert_eq!(radial.samples_per_excitation(), 65536);

        let mut sc = cfg(Scheme::Spiral, 256);
        sc.spiral_interleaves = Some(32);
        let spiral = spiral_plan(&sc).unwrap();
        assert_eq!(spiral.shots.len(), 32);
        assert!(spiral.shots.iter().all(|s| s.samples.len() == 2048));
        assert_eq!(spiral.samples_per_excitation(), 65536);

        for plan in [&radial, &spiral, &cartesian_plan(&cfg(Scheme::Cartesian, 256)).unwrap()] {
            assert!(validate_plan(plan).is_empty());
        }
    }

    #[test]
    fn spiral_starts_at_origin_and_stays_inside_kmax() {
        let arms = spiral_interleave_coords(1, 2.0, 8, 0.5);
        assert_eq!(arms[0][0], [0.0, 0.0]);
        let last = arms[0][7];
        assert!((last[0].hypot(last[1]) - 0.4375).abs() < 1e-15);

        let c = cfg(Scheme::Spiral, 64);
        let plan = spiral_plan(&c).unwrap();
        for shot in &plan.shots {
            for k in &shot.samples {
                assert!(k[0].hypot(k[1]) <= c.kmax() + 1e-15);
            }
        }
    }

    #[test]
    fn spiral_interleaves_must_divide_budget() {
        let mut c = cfg(Scheme::Spiral, 16);
        c.spiral_interleaves = Some(3);
        assert!(matches!(spiral_plan(&c), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn scan_time_examples() {
        let mut c = cfg(Scheme::Cartesian, 256);
        c.matrix_pe = 208;
        c.nex = 2;
        assert!((scan_time(&c) - 166.4).abs() < 1e-12);

        let mut t2 = cfg(Scheme::Cartesian, 192);
        t2.tr_ms = 5725.0;
        // scan_time only counts shots, so an odd line count is fine here
        t2.matrix_pe = 187;
        assert!((scan_time(&t2) - 1070.575).abs() < 1e-9);

        let mut one = cfg(Scheme::Spiral, 8);
        one.tr_ms = 1000.0;
        one.spiral_interleaves = Some(1);
        assert_eq!(scan_time(&one), 1.0);
    }

    #[test]
    fn cartesian_and_radial_scan_times_agree() {
        let c = cfg(Scheme::Cartesian, 128);
        assert_eq!(scan_time(&c), scan_time(&c.with_scheme(Scheme::Radial)));
    }

    #[test]
    fn wrong_scheme_or_mixed_flags_rejected() {
        assert!(radial_plan(&cfg(Scheme::Cartesian, 16)).is_err());
        let mut c = cfg(Scheme::Cartesian, 16);
        c.spiral_turns = Some(2.0);
        assert!(c.validate().is_err());
        let mut r = cfg(Scheme::Radial, 16);
        r.radial_spokes = Some(10);
        assert!(r.validate().is_err());
        assert!(cfg(Scheme::Radial, 10).validate().is_ok());
        assert!(cfg(Scheme::Radial, 6).validate().is_err());
    }

    #[test]
    fn violations_are_reported() {
        let mut plan = cartesian_plan(&cfg(Scheme::Cartesian, 8)).unwrap();
        plan.shots[2].samples[1][0] = 0.7;
        let v = validate_plan(&plan);
        assert!(v.iter().any(|v| matches!(v, PlanViolation::OutOfBounds { shot: 2, sample: 1, .. })));

        let mut plan = cartesian_plan(&cfg(Scheme::Cartesian, 8)).unwrap();
        plan.shots[3].time_index_tr = 2;
        let v = validate_plan(&plan);
        assert!(v.iter().any(|v| matches!(v, PlanViolation::TimeIndex { shot: 3, .. })));

        let mut plan = cartesian_plan(&cfg(Scheme::Cartesian, 8)).unwrap();
        plan.shots[1].samples = plan.shots[0].samples.clone();
        let v = validate_plan(&plan);
        assert!(v.iter().any(|v| matches!(v, PlanViolation::CartesianCoverage { .. })));
    }

    #[test]
    fn golden_angle_spokes_stay_in_half_turn() {
        let a = spoke_angles(64, SpokeOrder::GoldenAngle);
        assert!(a.iter().all(|&t| (0.0..PI).contains(&t)));
        assert!((a[1] - PI * GOLDEN_RATIO_CONJUGATE).abs() < 1e-12);
    }

    #[test]
    fn timestamps_form_a_bijection_with_nex() {
        for scheme in Scheme::ALL {
            let mut c = cfg(scheme, 16);
            c.nex = 3;
            let plan = make_plan(&c).unwrap();
            let mut t: Vec<usize> = plan.shots.iter().map(|s| s.time_index_tr).collect();
            t.sort();
            assert_eq!(t, (0..c.n_shots_total()).collect::<Vec<_>>());
            assert!(validate_plan(&plan).is_empty(), "{scheme}");
        }
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("Radial".parse::<Scheme>().unwrap(), Scheme::Radial);
        assert!("epi".parse::<Scheme>().is_err());
    }
}
