use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::metrics::{evaluate_auc, train_probe, PROBE_BANDS};
use crate::rng::{rng_from_seed, substream_seed};
use crate::sampler::Scheme;

/// One record as seen by the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSample {
    /// Identifies the paired trial across schemes (image and trial, not scheme).
    pub pair_key: String,
    pub seed: u64,
    pub label: Label,
    pub nrmse: f64,
    pub features: [f64; PROBE_BANDS],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub repetitions: usize,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            repetitions: 5,
            test_fraction: 0.3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub n_motion: usize,
    pub n_clean: usize,
    pub nrmse_mean: f64,
    pub nrmse_std: f64,
    pub auc_runs: Vec<f64>,
    pub auc_mean: f64,
    pub auc_std: f64,
}

/// Paired difference `higher - lower` and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGap {
    pub higher: Scheme,
    pub lower: Scheme,
    pub mean_difference: f64,
    pub standard_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Holds(String),
    NotEstablished(String),
    Degenerate,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds(order) => write!(f, "{order} (holds)"),
            Verdict::NotEstablished(observed) => write!(f, "not established (observed {observed})"),
            Verdict::Degenerate => f.write_str("no ordering (degenerate)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schemes: Vec<SchemeSummary>,
    /// NRMSE gaps between neighbours in the expected order; a gap holds when
    /// it is positive and at least one paired standard error.
    pub nrmse_gaps: Vec<PairGap>,
    /// AUC gaps over repetitions; a gap holds when it is not negative.
    pub auc_gaps: Vec<PairGap>,
    pub distortion: Verdict,
    pub detectability: Verdict,
}

/// Compares schemes on paired samples.
///
/// Every scheme must hold the same pair keys with the same seeds and
/// labels. The probe AUC is averaged over `repetitions` stratified
/// train/test splits; split `r` is the same permutation of pair keys for all
/// schemes.
pub fn compare(samples: &[(Scheme, Vec<ComparisonSample>)], options: &CompareOptions) -> Result<ComparisonReport> {
    if samples.len() < 2 {
        return Err(Error::Unpaired(format!("need at least two schemes, got {}", samples.len())));
    }
    if options.repetitions == 0 || !(options.test_fraction > 0.0 && options.test_fraction < 1.0) {
        return Err(Error::InvalidParameter("comparison needs repetitions >= 1 and a test fraction in (0, 1)".into()));
    }
    let mut groups: Vec<(Scheme, Vec<ComparisonSample>)> = Scheme::ALL
        .iter()
        .filter_map(|s| samples.iter().find(|(scheme, _)| scheme == s).cloned())
        .collect();
    for (i, (scheme, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(s, _)| s == scheme) {
            return Err(Error::Unpaired(format!("scheme {scheme} appears twice")));
        }
    }
    for (_, v) in groups.iter_mut() {
        v.sort_by(|a, b| (a.label, &a.pair_key).cmp(&(b.label, &b.pair_key)));
    }
    check_pairing(&groups)?;

    let degenerate = groups.iter().all(|(_, v)| v.iter().filter(|s| s.label == Label::Motion).all(|s| s.nrmse == 0.0));

    let mut summaries = Vec::new();
    for (scheme, v) in &groups {
        let motion: Vec<f64> = v.iter().filter(|s| s.label == Label::Motion).map(|s| s.nrmse).collect();
        let n_clean = v.len() - motion.len();
        let auc_runs = if n_clean > 0 && !motion.is_empty() {
            probe_aucs(v, options)?
        } else {
            Vec::new()
        };
        let (nrmse_mean, nrmse_std) = mean_std(&motion);
        let (auc_mean, auc_std) = mean_std(&auc_runs);
        summaries.push(SchemeSummary {
            scheme: *scheme,
            n_motion: motion.len(),
            n_clean,
            nrmse_mean,
            nrmse_std,
            auc_runs,
            auc_mean,
            auc_std,
        });
    }

    let mut nrmse_gaps = Vec::new();
    let mut auc_gaps = Vec::new();
    for pair in groups.windows(2) {
        let (hi, lo) = (&pair[0], &pair[1]);
        let diffs: Vec<f64> = hi
            .1
            .iter()
            .zip(&lo.1)
            .filter(|(a, _)| a.label == Label::Motion)
            .map(|(a, b)| a.nrmse - b.nrmse)
            .collect();
        nrmse_gaps.push(gap(hi.0, lo.0, &diffs, |mean, se| mean > 0.0 && mean >= se));
        let find = |s: Scheme| summaries.iter().find(|x| x.scheme == s).unwrap();
        let auc_diffs: Vec<f64> = find(hi.0).auc_runs.iter().zip(&find(lo.0).auc_runs).map(|(a, b)| a - b).collect();
        auc_gaps.push(gap(hi.0, lo.0, &auc_diffs, |mean, _| mean >= 0.0));
    }

    let distortion = verdict(degenerate, &nrmse_gaps, " > ", &summaries, |s| s.nrmse_mean);
    let no_probe = summaries.iter().any(|s| s.auc_runs.is_empty());
    let detectability = verdict(degenerate || no_probe, &auc_gaps, " >= ", &summaries, |s| s.auc_mean);
    Ok(ComparisonReport {
        schemes: summaries,
        nrmse_gaps,
        auc_gaps,
        distortion,
        detectability,
    })
}

fn check_pairing(groups: &[(Scheme, Vec<ComparisonSample>)]) -> Result<()> {
    let (ref_scheme, reference) = &groups[0];
    for (scheme, v) in &groups[1..] {
        if v.len() != reference.len() {
            return Err(Error::Unpaired(format!(
                "{ref_scheme} has {} samples but {scheme} has {}",
                reference.len(),
                v.len()
            )));
        }
        for (a, b) in reference.iter().zip(v) {
            if a.pair_key != b.pair_key || a.label != b.label {
                return Err(Error::Unpaired(format!(
                    "{ref_scheme} sample {} ({}) has no counterpart in {scheme}",
                    a.pair_key,
                    a.label.as_str()
                )));
            }
            if a.seed != b.seed {
                return Err(Error::Unpaired(format!(
                    "trial {} uses seed {} for {ref_scheme} but {} for {scheme}",
                    a.pair_key, a.seed, b.seed
                )));
            }
        }
    }
    for (scheme, v) in groups {
        if v.windows(2).any(|w| w[0].label == w[1].label && w[0].pair_key == w[1].pair_key) {
            return Err(Error::Unpaired(format!("{scheme} repeats a trial")));
        }
    }
    Ok(())
}

fn probe_aucs(samples: &[ComparisonSample], options: &CompareOptions) -> Result<Vec<f64>> {
    let motion: Vec<&ComparisonSample> = samples.iter().filter(|s| s.label == Label::Motion).collect();
    let clean: Vec<&ComparisonSample> = samples.iter().filter(|s| s.label == Label::Clean).collect();
    let mut out = Vec::with_capacity(options.repetitions);
    for rep in 0..options.repetitions {
        let split_seed = substream_seed(options.seed, rep as u64);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (class, group) in [&motion, &clean].into_iter().enumerate() {
            let mut order: Vec<usize> = (0..group.len()).collect();
            order.shuffle(&mut rng_from_seed(substream_seed(split_seed, class as u64)));
            if group.len() < 2 {
                return Err(Error::SingleClass(format!("{} {} samples cannot be split", group.len(), ["motion", "clean"][class])));
            }
            let n_test = ((group.len() as f64 * options.test_fraction).round() as usize).clamp(1, group.len() - 1);
            for (rank, &i) in order.iter().enumerate() {
                let s = group[i];
                let item = (s.features, s.label == Label::Motion);
                if rank < n_test {
                    test.push(item);
                } else {
                    train.push(item);
                }
            }
        }
        let model = train_probe(&train, substream_seed(split_seed, 2))?;
        out.push(evaluate_auc(&model, &test)?);
    }
    Ok(out)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn gap(higher: Scheme, lower: Scheme, diffs: &[f64], rule: impl Fn(f64, f64) -> bool) -> PairGap {
    let (mean, std) = mean_std(diffs);
    let se = std / (diffs.len() as f64).sqrt();
    PairGap {
        higher,
        lower,
        mean_difference: mean,
        standard_error: se,
        holds: !diffs.is_empty() && rule(mean, se),
    }
}

fn verdict(
    degenerate: bool,
    gaps: &[PairGap],
    sep: &str,
    summaries: &[SchemeSummary],
    key: impl Fn(&SchemeSummary) -> f64,
) -> Verdict {
    if degenerate {
        return Verdict::Degenerate;
    }
    if gaps.iter().all(|g| g.holds) {
        let order: Vec<&str> = summaries.iter().map(|s| s.scheme.as_str()).collect();
        return Verdict::Holds(order.join(sep));
    }
    let mut observed: Vec<&SchemeSummary> = summaries.iter().collect();
    observed.sort_by(|a, b| key(b).total_cmp(&key(a)));
    let order: Vec<String> = observed.iter().map(|s| format!("{} {:.4}", s.scheme, key(s))).collect();
    Verdict::NotEstablished(order.join(", "))
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.schemes {
            let _ = writeln!(
                out,
                "{:<10} motion={:<4} clean={:<4} nrmse={:.4} +/- {:.4}  auc={:.4} +/- {:.4}",
                s.scheme.as_str(),
                s.n_motion,
                s.n_clean,
                s.nrmse_mean,
                s.nrmse_std,
                s.auc_mean,
                s.auc_std
            );
        }
        for g in &self.nrmse_gaps {
            let _ = writeln!(
                out,
                "nrmse gap {}-{}: {:.5} (paired SE {:.5})",
                g.higher, g.lower, g.mean_difference, g.standard_error
            );
        }
        for g in &self.auc_gaps {
            let _ = writeln!(out, "auc gap {}-{}: {:.5} (SE {:.5})", g.higher, g.lower, g.mean_difference, g.standard_error);
        }
        let _ = writeln!(out, "distortion ordering: {}", self.distortion);
        let _ = writeln!(out, "detectability ordering: {}", self.detectability);
        out
    }

    /// Long-format CSV (`quantity,subject,value`) of every number in the report.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,subject,value\n");
        let mut row = |q: &str, subject: &str, v: f64| {
            let _ = writeln!(out, "{q},{subject},{v:?}");
        };
        for s in &self.schemes {
            let name = s.scheme.as_str();
            row("n_motion", name, s.n_motion as f64);
            row("n_clean", name, s.n_clean as f64);
            row("nrmse_mean", name, s.nrmse_mean);
            row("nrmse_std", name, s.nrmse_std);
            row("auc_mean", name, s.auc_mean);
            row("auc_std", name, s.auc_std);
            for (i, a) in s.auc_runs.iter().enumerate() {
                row(&format!("auc_run_{}", i + 1), name, *a);
            }
        }
        for (prefix, gaps) in [("nrmse", &self.nrmse_gaps), ("auc", &self.auc_gaps)] {
            for g in gaps.iter() {
                let pair = format!("{}-{}", g.higher, g.lower);
                row(&format!("{prefix}_gap"), &pair, g.mean_difference);
                row(&format!("{prefix}_gap_se"), &pair, g.standard_error);
                row(&format!("{prefix}_gap_holds"), &pair, if g.holds { 1.0 } else { 0.0 });
            }
        }
        out
    }
}
