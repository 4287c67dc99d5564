//! Logistic-regression detectability probe over spectral band features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{normal, rng_from_seed};

use super::PROBE_BANDS;

/// Smallest feature value before taking logarithms.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeTraining {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Fit on log band energies; band fractions span many decades.
    pub log_features: bool,
}

impl Default for ProbeTraining {
    fn default() -> Self {
        Self {
            epochs: 2000,
            learning_rate: 0.5,
            log_features: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeModel {
    /// Band weights followed by the bias, on standardized inputs.
    pub weights: [f64; PROBE_BANDS + 1],
    pub feature_mean: [f64; PROBE_BANDS],
    pub feature_scale: [f64; PROBE_BANDS],
    pub training: ProbeTraining,
    pub seed: u64,
}

impl ProbeModel {
    fn standardize(&self, features: &[f64; PROBE_BANDS]) -> [f64; PROBE_BANDS] {
        let raw = transform(features, self.training.log_features);
        let mut z = [0.0; PROBE_BANDS];
        for b in 0..PROBE_BANDS {
            z[b] = (raw[b] - self.feature_mean[b]) / self.feature_scale[b];
        }
        z
    }

    /// Logit of the motion class.
    pub fn score(&self, features: &[f64; PROBE_BANDS]) -> f64 {
        let z = self.standardize(features);
        z.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() + self.weights[PROBE_BANDS]
    }

    pub fn probability(&self, features: &[f64; PROBE_BANDS]) -> f64 {
        1.0 / (1.0 + (-self.score(features)).exp())
    }
}

fn transform(features: &[f64; PROBE_BANDS], log: bool) -> [f64; PROBE_BANDS] {
    if log {
        features.map(|f| f.max(LOG_FLOOR).ln())
    } else {
        *features
    }
}

fn check_classes(labels: impl Iterator<Item = bool>, what: &str) -> Result<()> {
    let (mut pos, mut neg) = (0usize, 0usize);
    for l in labels {
        if l {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass(format!("{what} has {pos} motion and {neg} clean samples")));
    }
    Ok(())
}

/// Full-batch gradient descent on the logistic loss with the default schedule.
pub fn train_probe(samples: &[([f64; PROBE_BANDS], bool)], seed: u64) -> Result<ProbeModel> {
    train_probe_with(samples, seed, &ProbeTraining::default())
}

pub fn train_probe_with(samples: &[([f64; PROBE_BANDS], bool)], seed: u64, training: &ProbeTraining) -> Result<ProbeModel> {
    check_classes(samples.iter().map(|s| s.1), "training set")?;
    if !samples.iter().all(|(f, _)| f.iter().all(|v| v.is_finite())) {
        return Err(Error::InvalidParameter("probe features must be finite".into()));
    }
    let n = samples.len() as f64;
    let raw: Vec<[f64; PROBE_BANDS]> = samples.iter().map(|(f, _)| transform(f, training.log_features)).collect();
    let mut mean = [0.0; PROBE_BANDS];
    let mut scale = [0.0; PROBE_BANDS];
    for b in 0..PROBE_BANDS {
        mean[b] = raw.iter().map(|f| f[b]).sum::<f64>() / n;
        let var = raw.iter().map(|f| (f[b] - mean[b]).powi(2)).sum::<f64>() / n;
        scale[b] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let z: Vec<[f64; PROBE_BANDS]> = raw
        .iter()
        .map(|f| {
            let mut out = [0.0; PROBE_BANDS];
            for b in 0..PROBE_BANDS {
                out[b] = (f[b] - mean[b]) / scale[b];
            }
            out
        })
        .collect();

    let mut rng = rng_from_seed(seed);
    let mut w = [0.0; PROBE_BANDS + 1];
    w.iter_mut().for_each(|v| *v = normal(&mut rng, 0.0, 0.01));
    for _ in 0..training.epochs {
        let mut grad = [0.0; PROBE_BANDS + 1];
        for (x, (_, label)) in z.iter().zip(samples) {
            let logit = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[PROBE_BANDS];
            let residual = 1.0 / (1.0 + (-logit).exp()) - if *label { 1.0 } else { 0.0 };
            for b in 0..PROBE_BANDS {
                grad[b] += residual * x[b];
            }
            grad[PROBE_BANDS] += residual;
        }
        for (wi, g) in w.iter_mut().zip(&grad) {
            *wi -= training.learning_rate * g / n;
        }
    }
    Ok(ProbeModel {
        weights: w,
        feature_mean: mean,
        feature_scale: scale,
        training: *training,
        seed,
    })
}

pub fn evaluate_auc(model: &ProbeModel, test: &[([f64; PROBE_BANDS], bool)]) -> Result<f64> {
    let scores: Vec<f64> = test.iter().map(|(f, _)| model.score(f)).collect();
    let labels: Vec<bool> = test.iter().map(|(_, l)| *l).collect();
    auc_rank(&scores, &labels)
}

/// Area under the ROC curve from the Mann-Whitney rank statistic; tied
/// scores share their average rank (a tie counts one half).
pub fn auc_rank(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    check_classes(labels.iter().copied(), "test set")?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("scores must not be NaN".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    Ok((rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}
