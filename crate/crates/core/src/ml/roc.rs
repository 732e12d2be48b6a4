//! ROC curves and the rank-statistic AUC.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::average_ranks;
use crate::format::sig9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores `>= threshold` are called positive; the first point uses `+inf`.
    pub threshold: f64,
}

fn class_counts(scores: &[f64], y: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != y.len() {
        return Err(Error::LengthMismatch(scores.len(), y.len()));
    }
    let pos = y.iter().filter(|&&c| c == 1).count();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// Mann-Whitney AUC: probability that a random positive outscores a random
/// negative, ties counting one half.
pub fn auc(scores: &[f64], y: &[u8]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, y)?;
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(y).filter(|(_, &c)| c == 1).map(|(r, _)| r).sum();
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Threshold sweep over the unique scores in descending order, from `(0, 0)` to `(1, 1)`.
pub fn roc_curve(scores: &[f64], y: &[u8]) -> Result<Vec<RocPoint>> {
    let (pos, neg) = class_counts(scores, y)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: s,
        });
    }
    Ok(points)
}

/// `(auc, roc)` for one score set.
pub fn auc_roc(scores: &[f64], y: &[u8]) -> Result<(f64, Vec<RocPoint>)> {
    Ok((auc(scores, y)?, roc_curve(scores, y)?))
}

pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

pub fn write_roc_csv(path: impl AsRef<Path>, points: &[RocPoint]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["fpr", "tpr", "threshold"])?;
    for p in points {
        w.write_record([sig9(p.fpr), sig9(p.tpr), sig9(p.threshold)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
