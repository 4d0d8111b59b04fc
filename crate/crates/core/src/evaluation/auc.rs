//! ROC AUC for attribution maps against binary ground-truth masks.
//!
//! The AUC is the Mann-Whitney statistic: the probability that a random
//! positive outscores a random negative, with ties counted as one half. It
//! equals the trapezoidal area under the ROC curve swept over every
//! distinct threshold. Ranks are kept doubled so the statistic is an exact
//! integer ratio.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::attribution::AttributionMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AucResult {
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    #[serde(skip)]
    pub curve: Vec<RocPoint>,
}

fn check(scores: &[f64], mask: &[bool]) -> Result<(usize, usize), EvalError> {
    if scores.len() != mask.len() {
        return Err(EvalError::LengthMismatch { scores: scores.len(), mask: mask.len() });
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(i));
    }
    let positives = mask.iter().filter(|&&m| m).count();
    let negatives = mask.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::DegenerateMask { positives, negatives });
    }
    Ok((positives, negatives))
}

fn descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// ROC points from the strictest threshold (nothing predicted positive) to
/// the loosest, one point per distinct score.
pub fn roc_curve(scores: &[f64], mask: &[bool]) -> Result<Vec<RocPoint>, EvalError> {
    let (pos, neg) = check(scores, mask)?;
    let order = descending(scores);
    let mut curve = vec![RocPoint { threshold: f64::INFINITY, tpr: 0.0, fpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if mask[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        curve.push(RocPoint { threshold, tpr: tp as f64 / pos as f64, fpr: fp as f64 / neg as f64 });
    }
    Ok(curve)
}

/// Rank-statistic AUC of `scores` against `mask` (true = positive).
pub fn auc_roc(scores: &[f64], mask: &[bool]) -> Result<AucResult, EvalError> {
    let (pos, neg) = check(scores, mask)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Tie group at sorted positions [i, j) shares the average 1-based rank
    // (i + 1 + j) / 2; summing the doubled rank keeps everything integral.
    let mut doubled_rank_sum: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let positives_in_group = order[i..j].iter().filter(|&&k| mask[k]).count() as u128;
        doubled_rank_sum += positives_in_group * (i + 1 + j) as u128;
        i = j;
    }
    let (p, n) = (pos as u128, neg as u128);
    let doubled_u = doubled_rank_sum - p * (p + 1);
    let auc = doubled_u as f64 / (2 * p * n) as f64;
    Ok(AucResult { auc, n_pos: pos, n_neg: neg, curve: roc_curve(scores, mask)? })
}

/// AUC of a map's per-pixel saliency (channel attributions summed).
pub fn auc_roc_map(map: &AttributionMap, mask: &[bool]) -> Result<AucResult, EvalError> {
    auc_roc(&map.pixel_saliency(), mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_inverted_rankings() {
        let mask = [true, false, true, false];
        assert_eq!(auc_roc(&[0.9, 0.4, 0.6, 0.1], &mask).unwrap().auc, 1.0);
        assert_eq!(auc_roc(&[0.4, 0.9, 0.1, 0.6], &mask).unwrap().auc, 0.0);
    }

    #[test]
    fn all_ties_is_one_half() {
        let r = auc_roc(&[0.3; 5], &[true, false, false, true, false]).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!((r.n_pos, r.n_neg), (2, 3));
        assert_eq!(r.curve.len(), 2);
    }

    #[test]
    fn curve_is_monotone_and_ends_at_one() {
        let r = auc_roc(&[0.1, 0.5, 0.5, 0.9, 0.2, 0.7], &[false, true, false, true, false, true]).unwrap();
        for w in r.curve.windows(2) {
            assert!(w[1].tpr >= w[0].tpr && w[1].fpr >= w[0].fpr);
        }
        let last = r.curve.last().unwrap();
        assert_eq!((last.tpr, last.fpr), (1.0, 1.0));
        // pairs: (0.5,0.9,0.7) vs (0.1,0.5,0.2): 8 wins + 1 tie of 9
        assert_eq!(r.auc, 8.5 / 9.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            auc_roc(&[0.1, 0.2], &[true, true]),
            Err(EvalError::DegenerateMask { positives: 2, negatives: 0 })
        ));
        assert!(matches!(auc_roc(&[0.1], &[true, false]), Err(EvalError::LengthMismatch { .. })));
        assert!(matches!(auc_roc(&[0.1, f64::NAN], &[true, false]), Err(EvalError::NonFiniteScore(1))));
    }
}
