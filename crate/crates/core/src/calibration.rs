//! Per-group binned reliability curves and scalar miscalibration metrics.
//!
//! Audits always compare scores against the true outcome field, whatever
//! label the model was trained on; that is what makes the label-bias
//! experiment observable. Bin assignment sorts on (score, label) pairs, so
//! curves are invariant to person ordering even in the presence of ties.

use crate::error::{Error, Result};
use crate::population::{Dataset, Group};
use crate::riskmodel::{predict_all, FittedModel};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Bin layout for reliability curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Binning {
    /// Fixed-width bins over the score range [0, 1]; empty bins are dropped.
    EqualWidth { bins: usize },
    /// Equal-count bins per group; requires at least `bins` scored persons
    /// in every group.
    Quantile { bins: usize },
}

impl Binning {
    pub fn bins(&self) -> usize {
        match self {
            Binning::EqualWidth { bins } | Binning::Quantile { bins } => *bins,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.bins() == 0 {
            return Err(Error::InvalidArgument("bin count must be ≥ 1".into()));
        }
        Ok(())
    }
}

impl Default for Binning {
    fn default() -> Self {
        Binning::Quantile { bins: 10 }
    }
}

/// One reliability-curve point: mean score, observed outcome rate, and the
/// number of persons in the bin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mean_predicted: f64,
    pub observed_rate: f64,
    pub count: usize,
}

/// Per-group binned (predicted, observed) reliability curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub group: Group,
    pub points: Vec<CurvePoint>,
    pub binning: Binning,
}

impl CalibrationCurve {
    pub fn total_count(&self) -> usize {
        self.points.iter().map(|p| p.count).sum()
    }
}

/// Bin scores per group and return one reliability curve per group.
pub fn calibration_curve(
    scores: &[f64],
    labels: &[bool],
    groups: &[Group],
    binning: Binning,
) -> Result<BTreeMap<Group, CalibrationCurve>> {
    binning.validate()?;
    if scores.len() != labels.len() || scores.len() != groups.len() {
        return Err(Error::LengthMismatch(format!(
            "scores={}, labels={}, groups={}",
            scores.len(),
            labels.len(),
            groups.len()
        )));
    }

    let mut per_group: BTreeMap<&Group, Vec<(f64, bool)>> = BTreeMap::new();
    for ((s, l), g) in scores.iter().zip(labels).zip(groups) {
        per_group.entry(g).or_default().push((*s, *l));
    }

    let point_of = |chunk: &[(f64, bool)]| CurvePoint {
        mean_predicted: chunk.iter().map(|(s, _)| s).sum::<f64>() / chunk.len() as f64,
        observed_rate: chunk.iter().filter(|(_, l)| *l).count() as f64 / chunk.len() as f64,
        count: chunk.len(),
    };

    let mut curves = BTreeMap::new();
    for (group, mut pairs) in per_group {
        // canonical (score, label) order: bin contents and accumulation
        // order are identical under any input permutation
        pairs.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("scores are not NaN")
                .then(a.1.cmp(&b.1))
        });
        let bins = binning.bins();
        let points = match binning {
            Binning::EqualWidth { .. } => {
                let bin_of = |s: f64| ((s * bins as f64) as usize).min(bins - 1);
                let mut points = Vec::new();
                let mut lo = 0;
                while lo < pairs.len() {
                    let b = bin_of(pairs[lo].0);
                    let hi = lo + pairs[lo..].iter().take_while(|(s, _)| bin_of(*s) == b).count();
                    points.push(point_of(&pairs[lo..hi]));
                    lo = hi;
                }
                points
            }
            Binning::Quantile { .. } => {
                if pairs.len() < bins {
                    return Err(Error::GroupData {
                        group: group.as_str().to_string(),
                        message: format!(
                            "{} scored persons cannot fill {bins} quantile bins",
                            pairs.len()
                        ),
                    });
                }
                let n = pairs.len();
                (0..bins)
                    .map(|b| point_of(&pairs[b * n / bins..(b + 1) * n / bins]))
                    .collect()
            }
        };
        debug_assert!(points
            .windows(2)
            .all(|w| w[0].mean_predicted <= w[1].mean_predicted));
        curves.insert(
            group.clone(),
            CalibrationCurve {
                group: group.clone(),
                points,
                binning,
            },
        );
    }
    Ok(curves)
}

/// Count-weighted mean absolute gap |mean_predicted − observed_rate|.
pub fn expected_calibration_error(curve: &CalibrationCurve) -> Result<f64> {
    let total = curve.total_count();
    if total == 0 {
        return Err(Error::GroupData {
            group: curve.group.as_str().to_string(),
            message: "calibration curve has no points".into(),
        });
    }
    Ok(curve
        .points
        .iter()
        .map(|p| p.count as f64 * (p.mean_predicted - p.observed_rate).abs())
        .sum::<f64>()
        / total as f64)
}

/// Count-weighted mean signed gap (observed_rate − mean_predicted).
/// Positive means the model under-predicts the group.
pub fn signed_gap(curve: &CalibrationCurve) -> Result<f64> {
    let total = curve.total_count();
    if total == 0 {
        return Err(Error::GroupData {
            group: curve.group.as_str().to_string(),
            message: "calibration curve has no points".into(),
        });
    }
    Ok(curve
        .points
        .iter()
        .map(|p| p.count as f64 * (p.observed_rate - p.mean_predicted))
        .sum::<f64>()
        / total as f64)
}

/// Score a dataset with `model` and audit against the true outcome field.
pub fn audit_model(
    model: &FittedModel,
    data: &Dataset,
    binning: Binning,
) -> Result<BTreeMap<Group, CalibrationCurve>> {
    let scores = predict_all(model, data)?;
    calibration_curve(&scores, &data.true_labels(), &data.group_column(), binning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_group(n: usize) -> Vec<Group> {
        vec![Group::new("White"); n]
    }

    #[test]
    fn constant_scores_single_bin() {
        let scores = vec![0.3; 10];
        let labels: Vec<bool> = (0..10).map(|i| i < 3).collect();
        let curves =
            calibration_curve(&scores, &labels, &one_group(10), Binning::Quantile { bins: 1 })
                .unwrap();
        let c = &curves[&Group::new("White")];
        assert_eq!(c.points.len(), 1);
        assert!((c.points[0].mean_predicted - 0.3).abs() < 1e-15);
        assert!((c.points[0].observed_rate - 0.3).abs() < 1e-15);
        assert_eq!(c.points[0].count, 10);
    }

    #[test]
    fn perfect_scores_sit_on_diagonal() {
        let labels: Vec<bool> = (0..40).map(|i| i % 3 == 0).collect();
        let scores: Vec<f64> = labels.iter().map(|l| f64::from(*l)).collect();
        for binning in [Binning::EqualWidth { bins: 4 }, Binning::Quantile { bins: 4 }] {
            let curves = calibration_curve(&scores, &labels, &one_group(40), binning).unwrap();
            for p in &curves[&Group::new("White")].points {
                assert_eq!(p.mean_predicted, p.observed_rate);
            }
        }
    }

    #[test]
    fn handcrafted_two_bin_case() {
        // scores sorted: bin 1 = {0.05, 0.15, 0.35, 0.45} with 2 positives,
        // bin 2 = {0.55, 0.65, 0.85, 0.95} with 3 positives
        let scores = vec![0.45, 0.05, 0.95, 0.15, 0.55, 0.35, 0.65, 0.85];
        let labels = vec![false, true, false, true, true, false, true, true];
        let curves =
            calibration_curve(&scores, &labels, &one_group(8), Binning::Quantile { bins: 2 })
                .unwrap();
        let pts = &curves[&Group::new("White")].points;
        assert_eq!(pts.len(), 2);
        assert!((pts[0].mean_predicted - 0.25).abs() < 1e-15);
        assert!((pts[0].observed_rate - 0.5).abs() < 1e-15);
        assert_eq!(pts[0].count, 4);
        assert!((pts[1].mean_predicted - 0.75).abs() < 1e-15);
        assert!((pts[1].observed_rate - 0.75).abs() < 1e-15);
        assert_eq!(pts[1].count, 4);
    }

    #[test]
    fn ece_examples() {
        let mk = |points: Vec<CurvePoint>| CalibrationCurve {
            group: Group::new("White"),
            points,
            binning: Binning::Quantile { bins: 2 },
        };
        let perfect = mk(vec![
            CurvePoint { mean_predicted: 0.2, observed_rate: 0.2, count: 5 },
            CurvePoint { mean_predicted: 0.6, observed_rate: 0.6, count: 5 },
        ]);
        assert_eq!(expected_calibration_error(&perfect).unwrap(), 0.0);

        let single = mk(vec![CurvePoint { mean_predicted: 0.2, observed_rate: 0.5, count: 9 }]);
        assert!((expected_calibration_error(&single).unwrap() - 0.3).abs() < 1e-15);

        let two = mk(vec![
            CurvePoint { mean_predicted: 0.1, observed_rate: 0.2, count: 100 },
            CurvePoint { mean_predicted: 0.3, observed_rate: 0.3, count: 300 },
        ]);
        assert!((expected_calibration_error(&two).unwrap() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn signed_gap_examples() {
        let mk = |points: Vec<CurvePoint>| CalibrationCurve {
            group: Group::new("White"),
            points,
            binning: Binning::Quantile { bins: 2 },
        };
        let perfect = mk(vec![CurvePoint { mean_predicted: 0.4, observed_rate: 0.4, count: 7 }]);
        assert_eq!(signed_gap(&perfect).unwrap(), 0.0);

        let over = mk(vec![
            CurvePoint { mean_predicted: 0.25, observed_rate: 0.20, count: 10 },
            CurvePoint { mean_predicted: 0.65, observed_rate: 0.60, count: 10 },
        ]);
        assert!((signed_gap(&over).unwrap() - (-0.05)).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_errors() {
        let err = calibration_curve(
            &[0.5, 0.5],
            &[true],
            &one_group(2),
            Binning::Quantile { bins: 1 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::LengthMismatch(_)));
    }

    #[test]
    fn quantile_mode_rejects_small_group_by_name() {
        let scores = vec![0.1, 0.2, 0.3];
        let labels = vec![false, false, true];
        let mut groups = one_group(2);
        groups.push(Group::new("Asian"));
        let err =
            calibration_curve(&scores, &labels, &groups, Binning::Quantile { bins: 2 }).unwrap_err();
        match err {
            Error::GroupData { group, .. } => assert_eq!(group, "Asian"),
            other => panic!("expected GroupData error, got {other:?}"),
        }
    }

    #[test]
    fn empty_equal_width_bins_are_dropped() {
        let scores = vec![0.05, 0.06, 0.95, 0.96];
        let labels = vec![false, false, true, true];
        let curves = calibration_curve(
            &scores,
            &labels,
            &one_group(4),
            Binning::EqualWidth { bins: 10 },
        )
        .unwrap();
        let c = &curves[&Group::new("White")];
        assert_eq!(c.points.len(), 2);
        assert_eq!(c.total_count(), 4);
    }

    #[test]
    fn counts_cover_group_and_points_sorted() {
        let scores: Vec<f64> = (0..97).map(|i| (i as f64 * 37.0 % 97.0) / 97.0).collect();
        let labels: Vec<bool> = (0..97).map(|i| i % 4 == 0).collect();
        let curves = calibration_curve(
            &scores,
            &labels,
            &one_group(97),
            Binning::Quantile { bins: 10 },
        )
        .unwrap();
        let c = &curves[&Group::new("White")];
        assert_eq!(c.total_count(), 97);
        assert!(c
            .points
            .windows(2)
            .all(|w| w[0].mean_predicted <= w[1].mean_predicted));
    }

    proptest! {
        #[test]
        fn permutation_invariance(
            raw in proptest::collection::vec((0u32..=1000, any::<bool>(), 0usize..3), 12..80),
            seed in any::<u64>(),
        ) {
            let scores: Vec<f64> = raw.iter().map(|(s, _, _)| *s as f64 / 1000.0).collect();
            let labels: Vec<bool> = raw.iter().map(|(_, l, _)| *l).collect();
            let names = ["Asian", "Black", "White"];
            let groups: Vec<Group> = raw.iter().map(|(_, _, g)| Group::new(names[*g])).collect();

            // deterministic shuffle of the triples
            let mut idx: Vec<usize> = (0..raw.len()).collect();
            let mut state = seed | 1;
            for i in (1..idx.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (state >> 33) as usize % (i + 1));
            }
            let s2: Vec<f64> = idx.iter().map(|&i| scores[i]).collect();
            let l2: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
            let g2: Vec<Group> = idx.iter().map(|&i| groups[i].clone()).collect();

            for binning in [Binning::EqualWidth { bins: 4 }, Binning::Quantile { bins: 3 }] {
                let a = calibration_curve(&scores, &labels, &groups, binning);
                let b = calibration_curve(&s2, &l2, &g2, binning);
                match (a, b) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "one order failed: {:?} vs {:?}", a.is_ok(), b.is_ok()),
                }
            }
        }
    }
}
