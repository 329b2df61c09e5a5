//! Screening policies and their group-level consequences.
//!
//! A policy maps each group to a score threshold; a person is screened iff
//! their score is at or above their group's threshold, so top-k and
//! threshold formulations coincide. Welfare uses the linear threshold
//! utility u = p − t* for screened persons (0 otherwise), the unique linear
//! utility (up to positive scale) whose optimal rule is "screen iff p > t*".

use crate::error::{Error, Result};
use crate::population::{Dataset, Group};
use crate::riskmodel::{predict_all, FittedModel};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sentinel threshold strictly above any probability score: screens nobody.
pub const SCREEN_NONE_THRESHOLD: f64 = 1.0 + f64::EPSILON;

/// Map from group to screening threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub thresholds: BTreeMap<Group, f64>,
    pub label: String,
}

impl Policy {
    pub fn new(label: impl Into<String>, thresholds: BTreeMap<Group, f64>) -> Result<Self> {
        for (g, t) in &thresholds {
            if !t.is_finite() || *t < 0.0 || *t > SCREEN_NONE_THRESHOLD {
                return Err(Error::InvalidArgument(format!(
                    "threshold for `{g}` must lie in [0, 1] (or the screen-none sentinel), got {t}"
                )));
            }
        }
        Ok(Policy {
            thresholds,
            label: label.into(),
        })
    }

    pub fn threshold(&self, group: &Group) -> Result<f64> {
        self.thresholds
            .get(group)
            .copied()
            .ok_or_else(|| Error::UnknownGroup(group.as_str().to_string()))
    }

    /// Screen iff score ≥ threshold(group); the boundary screens.
    pub fn screen(&self, score: f64, group: &Group) -> Result<bool> {
        Ok(score >= self.threshold(group)?)
    }
}

/// Single threshold for every group.
pub fn uniform_policy(t: f64, groups: &[Group]) -> Result<Policy> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "uniform threshold must lie in [0, 1], got {t}"
        )));
    }
    Policy::new(
        format!("uniform@{t}"),
        groups.iter().map(|g| (g.clone(), t)).collect(),
    )
}

fn check_aligned(scores: &[f64], groups: &[Group]) -> Result<()> {
    if scores.len() != groups.len() {
        return Err(Error::LengthMismatch(format!(
            "scores={}, groups={}",
            scores.len(),
            groups.len()
        )));
    }
    if scores.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

/// Equalize decision rates: per group, screen the top round(rate·n_g)
/// scores. Ties at the threshold are all screened, so the realized rate can
/// exceed the target only under ties; the gap is visible in the metrics.
pub fn equalize_decision_rates(scores: &[f64], groups: &[Group], target_rate: f64) -> Result<Policy> {
    if !(0.0..=1.0).contains(&target_rate) {
        return Err(Error::InvalidArgument(format!(
            "target rate must lie in [0, 1], got {target_rate}"
        )));
    }
    check_aligned(scores, groups)?;

    let mut per_group: BTreeMap<&Group, Vec<(f64, usize)>> = BTreeMap::new();
    for (i, (s, g)) in scores.iter().zip(groups).enumerate() {
        per_group.entry(g).or_default().push((*s, i));
    }

    let mut thresholds = BTreeMap::new();
    for (group, mut members) in per_group {
        // descending by score, ties stable by person index
        members.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("scores are not NaN").then(a.1.cmp(&b.1)));
        let k = (target_rate * members.len() as f64).round() as usize;
        let t = if k == 0 {
            SCREEN_NONE_THRESHOLD
        } else {
            members[k - 1].0
        };
        thresholds.insert(group.clone(), t);
    }
    Policy::new(format!("equal-rate@{target_rate}"), thresholds)
}

/// Equalize false negative rates: per group with n_pos true positives, let
/// m = floor(target_fnr·n_pos) and set the threshold to the (m+1)-th
/// smallest positive score, so exactly m positives fall strictly below
/// (fewer under ties) and the realized FNR is m/n_pos ≤ target.
pub fn equalize_fnr(
    scores: &[f64],
    true_labels: &[bool],
    groups: &[Group],
    target_fnr: f64,
) -> Result<Policy> {
    if !(0.0..1.0).contains(&target_fnr) {
        return Err(Error::InvalidArgument(format!(
            "target FNR must lie in [0, 1), got {target_fnr}"
        )));
    }
    check_aligned(scores, groups)?;
    if true_labels.len() != scores.len() {
        return Err(Error::LengthMismatch(format!(
            "scores={}, labels={}",
            scores.len(),
            true_labels.len()
        )));
    }

    let mut positives: BTreeMap<&Group, Vec<f64>> = BTreeMap::new();
    let mut all_groups: BTreeMap<&Group, ()> = BTreeMap::new();
    for ((s, l), g) in scores.iter().zip(true_labels).zip(groups) {
        all_groups.entry(g).or_default();
        if *l {
            positives.entry(g).or_default().push(*s);
        }
    }

    let mut thresholds = BTreeMap::new();
    for (group, _) in all_groups {
        let Some(pos) = positives.get_mut(group) else {
            return Err(Error::GroupData {
                group: group.as_str().to_string(),
                message: "no true positives; false negative rate is undefined".into(),
            });
        };
        pos.sort_by(|a, b| a.partial_cmp(b).expect("scores are not NaN"));
        let m = (target_fnr * pos.len() as f64).floor() as usize;
        thresholds.insert(group.clone(), pos[m]);
    }
    Policy::new(format!("equal-fnr@{target_fnr}"), thresholds)
}

/// Per-group decision and error rates under a policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPolicyMetrics {
    pub threshold: f64,
    pub n: usize,
    pub n_positive: usize,
    pub screened_count: usize,
    /// Screened fraction of the group.
    pub decision_rate: f64,
    /// Unscreened fraction among true positives (0 if the group has none).
    pub fnr: f64,
    /// Screened fraction among true negatives (0 if the group has none).
    pub fpr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyMetrics {
    pub per_group: BTreeMap<Group, GroupPolicyMetrics>,
    /// Overall welfare under the threshold utility; filled by callers that
    /// know the appropriate risk source.
    pub welfare: Option<f64>,
}

pub fn evaluate_policy(
    policy: &Policy,
    scores: &[f64],
    true_labels: &[bool],
    groups: &[Group],
) -> Result<PolicyMetrics> {
    check_aligned(scores, groups)?;
    if true_labels.len() != scores.len() {
        return Err(Error::LengthMismatch(format!(
            "scores={}, labels={}",
            scores.len(),
            true_labels.len()
        )));
    }

    struct Tally {
        n: usize,
        n_pos: usize,
        screened: usize,
        missed_pos: usize,
        screened_neg: usize,
    }
    let mut tallies: BTreeMap<&Group, Tally> = BTreeMap::new();
    for ((s, l), g) in scores.iter().zip(true_labels).zip(groups) {
        let screened = policy.screen(*s, g)?;
        let t = tallies.entry(g).or_insert(Tally {
            n: 0,
            n_pos: 0,
            screened: 0,
            missed_pos: 0,
            screened_neg: 0,
        });
        t.n += 1;
        t.n_pos += usize::from(*l);
        t.screened += usize::from(screened);
        t.missed_pos += usize::from(*l && !screened);
        t.screened_neg += usize::from(!*l && screened);
    }

    let per_group = tallies
        .into_iter()
        .map(|(g, t)| {
            let n_neg = t.n - t.n_pos;
            let metrics = GroupPolicyMetrics {
                threshold: policy.thresholds[g],
                n: t.n,
                n_positive: t.n_pos,
                screened_count: t.screened,
                decision_rate: t.screened as f64 / t.n as f64,
                fnr: if t.n_pos > 0 {
                    t.missed_pos as f64 / t.n_pos as f64
                } else {
                    0.0
                },
                fpr: if n_neg > 0 {
                    t.screened_neg as f64 / n_neg as f64
                } else {
                    0.0
                },
            };
            (g.clone(), metrics)
        })
        .collect();
    Ok(PolicyMetrics {
        per_group,
        welfare: None,
    })
}

/// Linear threshold utility: screening a person of risk p yields p − t*,
/// not screening yields 0. One unit is one certain case detected net of cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityModel {
    pub screening_threshold: f64,
}

impl UtilityModel {
    pub fn new(screening_threshold: f64) -> Result<Self> {
        if !(screening_threshold > 0.0 && screening_threshold < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "screening threshold must lie in (0, 1), got {screening_threshold}"
            )));
        }
        Ok(UtilityModel { screening_threshold })
    }
}

impl Default for UtilityModel {
    fn default() -> Self {
        UtilityModel {
            screening_threshold: 0.015,
        }
    }
}

/// Total welfare of a policy: decisions come from `scores` against the
/// policy thresholds; utilities are paid in `risks` (true generative risk
/// for synthetic data, model scores otherwise).
pub fn welfare(
    policy: &Policy,
    scores: &[f64],
    groups: &[Group],
    risks: &[f64],
    u: &UtilityModel,
) -> Result<f64> {
    check_aligned(scores, groups)?;
    if risks.len() != scores.len() {
        return Err(Error::LengthMismatch(format!(
            "scores={}, risks={}",
            scores.len(),
            risks.len()
        )));
    }
    let mut total = 0.0;
    for ((s, g), p) in scores.iter().zip(groups).zip(risks) {
        if policy.screen(*s, g)? {
            total += p - u.screening_threshold;
        }
    }
    Ok(total)
}

/// Disagreement between blind- and aware-model screening at t*, per group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindingCost {
    /// Fraction the blind model declines to screen although the aware model
    /// would screen them.
    pub under_screened_frac: f64,
    /// Fraction the blind model screens although the aware model would not.
    pub over_screened_frac: f64,
    /// Welfare of blind decisions minus welfare of aware decisions, both
    /// paid in aware scores (≤ 0: aware decisions are optimal for them).
    pub welfare_delta: f64,
}

/// Compare screening under the blind and aware models at the utility
/// threshold, group by group.
pub fn blinding_cost(
    blind: &FittedModel,
    aware: &FittedModel,
    data: &Dataset,
    u: &UtilityModel,
) -> Result<BTreeMap<Group, BlindingCost>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let blind_scores = predict_all(blind, data)?;
    let aware_scores = predict_all(aware, data)?;
    let t = u.screening_threshold;

    struct Tally {
        n: usize,
        under: usize,
        over: usize,
        delta: f64,
    }
    let mut tallies: BTreeMap<&Group, Tally> = BTreeMap::new();
    for (person, (bs, as_)) in data.persons.iter().zip(blind_scores.iter().zip(&aware_scores)) {
        let blind_decision = *bs >= t;
        let aware_decision = *as_ >= t;
        let tally = tallies.entry(&person.group).or_insert(Tally {
            n: 0,
            under: 0,
            over: 0,
            delta: 0.0,
        });
        tally.n += 1;
        match (blind_decision, aware_decision) {
            (false, true) => {
                tally.under += 1;
                tally.delta -= as_ - t; // foregone benefit
            }
            (true, false) => {
                tally.over += 1;
                tally.delta += as_ - t; // incurred net cost (negative term)
            }
            _ => {}
        }
    }

    Ok(tallies
        .into_iter()
        .map(|(g, t)| {
            (
                g.clone(),
                BlindingCost {
                    under_screened_frac: t.under as f64 / t.n as f64,
                    over_screened_frac: t.over as f64 / t.n as f64,
                    welfare_delta: t.delta,
                },
            )
        })
        .collect())
}
