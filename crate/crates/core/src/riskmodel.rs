//! Logistic risk models under configurable feature sets (group-blind vs.
//! group-aware) and label kinds (true outcome vs. doctor-diagnosis proxy).
//!
//! Fitting maximizes the ridge-penalized Bernoulli log-likelihood by damped
//! Newton iteration: the step is halved until the objective does not
//! decrease, so the objective is non-decreasing across iterations by
//! construction. Age and BMI enter through fixed standardizations
//! ((age−45)/10, (bmi−27)/5), never data-dependent moments, so models are
//! comparable across datasets.

use crate::error::{Error, Result};
use crate::population::{sigmoid, standardize_age, standardize_bmi, Dataset, Group, Person};
use crate::rng::id_stream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Ridge penalty applied to non-intercept coefficients by default.
pub const DEFAULT_RIDGE: f64 = 1e-6;
/// Convergence threshold on the gradient max-norm (per-observation scale).
pub const GRADIENT_TOL: f64 = 1e-8;
/// Newton iteration cap.
pub const MAX_ITERATIONS: usize = 100;
/// Coefficients past this magnitude (in logit units) mean the likelihood is
/// saturating along a separation direction; the convergence claim is
/// withheld and the iteration cap guards the fit.
const DIVERGENCE_BOUND: f64 = 15.0;

/// One-hot group encoding: indicators for every label in `order` except
/// `reference`, in the declared order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupEncoding {
    pub order: Vec<Group>,
    pub reference: Group,
}

impl GroupEncoding {
    pub fn new(order: Vec<Group>, reference: Group) -> Result<Self> {
        if !order.contains(&reference) {
            return Err(Error::Config(format!(
                "reference group `{reference}` not among declared groups"
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !order.iter().all(|g| seen.insert(g)) {
            return Err(Error::Config("duplicate group labels in encoding".into()));
        }
        Ok(GroupEncoding { order, reference })
    }

    /// Encoded (non-reference) groups, in order.
    pub fn indicator_groups(&self) -> impl Iterator<Item = &Group> {
        self.order.iter().filter(move |g| **g != self.reference)
    }
}

/// Which covariates the model sees. `group_encoding: None` is a blind model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub use_age: bool,
    pub use_bmi: bool,
    pub group_encoding: Option<GroupEncoding>,
}

impl FeatureSet {
    /// Age + BMI, no group indicators.
    pub fn blind() -> Self {
        FeatureSet {
            use_age: true,
            use_bmi: true,
            group_encoding: None,
        }
    }

    /// Age + BMI + one-hot group indicators against `reference`.
    pub fn aware(order: Vec<Group>, reference: Group) -> Result<Self> {
        Ok(FeatureSet {
            use_age: true,
            use_bmi: true,
            group_encoding: Some(GroupEncoding::new(order, reference)?),
        })
    }

    pub fn intercept_only() -> Self {
        FeatureSet {
            use_age: false,
            use_bmi: false,
            group_encoding: None,
        }
    }

    pub fn use_group(&self) -> bool {
        self.group_encoding.is_some()
    }

    /// Coefficient count including the intercept.
    pub fn width(&self) -> usize {
        1 + usize::from(self.use_age)
            + usize::from(self.use_bmi)
            + self
                .group_encoding
                .as_ref()
                .map_or(0, |e| e.order.len() - 1)
    }

    /// Design row for one person, intercept first.
    pub fn encode(&self, person: &Person) -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(self.width());
        row.push(1.0);
        if self.use_age {
            row.push(standardize_age(person.age));
        }
        if self.use_bmi {
            row.push(standardize_bmi(person.bmi));
        }
        if let Some(enc) = &self.group_encoding {
            if !enc.order.contains(&person.group) {
                return Err(Error::UnknownGroup(person.group.as_str().to_string()));
            }
            for g in enc.indicator_groups() {
                row.push(f64::from(person.group == *g));
            }
        }
        Ok(row)
    }
}

/// Training label: the true outcome (blood test or doctor diagnosis) or the
/// doctor-diagnosis proxy alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelKind {
    #[serde(rename = "true")]
    TrueLabel,
    #[serde(rename = "proxy")]
    ProxyLabel,
}

impl LabelKind {
    pub fn of(self, person: &Person) -> bool {
        match self {
            LabelKind::TrueLabel => person.diabetes,
            LabelKind::ProxyLabel => person.doctor_diagnosis,
        }
    }
}

/// A fitted logistic model; coefficients in logit units, intercept first,
/// then age, BMI, and group indicators in encoding order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub feature_set: FeatureSet,
    pub label_kind: LabelKind,
    pub coefficients: Vec<f64>,
    pub ridge_penalty: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FittedModel {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("model serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: FittedModel = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if model.coefficients.len() != model.feature_set.width() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!(
                    "coefficient vector length {} does not match feature set width {}",
                    model.coefficients.len(),
                    model.feature_set.width()
                ),
            });
        }
        Ok(model)
    }
}

/// Row-major design matrix with 0/1 labels.
pub struct Design {
    pub rows: Vec<f64>,
    pub n: usize,
    pub k: usize,
    pub labels: Vec<f64>,
}

pub fn build_design(data: &Dataset, fs: &FeatureSet, lk: LabelKind) -> Result<Design> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = fs.width();
    let mut rows = Vec::with_capacity(data.len() * k);
    let mut labels = Vec::with_capacity(data.len());
    for p in &data.persons {
        rows.extend_from_slice(&fs.encode(p)?);
        labels.push(f64::from(lk.of(p)));
    }
    Ok(Design {
        rows,
        n: data.len(),
        k,
        labels,
    })
}

/// log(1 + e^z), stable for large |z|.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Ridge-penalized Bernoulli log-likelihood (penalty on non-intercept
/// coefficients only), per observation so tolerances are sample-size free.
/// Compensated summation keeps the value accurate enough for central
/// finite differences against the analytic gradient.
pub fn penalized_objective(d: &Design, beta: &[f64], ridge: f64) -> f64 {
    assert_eq!(beta.len(), d.k);
    let mut ll = 0.0;
    let mut carry = 0.0;
    for (i, &y) in d.labels.iter().enumerate() {
        let row = &d.rows[i * d.k..(i + 1) * d.k];
        let z: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
        let term = -if y > 0.5 { softplus(-z) } else { softplus(z) } - carry;
        let next = ll + term;
        carry = (next - ll) - term;
        ll = next;
    }
    ll / d.n as f64 - 0.5 * ridge * beta[1..].iter().map(|b| b * b).sum::<f64>()
}

/// Gradient of [`penalized_objective`] at `beta`.
pub fn penalized_gradient(d: &Design, beta: &[f64], ridge: f64) -> Vec<f64> {
    assert_eq!(beta.len(), d.k);
    let mut grad = vec![0.0; d.k];
    for (i, &y) in d.labels.iter().enumerate() {
        let row = &d.rows[i * d.k..(i + 1) * d.k];
        let z: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
        let resid = y - sigmoid(z);
        for (g, x) in grad.iter_mut().zip(row) {
            *g += resid * x;
        }
    }
    for g in grad.iter_mut() {
        *g /= d.n as f64;
    }
    for j in 1..d.k {
        grad[j] -= ridge * beta[j];
    }
    grad
}

/// (X^T W X)/n + ridge·diag(0,1,…,1), packed row-major k×k.
fn penalized_curvature(d: &Design, beta: &[f64], ridge: f64) -> Vec<f64> {
    let k = d.k;
    let mut h = vec![0.0; k * k];
    for i in 0..d.n {
        let row = &d.rows[i * k..(i + 1) * k];
        let z: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
        let p = sigmoid(z);
        let w = p * (1.0 - p);
        for r in 0..k {
            let wr = w * row[r];
            for c in r..k {
                h[r * k + c] += wr * row[c];
            }
        }
    }
    for v in h.iter_mut() {
        *v /= d.n as f64;
    }
    for r in 0..k {
        for c in 0..r {
            h[r * k + c] = h[c * k + r];
        }
    }
    for j in 1..k {
        h[j * k + j] += ridge;
    }
    h
}

/// Cholesky solve of a symmetric positive-definite k×k system.
fn solve_spd(mut a: Vec<f64>, k: usize, b: &[f64]) -> Option<Vec<f64>> {
    // in-place lower Cholesky
    for r in 0..k {
        for c in 0..=r {
            let mut sum = a[r * k + c];
            for j in 0..c {
                sum -= a[r * k + j] * a[c * k + j];
            }
            if r == c {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                a[r * k + c] = sum.sqrt();
            } else {
                a[r * k + c] = sum / a[c * k + c];
            }
        }
    }
    let mut x = b.to_vec();
    for r in 0..k {
        for j in 0..r {
            x[r] -= a[r * k + j] * x[j];
        }
        x[r] /= a[r * k + r];
    }
    for r in (0..k).rev() {
        for j in r + 1..k {
            x[r] -= a[j * k + r] * x[j];
        }
        x[r] /= a[r * k + r];
    }
    Some(x)
}

/// Fit with the default ridge penalty.
pub fn fit_logistic(data: &Dataset, fs: &FeatureSet, lk: LabelKind) -> Result<FittedModel> {
    fit_logistic_ridge(data, fs, lk, DEFAULT_RIDGE)
}

/// Damped-Newton fit of the ridge-penalized logistic likelihood.
///
/// Converged means the gradient max-norm fell to [`GRADIENT_TOL`]; hitting
/// the iteration cap reports `converged: false` rather than erroring, so
/// quasi-separable fits surface as diagnostics instead of failures.
pub fn fit_logistic_ridge(
    data: &Dataset,
    fs: &FeatureSet,
    lk: LabelKind,
    ridge: f64,
) -> Result<FittedModel> {
    if ridge < 0.0 || !ridge.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ridge penalty must be nonnegative, got {ridge}"
        )));
    }
    let d = build_design(data, fs, lk)?;
    let k = d.k;
    let mut beta = vec![0.0; k];
    let mut obj = penalized_objective(&d, &beta, ridge);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        let grad = penalized_gradient(&d, &beta, ridge);
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let saturated = beta.iter().any(|b| b.abs() > DIVERGENCE_BOUND);
        if gmax <= GRADIENT_TOL && !saturated {
            converged = true;
            break;
        }
        iterations += 1;

        let mut curvature = penalized_curvature(&d, &beta, ridge);
        let mut direction = None;
        let mut jitter = 0.0;
        for _ in 0..8 {
            if let Some(step) = solve_spd(curvature.clone(), k, &grad) {
                direction = Some(step);
                break;
            }
            let scale = (0..k).map(|j| curvature[j * k + j]).fold(0.0f64, f64::max);
            jitter = if jitter == 0.0 { 1e-12 * (1.0 + scale) } else { jitter * 100.0 };
            for j in 0..k {
                curvature[j * k + j] += jitter;
            }
        }
        let Some(direction) = direction else {
            break; // hopeless curvature; report non-convergence below
        };

        // halve the step until the objective is non-decreasing
        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..60 {
            let candidate: Vec<f64> = beta
                .iter()
                .zip(&direction)
                .map(|(b, s)| b + scale * s)
                .collect();
            let cand_obj = penalized_objective(&d, &candidate, ridge);
            if cand_obj >= obj && cand_obj.is_finite() {
                assert!(cand_obj >= obj, "damped step must not decrease the objective");
                beta = candidate;
                obj = cand_obj;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break; // no ascent possible at floating precision
        }
    }

    Ok(FittedModel {
        feature_set: fs.clone(),
        label_kind: lk,
        coefficients: beta,
        ridge_penalty: ridge,
        converged,
        iterations,
    })
}

/// Score one person: sigmoid of the linear predictor.
pub fn predict(model: &FittedModel, person: &Person) -> Result<f64> {
    let row = model.feature_set.encode(person)?;
    let z: f64 = row.iter().zip(&model.coefficients).map(|(x, b)| x * b).sum();
    Ok(sigmoid(z))
}

/// Score every person in the dataset, in order.
pub fn predict_all(model: &FittedModel, data: &Dataset) -> Result<Vec<f64>> {
    data.persons.iter().map(|p| predict(model, p)).collect()
}

/// Re-draw the proxy label: doctor_diagnosis = diabetes · Bernoulli(d_g).
/// The true outcome field is untouched; draws are deterministic in `seed`
/// via per-person substreams.
pub fn apply_proxy_labels(
    data: &Dataset,
    detection_probs: &BTreeMap<Group, f64>,
    seed: u64,
) -> Result<Dataset> {
    for (g, d) in detection_probs {
        if !(0.0..=1.0).contains(d) {
            return Err(Error::Config(format!(
                "detection probability for `{g}` must lie in [0, 1], got {d}"
            )));
        }
    }
    let mut out = data.clone();
    for p in &mut out.persons {
        let d = detection_probs
            .get(&p.group)
            .ok_or_else(|| Error::UnknownGroup(p.group.as_str().to_string()))?;
        p.doctor_diagnosis = p.diabetes && id_stream(seed, p.id).random_bool(*d);
    }
    Ok(out)
}
