//! Synthetic populations with group-dependent risk structure, and CSV
//! ingestion of user-supplied datasets in the same schema.
//!
//! The ground-truth generative model is single-index logistic in
//! standardized age and BMI with group-specific intercepts. Covariates are
//! drawn identically across groups (age uniform on [18, 70], BMI normal
//! around 27 truncated to [18.5, 50]); only intercepts, diagnosis-detection
//! probabilities, and travel-distance distributions differ by group.

use crate::error::{Error, Result};
use crate::rng::person_stream;
use rand::Rng;
use rand_distr::{Beta, Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const AGE_MIN: f64 = 18.0;
pub const AGE_MAX: f64 = 70.0;
pub const BMI_MIN: f64 = 18.5;
pub const BMI_MAX: f64 = 50.0;

/// Fixed standardization: one unit per decade of age, centered at 45.
pub fn standardize_age(age: f64) -> f64 {
    (age - 45.0) / 10.0
}

/// Fixed standardization: one unit per 5 kg/m², centered at 27.
pub fn standardize_bmi(bmi: f64) -> f64 {
    (bmi - 27.0) / 5.0
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Demographic group label. The canonical set is Asian, Black, Hispanic,
/// White, but any string label declared in a config is accepted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Group(String);

impl Group {
    pub fn new(label: impl Into<String>) -> Self {
        Group(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Group {
    fn from(s: &str) -> Self {
        Group(s.to_string())
    }
}

/// One individual.
#[derive(Clone, Debug, PartialEq)]
pub struct Person {
    pub id: u64,
    pub group: Group,
    /// Years, in [18, 70].
    pub age: f64,
    /// kg/m², in [18.5, 50].
    pub bmi: f64,
    /// True outcome (blood test or doctor diagnosis).
    pub diabetes: bool,
    /// Proxy outcome; strict under-record of `diabetes`.
    pub doctor_diagnosis: bool,
    /// Round-trip miles to the courthouse, ≥ 0.
    pub distance_miles: f64,
    /// Probability of appearing in court without a voucher, in [0, 1].
    pub appear_prob: f64,
}

impl Person {
    /// Field-level range checks; `Some((column, message))` on the first violation.
    fn violation(&self) -> Option<(&'static str, String)> {
        if !(AGE_MIN..=AGE_MAX).contains(&self.age) {
            return Some(("age", format!("{} outside [{AGE_MIN}, {AGE_MAX}]", self.age)));
        }
        if !(BMI_MIN..=BMI_MAX).contains(&self.bmi) {
            return Some(("bmi", format!("{} outside [{BMI_MIN}, {BMI_MAX}]", self.bmi)));
        }
        if self.doctor_diagnosis && !self.diabetes {
            return Some((
                "doctor_diagnosis",
                "doctor_diagnosis=1 requires diabetes=1".to_string(),
            ));
        }
        if !self.distance_miles.is_finite() || self.distance_miles < 0.0 {
            return Some(("distance_miles", format!("{} must be ≥ 0", self.distance_miles)));
        }
        if !(0.0..=1.0).contains(&self.appear_prob) {
            return Some(("appear_prob", format!("{} outside [0, 1]", self.appear_prob)));
        }
        None
    }
}

/// Generative model parameters. Serialized as a flat JSON object; the
/// per-group fields are maps keyed by group label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    /// Declared group labels, in encoding order.
    pub groups: Vec<Group>,
    /// Persons to draw per group.
    pub sizes: BTreeMap<Group, u64>,
    /// Group-specific risk intercepts β0_g, in logit units.
    pub risk_intercepts: BTreeMap<Group, f64>,
    /// Risk slope per standardized age unit.
    pub age_coefficient: f64,
    /// Risk slope per standardized BMI unit.
    pub bmi_coefficient: f64,
    /// P(doctor diagnosis | diabetes) per group.
    pub detection_probs: BTreeMap<Group, f64>,
    /// Log-normal location of round-trip miles per group.
    pub distance_log_means: BTreeMap<Group, f64>,
    /// Log-normal scale of round-trip miles per group.
    pub distance_log_sds: BTreeMap<Group, f64>,
    /// Beta shape α of the appearance probability.
    pub appear_alpha: f64,
    /// Beta shape β of the appearance probability.
    pub appear_beta: f64,
    pub seed: u64,
}

impl PopulationConfig {
    /// Four-group screening defaults: aggregate prevalence ≈ 10% and
    /// above-1.5% risk mass ordered Asian > Hispanic > Black > White
    /// (≈ 93 / 90 / 88 / 76%). Detection probabilities fall below White's
    /// for the other groups; Black distances sit above White's.
    pub fn screening_default() -> Self {
        let g = |s: &str| Group::new(s);
        let per_group = |a: f64, b: f64, h: f64, w: f64| {
            BTreeMap::from([
                (g("Asian"), a),
                (g("Black"), b),
                (g("Hispanic"), h),
                (g("White"), w),
            ])
        };
        PopulationConfig {
            groups: vec![g("Asian"), g("Black"), g("Hispanic"), g("White")],
            sizes: BTreeMap::from([
                (g("Asian"), 50_000),
                (g("Black"), 50_000),
                (g("Hispanic"), 50_000),
                (g("White"), 50_000),
            ]),
            risk_intercepts: per_group(-2.45, -2.78, -2.66, -3.33),
            age_coefficient: 0.55,
            bmi_coefficient: 0.95,
            detection_probs: per_group(0.8, 0.6, 0.7, 0.9),
            distance_log_means: per_group(1.1, 1.4, 1.2, 0.7),
            distance_log_sds: per_group(0.6, 0.6, 0.6, 0.6),
            appear_alpha: 3.5,
            appear_beta: 1.5,
            seed: 1,
        }
    }

    /// Two-group voucher defaults: 5,000 Black and 5,000 White persons with
    /// Black round-trip distances stochastically larger than White's.
    pub fn voucher_default() -> Self {
        let g = |s: &str| Group::new(s);
        PopulationConfig {
            groups: vec![g("Black"), g("White")],
            sizes: BTreeMap::from([(g("Black"), 5_000), (g("White"), 5_000)]),
            risk_intercepts: BTreeMap::from([(g("Black"), -2.78), (g("White"), -3.33)]),
            age_coefficient: 0.55,
            bmi_coefficient: 0.95,
            detection_probs: BTreeMap::from([(g("Black"), 0.6), (g("White"), 0.9)]),
            distance_log_means: BTreeMap::from([(g("Black"), 1.4), (g("White"), 0.7)]),
            distance_log_sds: BTreeMap::from([(g("Black"), 0.6), (g("White"), 0.6)]),
            appear_alpha: 3.5,
            appear_beta: 1.5,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::Config("no groups declared".into()));
        }
        let distinct: BTreeSet<_> = self.groups.iter().collect();
        if distinct.len() != self.groups.len() {
            return Err(Error::Config("duplicate group labels".into()));
        }
        for (name, map_groups) in [
            ("sizes", self.sizes.keys().collect::<BTreeSet<_>>()),
            ("risk_intercepts", self.risk_intercepts.keys().collect()),
            ("detection_probs", self.detection_probs.keys().collect()),
            ("distance_log_means", self.distance_log_means.keys().collect()),
            ("distance_log_sds", self.distance_log_sds.keys().collect()),
        ] {
            if map_groups != distinct {
                return Err(Error::Config(format!(
                    "`{name}` must be keyed by exactly the declared groups"
                )));
            }
        }
        for (g, b0) in &self.risk_intercepts {
            if !b0.is_finite() {
                return Err(Error::Config(format!("risk intercept for `{g}` not finite")));
            }
        }
        if !self.age_coefficient.is_finite() || !self.bmi_coefficient.is_finite() {
            return Err(Error::Config("risk coefficients must be finite".into()));
        }
        for (g, d) in &self.detection_probs {
            if !(0.0..=1.0).contains(d) {
                return Err(Error::Config(format!(
                    "detection probability for `{g}` must lie in [0, 1], got {d}"
                )));
            }
        }
        for (g, m) in &self.distance_log_means {
            if !m.is_finite() {
                return Err(Error::Config(format!("distance location for `{g}` not finite")));
            }
        }
        for (g, s) in &self.distance_log_sds {
            if !s.is_finite() || *s <= 0.0 {
                return Err(Error::Config(format!(
                    "distance scale for `{g}` must be positive, got {s}"
                )));
            }
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.appear_alpha) || !positive(self.appear_beta) {
            return Err(Error::Config("appear-prob Beta shapes must be positive".into()));
        }
        Ok(())
    }

    pub fn group_index(&self, group: &Group) -> Result<usize> {
        self.groups
            .iter()
            .position(|g| g == group)
            .ok_or_else(|| Error::UnknownGroup(group.as_str().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: PopulationConfig = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

impl Default for PopulationConfig {
    fn default() -> Self {
        Self::screening_default()
    }
}

/// Where a dataset came from; synthetic datasets retain the generating
/// config so downstream welfare accounting can use true risks.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Synthetic(Box<PopulationConfig>),
    Ingested(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub persons: Vec<Person>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    /// Distinct group labels, sorted.
    pub fn groups(&self) -> Vec<Group> {
        let set: BTreeSet<&Group> = self.persons.iter().map(|p| &p.group).collect();
        set.into_iter().cloned().collect()
    }

    /// Per-person group labels, aligned with `persons`.
    pub fn group_column(&self) -> Vec<Group> {
        self.persons.iter().map(|p| p.group.clone()).collect()
    }

    /// Per-person true labels.
    pub fn true_labels(&self) -> Vec<bool> {
        self.persons.iter().map(|p| p.diabetes).collect()
    }

    /// Generative risks, available only for synthetic datasets.
    pub fn true_risks(&self) -> Option<Vec<f64>> {
        match &self.provenance {
            Provenance::Synthetic(cfg) => Some(
                self.persons
                    .iter()
                    .map(|p| true_risk(cfg, &p.group, p.age, p.bmi).expect("groups validated"))
                    .collect(),
            ),
            Provenance::Ingested(_) => None,
        }
    }
}

/// Ground-truth risk: sigmoid(β0_g + β_age·(age−45)/10 + β_bmi·(bmi−27)/5).
pub fn true_risk(cfg: &PopulationConfig, group: &Group, age: f64, bmi: f64) -> Result<f64> {
    if !age.is_finite() || !bmi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "age and bmi must be finite, got age={age}, bmi={bmi}"
        )));
    }
    let b0 = cfg
        .risk_intercepts
        .get(group)
        .ok_or_else(|| Error::UnknownGroup(group.as_str().to_string()))?;
    Ok(sigmoid(
        b0 + cfg.age_coefficient * standardize_age(age) + cfg.bmi_coefficient * standardize_bmi(bmi),
    ))
}

/// Draw a full synthetic population. Pure function of the config: every
/// person is sampled from its own `(seed, group, index)` substream, so the
/// output is identical across runs, platforms, and iteration orders, and
/// resizing one group leaves every other group's draws untouched.
pub fn generate_population(cfg: &PopulationConfig) -> Result<Dataset> {
    cfg.validate()?;
    let total: u64 = cfg.groups.iter().map(|g| cfg.sizes[g]).sum();
    if total == 0 {
        return Err(Error::EmptyDataset);
    }

    let beta = Beta::new(cfg.appear_alpha, cfg.appear_beta)
        .map_err(|e| Error::Config(format!("appear-prob Beta: {e}")))?;
    let bmi_normal = Normal::new(27.0, 5.0).expect("valid normal");

    let mut persons = Vec::with_capacity(total as usize);
    let mut id = 0u64;
    for (g_idx, group) in cfg.groups.iter().enumerate() {
        let d = cfg.detection_probs[group];
        let lognormal = LogNormal::new(cfg.distance_log_means[group], cfg.distance_log_sds[group])
            .map_err(|e| Error::Config(format!("distance distribution for `{group}`: {e}")))?;
        for i in 0..cfg.sizes[group] {
            let mut rng = person_stream(cfg.seed, g_idx, i);
            let age = rng.random_range(AGE_MIN..=AGE_MAX);
            let bmi = loop {
                let v = bmi_normal.sample(&mut rng);
                if (BMI_MIN..=BMI_MAX).contains(&v) {
                    break v;
                }
            };
            let risk = true_risk(cfg, group, age, bmi)?;
            let diabetes = rng.random_bool(risk);
            let doctor_diagnosis = diabetes && rng.random_bool(d);
            let distance_miles = lognormal.sample(&mut rng);
            let appear_prob = beta.sample(&mut rng);
            persons.push(Person {
                id,
                group: group.clone(),
                age,
                bmi,
                diabetes,
                doctor_diagnosis,
                distance_miles,
                appear_prob,
            });
            id += 1;
        }
    }
    Ok(Dataset {
        persons,
        provenance: Provenance::Synthetic(Box::new(cfg.clone())),
    })
}

const CSV_HEADER: [&str; 8] = [
    "id",
    "group",
    "age",
    "bmi",
    "diabetes",
    "doctor_diagnosis",
    "distance_miles",
    "appear_prob",
];

/// Write `persons.csv`: binary fields as 0/1, reals as shortest
/// round-tripping decimal literals.
pub fn write_dataset(data: &Dataset, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    write_dataset_to(data, &mut out)?;
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_dataset_to(data: &Dataset, out: &mut Vec<u8>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).expect("in-memory write");
    for p in &data.persons {
        w.write_record([
            p.id.to_string(),
            p.group.as_str().to_string(),
            p.age.to_string(),
            p.bmi.to_string(),
            u8::from(p.diabetes).to_string(),
            u8::from(p.doctor_diagnosis).to_string(),
            p.distance_miles.to_string(),
            p.appear_prob.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory write").flush().ok();
    Ok(())
}

/// Load a `persons.csv`. Row order is preserved and ids are re-assigned
/// densely from 0; every field is range-checked against the schema.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);

    let schema_err = |row: usize, column: &str, message: String| Error::Schema {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message,
    };

    let headers = reader
        .headers()
        .map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!(
                "header must be exactly `{}`, got `{}`",
                CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut persons = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: format!("data row {row}: {e}"),
        })?;
        if record.len() != CSV_HEADER.len() {
            return Err(schema_err(
                row,
                "(row)",
                format!("expected {} fields, got {}", CSV_HEADER.len(), record.len()),
            ));
        }
        let field = |col: usize| record.get(col).unwrap_or_default();
        let parse_f64 = |col: usize| -> Result<f64> {
            field(col)
                .parse::<f64>()
                .map_err(|_| schema_err(row, CSV_HEADER[col], format!("`{}` is not a number", field(col))))
        };
        let parse_bit = |col: usize| -> Result<bool> {
            match field(col) {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(schema_err(
                    row,
                    CSV_HEADER[col],
                    format!("`{other}` is not 0/1"),
                )),
            }
        };

        field(0)
            .parse::<u64>()
            .map_err(|_| schema_err(row, "id", format!("`{}` is not a nonnegative integer", field(0))))?;
        let group = field(1);
        if group.is_empty() {
            return Err(schema_err(row, "group", "empty group label".into()));
        }
        let person = Person {
            id: persons.len() as u64,
            group: Group::new(group),
            age: parse_f64(2)?,
            bmi: parse_f64(3)?,
            diabetes: parse_bit(4)?,
            doctor_diagnosis: parse_bit(5)?,
            distance_miles: parse_f64(6)?,
            appear_prob: parse_f64(7)?,
        };
        if let Some((column, message)) = person.violation() {
            return Err(schema_err(row, column, message));
        }
        persons.push(person);
    }
    if persons.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset {
        persons,
        provenance: Provenance::Ingested(path.to_path_buf()),
    })
}
