//! Command-line front end: generation, fitting, calibration audits, policy
//! construction, blinding costs, label-bias experiments, and the voucher
//! frontier, emitting CSV tables and SVG figures.
//!
//! Outputs are staged in memory and committed with temp-file-plus-rename,
//! so a failing command never leaves a partial output directory. Every
//! output directory gets exactly one `manifest.json` recording how it was
//! produced. Identical command, config, and seed give byte-identical CSVs;
//! set `EQLAB_NO_SVG=1` to suppress figure emission.

use crate::allocation::{
    frontier, option_table, unconstrained_alloc, AllocationInstance, Frontier, DEFAULT_BUDGET,
    DEFAULT_COST_PER_MILE,
};
use crate::calibration::{calibration_curve, Binning, CalibrationCurve};
use crate::error::{Error, Result};
use crate::policy::{
    blinding_cost, equalize_decision_rates, equalize_fnr, evaluate_policy, uniform_policy, welfare,
    Policy, UtilityModel,
};
use crate::population::{
    generate_population, load_dataset, write_dataset_to, Dataset, Group, PopulationConfig,
};
use crate::riskmodel::{fit_logistic, predict_all, FeatureSet, FittedModel, LabelKind};
use crate::svg::{density_polyline, render_panels, Panel};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "eqlab",
    version,
    about = "Screening-policy fairness experiments and voucher-allocation frontiers"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic population as persons.csv
    Gen(GenArgs),
    /// Fit a logistic risk model on a persons.csv
    Fit(FitArgs),
    /// Audit one or more models with per-group reliability curves
    Calibrate(CalibrateArgs),
    /// Build and evaluate a screening policy
    Policy(PolicyArgs),
    /// Account the screening cost of blinding a model to group membership
    Blinding(BlindingArgs),
    /// Re-draw proxy labels and audit a proxy-trained model
    Labelbias(LabelbiasArgs),
    /// Trace the voucher-allocation share/appearances frontier
    Frontier(FrontierArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Population config JSON; defaults to the built-in screening config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelFlag {
    /// Blood test or doctor diagnosis
    True,
    /// Doctor diagnosis only
    Proxy,
}

impl From<LabelFlag> for LabelKind {
    fn from(f: LabelFlag) -> Self {
        match f {
            LabelFlag::True => LabelKind::TrueLabel,
            LabelFlag::Proxy => LabelKind::ProxyLabel,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    persons: PathBuf,
    /// Comma-separated subset of {age,bmi,group}
    #[arg(long, value_delimiter = ',', required = true)]
    features: Vec<String>,
    #[arg(long, value_enum, default_value = "true")]
    label: LabelFlag,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    persons: PathBuf,
    /// One or more fitted model JSON files
    #[arg(required = true)]
    models: Vec<PathBuf>,
    /// Quantile bins per group
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PolicySpec {
    /// Single threshold for every group
    #[arg(long, group = "spec")]
    uniform: Option<f64>,
    /// Equalize decision rates at this target rate
    #[arg(long, group = "spec")]
    equal_rate: Option<f64>,
    /// Equalize false negative rates at this target
    #[arg(long, group = "spec")]
    equal_fnr: Option<f64>,
}

#[derive(Args)]
struct PolicyArgs {
    persons: PathBuf,
    model: PathBuf,
    #[command(flatten)]
    spec: PolicySpec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BlindingArgs {
    persons: PathBuf,
    blind_model: PathBuf,
    aware_model: PathBuf,
    /// Utility threshold t* at which both models screen
    #[arg(long, default_value_t = 0.015)]
    uniform: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LabelbiasArgs {
    persons: PathBuf,
    /// Source of per-group detection probabilities; defaults to the
    /// built-in screening config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the proxy-label redraw; defaults to the config's seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FrontierArgs {
    persons: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: f64,
    #[arg(long, default_value_t = DEFAULT_COST_PER_MILE)]
    cost_per_mile: f64,
    /// Share grid; defaults to 51 points over [0, 1]
    #[arg(long, value_delimiter = ',')]
    shares: Option<Vec<f64>>,
    /// Shares for the option-comparison table
    #[arg(long, value_delimiter = ',')]
    options: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

/// Binary entry point: returns the process exit code (0 success,
/// 1 validation error, 2 internal error).
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parse and run from explicit arguments (first element is the program
/// name); used by integration tests.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    cli.run()
}

impl Cli {
    pub fn run(self) -> Result<()> {
        let start = Instant::now();
        match self.command {
            Command::Gen(args) => cmd_gen(args, start),
            Command::Fit(args) => cmd_fit(args, start),
            Command::Calibrate(args) => cmd_calibrate(args, start),
            Command::Policy(args) => cmd_policy(args, start),
            Command::Blinding(args) => cmd_blinding(args, start),
            Command::Labelbias(args) => cmd_labelbias(args, start),
            Command::Frontier(args) => cmd_frontier(args, start),
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<String>,
    version: String,
    duration_ms: u64,
}

/// In-memory staging of an output directory, committed atomically.
struct Stage {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Stage {
    fn new(dir: &Path) -> Self {
        Stage {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn add_svg(&mut self, name: &str, content: String) {
        if std::env::var("EQLAB_NO_SVG").as_deref() != Ok("1") {
            self.add(name, content.into_bytes());
        }
    }

    /// Write every staged file (plus the manifest) under a temp name, then
    /// rename all into place.
    fn commit(
        mut self,
        command: &str,
        config: Option<PathBuf>,
        seed: Option<u64>,
        inputs: Vec<PathBuf>,
        start: Instant,
    ) -> Result<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            seed,
            inputs,
            outputs: self.files.iter().map(|(n, _)| n.clone()).collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: start.elapsed().as_millis() as u64,
        };
        let manifest_bytes =
            serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        self.files.push(("manifest.json".into(), manifest_bytes.into_bytes()));

        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut temps = Vec::new();
        for (name, bytes) in &self.files {
            let tmp = self.dir.join(format!(".tmp.{name}"));
            if let Err(e) = std::fs::write(&tmp, bytes) {
                for t in &temps {
                    let _ = std::fs::remove_file(t);
                }
                return Err(Error::io(&tmp, e));
            }
            temps.push(tmp);
        }
        for ((name, _), tmp) in self.files.iter().zip(&temps) {
            let target = self.dir.join(name);
            if let Err(e) = std::fs::rename(tmp, &target) {
                return Err(Error::io(&target, e));
            }
        }
        for (name, _) in &self.files {
            println!("wrote {}", self.dir.join(name).display());
        }
        Ok(())
    }
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

fn load_config(path: &Option<PathBuf>) -> Result<PopulationConfig> {
    match path {
        Some(p) => PopulationConfig::load(p),
        None => Ok(PopulationConfig::screening_default()),
    }
}

fn cmd_gen(args: GenArgs, start: Instant) -> Result<()> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let data = generate_population(&cfg)?;

    let mut persons = Vec::new();
    write_dataset_to(&data, &mut persons)?;
    let effective_config =
        serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n";

    let mut stage = Stage::new(&args.out);
    stage.add("persons.csv", persons);
    stage.add("config.json", effective_config.into_bytes());
    stage.commit("gen", args.config, Some(cfg.seed), vec![], start)
}

/// Group encoding for ingested data: sorted distinct labels, with White as
/// the reference when present (else the lexicographically last label).
fn encoding_for(data: &Dataset) -> (Vec<Group>, Group) {
    let order = data.groups();
    let reference = order
        .iter()
        .find(|g| g.as_str() == "White")
        .cloned()
        .unwrap_or_else(|| order.last().expect("dataset is nonempty").clone());
    (order, reference)
}

fn feature_set_from_flags(data: &Dataset, features: &[String]) -> Result<FeatureSet> {
    let mut fs = FeatureSet {
        use_age: false,
        use_bmi: false,
        group_encoding: None,
    };
    for f in features {
        match f.as_str() {
            "age" => fs.use_age = true,
            "bmi" => fs.use_bmi = true,
            "group" => {
                let (order, reference) = encoding_for(data);
                fs = FeatureSet {
                    use_age: fs.use_age,
                    use_bmi: fs.use_bmi,
                    ..FeatureSet::aware(order, reference)?
                };
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown feature `{other}`; expected age, bmi, or group"
                )))
            }
        }
    }
    Ok(fs)
}

fn cmd_fit(args: FitArgs, start: Instant) -> Result<()> {
    let data = load_dataset(&args.persons)?;
    let fs = feature_set_from_flags(&data, &args.features)?;
    let model = fit_logistic(&data, &fs, args.label.into())?;
    println!(
        "fit: {} coefficients, converged={}, iterations={}",
        model.coefficients.len(),
        model.converged,
        model.iterations
    );

    let bytes = serde_json::to_string_pretty(&model).expect("model serializes") + "\n";
    let mut stage = Stage::new(&args.out);
    stage.add("model.json", bytes.into_bytes());
    stage.commit("fit", None, None, vec![args.persons], start)
}

fn model_stem(path: &Path, taken: &[String]) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    if !taken.contains(&stem) {
        return stem;
    }
    let mut i = 2;
    loop {
        let candidate = format!("{stem}-{i}");
        if !taken.contains(&candidate) {
            return candidate;
        }
        i += 1;
    }
}

fn calibration_rows(model_name: &str, curves: &BTreeMap<Group, CalibrationCurve>) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (group, curve) in curves {
        for (bin, p) in curve.points.iter().enumerate() {
            rows.push(vec![
                model_name.to_string(),
                group.as_str().to_string(),
                bin.to_string(),
                p.mean_predicted.to_string(),
                p.observed_rate.to_string(),
                p.count.to_string(),
            ]);
        }
    }
    rows
}

fn reliability_panel(title: &str, curves: &BTreeMap<Group, CalibrationCurve>) -> Panel {
    let mut panel = Panel::new(title, "mean predicted risk", "observed rate").with_identity();
    for (group, curve) in curves {
        panel = panel.series(
            group.as_str(),
            curve
                .points
                .iter()
                .map(|p| (p.mean_predicted, p.observed_rate))
                .collect(),
        );
    }
    panel
}

fn cmd_calibrate(args: CalibrateArgs, start: Instant) -> Result<()> {
    let data = load_dataset(&args.persons)?;
    let labels = data.true_labels();
    let groups = data.group_column();
    let binning = Binning::Quantile { bins: args.bins };

    let mut rows = Vec::new();
    let mut panels = Vec::new();
    let mut names = Vec::new();
    for path in &args.models {
        let model = FittedModel::load(path)?;
        let name = model_stem(path, &names);
        let scores = predict_all(&model, &data)?;
        let curves = calibration_curve(&scores, &labels, &groups, binning)?;
        rows.extend(calibration_rows(&name, &curves));
        panels.push(reliability_panel(&name, &curves));
        names.push(name);
    }

    let mut stage = Stage::new(&args.out);
    stage.add(
        "calibration.csv",
        csv_bytes(
            &["model", "group", "bin", "mean_predicted", "observed_rate", "count"],
            rows,
        ),
    );
    stage.add_svg("reliability.svg", render_panels(&panels));
    let mut inputs = vec![args.persons];
    inputs.extend(args.models);
    stage.commit("calibrate", None, None, inputs, start)
}

fn cmd_policy(args: PolicyArgs, start: Instant) -> Result<()> {
    let data = load_dataset(&args.persons)?;
    let model = FittedModel::load(&args.model)?;
    let scores = predict_all(&model, &data)?;
    let labels = data.true_labels();
    let groups = data.group_column();

    let policy: Policy = if let Some(t) = args.spec.uniform {
        uniform_policy(t, &data.groups())?
    } else if let Some(r) = args.spec.equal_rate {
        equalize_decision_rates(&scores, &groups, r)?
    } else if let Some(f) = args.spec.equal_fnr {
        equalize_fnr(&scores, &labels, &groups, f)?
    } else {
        unreachable!("clap enforces exactly one policy spec");
    };

    let metrics = evaluate_policy(&policy, &scores, &labels, &groups)?;
    let u = UtilityModel::default();
    // ingested data carries no generative risk; utilities are paid in the
    // model's own scores
    let welfare_total = welfare(&policy, &scores, &groups, &scores, &u)?;

    let rows = metrics
        .per_group
        .iter()
        .map(|(g, m)| {
            vec![
                policy.label.clone(),
                g.as_str().to_string(),
                m.threshold.to_string(),
                m.decision_rate.to_string(),
                m.fnr.to_string(),
                m.fpr.to_string(),
                m.screened_count.to_string(),
                welfare_total.to_string(),
            ]
        })
        .collect();

    // risk densities for everyone and for true positives, with the group
    // thresholds marked
    let max_score = scores.iter().copied().fold(0.0f64, f64::max).max(1e-6);
    let mut all_panel = Panel::new("estimated risk, all persons", "risk score", "density");
    let mut pos_panel = Panel::new("estimated risk, true positives", "risk score", "density");
    for (i, group) in data.groups().iter().enumerate() {
        let of_group: Vec<f64> = scores
            .iter()
            .zip(&groups)
            .filter(|(_, g)| *g == group)
            .map(|(s, _)| *s)
            .collect();
        let of_positives: Vec<f64> = scores
            .iter()
            .zip(&groups)
            .zip(&labels)
            .filter(|((_, g), l)| *g == group && **l)
            .map(|((s, _), _)| *s)
            .collect();
        all_panel = all_panel.series(group.as_str(), density_polyline(&of_group, 0.0, max_score, 40));
        pos_panel = pos_panel.series(
            group.as_str(),
            density_polyline(&of_positives, 0.0, max_score, 40),
        );
        let t = policy.thresholds[group];
        if t <= 1.0 {
            all_panel = all_panel.vline(group.as_str(), t, Some(i));
            pos_panel = pos_panel.vline(group.as_str(), t, Some(i));
        }
    }

    let mut stage = Stage::new(&args.out);
    stage.add(
        "policy.csv",
        csv_bytes(
            &[
                "policy",
                "group",
                "threshold",
                "decision_rate",
                "fnr",
                "fpr",
                "screened_count",
                "welfare_total",
            ],
            rows,
        ),
    );
    stage.add_svg("risk_distribution.svg", render_panels(&[all_panel, pos_panel]));
    stage.commit("policy", None, None, vec![args.persons, args.model], start)
}

fn cmd_blinding(args: BlindingArgs, start: Instant) -> Result<()> {
    let data = load_dataset(&args.persons)?;
    let blind = FittedModel::load(&args.blind_model)?;
    let aware = FittedModel::load(&args.aware_model)?;
    let u = UtilityModel::new(args.uniform)?;
    let report = blinding_cost(&blind, &aware, &data, &u)?;

    let rows = report
        .iter()
        .map(|(g, c)| {
            vec![
                g.as_str().to_string(),
                c.under_screened_frac.to_string(),
                c.over_screened_frac.to_string(),
                c.welfare_delta.to_string(),
            ]
        })
        .collect();

    // per group: aware-score densities for everyone and for the persons
    // the blind model misclassifies at t*
    let aware_scores = predict_all(&aware, &data)?;
    let blind_scores = predict_all(&blind, &data)?;
    let max_score = aware_scores.iter().copied().fold(0.0f64, f64::max).max(1e-6);
    let mut panels = Vec::new();
    for group in data.groups() {
        let c = &report[&group];
        let mut all = Vec::new();
        let mut under = Vec::new();
        let mut over = Vec::new();
        for (p, (a, b)) in data.persons.iter().zip(aware_scores.iter().zip(&blind_scores)) {
            if p.group != group {
                continue;
            }
            all.push(*a);
            match (*b >= u.screening_threshold, *a >= u.screening_threshold) {
                (false, true) => under.push(*a),
                (true, false) => over.push(*a),
                _ => {}
            }
        }
        let n = all.len() as f64;
        let sub_density = |vals: &[f64]| -> Vec<(f64, f64)> {
            // scaled so area equals the group fraction misclassified
            density_polyline(vals, 0.0, max_score, 40)
                .into_iter()
                .map(|(x, d)| (x, d * vals.len() as f64 / n))
                .collect()
        };
        let panel = Panel::new(
            format!(
                "{group}: under {:.1}%, over {:.1}%",
                100.0 * c.under_screened_frac,
                100.0 * c.over_screened_frac
            ),
            "race-aware risk score",
            "density",
        )
        .series("all", density_polyline(&all, 0.0, max_score, 40))
        .series("under-screened", sub_density(&under))
        .series("over-screened", sub_density(&over))
        .vline("t*", u.screening_threshold, None);
        panels.push(panel);
    }

    let mut stage = Stage::new(&args.out);
    stage.add(
        "blinding_cost.csv",
        csv_bytes(
            &["group", "under_screened_frac", "over_screened_frac", "welfare_delta"],
            rows,
        ),
    );
    stage.add_svg("blinding.svg", render_panels(&panels));
    stage.commit(
        "blinding",
        None,
        None,
        vec![args.persons, args.blind_model, args.aware_model],
        start,
    )
}

fn cmd_labelbias(args: LabelbiasArgs, start: Instant) -> Result<()> {
    let data = load_dataset(&args.persons)?;
    let cfg = load_config(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let proxied = crate::riskmodel::apply_proxy_labels(&data, &cfg.detection_probs, seed)?;

    let (order, reference) = encoding_for(&data);
    let fs = FeatureSet::aware(order, reference)?;
    let proxy_model = fit_logistic(&proxied, &fs, LabelKind::ProxyLabel)?;
    let true_model = fit_logistic(&proxied, &fs, LabelKind::TrueLabel)?;

    let labels = proxied.true_labels();
    let groups = proxied.group_column();
    let binning = Binning::Quantile { bins: args.bins };
    let proxy_curves =
        calibration_curve(&predict_all(&proxy_model, &proxied)?, &labels, &groups, binning)?;
    let true_curves =
        calibration_curve(&predict_all(&true_model, &proxied)?, &labels, &groups, binning)?;

    let mut rows = calibration_rows("proxy-trained", &proxy_curves);
    rows.extend(calibration_rows("true-trained", &true_curves));

    let mut proxy_csv = Vec::new();
    write_dataset_to(&proxied, &mut proxy_csv)?;

    let mut stage = Stage::new(&args.out);
    stage.add("proxy_persons.csv", proxy_csv);
    stage.add(
        "calibration.csv",
        csv_bytes(
            &["model", "group", "bin", "mean_predicted", "observed_rate", "count"],
            rows,
        ),
    );
    stage.add_svg(
        "labelbias.svg",
        render_panels(&[
            reliability_panel("proxy-trained, audited on true outcome", &proxy_curves),
            reliability_panel("true-trained", &true_curves),
        ]),
    );
    stage.commit("labelbias", args.config, Some(seed), vec![args.persons], start)
}

fn cmd_frontier(args: FrontierArgs, start: Instant) -> Result<()> {
    let data = load_dataset(&args.persons)?;
    let inst = AllocationInstance::from_dataset(&data, args.cost_per_mile, args.budget)?;

    let shares: Vec<f64> = args
        .shares
        .unwrap_or_else(|| (0..=50).map(|i| i as f64 / 50.0).collect());
    let option_shares: Vec<f64> = args.options.unwrap_or_else(|| vec![0.1, 0.3, 0.5, 0.7, 0.9]);

    let free = unconstrained_alloc(&inst)?;
    let sweep: Frontier = frontier(&inst, &shares)?;
    for (s, reason) in &sweep.skipped {
        eprintln!("warning: share {s} skipped: {reason}");
    }
    let options = option_table(&inst, &sweep, &option_shares)?;

    let other_groups: Vec<Group> = {
        let mut gs = data.groups();
        gs.retain(|g| *g != inst.target_group);
        gs
    };
    let frontier_rows = sweep
        .points
        .iter()
        .map(|p| {
            let black = p
                .result
                .voucher_counts
                .get(&inst.target_group)
                .copied()
                .unwrap_or(0.0);
            let white: f64 = other_groups
                .iter()
                .map(|g| p.result.voucher_counts.get(g).copied().unwrap_or(0.0))
                .sum();
            vec![
                p.share.to_string(),
                p.objective.to_string(),
                p.result.spend.to_string(),
                black.to_string(),
                white.to_string(),
                p.result.fractional_count.to_string(),
            ]
        })
        .collect();

    let option_rows = options
        .iter()
        .map(|o| {
            let black_missed = o
                .expected_missed
                .get(&inst.target_group)
                .copied()
                .unwrap_or(0.0);
            let white_missed: f64 = other_groups
                .iter()
                .map(|g| o.expected_missed.get(g).copied().unwrap_or(0.0))
                .sum();
            vec![
                o.label.clone(),
                o.share.to_string(),
                o.additional_appearances.to_string(),
                black_missed.to_string(),
                white_missed.to_string(),
                o.spend.to_string(),
            ]
        })
        .collect();

    let curve: Vec<(f64, f64)> = sweep.points.iter().map(|p| (p.share, p.objective)).collect();
    let panel = Panel::new(
        "maximal additional appearances by voucher share",
        format!("{} share of vouchers", inst.target_group),
        "additional appearances",
    )
    .series("frontier", curve)
    .marker(free.share, free.objective, "unconstrained");

    let mut stage = Stage::new(&args.out);
    stage.add(
        "frontier.csv",
        csv_bytes(
            &["share", "objective", "spend", "vouchers_black", "vouchers_white", "fractional_count"],
            frontier_rows,
        ),
    );
    stage.add(
        "options.csv",
        csv_bytes(
            &["option", "share", "total_appearances", "black_missed", "white_missed", "spend"],
            option_rows,
        ),
    );
    stage.add_svg("frontier.svg", render_panels(&[panel]));
    stage.commit("frontier", None, None, vec![args.persons], start)
}
