//! End-to-end runs of the command-line pipeline through the library entry
//! point, including the byte-level reproducibility contract.

use eqlab::cli::run_from;
use eqlab::error::Error;
use eqlab::population::PopulationConfig;
use std::path::Path;

fn run(args: &[&str]) -> eqlab::Result<()> {
    let mut argv = vec!["eqlab"];
    argv.extend(args);
    run_from(argv)
}

fn small_config(dir: &Path) -> String {
    let mut cfg = PopulationConfig::screening_default();
    for v in cfg.sizes.values_mut() {
        *v = 2_000;
    }
    let path = dir.join("config.json");
    cfg.save(&path).unwrap();
    path.to_string_lossy().into_owned()
}

fn voucher_config(dir: &Path) -> String {
    let mut cfg = PopulationConfig::voucher_default();
    for v in cfg.sizes.values_mut() {
        *v = 800;
    }
    let path = dir.join("voucher.json");
    cfg.save(&path).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn gen_then_fit_produces_converged_model() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let pop = tmp.path().join("pop");
    run(&["gen", "--config", &cfg, "--seed", "3", "--out", pop.to_str().unwrap()]).unwrap();
    assert!(pop.join("persons.csv").exists());
    assert!(pop.join("manifest.json").exists());

    let fit_dir = tmp.path().join("aware");
    run(&[
        "fit",
        pop.join("persons.csv").to_str().unwrap(),
        "--features",
        "age,bmi,group",
        "--label",
        "true",
        "--out",
        fit_dir.to_str().unwrap(),
    ])
    .unwrap();
    let model = eqlab::riskmodel::FittedModel::load(&fit_dir.join("model.json")).unwrap();
    assert!(model.converged);
    assert_eq!(model.coefficients.len(), 6);
}

#[test]
fn fit_without_white_group_picks_fallback_reference() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = PopulationConfig::voucher_default();
    let relabel: Vec<(eqlab::population::Group, eqlab::population::Group)> = vec![
        (eqlab::population::Group::new("Black"), eqlab::population::Group::new("North")),
        (eqlab::population::Group::new("White"), eqlab::population::Group::new("South")),
    ];
    let remap = |m: &std::collections::BTreeMap<eqlab::population::Group, f64>| {
        relabel.iter().map(|(old, new)| (new.clone(), m[old])).collect()
    };
    cfg.risk_intercepts = remap(&cfg.risk_intercepts);
    cfg.detection_probs = remap(&cfg.detection_probs);
    cfg.distance_log_means = remap(&cfg.distance_log_means);
    cfg.distance_log_sds = remap(&cfg.distance_log_sds);
    cfg.sizes = relabel.iter().map(|(old, new)| (new.clone(), cfg.sizes[old].min(700))).collect();
    cfg.groups = relabel.iter().map(|(_, new)| new.clone()).collect();
    let cfg_path = tmp.path().join("renamed.json");
    cfg.save(&cfg_path).unwrap();

    let pop = tmp.path().join("pop");
    run(&["gen", "--config", cfg_path.to_str().unwrap(), "--out", pop.to_str().unwrap()]).unwrap();
    let out = tmp.path().join("m");
    run(&[
        "fit",
        pop.join("persons.csv").to_str().unwrap(),
        "--features",
        "age,bmi,group",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let model = eqlab::riskmodel::FittedModel::load(&out.join("model.json")).unwrap();
    let enc = model.feature_set.group_encoding.unwrap();
    assert_eq!(enc.reference.as_str(), "South"); // lexicographically last
    assert_eq!(model.coefficients.len(), 4);
}

#[test]
fn uniform_policy_csv_has_identical_thresholds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let pop = tmp.path().join("pop");
    run(&["gen", "--config", &cfg, "--out", pop.to_str().unwrap()]).unwrap();
    let persons = pop.join("persons.csv");
    let model_dir = tmp.path().join("model");
    run(&[
        "fit",
        persons.to_str().unwrap(),
        "--features",
        "age,bmi,group",
        "--out",
        model_dir.to_str().unwrap(),
    ])
    .unwrap();
    let out = tmp.path().join("policy");
    run(&[
        "policy",
        persons.to_str().unwrap(),
        model_dir.join("model.json").to_str().unwrap(),
        "--uniform",
        "0.015",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();

    let text = std::fs::read_to_string(out.join("policy.csv")).unwrap();
    let thresholds: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(thresholds.len(), 4);
    assert!(thresholds.iter().all(|t| *t == "0.015"));
}

#[test]
fn policy_requires_exactly_one_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let err = run(&[
        "policy",
        "persons.csv",
        "model.json",
        "--uniform",
        "0.015",
        "--equal-rate",
        "0.85",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ])
    .unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn frontier_zero_budget_single_share_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = voucher_config(tmp.path());
    let pop = tmp.path().join("pop");
    run(&["gen", "--config", &cfg, "--out", pop.to_str().unwrap()]).unwrap();
    let out = tmp.path().join("fr");
    run(&[
        "frontier",
        pop.join("persons.csv").to_str().unwrap(),
        "--budget",
        "0",
        "--shares",
        "0.5",
        "--options",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let text = std::fs::read_to_string(out.join("frontier.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2, "header plus one row: {text}");
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields[0], "0.5");
    assert_eq!(fields[1], "0");
}

#[test]
fn missing_persons_file_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let err = run(&[
        "calibrate",
        tmp.path().join("nope.csv").to_str().unwrap(),
        tmp.path().join("m.json").to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ])
    .unwrap_err();
    assert_eq!(err.exit_code(), 1);
    // nothing was committed
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn full_pipeline_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let vcfg = voucher_config(tmp.path());

    let run_pipeline = |root: &Path| {
        let pop = root.join("pop");
        run(&["gen", "--config", &cfg, "--seed", "11", "--out", pop.to_str().unwrap()]).unwrap();
        let persons = pop.join("persons.csv");
        let persons = persons.to_str().unwrap();

        let blind = root.join("blind");
        run(&["fit", persons, "--features", "age,bmi", "--out", blind.to_str().unwrap()]).unwrap();
        let aware = root.join("aware");
        run(&["fit", persons, "--features", "age,bmi,group", "--out", aware.to_str().unwrap()])
            .unwrap();
        let blind_model = blind.join("model.json");
        let aware_model = aware.join("model.json");

        run(&[
            "calibrate",
            persons,
            blind_model.to_str().unwrap(),
            aware_model.to_str().unwrap(),
            "--bins",
            "10",
            "--out",
            root.join("cal").to_str().unwrap(),
        ])
        .unwrap();
        run(&[
            "policy",
            persons,
            aware_model.to_str().unwrap(),
            "--equal-rate",
            "0.85",
            "--out",
            root.join("pol").to_str().unwrap(),
        ])
        .unwrap();
        run(&[
            "blinding",
            persons,
            blind_model.to_str().unwrap(),
            aware_model.to_str().unwrap(),
            "--out",
            root.join("blc").to_str().unwrap(),
        ])
        .unwrap();
        run(&[
            "labelbias",
            persons,
            "--config",
            &cfg,
            "--seed",
            "13",
            "--out",
            root.join("lb").to_str().unwrap(),
        ])
        .unwrap();

        let vpop = root.join("vpop");
        run(&["gen", "--config", &vcfg, "--seed", "17", "--out", vpop.to_str().unwrap()]).unwrap();
        run(&[
            "frontier",
            vpop.join("persons.csv").to_str().unwrap(),
            "--budget",
            "2000",
            "--shares",
            "0,0.25,0.5,0.75,1",
            "--options",
            "0.25,0.5",
            "--out",
            root.join("fr").to_str().unwrap(),
        ])
        .unwrap();
    };

    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_pipeline(&a);
    run_pipeline(&b);

    let mut csvs = Vec::new();
    for entry in walk(&a) {
        if entry.extension().is_some_and(|e| e == "csv") {
            csvs.push(entry);
        }
    }
    assert!(csvs.len() >= 7, "expected several CSVs, found {}", csvs.len());
    for path_a in csvs {
        let rel = path_a.strip_prefix(&a).unwrap();
        let path_b = b.join(rel);
        let bytes_a = std::fs::read(&path_a).unwrap();
        let bytes_b = std::fs::read(&path_b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{rel:?} differs between runs");
    }
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path);
            }
        }
    }
    out
}
