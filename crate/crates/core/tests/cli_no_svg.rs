//! EQLAB_NO_SVG in its own test binary: integration test targets run as
//! separate processes, so mutating the environment here cannot race the
//! other CLI tests.

use eqlab::cli::run_from;
use eqlab::population::PopulationConfig;

#[test]
fn no_svg_env_var_suppresses_figures() {
    std::env::set_var("EQLAB_NO_SVG", "1");
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = PopulationConfig::screening_default();
    for v in cfg.sizes.values_mut() {
        *v = 500;
    }
    let cfg_path = tmp.path().join("config.json");
    cfg.save(&cfg_path).unwrap();

    let pop = tmp.path().join("pop");
    run_from([
        "eqlab",
        "gen",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        pop.to_str().unwrap(),
    ])
    .unwrap();
    let model_dir = tmp.path().join("m");
    run_from([
        "eqlab",
        "fit",
        pop.join("persons.csv").to_str().unwrap(),
        "--features",
        "age,bmi,group",
        "--out",
        model_dir.to_str().unwrap(),
    ])
    .unwrap();
    let cal = tmp.path().join("cal");
    run_from([
        "eqlab",
        "calibrate",
        pop.join("persons.csv").to_str().unwrap(),
        model_dir.join("model.json").to_str().unwrap(),
        "--out",
        cal.to_str().unwrap(),
    ])
    .unwrap();

    assert!(cal.join("calibration.csv").exists());
    assert!(!cal.join("reliability.svg").exists());
}
