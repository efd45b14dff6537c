use std::fs;
use std::path::{Path, PathBuf};

use thurston_ergopt::cli;

fn out_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("thurston-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn run(args: &[&str]) -> i32 {
    cli::main(std::iter::once("thurston-ergopt").chain(args.iter().copied()))
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn constant_potential_has_q_one() {
    let d = out_dir("q");
    let code = run(&["q", "--rule", "pillow_lattes", "--level", "4", "--potential", "const:1", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 0);
    let q: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("q.json")).unwrap()).unwrap();
    assert_eq!(q["q"].as_f64(), Some(1.0));
    let m = manifest(&d);
    assert_eq!(m["command"], "q");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["outputs"][0], "q.json");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&["q", "--level", "many"]), 2);
    let d = out_dir("usage");
    assert_eq!(run(&["q", "--method", "simplex", "--out", d.to_str().unwrap()]), 2);
    assert_eq!(run(&["q", "--potential", "wiggly", "--out", d.to_str().unwrap()]), 2);
    assert_eq!(run(&["info", "no_such_rule", "--out", d.to_str().unwrap()]), 2);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn flags_override_the_config_file() {
    let d = out_dir("config");
    let cfg = d.with_extension("cfg");
    fs::write(&cfg, "[run]\nlevel = 3\nseed = 9\n\n[potential]\nspec = x\n").unwrap();
    let code = run(&["q", "--config", cfg.to_str().unwrap(), "--seed", "4", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 0);
    let m = manifest(&d);
    assert_eq!(m["config"]["level"], 3);
    assert_eq!(m["config"]["seed"], 4);
    assert_eq!(m["config"]["potential"], "x");
    fs::write(&cfg, "[run]\nlevle = 3\n").unwrap();
    assert_eq!(run(&["q", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]), 2);
}

#[test]
fn every_subcommand_runs() {
    let d = out_dir("all");
    let o = d.to_str().unwrap();
    for args in [
        vec!["info", "flap"],
        vec!["refine", "--level", "2"],
        vec!["sft", "--level", "3"],
        vec!["subaction", "--level", "3"],
        vec!["close", "--mode", "bq", "--level", "3"],
        vec!["close", "--mode", "gap", "--level", "3"],
        vec!["close", "--mode", "anosov", "--word", "0.1.5.2.0.1", "--l", "4"],
        vec!["tpo", "--level", "3", "--trials", "4"],
        vec!["sweep", "--level", "3", "--trials", "2", "--t-max", "16"],
        vec!["selftest"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", o]);
        assert_eq!(run(&a), 0, "{args:?}");
        assert_eq!(manifest(&d)["command"], args[0]);
    }
    assert!(fs::read_to_string(d.join("sweep.csv")).unwrap().starts_with("t,distance"));
}
