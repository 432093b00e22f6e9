use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tdpt"));
    c.env_remove("TDPT_OUTPUT_DIR");
    c
}

fn small_config(out: &Path) -> Value {
    json!({
        "name": "small",
        "shape": { "kind": "flower", "petals": 3, "amplitude": 0.2 },
        "nodes": 64,
        "eps": 0.05,
        "contrast": 3.0,
        "center": [0.3, -0.1],
        "layout": { "kind": "circle", "count": 32 },
        "rho": 3.0,
        "l_count": 16,
        "times": { "start": 0.0, "end": 5.0, "count": 64 },
        "noise_percent": 5.0,
        "seed": 7,
        "order": 1,
        "volume_prior": 0.0025,
        "contrast_prior": 3.0,
        "output_dir": out,
    })
}

fn write_config(dir: &Path, v: &Value) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

#[test]
fn pipeline_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &small_config(&out));
    let o = run(&[
        "pipeline",
        "--config",
        cfg.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "msr.json",
        "msr/msr_000.csv",
        "msr/msr_015.csv",
        "fdpt.json",
        "tdpt.json",
        "tdpt.csv",
        "report.json",
        "boundary_true.csv",
        "boundary_ellipse.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    assert!(!out.join("errors.csv").exists());
    assert!(!out.join("boundary_final.csv").exists());

    let report: Value =
        serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    let keys: Vec<&str> = report
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    let mut expected = vec![
        "name",
        "seed",
        "true_volume",
        "true_contrast",
        "volume",
        "contrast",
        "ellipse",
        "shape",
        "distances",
    ];
    expected.sort_unstable();
    let mut got = keys.clone();
    got.sort_unstable();
    assert_eq!(got, expected);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["volume"]["source"], "prior");
    assert!(report["shape"].is_null());
    assert!(report["ellipse"]["a"].as_f64().unwrap() > 0.0);

    let tdpt: Value = serde_json::from_slice(&fs::read(out.join("tdpt.json")).unwrap()).unwrap();
    assert_eq!(tdpt["l_count"], 16);
    assert_eq!(tdpt["order"], 1);
    assert_eq!(tdpt["times"].as_array().unwrap().len(), 64);

    let header = fs::read_to_string(out.join("msr/msr_000.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), "receiver,transmitter,re,im");
    let header = fs::read_to_string(out.join("tdpt.csv")).unwrap();
    assert!(header.lines().next().unwrap().starts_with("t,W_"));
}

#[test]
fn serial_and_parallel_outputs_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for threads in ["1", "4"] {
        let out = tmp.path().join(format!("out{threads}"));
        let sub = tmp.path().join(format!("cfg{threads}"));
        fs::create_dir_all(&sub).unwrap();
        let cfg = write_config(&sub, &small_config(&out));
        let o = run(&[
            "pipeline",
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        dirs.push(out);
    }
    let (a, b) = (files(&dirs[0]), files(&dirs[1]));
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (k, v) in &a {
        assert!(v == &b[k], "{} differs", k.display());
    }
}

#[test]
fn seed_override_changes_only_the_noise() {
    let tmp = tempfile::tempdir().unwrap();
    let mut msr = Vec::new();
    for seed in ["1", "2"] {
        let out = tmp.path().join(format!("s{seed}"));
        let sub = tmp.path().join(format!("c{seed}"));
        fs::create_dir_all(&sub).unwrap();
        let cfg = write_config(&sub, &small_config(&out));
        let o = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(o.status.success());
        msr.push(fs::read(out.join("msr/msr_000.csv")).unwrap());
    }
    assert_ne!(msr[0], msr[1]);
}

#[test]
fn stages_can_run_separately() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut v = small_config(&out);
    v["noise_percent"] = json!(0.0);
    let cfg = write_config(tmp.path(), &v);
    let c = cfg.to_str().unwrap();
    for stage in ["simulate", "tdpt", "reconstruct"] {
        let o = run(&[stage, "--config", c]);
        assert!(
            o.status.success(),
            "{stage}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert_eq!(errors.lines().next().unwrap(), "entry,T,absErr,relErr");
    assert!(errors.contains("W_10_10") && errors.contains("W_01_01"));
    assert!(out.join("tdpt_exact.csv").is_file());
}

#[test]
fn output_dir_env_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &small_config(&tmp.path().join("ignored")));
    let target = tmp.path().join("from_env");
    let o = bin()
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .env("TDPT_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(target.join("msr.json").is_file());
    assert!(!tmp.path().join("ignored").exists());
}

#[test]
fn configuration_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let mut v = small_config(&out);
    v["eps"] = json!(1.5);
    let cfg = write_config(tmp.path(), &v);
    assert_eq!(
        run(&["simulate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let mut v = small_config(&out);
    v["unknown_key"] = json!(1);
    let cfg = write_config(tmp.path(), &v);
    assert_eq!(
        run(&["simulate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let cfg = write_config(tmp.path(), &small_config(&out));
    assert_eq!(
        run(&["tdpt", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", "--paper-figure", "7"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--config", "/nonexistent/config.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn missing_priors_on_unidentifiable_size_exit_with_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut v = small_config(&out);
    v.as_object_mut().unwrap().remove("volume_prior");
    v.as_object_mut().unwrap().remove("contrast_prior");
    v["noise_percent"] = json!(20.0);
    let cfg = write_config(tmp.path(), &v);
    let o = run(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
