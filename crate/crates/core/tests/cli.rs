//! End-to-end runs of the `pointspec` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pointspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pointspec")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(p: &Path) -> usize {
    fs::read_to_string(p).unwrap().lines().count()
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let out = pointspec(&["simulate", "--model", "thomas:ms", "--n", "200", "--seed", "4", "--out", path(&pts)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let window = dir.path().join("pts.window.csv");
    assert!(window.exists());

    let spec = dir.path().join("spec.csv");
    let png = dir.path().join("spec.png");
    let out = pointspec(&[
        "estimate", "--in", path(&pts), "--window-file", path(&window), "--rot-avg", "0.012", "--out", path(&spec), "--png", path(&png),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // 101^2 nodes minus the origin, plus a header
    assert_eq!(lines(&spec), 101 * 101);
    assert_eq!(lines(&dir.path().join("spec_radial.csv")), 101);
    assert!(fs::read_to_string(dir.path().join("spec.json")).unwrap().contains("debiased"));
    assert_eq!(&fs::read(&png).unwrap()[1..4], b"PNG");
}

#[test]
fn simulation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let p = dir.path().join(name);
        let out = pointspec(&["simulate", "--model", "matern:r5", "--window", "0,100,0,100", "--seed", seed, "--out", path(&p)]);
        assert!(out.status.success());
        fs::read(p).unwrap()
    };
    let (a, b, c) = (run("a.csv", "9"), run("b.csv", "9"), run("c.csv", "10"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn estimator_options() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    assert!(pointspec(&["simulate", "--model", "poisson", "--lambda", "0.02", "--window", "-50,50,-50,50", "--seed", "1", "--out", path(&pts)])
        .status
        .success());
    for extra in [
        vec!["--estimator", "periodogram", "--grid", "fourier:8"],
        vec!["--estimator", "multitaper", "--mt-P", "2", "--grid", "regular:0.01,0.1"],
        vec!["--estimator", "subtracted", "--taper", "sine:1,2", "--grid", "regular:0.01,0.1"],
        vec!["--smooth-m", "3", "--grid", "regular:0.01,0.1"],
        vec!["--auto-bandwidth", "--grid", "regular:0.01,0.1"],
    ] {
        let out_file = dir.path().join("e.csv");
        let mut args = vec!["estimate", "--in", path(&pts), "--window", "-50,50,-50,50", "--out", path(&out_file)];
        args.extend(extra.iter().copied());
        let out = pointspec(&args);
        assert!(out.status.success(), "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(lines(&out_file) > 1);
    }
}

#[test]
fn isotropic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    assert!(pointspec(&["simulate", "--model", "thomas:fl", "--n", "100", "--seed", "2", "--out", path(&pts)]).status.success());
    let window = dir.path().join("pts.window.csv");
    for extra in [vec![], vec!["--taper", "hermite:1"], vec!["--diggle"]] {
        let out_file = dir.path().join("iso.csv");
        let mut args = vec!["isotropic", "--in", path(&pts), "--window-file", path(&window), "--t", "0.01,0.01,20", "--out", path(&out_file)];
        args.extend(extra.iter().copied());
        let out = pointspec(&args);
        assert!(out.status.success(), "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(lines(&out_file), 21);
    }
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    fs::write(
        &cfg,
        "models = [\"poisson\", \"ms\"]\nsample_sizes = [50]\nreplications = 10\n\
         estimators = [\"periodogram\", \"debiased\"]\ngrid_extent = 0.06\nintegration_extent = 0.06\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = pointspec(&["bench", "--config", path(&cfg), "--reps", "4", "--out", path(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&out_dir.join("summary.csv")), 5);
    assert_eq!(lines(&out_dir.join("debias_fractions.csv")), 3);
}

#[test]
fn errors_use_documented_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "x1,x2\n").unwrap();
    let out = pointspec(&["estimate", "--in", path(&empty), "--window", "0,1,0,1", "--out", path(&dir.path().join("o.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no points"));

    assert_eq!(pointspec(&["estimate", "--bogus"]).status.code(), Some(2));
    assert_eq!(pointspec(&["simulate", "--model", "nope", "--n", "5", "--out", "x.csv"]).status.code(), Some(2));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "models = [\"poisson\"]\nsample_sizes = [10]\nreplications = 1\nestimators = [\"debiased\"]\n").unwrap();
    assert_eq!(pointspec(&["bench", "--config", path(&cfg)]).status.code(), Some(2));
}
