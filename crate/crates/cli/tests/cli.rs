use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("CASCADE_LAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn cascade_preset_passes_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = cli(&["cascade", "--preset", "cascade", "--out", out.to_str().unwrap(), "--seed", "11"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("cascade.csv").is_file());
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"seed\": 11"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("closed-form agreement"));
}

#[test]
fn default_output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cascade-lab"))
        .arg("cascade")
        .current_dir(tmp.path())
        .env("CASCADE_LAB_OUT", tmp.path().join("root"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(tmp.path().join("root/cascade/report.json").is_file());

    let o = cli(&["cascade"], tmp.path());
    assert_eq!(code(&o), 0);
    assert!(tmp.path().join("runs/cascade/report.json").is_file());
}

#[test]
fn configuration_errors_exit_64() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_key = write(tmp.path(), "bad.toml", "experiment = \"cascade\"\n[cascade]\nratoi = 1.1\n");
    let bad_value = write(tmp.path(), "neg.toml", "experiment = \"cascade\"\n[cascade]\nratio = 0.9\n");
    for args in [
        vec!["cascade", "--config", bad_key.as_str()],
        vec!["cascade", "--config", bad_value.as_str()],
        vec!["cascade", "--preset", "nonsense"],
        vec!["axisym", "--preset", "cascade"],
        vec!["cascade", "--frobnicate"],
        vec!["sweep", "--preset", "cascade"],
        vec!["report", "missing-dir"],
    ] {
        let o = cli(&args, tmp.path());
        assert_eq!(code(&o), 64, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn failed_verdict_exits_1_and_report_replays_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "strict.toml", "experiment = \"cascade\"\n[tolerances]\ncascade_rel = 1e-30\n");
    let out = tmp.path().join("strict");
    let o = cli(&["cascade", "--config", &cfg, "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 1);
    let o = cli(&["report", out.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn solver_aborts_pass_their_codes_through() {
    let tmp = tempfile::tempdir().unwrap();
    let coarse = write(tmp.path(), "coarse.toml", "experiment = \"solve1d\"\n[solver.config]\nlocal_h = 0.05\n");
    let o = cli(&["solve1d", "--config", &coarse, "--out", "coarse"], tmp.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));

    let drift = write(
        tmp.path(),
        "drift.toml",
        "experiment = \"solve1d\"\n[solver]\nbumps = 0\nwindow = 3.0\n[solver.config]\nlocal_h = 0.002\n",
    );
    let o = cli(&["solve1d", "--config", &drift, "--out", "drift"], tmp.path());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn sweeps_run_each_point_and_aggregate() {
    let tmp = tempfile::tempdir().unwrap();
    let listed = write(
        tmp.path(),
        "listed.toml",
        "experiment = \"cascade\"\n[sweep]\nmode = \"listed\"\n[sweep.parameters]\n\"cascade.ratio\" = [1.05, 1.1]\n\"cascade.levels\" = [4, 6]\n",
    );
    let o = cli(&["sweep", "--config", &listed, "--out", "listed", "--jobs", "2"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("listed/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(tmp.path().join("listed/run_001/cascade.csv").is_file());

    let empty = write(tmp.path(), "empty.toml", "experiment = \"cascade\"\n[sweep.parameters]\n\"cascade.ratio\" = []\n");
    let o = cli(&["sweep", "--config", &empty, "--out", "empty"], tmp.path());
    assert_eq!(code(&o), 0);
}
