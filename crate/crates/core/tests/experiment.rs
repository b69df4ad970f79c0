use std::fs;

use cascade_lab::experiment::{preset, run, ExperimentReport, Status, SweepBlock, SweepMode};

#[test]
fn presets_cover_every_claimed_criterion() {
    for name in ["cascade-lemmas", "profiles", "clm", "axisym", "lemmas"] {
        let cfg = preset(name).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run(&cfg, dir.path(), 1).unwrap();
        for c in cfg.experiment.criteria() {
            assert!(report.verdicts.iter().any(|v| v.criterion == *c), "{name} lacks criterion {c}");
        }
        assert!(report.verdicts.iter().all(|v| v.tolerance.is_finite()));
        for a in &report.artifacts {
            assert!(dir.path().join(a).is_file(), "{name}: missing {a}");
        }
        let reloaded = ExperimentReport::load(dir.path()).unwrap();
        assert_eq!(reloaded.verdicts, report.verdicts);
        assert_eq!(report.status, Status::Pass, "{name}: {}", report.summary());
    }
}

#[test]
fn fixed_seed_gives_byte_identical_csv() {
    let cfg = preset("cascade-lemmas").unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run(&cfg, a.path(), 1).unwrap();
    run(&cfg, b.path(), 1).unwrap();
    for name in ra.artifacts.iter().filter(|n| n.ends_with(".csv")) {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }

    let mut other = cfg.clone();
    other.seed += 1;
    let c = tempfile::tempdir().unwrap();
    run(&other, c.path(), 1).unwrap();
    assert_ne!(fs::read(a.path().join("criterion_02.csv")).unwrap(), fs::read(c.path().join("criterion_02.csv")).unwrap());
}

#[test]
fn single_point_sweep_matches_a_plain_run() {
    let mut cfg = preset("cascade").unwrap();
    cfg.cascade.levels = 6;
    let plain = tempfile::tempdir().unwrap();
    run(&cfg, plain.path(), 1).unwrap();

    let mut swept = cfg.clone();
    swept.sweep = Some(SweepBlock {
        mode: SweepMode::Listed,
        parameters: [("cascade.levels".to_string(), vec![toml::Value::Integer(6)])].into_iter().collect(),
    });
    let dir = tempfile::tempdir().unwrap();
    let report = run(&swept, dir.path(), 2).unwrap();
    assert_eq!(report.runs.len(), 1);
    assert_eq!(
        fs::read(plain.path().join("cascade.csv")).unwrap(),
        fs::read(dir.path().join("run_000/cascade.csv")).unwrap()
    );
}

#[test]
fn failed_sweep_point_fails_the_aggregate() {
    let mut cfg = preset("cascade").unwrap();
    cfg.sweep = Some(SweepBlock {
        mode: SweepMode::Listed,
        parameters: [("tolerances.cascade_rel".to_string(), vec![toml::Value::Float(1e-6), toml::Value::Float(1e-30)])]
            .into_iter()
            .collect(),
    });
    let dir = tempfile::tempdir().unwrap();
    let report = run(&cfg, dir.path(), 2).unwrap();
    assert_eq!(report.exit_code(), 1);
    assert_eq!(report.runs.iter().filter(|r| r.status == Status::Pass).count(), 1);
}
